//! Prints the exact graph coefficients and checks invariance symbolically.

use dispersion_lab::center_manifold::{build_even_table, build_odd_table, invariance_residual, CMCoeffTable};

fn main() {
    for table in [build_even_table(10), build_odd_table(9)] {
        println!("{:?} table, {} entries", table.parity, table.len());
        let mut last = usize::MAX;
        for (k, p, c) in table.entries() {
            if k != last {
                print!("\n  h_{k:<2} =");
                last = k;
            }
            print!(" {c:+} eta^{} a_{p} nu^{}", (k - p) / 2, CMCoeffTable::nu_exponent(k, p));
        }
        println!();
        let clean = (0..=table.n).filter(|k| k % 2 == table.n % 2).all(|k| invariance_residual(&table, k).is_zero());
        println!("  invariance residual identically zero: {clean}\n");
    }
}
