//! Splits w_hat(k, t) into the Taylor part, its remainder, the fast branch
//! and the high modes, and checks they add back up.

use dispersion_lab::decomposition::{decompose, offset_grid, recombination_defect, wait_time};
use dispersion_lab::initial_data::InitialData;

fn main() -> dispersion_lab::Result<()> {
    let (nu, n) = (0.5, 4);
    let data = InitialData::gaussian(1.0, 1.0);
    let t = wait_time(nu);
    let rows = decompose(nu, n, t, &data, &offset_grid(nu, 1.0, 41))?;
    println!("t = {t:.3}");
    println!("{:>8} {:>11} {:>11} {:>11} {:>11}", "k", "low", "residual", "fast", "high");
    for r in rows.iter().step_by(4) {
        println!(
            "{:8.4} {:11.3e} {:11.3e} {:11.3e} {:11.3e}",
            r.k,
            r.low_n.norm(),
            r.residual.norm(),
            r.minus_part.norm(),
            r.high.norm()
        );
    }
    println!("recombination defect {:.2e}", recombination_defect(&rows));
    Ok(())
}
