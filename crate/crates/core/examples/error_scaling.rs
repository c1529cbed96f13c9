//! Weighted distance between the exact solution and the Hermite
//! approximation, against the predicted tau-slope -N/4.

use dispersion_lab::decomposition::error_scaling_experiment;
use dispersion_lab::initial_data::InitialData;

fn main() -> dispersion_lab::Result<()> {
    let data = InitialData::gaussian(1.0, 1.0);
    for (n, m) in [(2, 3), (4, 5)] {
        let r = error_scaling_experiment(0.5, n, m, &data, 4.0, 9)?;
        println!("N = {n}, m = {m}: slope {:?}, target {}", r.slope, r.target);
        for (tau, e) in r.taus.iter().zip(&r.errors) {
            println!("  tau {tau:6.3}  error {e:.4e}");
        }
    }
    Ok(())
}
