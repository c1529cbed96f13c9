//! Projects the exact solution, in scaling variables, onto the Hermite basis.

use std::sync::Arc;

use dispersion_lab::decomposition::true_solution_scaling;
use dispersion_lab::hermite::{project_pair, HermiteBasis};
use dispersion_lab::initial_data::InitialData;
use dispersion_lab::quadrature::WeightedFunction;

fn main() -> dispersion_lab::Result<()> {
    let (nu, n, m) = (0.5, 6, 8);
    let basis = HermiteBasis::for_nu(nu, n);
    let grid = Arc::new(basis.grid(m, 1e-14)?);
    let data = InitialData::gaussian(1.0, 1.0);
    for t in [10.0, 100.0, 1000.0] {
        let (w, v) = true_solution_scaling(nu, &data, t, &grid.nodes)?;
        let w = WeightedFunction::new(grid.clone(), w, m)?;
        let v = WeightedFunction::new(grid.clone(), v, m)?;
        let c = project_pair(&basis, &w, &v, n, (1.0 + t).ln(), 1e-10)?;
        let fmt = |x: &[f64]| x.iter().map(|a| format!("{a:10.3e}")).collect::<Vec<_>>().join(" ");
        println!("t = {t:6}\n  alpha: {}\n  beta:  {}", fmt(&c.alpha), fmt(&c.beta));
    }
    Ok(())
}
