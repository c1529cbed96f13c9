//! Low modes diffuse with nu + 1/nu; the |k| = 1 mode does not.

use dispersion_lab::harness::experiments::{control_rate, fit_diffusivity};
use dispersion_lab::initial_data::InitialData;
use dispersion_lab::enhanced_diffusivity;

fn main() -> dispersion_lab::Result<()> {
    let data = InitialData::gaussian(1.0, 1.0);
    for nu in [0.1, 0.2, 0.5, 1.0, 2.0] {
        let t_end = 100.0 / nu;
        let d = fit_diffusivity(1e-3, nu, &data, t_end)?;
        let c = control_rate(1.0, nu, &data, t_end)?;
        println!(
            "nu = {nu:4}: fitted D = {d:9.5} (nu_T = {:9.5});  |k|=1 rate {:8.5} vs Re lambda+ {:8.5}, nu_T k^2 would give {:8.3}",
            enhanced_diffusivity(nu),
            c.rate,
            c.re_lambda_plus,
            c.enhanced_rate
        );
    }
    Ok(())
}
