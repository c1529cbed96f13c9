//! Evolves a Gaussian mode by mode and checks a few modes against RK4.

use dispersion_lab::harness::oracle::{default_step, rk4_oracle};
use dispersion_lab::initial_data::InitialData;
use dispersion_lab::propagator::{eigenvalues, evolve, ModeState};

fn main() -> dispersion_lab::Result<()> {
    let nu = 0.5;
    let data = InitialData::gaussian(1.0, 1.0);
    let ks: Vec<f64> = (-8..=8).map(|i| i as f64 * 0.125).collect();
    let state = evolve(&ModeState::from_initial(&data, ks.clone()), 10.0, nu)?;

    println!("{:>7} {:>12} {:>12} {:>10}", "k", "|w_hat|", "Re lambda+", "rk4 diff");
    for (i, &k) in ks.iter().enumerate() {
        let u0 = [data.w_hat(k), data.v_hat(k)];
        let r = rk4_oracle(k, nu, u0, 10.0, default_step(k, nu))?;
        let diff = (r[0] - state.w[i]).norm() + (r[1] - state.v[i]).norm();
        println!("{k:7.3} {:12.4e} {:12.5} {diff:10.2e}", state.w[i].norm(), eigenvalues(k, nu).0.re);
    }
    Ok(())
}
