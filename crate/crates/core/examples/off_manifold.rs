//! Random states off the manifold: |B_k| e^{nu t} nu^{k/2} stays bounded.

use dispersion_lab::harness::experiments::off_manifold_monitor;

fn main() -> dispersion_lab::Result<()> {
    for nu in [0.2, 0.5] {
        for horizon in [10.0, 100.0, 400.0] {
            let rows = off_manifold_monitor(nu, 6, 20, 7, horizon, 401)?;
            let sup = rows.iter().map(|r| r.sup).fold(0.0, f64::max);
            let drift = rows.iter().map(|r| r.late_drift).fold(0.0, f64::max);
            let rising = rows.iter().filter(|r| r.spearman > 0.0).count();
            println!("nu {nu}, t <= {horizon:>3}/nu: sup q = {sup:7.3}, late drift {drift:.3}, rising series {rising}/{}", rows.len());
        }
    }
    Ok(())
}
