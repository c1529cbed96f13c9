//! On-manifold decay of the Hermite amplitudes against the predicted table.

use dispersion_lab::harness::experiments::{on_manifold_slopes, rational_f64};

fn main() -> dispersion_lab::Result<()> {
    let nu = 0.5;
    for window in [(3.0, 9.0), (8.0, 16.0)] {
        println!("tau in {window:?}");
        for row in on_manifold_slopes(nu, &[1.0; 9], window, 121)? {
            println!(
                "  a_{}: fitted {:8.4}, predicted {:6.3}",
                row.k,
                row.fit.slope,
                -rational_f64(row.prediction.tau_exponent)
            );
        }
    }
    Ok(())
}
