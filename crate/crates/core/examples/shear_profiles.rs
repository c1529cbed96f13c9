//! Effective diffusivity of a few shear profiles; the model's cos y shear
//! gives nu + 1/nu.

use dispersion_lab::shear::{effective_diffusivity, ShearSpectrum};
use dispersion_lab::C64;

fn main() -> dispersion_lab::Result<()> {
    let nu = 0.2;
    let profiles = [
        ("sqrt(2) cos y", vec![(1, C64::new(0.5, 0.0))], 2f64.sqrt()),
        ("cos y + cos 2y", vec![(1, C64::new(0.5, 0.0)), (2, C64::new(0.5, 0.0))], 1.0),
        ("sin 3y", vec![(3, C64::new(0.0, -0.5))], 1.0),
    ];
    for (name, modes, amp) in profiles {
        let spec = ShearSpectrum::real_profile(amp, &modes)?;
        println!("{name:>15}: D_eff = {:.4}", effective_diffusivity(nu, &spec)?);
    }
    Ok(())
}
