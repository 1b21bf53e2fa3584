//! Optical phase produced by an acoustic pressure line integral for common laser lines.

use sfd::sim::{pressure_to_phase, AcoustoOpticConstants};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for wavelength in [532e-9, 633e-9, 1064e-9] {
        let optics = AcoustoOpticConstants::air(wavelength);
        optics.validate()?;
        println!(
            "{:>5.0} nm: {:.4e} rad per Pa m; a 1 Pa wave over 0.1 m gives {:.3e} rad",
            wavelength * 1e9,
            optics.coefficient(),
            pressure_to_phase(0.1, &optics)
        );
    }
    Ok(())
}
