// Trace the two dipoles out of the full `tip x image x photon` pure state
// and compare the photon register with the single-photon shortcut.

use std::error::Error;

use qsnom::closed_form::reduced_photon_state;
use qsnom::{paper_beta, InitialCoefficients};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let a = InitialCoefficients::new([0.5, 0.5, 0.5, 0.5])?;
    let beta = paper_beta(&a, 1.0, 0.5, 1.0, 0.3)?;
    let photon = reduced_photon_state(&beta, 3)?;

    println!("beta' = {:?}", beta.beta);
    println!("Fock amplitudes |0>..|3> = {:?}", photon.fock_amplitudes);
    println!(
        "trace = {}, purity = {}",
        photon.weight,
        photon.rho.purity()
    );
    println!("unnormalized |1> amplitude = {}", photon.paper_amplitude);

    assert!((photon.weight - 1.0).abs() < 1e-12);
    assert!((photon.rho.get(1, 1).re - 1.0).abs() < 1e-12);
    assert!((photon.rho.purity() - 1.0).abs() < 1e-12);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
