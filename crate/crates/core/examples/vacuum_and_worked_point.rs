// Closed-form scattered photon at two reference points: a vacuum sample,
// where nothing changes, and the eps = 3, R = 0.5 nm, Omega = 1 eV,
// kappa = 1 point where every number is a short fraction.

use std::error::Error;

use qsnom::{scattered_photon, DielectricSample, InitialCoefficients};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let ground = InitialCoefficients::ground();

    let vacuum = DielectricSample::vacuum();
    let r = scattered_photon(&ground, 0.5, vacuum.alpha(), 1.0, 1.0)?;
    println!(
        "vacuum:  alpha = {}, dE = {}, omega_s = {}, amplitude = {}",
        vacuum.alpha(),
        r.delta_e,
        r.omega_s,
        r.amplitude
    );
    assert_eq!(r.delta_e, 0.0);
    assert_eq!(r.omega_s, 1.0);

    let sample = DielectricSample::new(3.0)?;
    let r = scattered_photon(&ground, 0.5, sample.alpha(), 1.0, 1.0)?;
    println!(
        "eps = 3: alpha = {}, dE = {:.15}, omega_s = {:.15}, beta' = {:?}, amplitude = {:.15}",
        sample.alpha(),
        r.delta_e,
        r.omega_s,
        r.beta.beta,
        r.amplitude
    );
    assert!((r.delta_e + 0.2).abs() < 1e-12);
    assert!((r.omega_s - 0.8).abs() < 1e-12);
    assert!((r.amplitude - 0.92).abs() < 1e-12);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
