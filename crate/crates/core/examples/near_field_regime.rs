// Build the full Hamiltonians for a few tip heights and report which
// points leave the near-field or perturbative regime.

use std::error::Error;

use qsnom::{build_hamiltonians, DielectricSample, ModelConfig, TipDipole};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let sample = DielectricSample::new(11.7)?;
    let cfg = ModelConfig {
        kappa: 0.5,
        ..ModelConfig::default()
    };
    for r in [0.2, 1.0, 10.0, 100.0] {
        let tip = TipDipole::new(1.5, r)?;
        let pair = build_hamiltonians(&tip, &sample, &cfg)?;
        println!(
            "R = {r:>6} nm: g = {:.3e} eV, dim = {}",
            pair.g,
            pair.h0.dim()
        );
        for w in &pair.warnings {
            println!("    {w}");
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
