// Measure a scattered frequency, then recover the sample permittivity.

use std::error::Error;

use qsnom::{forward, invert_permittivity, InversionProblem};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let (r, omega, kappa) = (0.5, 1.0, 1.0);
    for eps in [2.0, 4.0, 11.7, 80.0] {
        let observed = forward(eps, r, omega, kappa)?.omega_s;
        let inv = invert_permittivity(&InversionProblem::new(observed, r, omega, kappa))?;
        println!(
            "eps = {eps:>5}: omega_s = {observed:.12} -> recovered {:.10} in {} iterations",
            inv.epsilon_d, inv.iterations
        );
        assert!((inv.epsilon_d - eps).abs() / eps < 1e-6);
    }

    let problem = InversionProblem::new(1.2, r, omega, kappa);
    let (lo, hi) = problem.attainable_range()?;
    match invert_permittivity(&problem) {
        Err(e) => println!("omega_s = 1.2 is outside [{lo:.6}, {hi:.6}]: {e}"),
        Ok(_) => return Err("expected an out-of-bracket error".into()),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
