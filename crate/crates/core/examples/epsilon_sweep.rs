// Sweep the sample permittivity and write the table as CSV to stdout.

use std::error::Error;

use qsnom::harness::output::sweep_csv;
use qsnom::sweep::{OutputColumn, Spacing};
use qsnom::{run_sweep, ModelParams, SweepAxis, SweepSpec, SweepValues};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let fixed = ModelParams {
        r_nm: 0.5,
        kappa: 1.0,
        ..ModelParams::default()
    };
    let values = SweepValues::Range {
        start: 1.0,
        stop: 100.0,
        count: 5,
        spacing: Spacing::Log,
    };
    let table = run_sweep(&SweepSpec::new(SweepAxis::EpsilonD, values, fixed))?;
    print!("{}", sweep_csv(&table));

    let omega_s: Vec<f64> = table
        .column(OutputColumn::OmegaS)
        .into_iter()
        .flatten()
        .collect();
    assert_eq!(omega_s.len(), 5);
    assert!(omega_s.windows(2).all(|w| w[1] < w[0]));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
