//! Scaled-down runs of every cross-check suite.

use std::error::Error;

use qnib::verify::{run_suite, Suite, VerifyConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cfg = VerifyConfig {
        duality_cases: 100,
        oracle_cases: 10,
        equivalence_cases: 50,
        chsh_oracle_cases: 10,
        ..VerifyConfig::new(7)
    };
    for suite in Suite::ALL {
        let report = run_suite(suite, &cfg, 2)?;
        println!("{report}");
        if !report.ok() {
            return Err(format!("{suite} failed").into());
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
