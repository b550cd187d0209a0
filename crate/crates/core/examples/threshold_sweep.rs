//! A GHZ threshold sweep written as CSV, and the same sweep loaded from a
//! JSON config.

use std::error::Error;

use qnib::experiments::{run_sweep, write_sweep_csv, GridRange, SweepConfig, SweepFamily};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cfg = SweepConfig::new(SweepFamily::Ghz, GridRange::new(0.4, 0.7, 7), None);
    let rows = run_sweep(&cfg, 2)?;
    write_sweep_csv(&rows, std::io::stdout().lock())?;

    let json = r#"{"family": "W",
                   "param1": {"start": 0.2, "stop": 0.6, "steps": 3},
                   "param2": {"start": 0.2, "stop": 0.6, "steps": 3}}"#;
    let cfg: SweepConfig = serde_json::from_str(json)?;
    let rows = run_sweep(&cfg, 2)?;
    println!(
        "W sweep: {} rows, first η_S = {:.6}",
        rows.len(),
        rows[0].report.eta_s
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
