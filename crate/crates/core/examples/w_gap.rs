//! Isotropic noise on one party of the symmetric W state: the range where
//! Svetlichny nonlocality is broken but CHSH nonlocality is not.

use std::error::Error;

use qnib::experiments::{run_w_gap_scan, w_gap_endpoints};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for row in run_w_gap_scan()?.iter().step_by(5) {
        println!(
            "η={:.3} λ₁={:.6} S-NBC={} CHSH-NBC={} gap={}",
            row.eta, row.lambda1, row.s_nbc, row.chsh_nbc, row.gap
        );
    }
    let (lo, hi) = w_gap_endpoints()?;
    println!("gap interval ({lo:.6}, {hi:.6})");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
