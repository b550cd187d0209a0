//! Mermin and Svetlichny breaking thresholds for the GHZ, W, maximal-slice
//! and mixed-GHZ families, and how they scale with the number of noised
//! parties.

use std::error::Error;

use qnib::states::{make_state, sample_acin_state, StateSpec};
use qnib::thresholds::{analytic_threshold, analytic_threshold_n, numeric_threshold};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let specs = [
        StateSpec::ghz_symmetric(),
        StateSpec::w_symmetric(),
        StateSpec::Ms {
            alpha: 0.6,
            beta: 0.8,
        },
        StateSpec::MixedGhz { p: 0.9 },
    ];
    for spec in &specs {
        let r = analytic_threshold(spec)?;
        println!(
            "{spec}: λ={:.6} η_M={:.6} η_S={:.6} always_breaks={}",
            r.lambda_max_unit,
            r.eta_m,
            r.eta_s,
            r.always_breaks()
        );
    }
    for n in 1..=3 {
        let r = analytic_threshold_n(&StateSpec::ghz_symmetric(), n)?;
        println!("GHZ with {n} noised parties: η_S={:.6}", r.eta_s);
    }
    let acin = sample_acin_state(9);
    let r = numeric_threshold(&make_state(&acin)?, 1)?;
    println!("{acin}: numeric η_M={:.6} η_S={:.6}", r.eta_m, r.eta_s);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
