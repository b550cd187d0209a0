//! Compatibility of unsharp qubit observables and the white-noise and
//! pairwise incompatibility-breaking thresholds.

use std::error::Error;

use num_rational::Ratio;
use qnib::channels::QubitChannel;
use qnib::compat::{
    biased_ibc_threshold, incompatibility_grid_search, is_2ibc_unital, joint_observable,
    jointly_measurable, white_noise_ibc_threshold, UnsharpObservable,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for eta in [0.70, 0.705, 0.72] {
        let a = UnsharpObservable::unbiased(eta, [0.0, 0.0, 1.0])?;
        let b = UnsharpObservable::unbiased(eta, [1.0, 0.0, 0.0])?;
        println!(
            "orthogonal pair at η={eta}: compatible={}",
            jointly_measurable(&a, &b)
        );
        if let Some(g) = joint_observable(&a, &b) {
            println!("  joint effect G(+,+) trace = {:.4}", g[0].trace().re);
        }
    }

    println!(
        "white-noise 2-IBC (d=2): {}",
        white_noise_ibc_threshold(2, 2)
    );
    println!(
        "white-noise 3-IBC (d=2): {}",
        white_noise_ibc_threshold(2, 3)
    );
    println!(
        "0.66 breaks pairs: {}",
        Ratio::new(66u64, 100) <= white_noise_ibc_threshold(2, 2)
    );

    for x in [0.0, 0.2, 0.4] {
        println!("biased threshold at x={x}: {:.6}", biased_ibc_threshold(x));
    }

    let ch = QubitChannel::unital([0.8, 0.5, 0.3]);
    let grid = incompatibility_grid_search(&ch, 60);
    println!(
        "{ch}: 2-IBC={} grid max functional={:.6}",
        is_2ibc_unital(&ch)?,
        grid.functional
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
