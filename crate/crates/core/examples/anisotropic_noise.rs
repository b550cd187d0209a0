//! Singular values of GHZ and W tensors under anisotropic unital noise on
//! party B, closed form against numerics.

use std::error::Error;

use qnib::channels::NoiseVector;
use qnib::states::StateSpec;
use qnib::thresholds::anisotropic_singular_values;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let noises = [[0.9, 0.3, 0.2], [0.0, 0.0, 1.0], [0.5, 0.5, 0.5]];
    for spec in [StateSpec::ghz_symmetric(), StateSpec::w_symmetric()] {
        for eta in noises {
            let sv = anisotropic_singular_values(&spec, &NoiseVector::new(eta)?)?;
            println!(
                "{} η={eta:?}: closed form {:?}, numeric {:?}",
                spec.family_name(),
                sv.closed_form,
                sv.numeric
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
