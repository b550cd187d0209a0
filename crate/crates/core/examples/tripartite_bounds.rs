//! Correlation tensors of GHZ and W states, the singular-value bounds on
//! the Mermin and Svetlichny maxima, and see-saw values against them.

use std::error::Error;

use qnib::bell::{correlation_tensor, mermin_svetlichny_bounds, seesaw_max, BellKind};
use qnib::channels::{apply_to_party, QubitChannel};
use qnib::states::{make_state, StateSpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for spec in [StateSpec::ghz_symmetric(), StateSpec::w_symmetric()] {
        let rho = make_state(&spec)?;
        let t = correlation_tensor(&rho)?;
        let (m, s) = mermin_svetlichny_bounds(&t);
        println!("{spec}");
        println!("  singular values {:?}", t.singular_values());
        println!("  Mermin ≤ {m:.6}, Svetlichny ≤ {s:.6}");
        let sv = seesaw_max(&rho, BellKind::Svetlichny, 16, 3)?;
        println!("  see-saw Svetlichny {:.6}", sv.value);

        let noisy = apply_to_party(&QubitChannel::isotropic(0.8), &rho, &[0])?;
        let (_, s) = mermin_svetlichny_bounds(&correlation_tensor(&noisy)?);
        println!("  with η=0.8 on A: Svetlichny ≤ {s:.6}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
