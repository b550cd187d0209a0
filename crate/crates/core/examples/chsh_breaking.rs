//! CHSH maxima of two-qubit states and CHSH nonlocality breaking of
//! unital channels, compared with pairwise incompatibility breaking.

use std::error::Error;

use qnib::bell::{chsh_max, is_chsh_nbc_unital, seesaw_max, BellKind};
use qnib::channels::QubitChannel;
use qnib::compat::is_2ibc_unital;
use qnib::states::{phi_plus, singlet};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    println!("CHSH max on Φ⁺: {:.12}", chsh_max(&phi_plus())?);
    let found = seesaw_max(&singlet(), BellKind::Chsh, 8, 1)?;
    println!("see-saw CHSH on singlet: {:.12}", found.value);

    for eta in [[0.6, 0.6, 0.6], [0.8, 0.5, 0.4], [0.75, 0.7, 0.5]] {
        let ch = QubitChannel::unital(eta);
        println!(
            "{ch}: CHSH-NBC={} 2-IBC(conjugate)={}",
            is_chsh_nbc_unital(&ch)?,
            is_2ibc_unital(&ch.conjugate()?)?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
