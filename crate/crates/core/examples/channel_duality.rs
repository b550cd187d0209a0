//! Pauli-transfer channels: CP checks, the Schrödinger and Heisenberg
//! pictures, and local action on one party of a Bell pair.

use std::error::Error;

use qnib::channels::{apply_heisenberg, apply_schrodinger, apply_to_party, is_cp, QubitChannel};
use qnib::compat::UnsharpObservable;
use qnib::states::{phi_plus, DensityMatrix};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dephasing: QubitChannel = "diag:0.6,0.6,1".parse()?;
    let damping = QubitChannel::new([0.0, 0.0, 0.3], [0.7f64.sqrt(), 0.7f64.sqrt(), 0.7]);
    let bad = QubitChannel::unital([1.0, 1.0, -1.0]);
    for ch in [&dephasing, &damping, &bad] {
        let check = is_cp(ch);
        println!(
            "{ch}: cp={} {:?}",
            check.cp,
            check.witness.map(|w| w.to_string())
        );
    }

    let rho = DensityMatrix::from_bloch([0.3, -0.2, 0.8])?;
    let obs = UnsharpObservable::new(0.1, 0.8, [0.0, 0.6, 0.8])?;
    let lhs = apply_schrodinger(&damping, &rho)?.expectation(&obs.operator());
    let rhs = rho.expectation(&apply_heisenberg(&damping, &obs).operator());
    println!("Tr[E(ρ)A] = {lhs:.15}");
    println!("Tr[ρE*(A)] = {rhs:.15}");

    let noisy = apply_to_party(&QubitChannel::isotropic(0.5), &phi_plus(), &[0])?;
    println!("purity of (E⊗I)Φ⁺ at η=0.5: {:.6}", noisy.purity());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
