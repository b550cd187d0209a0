//! Incompatibility- and nonlocality-breaking qubit channels.
//!
//! Qubit channels in Pauli-transfer form, unsharp observables and their
//! joint measurability, CHSH/Mermin/Svetlichny bounds from correlation
//! tensors, a see-saw lower-bound oracle, threshold formulas for common
//! three-qubit families and the sweeps built on them.

pub mod bell;
pub mod channels;
pub mod cli;
pub mod compat;
pub mod experiments;
pub mod qmat;
pub mod states;
pub mod thresholds;
pub mod verify;

pub use bell::{BellKind, CorrelationTensor, MeasurementSetting};
pub use channels::{NoiseVector, QubitChannel};
pub use compat::UnsharpObservable;
pub use qmat::{CMat, C64};
pub use states::{DensityMatrix, StateSpec};
pub use thresholds::ThresholdReport;
