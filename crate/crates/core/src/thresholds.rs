//! Closed-form Mermin/Svetlichny nonlocality-breaking thresholds for the
//! GHZ, W, maximal-slice and mixed-GHZ families.
//!
//! With isotropic unital noise `η` on `n` parties every entry of the
//! correlation tensor picks up `ηⁿ`, so with `λ` the largest singular value
//! of the clean flattening the channel breaks Mermin nonlocality for
//! `η ≤ (1/(√2λ))^{1/n}` and Svetlichny nonlocality for `η ≤ (1/λ)^{1/n}`.
//!
//! Closed forms follow the fixed flattening `M_{j,(ik)}`: party B (index 1)
//! labels the rows. For the W state this singles out `β`, the `|010⟩`
//! amplitude.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use thiserror::Error;

use crate::bell::{correlation_tensor, BellError};
use crate::channels::{apply_to_party, ChannelError, NoiseVector};
use crate::states::{make_state, DensityMatrix, StateError, StateSpec};

/// Agreement required between closed-form and numeric singular values.
pub const CLOSED_FORM_TOL: f64 = 1e-10;

/// Party that carries the noise in [`anisotropic_singular_values`].
pub const ANISOTROPIC_PARTY: usize = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThresholdError {
    #[error("no closed form for the {0} family; use the numeric path")]
    Unsupported(&'static str),

    #[error("number of noised parties must be 1..=3, got {0}")]
    BadPartyCount(usize),

    #[error("closed form {closed:?} disagrees with numeric {numeric:?}")]
    Mismatch { closed: [f64; 3], numeric: [f64; 3] },

    #[error(transparent)]
    State(#[from] StateError),

    #[error(transparent)]
    Bell(#[from] BellError),

    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// The `k`-maximized W-family envelope: `λ = √(1 + 2k²)` with `k = α² + γ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WEnvelope {
    pub k: f64,
    pub lambda: f64,
    pub eta_m: f64,
    pub eta_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdReport {
    /// `None` when computed from a bare density matrix.
    pub spec: Option<StateSpec>,
    pub n_noised: usize,
    pub eta_m: f64,
    pub eta_s: f64,
    /// Pairwise incompatibility-breaking reference `1/√2`.
    pub eta_2ibc: f64,
    /// Largest singular value of the clean state's flattened tensor.
    pub lambda_max_unit: f64,
    pub w_envelope: Option<WEnvelope>,
}

impl ThresholdReport {
    fn from_lambda(spec: Option<StateSpec>, lambda: f64, n_noised: usize) -> Self {
        let root = 1.0 / n_noised as f64;
        Self {
            spec,
            n_noised,
            eta_m: (1.0 / (SQRT_2 * lambda)).powf(root),
            eta_s: (1.0 / lambda).powf(root),
            eta_2ibc: FRAC_1_SQRT_2,
            lambda_max_unit: lambda,
            w_envelope: None,
        }
    }

    /// Every physical `η ≤ 1` already breaks both Mermin and Svetlichny
    /// nonlocality of this state.
    pub fn always_breaks(&self) -> bool {
        self.eta_m >= 1.0
    }

    /// `η_S/η_M`, which is `2^{1/(2n)}` (√2 for one noised party).
    pub fn expected_ratio(&self) -> f64 {
        2f64.powf(0.5 / self.n_noised as f64)
    }
}

/// Closed-form singular values at unit noise, in axis order `(x, y, z)`
/// for the row party; not sorted.
pub fn closed_form_singular_values(spec: &StateSpec) -> Result<[f64; 3], ThresholdError> {
    spec.validate()?;
    Ok(match *spec {
        StateSpec::Ghz { alpha, beta } => {
            let s = 2.0 * SQRT_2 * (alpha * beta).abs();
            [s, s, (alpha * alpha - beta * beta).abs()]
        }
        StateSpec::W { alpha, beta, gamma } => {
            let s = 2.0 * beta.abs() * (alpha * alpha + gamma * gamma).sqrt();
            [s, s, (1.0 + 8.0 * alpha * alpha * gamma * gamma).sqrt()]
        }
        StateSpec::Ms { alpha, beta } => {
            let s = (alpha * alpha + 2.0 * beta * beta).sqrt();
            [s, s, alpha.abs()]
        }
        StateSpec::MixedGhz { p } => [SQRT_2 * p, SQRT_2 * p, 0.0],
        StateSpec::Acin { .. } => return Err(ThresholdError::Unsupported("Acin")),
    })
}

fn max3(v: [f64; 3]) -> f64 {
    v[0].max(v[1]).max(v[2])
}

/// Thresholds for one noised party from the closed-form singular values.
pub fn analytic_threshold(spec: &StateSpec) -> Result<ThresholdReport, ThresholdError> {
    analytic_threshold_n(spec, 1)
}

/// [`analytic_threshold`] with noise on `n_noised` parties.
pub fn analytic_threshold_n(
    spec: &StateSpec,
    n_noised: usize,
) -> Result<ThresholdReport, ThresholdError> {
    if !(1..=3).contains(&n_noised) {
        return Err(ThresholdError::BadPartyCount(n_noised));
    }
    let lambda = max3(closed_form_singular_values(spec)?);
    let mut report = ThresholdReport::from_lambda(Some(*spec), lambda, n_noised);
    if let StateSpec::W { alpha, gamma, .. } = *spec {
        let k = alpha * alpha + gamma * gamma;
        let env = (1.0 + 2.0 * k * k).sqrt();
        report.w_envelope = Some(WEnvelope {
            k,
            lambda: env,
            eta_m: (1.0 / (SQRT_2 * env)).powf(1.0 / n_noised as f64),
            eta_s: (1.0 / env).powf(1.0 / n_noised as f64),
        });
    }
    Ok(report)
}

/// Thresholds from the numerically computed largest singular value of `ρ`.
pub fn numeric_threshold(
    rho: &DensityMatrix,
    n_noised: usize,
) -> Result<ThresholdReport, ThresholdError> {
    if !(1..=3).contains(&n_noised) {
        return Err(ThresholdError::BadPartyCount(n_noised));
    }
    let lambda = correlation_tensor(rho)?.singular_values()[0];
    Ok(ThresholdReport::from_lambda(None, lambda, n_noised))
}

/// Closed-form singular values under anisotropic noise on the row party,
/// checked against the numeric singular values of the noised tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnisotropicSingularValues {
    /// Axis-labeled `(x, y, z)`, unsorted.
    pub closed_form: [f64; 3],
    /// Descending.
    pub numeric: [f64; 3],
}

pub fn anisotropic_singular_values(
    spec: &StateSpec,
    noise: &NoiseVector,
) -> Result<AnisotropicSingularValues, ThresholdError> {
    if !matches!(spec, StateSpec::Ghz { .. } | StateSpec::W { .. }) {
        return Err(ThresholdError::Unsupported(spec.family_name()));
    }
    let unit = closed_form_singular_values(spec)?;
    let eta = noise.components();
    let closed_form = std::array::from_fn(|k| unit[k] * eta[k]);
    let rho = make_state(spec)?;
    let noisy = apply_to_party(&noise.channel(), &rho, &[ANISOTROPIC_PARTY])?;
    let numeric = correlation_tensor(&noisy)?.singular_values();
    let mut sorted = closed_form;
    sorted.sort_by(|a: &f64, b| b.total_cmp(a));
    if sorted
        .iter()
        .zip(&numeric)
        .any(|(a, b)| (a - b).abs() > CLOSED_FORM_TOL)
    {
        return Err(ThresholdError::Mismatch {
            closed: closed_form,
            numeric,
        });
    }
    Ok(AnisotropicSingularValues {
        closed_form,
        numeric,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ghz_symmetric() {
        let r = analytic_threshold(&StateSpec::ghz_symmetric()).unwrap();
        assert!((r.eta_m - 0.5).abs() < 1e-15);
        assert!((r.eta_s - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(!r.always_breaks());
    }

    #[test]
    fn w_symmetric_threshold() {
        let r = analytic_threshold(&StateSpec::w_symmetric()).unwrap();
        assert!((r.eta_s - 3.0 / 17f64.sqrt()).abs() < 1e-12);
        let env = r.w_envelope.unwrap();
        assert!((env.k - 2.0 / 3.0).abs() < 1e-15);
        assert!((env.eta_s - r.eta_s).abs() < 1e-12);
    }

    #[test]
    fn mixed_ghz_p_one() {
        let r = analytic_threshold(&StateSpec::MixedGhz { p: 1.0 }).unwrap();
        assert!((r.eta_s - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((r.eta_m - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ratio_and_flags() {
        for spec in [
            StateSpec::ghz_symmetric(),
            StateSpec::Ms {
                alpha: 0.6,
                beta: 0.8,
            },
            StateSpec::MixedGhz { p: 0.3 },
        ] {
            let r = analytic_threshold(&spec).unwrap();
            assert!((r.eta_s / r.eta_m - SQRT_2).abs() < 1e-14);
            assert!(r.eta_m <= r.eta_s);
        }
        // small p: λ = √2·0.3 < 1/√2, so every physical channel breaks
        assert!(analytic_threshold(&StateSpec::MixedGhz { p: 0.3 })
            .unwrap()
            .always_breaks());
    }

    #[test]
    fn acin_unsupported() {
        let spec = crate::states::sample_acin_state(1);
        assert!(matches!(
            analytic_threshold(&spec),
            Err(ThresholdError::Unsupported("Acin"))
        ));
        let nv = NoiseVector::new([0.5; 3]).unwrap();
        assert!(matches!(
            anisotropic_singular_values(
                &StateSpec::Ms {
                    alpha: 0.6,
                    beta: 0.8
                },
                &nv
            ),
            Err(ThresholdError::Unsupported("MS"))
        ));
    }

    #[test]
    fn numeric_party_counts() {
        let rho = make_state(&StateSpec::ghz_symmetric()).unwrap();
        let r = numeric_threshold(&rho, 2).unwrap();
        assert!((r.eta_s - FRAC_1_SQRT_2.sqrt()).abs() < 1e-12);
        assert!((r.eta_s - 0.8409).abs() < 1e-4);
        assert!(matches!(
            numeric_threshold(&rho, 4),
            Err(ThresholdError::BadPartyCount(4))
        ));
    }

    #[test]
    fn anisotropic_examples() {
        let unit = NoiseVector::new([1.0, 1.0, 1.0].map(|x: f64| x / 3f64.sqrt())).unwrap();
        let ghz = anisotropic_singular_values(&StateSpec::ghz_symmetric(), &unit).unwrap();
        assert!((ghz.closed_form[0] - SQRT_2 / 3f64.sqrt()).abs() < 1e-12);
        let z = NoiseVector::new([0.0, 0.0, 1.0]).unwrap();
        let w = anisotropic_singular_values(&StateSpec::w_symmetric(), &z).unwrap();
        assert_eq!(w.closed_form[0], 0.0);
        assert_eq!(w.closed_form[1], 0.0);
        assert!((w.closed_form[2] - 17f64.sqrt() / 3.0).abs() < 1e-12);
    }
}
