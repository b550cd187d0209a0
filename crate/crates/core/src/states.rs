//! Density matrices and the three-qubit state families.
//!
//! Qubit ordering is big-endian: party A (index 0) is the leftmost tensor
//! factor, so `|abc⟩` sits at index `4a + 2b + c`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use thiserror::Error;

use crate::qmat::{hermitian_eigenvalues, CMat, LinalgError, C64};

/// Tolerance on amplitude normalization for [`StateSpec`] families.
pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("{family}: violated constraint {constraint}")]
    InvalidSpec {
        family: &'static str,
        constraint: String,
    },

    #[error("party index {party} out of range for {n_qubits} qubits")]
    PartyOutOfRange { party: usize, n_qubits: usize },

    #[error("operation needs at least {needed} qubits, state has {n_qubits}")]
    TooFewQubits { needed: usize, n_qubits: usize },

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("cannot parse state spec field `{field}`: {message}")]
    Parse { field: String, message: String },

    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Hermitian, unit-trace, positive semidefinite operator on 1–3 qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    mat: CMat,
}

impl DensityMatrix {
    pub const HERMITIAN_TOL: f64 = 1e-12;
    pub const TRACE_TOL: f64 = 1e-12;
    pub const PSD_TOL: f64 = 1e-10;

    /// Validates and wraps a `2ⁿ×2ⁿ` matrix.
    pub fn new(mat: CMat) -> Result<Self, StateError> {
        let n_qubits = match mat.shape() {
            (2, 2) => 1,
            (4, 4) => 2,
            (8, 8) => 3,
            (r, c) => return Err(StateError::NotDensity(format!("shape {r}x{c}"))),
        };
        let dev = mat.hermitian_deviation();
        if dev > Self::HERMITIAN_TOL {
            return Err(StateError::NotDensity(format!(
                "hermitian deviation {dev:e}"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > Self::TRACE_TOL || tr.im.abs() > Self::TRACE_TOL {
            return Err(StateError::NotDensity(format!("trace {tr}")));
        }
        let min_eig = *hermitian_eigenvalues(&mat)?.last().unwrap();
        if min_eig < -Self::PSD_TOL {
            return Err(StateError::NotDensity(format!(
                "smallest eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { n_qubits, mat })
    }

    /// Wraps a matrix already known to be a state (internal constructors).
    pub(crate) fn from_trusted(mat: CMat) -> Self {
        let n_qubits = mat.rows().trailing_zeros() as usize;
        debug_assert_eq!(1 << n_qubits, mat.rows());
        Self { n_qubits, mat }
    }

    /// `|ψ⟩⟨ψ|` for a normalized vector of length 2, 4 or 8.
    pub fn from_pure(psi: &[C64]) -> Result<Self, StateError> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(StateError::NotDensity(format!("vector norm² {norm}")));
        }
        if !matches!(psi.len(), 2 | 4 | 8) {
            return Err(StateError::NotDensity(format!(
                "vector length {}",
                psi.len()
            )));
        }
        Ok(Self::from_trusted(CMat::outer(psi)))
    }

    /// Single-qubit state `½(I + w·σ)`; requires `|w| ≤ 1`.
    pub fn from_bloch(w: [f64; 3]) -> Result<Self, StateError> {
        let r2: f64 = w.iter().map(|x| x * x).sum();
        if r2 > 1.0 + 1e-12 {
            return Err(StateError::NotDensity(format!("Bloch vector length² {r2}")));
        }
        Ok(Self::from_trusted(bloch_matrix(w)))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    /// `Tr[ρ·op]`, real part.
    pub fn expectation(&self, op: &CMat) -> f64 {
        self.mat
            .trace_product(op)
            .expect("operator dimension must match the state")
            .re
    }

    pub fn purity(&self) -> f64 {
        self.mat.trace_product(&self.mat).unwrap().re
    }

    /// Bloch vector of a single-qubit state.
    pub fn bloch_vector(&self) -> Option<[f64; 3]> {
        if self.n_qubits != 1 {
            return None;
        }
        let m = &self.mat;
        Some([
            2.0 * m[(0, 1)].re,
            -2.0 * m[(0, 1)].im,
            (m[(0, 0)] - m[(1, 1)]).re,
        ])
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.mat).expect("density matrices are Hermitian")
    }
}

pub(crate) fn bloch_matrix(w: [f64; 3]) -> CMat {
    let h = |re: f64, im: f64| C64::new(0.5 * re, 0.5 * im);
    CMat::new(
        2,
        2,
        vec![
            h(1.0 + w[2], 0.0),
            h(w[0], -w[1]),
            h(w[0], w[1]),
            h(1.0 - w[2], 0.0),
        ],
    )
    .unwrap()
}

/// Parameterized three-qubit state families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    /// `α|000⟩ + β|111⟩`
    Ghz { alpha: f64, beta: f64 },
    /// `α|100⟩ + β|010⟩ + γ|001⟩`
    W { alpha: f64, beta: f64, gamma: f64 },
    /// Maximal slice: `(|000⟩ + |11⟩(α|0⟩ + β|1⟩))/√2`
    Ms { alpha: f64, beta: f64 },
    /// `p·|GHZ⟩⟨GHZ| + (1−p)·(I₂⊗Ĩ)/4` with `Ĩ = diag(1,0,0,1)`
    MixedGhz { p: f64 },
    /// Five-term canonical form
    /// `λ₀|000⟩ + λ₁e^{iφ}|100⟩ + λ₂|101⟩ + λ₃|110⟩ + λ₄|111⟩`.
    Acin { lambda: [f64; 5], phi: f64 },
}

impl StateSpec {
    pub fn ghz_symmetric() -> Self {
        StateSpec::Ghz {
            alpha: FRAC_1_SQRT_2,
            beta: FRAC_1_SQRT_2,
        }
    }

    pub fn w_symmetric() -> Self {
        let s = 1.0 / 3f64.sqrt();
        StateSpec::W {
            alpha: s,
            beta: s,
            gamma: s,
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            StateSpec::Ghz { .. } => "GHZ",
            StateSpec::W { .. } => "W",
            StateSpec::Ms { .. } => "MS",
            StateSpec::MixedGhz { .. } => "MixedGHZ",
            StateSpec::Acin { .. } => "Acin",
        }
    }

    /// Named parameters in serialization order.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            StateSpec::Ghz { alpha, beta } | StateSpec::Ms { alpha, beta } => {
                vec![("a", alpha), ("b", beta)]
            }
            StateSpec::W { alpha, beta, gamma } => vec![("a", alpha), ("b", beta), ("c", gamma)],
            StateSpec::MixedGhz { p } => vec![("p", p)],
            StateSpec::Acin { lambda, phi } => vec![
                ("l0", lambda[0]),
                ("l1", lambda[1]),
                ("l2", lambda[2]),
                ("l3", lambda[3]),
                ("l4", lambda[4]),
                ("phi", phi),
            ],
        }
    }

    pub fn validate(&self) -> Result<(), StateError> {
        let fail = |constraint: String| {
            Err(StateError::InvalidSpec {
                family: self.family_name(),
                constraint,
            })
        };
        if self.params().iter().any(|(_, v)| !v.is_finite()) {
            return fail("all parameters finite".into());
        }
        match *self {
            StateSpec::Ghz { alpha, beta } | StateSpec::Ms { alpha, beta } => {
                let n = alpha * alpha + beta * beta;
                if (n - 1.0).abs() > NORM_TOL {
                    return fail(format!("α²+β² = 1 (got {n})"));
                }
            }
            StateSpec::W { alpha, beta, gamma } => {
                let n = alpha * alpha + beta * beta + gamma * gamma;
                if (n - 1.0).abs() > NORM_TOL {
                    return fail(format!("α²+β²+γ² = 1 (got {n})"));
                }
            }
            StateSpec::MixedGhz { p } => {
                if !(0.0..=1.0).contains(&p) {
                    return fail(format!("0 ≤ p ≤ 1 (got {p})"));
                }
            }
            StateSpec::Acin { lambda, phi } => {
                if let Some(l) = lambda.iter().find(|&&l| l < 0.0) {
                    return fail(format!("λᵢ ≥ 0 (got {l})"));
                }
                let n: f64 = lambda.iter().map(|l| l * l).sum();
                if (n - 1.0).abs() > NORM_TOL {
                    return fail(format!("Σλᵢ² = 1 (got {n})"));
                }
                if !(0.0..PI).contains(&phi) {
                    return fail(format!("0 ≤ φ < π (got {phi})"));
                }
            }
        }
        Ok(())
    }

    /// Rescales amplitudes to unit norm when they are within `tol` of it.
    ///
    /// Lets hand-typed values such as `a=0.7071,b=0.7071` through.
    pub fn renormalized(self, tol: f64) -> Result<Self, StateError> {
        let rescale = |xs: &mut [f64]| -> bool {
            let n: f64 = xs.iter().map(|x| x * x).sum();
            if (n - 1.0).abs() <= tol && n > 0.0 {
                let s = n.sqrt();
                xs.iter_mut().for_each(|x| *x /= s);
                true
            } else {
                false
            }
        };
        let out = match self {
            StateSpec::Ghz { alpha, beta } => {
                let mut v = [alpha, beta];
                rescale(&mut v);
                StateSpec::Ghz {
                    alpha: v[0],
                    beta: v[1],
                }
            }
            StateSpec::Ms { alpha, beta } => {
                let mut v = [alpha, beta];
                rescale(&mut v);
                StateSpec::Ms {
                    alpha: v[0],
                    beta: v[1],
                }
            }
            StateSpec::W { alpha, beta, gamma } => {
                let mut v = [alpha, beta, gamma];
                rescale(&mut v);
                StateSpec::W {
                    alpha: v[0],
                    beta: v[1],
                    gamma: v[2],
                }
            }
            StateSpec::Acin { mut lambda, phi } => {
                rescale(&mut lambda);
                StateSpec::Acin { lambda, phi }
            }
            s @ StateSpec::MixedGhz { .. } => s,
        };
        out.validate()?;
        Ok(out)
    }

    /// State vector for the pure families; `None` for `MixedGhz`.
    pub fn state_vector(&self) -> Option<[C64; 8]> {
        let r = |x: f64| C64::new(x, 0.0);
        let mut v = [C64::new(0.0, 0.0); 8];
        match *self {
            StateSpec::Ghz { alpha, beta } => {
                v[0b000] = r(alpha);
                v[0b111] = r(beta);
            }
            StateSpec::W { alpha, beta, gamma } => {
                v[0b100] = r(alpha);
                v[0b010] = r(beta);
                v[0b001] = r(gamma);
            }
            StateSpec::Ms { alpha, beta } => {
                v[0b000] = r(FRAC_1_SQRT_2);
                v[0b110] = r(alpha * FRAC_1_SQRT_2);
                v[0b111] = r(beta * FRAC_1_SQRT_2);
            }
            StateSpec::Acin { lambda, phi } => {
                v[0b000] = r(lambda[0]);
                v[0b100] = C64::from_polar(lambda[1], phi);
                v[0b101] = r(lambda[2]);
                v[0b110] = r(lambda[3]);
                v[0b111] = r(lambda[4]);
            }
            StateSpec::MixedGhz { .. } => return None,
        }
        Some(v)
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.family_name())?;
        for (i, (k, v)) in self.params().into_iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

impl FromStr for StateSpec {
    type Err = StateError;

    /// Parses `FAMILY:key=value,...`, e.g. `GHZ:a=0.6,b=0.8` or
    /// `Acin:l0=..,l1=..,l2=..,l3=..,l4=..,phi=..`. Does not validate.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse_err = |field: &str, message: String| StateError::Parse {
            field: field.to_string(),
            message,
        };
        let (family, rest) = s
            .split_once(':')
            .ok_or_else(|| parse_err("family", format!("expected FAMILY:key=value in `{s}`")))?;
        let mut kv = Vec::new();
        for item in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| parse_err(item, "expected key=value".into()))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|e| parse_err(k.trim(), format!("{e}")))?;
            kv.push((k.trim().to_string(), v));
        }
        let keys: &[&str] = match family.trim().to_ascii_lowercase().as_str() {
            "ghz" | "ms" => &["a", "b"],
            "w" => &["a", "b", "c"],
            "mixedghz" => &["p"],
            "acin" => &["l0", "l1", "l2", "l3", "l4", "phi"],
            other => return Err(parse_err("family", format!("unknown family `{other}`"))),
        };
        if let Some((k, _)) = kv.iter().find(|(k, _)| !keys.contains(&k.as_str())) {
            return Err(parse_err(k, "unknown key for this family".into()));
        }
        let get = |key: &str| -> Result<f64, StateError> {
            kv.iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| *v)
                .ok_or_else(|| parse_err(key, "missing".into()))
        };
        Ok(match family.trim().to_ascii_lowercase().as_str() {
            "ghz" => StateSpec::Ghz {
                alpha: get("a")?,
                beta: get("b")?,
            },
            "ms" => StateSpec::Ms {
                alpha: get("a")?,
                beta: get("b")?,
            },
            "w" => StateSpec::W {
                alpha: get("a")?,
                beta: get("b")?,
                gamma: get("c")?,
            },
            "mixedghz" => StateSpec::MixedGhz { p: get("p")? },
            _ => StateSpec::Acin {
                lambda: [get("l0")?, get("l1")?, get("l2")?, get("l3")?, get("l4")?],
                phi: get("phi")?,
            },
        })
    }
}

/// Density matrix of a validated [`StateSpec`].
pub fn make_state(spec: &StateSpec) -> Result<DensityMatrix, StateError> {
    spec.validate()?;
    if let Some(psi) = spec.state_vector() {
        return Ok(DensityMatrix::from_trusted(CMat::outer(&psi)));
    }
    let StateSpec::MixedGhz { p } = *spec else {
        unreachable!("only MixedGhz lacks a state vector");
    };
    let ghz = CMat::outer(&StateSpec::ghz_symmetric().state_vector().unwrap());
    // I₂ ⊗ diag(1,0,0,1) / 4
    let mut noise = [0.0; 8];
    for (idx, d) in noise.iter_mut().enumerate() {
        let (b, c) = ((idx >> 1) & 1, idx & 1);
        if b == c {
            *d = 0.25;
        }
    }
    let mixed = &ghz.scale_real(p) + &CMat::diag_real(&noise).scale_real(1.0 - p);
    Ok(DensityMatrix::from_trusted(mixed))
}

/// Draws a five-term canonical state: `(λ₀²..λ₄²)` flat-Dirichlet, `φ` uniform on `[0, π)`.
pub fn sample_acin_with<R: Rng + ?Sized>(rng: &mut R) -> StateSpec {
    let mut w = [0.0f64; 5];
    for x in w.iter_mut() {
        *x = Exp1.sample(rng);
    }
    let total: f64 = w.iter().sum();
    let mut lambda = w.map(|x| (x / total).sqrt());
    let n: f64 = lambda.iter().map(|l| l * l).sum::<f64>().sqrt();
    lambda.iter_mut().for_each(|l| *l /= n);
    let phi = rng.random_range(0.0..PI);
    StateSpec::Acin { lambda, phi }
}

/// Seeded variant of [`sample_acin_with`]; identical seeds give identical specs.
pub fn sample_acin_state(seed: u64) -> StateSpec {
    sample_acin_with(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// Traces out `party` (0-based, A = 0).
pub fn partial_trace(rho: &DensityMatrix, party: usize) -> Result<DensityMatrix, StateError> {
    let n = rho.n_qubits();
    if n < 2 {
        return Err(StateError::TooFewQubits {
            needed: 2,
            n_qubits: n,
        });
    }
    if party >= n {
        return Err(StateError::PartyOutOfRange { party, n_qubits: n });
    }
    let shift = n - 1 - party;
    let low_mask = (1usize << shift) - 1;
    let insert =
        |idx: usize, bit: usize| ((idx & !low_mask) << 1) | (bit << shift) | (idx & low_mask);
    let dim = 1 << (n - 1);
    let m = rho.matrix();
    let out = CMat::from_fn(dim, dim, |a, b| {
        (0..2).map(|s| m[(insert(a, s), insert(b, s))]).sum()
    });
    Ok(DensityMatrix::from_trusted(out))
}

/// Bell states on two qubits.
pub fn phi_plus() -> DensityMatrix {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    let z = C64::new(0.0, 0.0);
    DensityMatrix::from_trusted(CMat::outer(&[s, z, z, s]))
}

pub fn singlet() -> DensityMatrix {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    let z = C64::new(0.0, 0.0);
    DensityMatrix::from_trusted(CMat::outer(&[z, s, -s, z]))
}

/// Tensor product of states, leftmost factor = party A.
pub fn product_state(factors: &[&DensityMatrix]) -> Result<DensityMatrix, StateError> {
    let mat = crate::qmat::kron_all(factors.iter().map(|d| d.matrix()))?;
    DensityMatrix::new(mat)
}

/// Random mixed state from the Ginibre ensemble (`G G† / Tr`), `dim` = 2, 4 or 8.
pub fn random_mixed_state<R: Rng + ?Sized>(rng: &mut R, n_qubits: usize) -> DensityMatrix {
    let dim = 1 << n_qubits;
    let normal = rand_distr::StandardNormal;
    let g = CMat::from_fn(dim, dim, |_, _| {
        C64::new(normal.sample(rng), normal.sample(rng))
    });
    let gg = &g * &g.dagger();
    let tr = gg.trace().re;
    let mut m = gg.scale_real(1.0 / tr);
    // exact Hermitian symmetry
    for i in 0..dim {
        m[(i, i)].im = 0.0;
        for j in (i + 1)..dim {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
    DensityMatrix::from_trusted(m)
}

/// Haar-random pure state.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, n_qubits: usize) -> DensityMatrix {
    let dim = 1 << n_qubits;
    let normal = rand_distr::StandardNormal;
    let mut psi: Vec<C64> = (0..dim)
        .map(|_| C64::new(normal.sample(rng), normal.sample(rng)))
        .collect();
    let n = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    psi.iter_mut().for_each(|z| *z /= n);
    DensityMatrix::from_trusted(CMat::outer(&psi))
}
