//! Qubit channels in the Pauli transfer-matrix picture.
//!
//! A channel is `[1, 0; t, T]` with `T = diag(η₁, η₂, η₃)`:
//! `I ↦ I + t·σ`, `σⱼ ↦ ηⱼσⱼ`. Its conjugate acts on observables as
//! `I ↦ I`, `σⱼ ↦ tⱼI + ηⱼσⱼ`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::compat::UnsharpObservable;
use crate::qmat::{hermitian_eigenvalues, pauli, CMat, C64};
use crate::states::{bloch_matrix, DensityMatrix};

/// Slack allowed on the complete-positivity inequalities.
pub const CP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum CpViolation {
    /// One of `|ηx ± ηy| ≤ 1 ± ηz` fails.
    Tetrahedron {
        inequality: &'static str,
        lhs: f64,
        rhs: f64,
    },
    /// The Choi matrix has a negative eigenvalue.
    Choi { min_eigenvalue: f64 },
}

impl fmt::Display for CpViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CpViolation::Tetrahedron {
                inequality,
                lhs,
                rhs,
            } => write!(f, "{inequality} violated: {lhs} > {rhs}"),
            CpViolation::Choi { min_eigenvalue } => {
                write!(f, "Choi matrix has eigenvalue {min_eigenvalue:e} < 0")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("channel is not completely positive: {0}")]
    NotCp(CpViolation),

    #[error("expected a single-qubit state, got {0} qubits")]
    NotSingleQubit(usize),

    #[error("party set is empty")]
    EmptyParties,

    #[error("party {party} out of range for {n_qubits} qubits")]
    PartyOutOfRange { party: usize, n_qubits: usize },

    #[error("party {0} listed twice")]
    DuplicateParty(usize),

    #[error("operation supports unital channels only (t = {0:?})")]
    NotUnital([f64; 3]),

    #[error("noise parameter out of range: {0}")]
    InvalidNoise(String),

    #[error("cannot parse channel field `{field}`: {message}")]
    Parse { field: String, message: String },
}

/// Result of the complete-positivity test.
#[derive(Debug, Clone, PartialEq)]
pub struct CpCheck {
    pub cp: bool,
    pub witness: Option<CpViolation>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitChannel {
    t: [f64; 3],
    eta: [f64; 3],
}

impl QubitChannel {
    pub fn new(t: [f64; 3], eta: [f64; 3]) -> Self {
        Self { t, eta }
    }

    pub fn unital(eta: [f64; 3]) -> Self {
        Self { t: [0.0; 3], eta }
    }

    /// White-noise channel `ρ ↦ ηρ + (1−η)I/2`.
    pub fn isotropic(eta: f64) -> Self {
        Self::unital([eta; 3])
    }

    pub fn identity() -> Self {
        Self::isotropic(1.0)
    }

    pub fn translation(&self) -> [f64; 3] {
        self.t
    }

    pub fn eta(&self) -> [f64; 3] {
        self.eta
    }

    pub fn is_unital(&self) -> bool {
        self.t == [0.0; 3]
    }

    /// 4×4 transfer matrix in the basis `(I, σx, σy, σz)`.
    pub fn transfer_matrix(&self) -> [[f64; 4]; 4] {
        let mut m = [[0.0; 4]; 4];
        m[0][0] = 1.0;
        for k in 0..3 {
            m[k + 1][0] = self.t[k];
            m[k + 1][k + 1] = self.eta[k];
        }
        m
    }

    /// Conjugate channel; unital channels only, where it has the same `T`.
    pub fn conjugate(&self) -> Result<QubitChannel, ChannelError> {
        if !self.is_unital() {
            return Err(ChannelError::NotUnital(self.t));
        }
        let m = self.transfer_matrix();
        // M† = Mᵀ for real transfer matrices; its lower-left block is zero here.
        let eta = [m[1][1], m[2][2], m[3][3]];
        Ok(QubitChannel::unital(eta))
    }

    /// Schrödinger action on an arbitrary 2×2 operator.
    pub fn map_operator(&self, x: &CMat) -> CMat {
        let coeff = |mu: usize| pauli(mu).trace_product(x).unwrap() * 0.5;
        let c0 = coeff(0);
        let mut out = pauli(0).scale(c0);
        for k in 0..3 {
            let ck = coeff(k + 1);
            let term = pauli(k + 1).scale(c0 * self.t[k] + ck * self.eta[k]);
            out = &out + &term;
        }
        out
    }

    /// Choi matrix `Σᵢⱼ |i⟩⟨j| ⊗ E(|i⟩⟨j|)`.
    pub fn choi_matrix(&self) -> CMat {
        let mut choi = CMat::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                let mut unit = CMat::zeros(2, 2);
                unit[(i, j)] = C64::new(1.0, 0.0);
                let img = self.map_operator(&unit);
                for k in 0..2 {
                    for l in 0..2 {
                        choi[(2 * i + k, 2 * j + l)] = img[(k, l)];
                    }
                }
            }
        }
        choi
    }
}

impl fmt::Display for QubitChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [tx, ty, tz] = self.t;
        let [nx, ny, nz] = self.eta;
        write!(f, "t=({tx},{ty},{tz});T=({nx},{ny},{nz})")
    }
}

impl FromStr for QubitChannel {
    type Err = ChannelError;

    /// Accepts `t=(tx,ty,tz);T=(nx,ny,nz)`, `iso:η` and `diag:ηx,ηy,ηz`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let err = |field: &str, message: String| ChannelError::Parse {
            field: field.to_string(),
            message,
        };
        let floats = |field: &str, text: &str, n: usize| -> Result<Vec<f64>, ChannelError> {
            let vals = text
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|e| err(field, format!("{e}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if vals.len() != n {
                return Err(err(
                    field,
                    format!("expected {n} values, got {}", vals.len()),
                ));
            }
            Ok(vals)
        };
        if let Some(rest) = s.strip_prefix("iso:") {
            let v = floats("iso", rest, 1)?;
            return Ok(QubitChannel::isotropic(v[0]));
        }
        if let Some(rest) = s.strip_prefix("diag:") {
            let v = floats("diag", rest, 3)?;
            return Ok(QubitChannel::unital([v[0], v[1], v[2]]));
        }
        let mut t = None;
        let mut eta = None;
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, val) = part
                .split_once('=')
                .ok_or_else(|| err(part, "expected key=(a,b,c)".into()))?;
            let inner = val
                .trim()
                .strip_prefix('(')
                .and_then(|v| v.strip_suffix(')'))
                .ok_or_else(|| err(key.trim(), "expected parenthesized triple".into()))?;
            let v = floats(key.trim(), inner, 3)?;
            let triple = [v[0], v[1], v[2]];
            match key.trim() {
                "t" => t = Some(triple),
                "T" => eta = Some(triple),
                other => return Err(err(other, "unknown key (expected t or T)".into())),
            }
        }
        let eta = eta.ok_or_else(|| err("T", "missing".into()))?;
        Ok(QubitChannel::new(t.unwrap_or([0.0; 3]), eta))
    }
}

/// Complete positivity: the tetrahedron `|ηx ± ηy| ≤ 1 ± ηz` for unital
/// channels, a Choi-matrix eigenvalue test otherwise.
///
/// The right-hand sides carry no absolute value: with `|1 ± ηz|` points
/// such as `η = (0.5, 0.45, 1.09)` would pass although their Choi matrix
/// is not positive.
pub fn is_cp(ch: &QubitChannel) -> CpCheck {
    if ch.is_unital() {
        return match tetrahedron_violation(ch.eta) {
            None => CpCheck {
                cp: true,
                witness: None,
            },
            Some(v) => CpCheck {
                cp: false,
                witness: Some(v),
            },
        };
    }
    choi_check(ch)
}

/// The Choi-matrix test on its own, for any channel.
pub fn choi_check(ch: &QubitChannel) -> CpCheck {
    let eig = hermitian_eigenvalues(&ch.choi_matrix()).expect("Choi matrix is Hermitian");
    let min = *eig.last().unwrap();
    if min < -CP_TOL {
        CpCheck {
            cp: false,
            witness: Some(CpViolation::Choi {
                min_eigenvalue: min,
            }),
        }
    } else {
        CpCheck {
            cp: true,
            witness: None,
        }
    }
}

fn tetrahedron_violation([x, y, z]: [f64; 3]) -> Option<CpViolation> {
    let checks = [
        ("|ηx+ηy| ≤ 1+ηz", (x + y).abs(), 1.0 + z),
        ("|ηx−ηy| ≤ 1−ηz", (x - y).abs(), 1.0 - z),
    ];
    checks
        .into_iter()
        .find(|(_, lhs, rhs)| lhs > &(rhs + CP_TOL))
        .map(|(inequality, lhs, rhs)| CpViolation::Tetrahedron {
            inequality,
            lhs,
            rhs,
        })
}

fn require_cp(ch: &QubitChannel) -> Result<(), ChannelError> {
    match is_cp(ch) {
        CpCheck {
            cp: false,
            witness: Some(w),
        } => Err(ChannelError::NotCp(w)),
        _ => Ok(()),
    }
}

/// `ρ ↦ E(ρ)` on one qubit: Bloch vector `w ↦ T·w + t`.
pub fn apply_schrodinger(
    ch: &QubitChannel,
    rho: &DensityMatrix,
) -> Result<DensityMatrix, ChannelError> {
    require_cp(ch)?;
    let w = rho
        .bloch_vector()
        .ok_or(ChannelError::NotSingleQubit(rho.n_qubits()))?;
    let out = std::array::from_fn(|k| ch.eta[k] * w[k] + ch.t[k]);
    Ok(DensityMatrix::from_trusted(bloch_matrix(out)))
}

/// `A ↦ E*(A)`: bias gains `t·(ηâ)`, the sharpness vector is scaled by `T`.
pub fn apply_heisenberg(ch: &QubitChannel, a: &UnsharpObservable) -> UnsharpObservable {
    let v = a.sharpness_vector();
    let bias = a.bias() + (0..3).map(|k| ch.t[k] * v[k]).sum::<f64>();
    let out = std::array::from_fn(|k| ch.eta[k] * v[k]);
    UnsharpObservable::from_parts_unchecked(bias, out)
}

/// Applies `ch` independently to each listed party (0-based).
pub fn apply_to_party(
    ch: &QubitChannel,
    rho: &DensityMatrix,
    parties: &[usize],
) -> Result<DensityMatrix, ChannelError> {
    require_cp(ch)?;
    if parties.is_empty() {
        return Err(ChannelError::EmptyParties);
    }
    let n = rho.n_qubits();
    for (i, &p) in parties.iter().enumerate() {
        if p >= n {
            return Err(ChannelError::PartyOutOfRange {
                party: p,
                n_qubits: n,
            });
        }
        if parties[..i].contains(&p) {
            return Err(ChannelError::DuplicateParty(p));
        }
    }
    // images of the matrix units |i⟩⟨j|
    let images: [[CMat; 2]; 2] = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut unit = CMat::zeros(2, 2);
            unit[(i, j)] = C64::new(1.0, 0.0);
            ch.map_operator(&unit)
        })
    });
    let mut mat = rho.matrix().clone();
    for &p in parties {
        mat = apply_local(&images, &mat, n, p);
    }
    Ok(DensityMatrix::from_trusted(mat))
}

fn apply_local(images: &[[CMat; 2]; 2], mat: &CMat, n: usize, party: usize) -> CMat {
    let dim = mat.rows();
    let bit = 1usize << (n - 1 - party);
    let mut out = CMat::zeros(dim, dim);
    for a in 0..dim {
        for b in 0..dim {
            let v = mat[(a, b)];
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            let i = usize::from(a & bit != 0);
            let j = usize::from(b & bit != 0);
            let img = &images[i][j];
            for k in 0..2 {
                for l in 0..2 {
                    let w = img[(k, l)];
                    if w == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let a2 = (a & !bit) | if k == 1 { bit } else { 0 };
                    let b2 = (b & !bit) | if l == 1 { bit } else { 0 };
                    out[(a2, b2)] += w * v;
                }
            }
        }
    }
    out
}

/// Unital diagonal noise `(ηx, ηy, ηz)` restricted to the physical region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseVector {
    eta: [f64; 3],
}

impl NoiseVector {
    /// Requires each component in `[0, 1]`, norm at most 1 and complete positivity.
    pub fn new(eta: [f64; 3]) -> Result<Self, ChannelError> {
        if let Some(x) = eta.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(ChannelError::InvalidNoise(format!(
                "component {x} outside [0, 1]"
            )));
        }
        let nv = Self { eta };
        if nv.norm() > 1.0 + 1e-12 {
            return Err(ChannelError::InvalidNoise(format!(
                "norm {} > 1",
                nv.norm()
            )));
        }
        if let Some(v) = tetrahedron_violation(eta) {
            return Err(ChannelError::NotCp(v));
        }
        Ok(nv)
    }

    /// Unchecked; the caller is expected to have tested membership.
    pub fn new_unchecked(eta: [f64; 3]) -> Self {
        Self { eta }
    }

    pub fn components(&self) -> [f64; 3] {
        self.eta
    }

    pub fn norm(&self) -> f64 {
        self.eta.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn channel(&self) -> QubitChannel {
        QubitChannel::unital(self.eta)
    }
}
