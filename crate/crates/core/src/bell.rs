//! Bell, Mermin and Svetlichny operators; correlation tensors and their
//! singular-value bounds; a see-saw optimizer that lower-bounds the true
//! quantum maxima.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::channels::{apply_to_party, is_cp, ChannelError, CpViolation, QubitChannel};
use crate::qmat::{
    bloch_operator, kron_all, pauli, singular_values_3xn, CMat, LinalgError, RMat3x9,
};
use crate::states::{phi_plus, DensityMatrix};

/// Slack on local bounds (`≤ 2` counts as satisfied).
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Default number of random restarts for [`seesaw_max`].
pub const DEFAULT_RESTARTS: usize = 64;

const SEESAW_MAX_ITERS: usize = 20_000;
const SEESAW_VALUE_TOL: f64 = 1e-13;
const ZERO_COEFF: f64 = 1e-14;

type Directions = Vec<[[f64; 3]; 2]>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BellError {
    #[error("{kind} needs a {expected}-party setting/state, got {got}")]
    ArityMismatch {
        kind: BellKind,
        expected: usize,
        got: usize,
    },

    #[error("expected a {expected}-qubit state, got {got}")]
    WrongQubitCount { expected: usize, got: usize },

    #[error("direction {0:?} is not a unit vector")]
    NotUnit([f64; 3]),

    #[error("see-saw needs at least one restart")]
    NoRestarts,

    #[error("operation supports unital channels only (t = {0:?})")]
    NotUnital([f64; 3]),

    #[error("channel is not completely positive: {0}")]
    NotCp(CpViolation),

    #[error(transparent)]
    Channel(#[from] ChannelError),

    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellKind {
    Chsh,
    Mermin,
    Svetlichny,
}

impl fmt::Display for BellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BellKind::Chsh => "CHSH",
            BellKind::Mermin => "Mermin",
            BellKind::Svetlichny => "Svetlichny",
        })
    }
}

impl FromStr for BellKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "chsh" => Ok(BellKind::Chsh),
            "mermin" => Ok(BellKind::Mermin),
            "svetlichny" => Ok(BellKind::Svetlichny),
            _ => Err(format!("unknown Bell operator `{s}`")),
        }
    }
}

// (sign, setting index per party)
const CHSH_TERMS: [(f64, [usize; 3]); 4] = [
    (1.0, [0, 0, 0]),
    (1.0, [0, 1, 0]),
    (1.0, [1, 0, 0]),
    (-1.0, [1, 1, 0]),
];

const MERMIN_TERMS: [(f64, [usize; 3]); 4] = [
    (1.0, [0, 0, 1]),
    (1.0, [0, 1, 0]),
    (1.0, [1, 0, 0]),
    (-1.0, [1, 1, 1]),
];

const SVETLICHNY_TERMS: [(f64, [usize; 3]); 8] = [
    (1.0, [0, 0, 0]),
    (1.0, [0, 1, 0]),
    (1.0, [0, 0, 1]),
    (-1.0, [0, 1, 1]),
    (1.0, [1, 0, 0]),
    (-1.0, [1, 1, 0]),
    (-1.0, [1, 0, 1]),
    (-1.0, [1, 1, 1]),
];

impl BellKind {
    pub fn parties(self) -> usize {
        match self {
            BellKind::Chsh => 2,
            BellKind::Mermin | BellKind::Svetlichny => 3,
        }
    }

    /// Bound satisfied by local (CHSH, Mermin) or hybrid (Svetlichny) models.
    pub fn classical_bound(self) -> f64 {
        match self {
            BellKind::Chsh | BellKind::Mermin => 2.0,
            BellKind::Svetlichny => 4.0,
        }
    }

    fn terms(self) -> &'static [(f64, [usize; 3])] {
        match self {
            BellKind::Chsh => &CHSH_TERMS,
            BellKind::Mermin => &MERMIN_TERMS,
            BellKind::Svetlichny => &SVETLICHNY_TERMS,
        }
    }
}

/// Two sharp measurement directions per party.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSetting {
    dirs: Vec<[[f64; 3]; 2]>,
}

impl MeasurementSetting {
    pub fn new(dirs: Vec<[[f64; 3]; 2]>) -> Result<Self, BellError> {
        for v in dirs.iter().flatten() {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (n - 1.0).abs() > 1e-12 {
                return Err(BellError::NotUnit(*v));
            }
        }
        Ok(Self { dirs })
    }

    pub fn parties(&self) -> usize {
        self.dirs.len()
    }

    pub fn party(&self, p: usize) -> [[f64; 3]; 2] {
        self.dirs[p]
    }

    pub fn directions(&self) -> &[[[f64; 3]; 2]] {
        &self.dirs
    }
}

/// `M_ijk = Tr[ρ(σᵢ⊗σⱼ⊗σₖ)]`, indices 0..3 standing for x, y, z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationTensor {
    pub m: [[[f64; 3]; 3]; 3],
}

impl CorrelationTensor {
    pub fn zeros() -> Self {
        Self {
            m: [[[0.0; 3]; 3]; 3],
        }
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.m[i][j][k]
    }

    /// Row `j`, column `3i + k`.
    pub fn flatten(&self) -> RMat3x9 {
        let mut out = RMat3x9::zeros();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    out.entries[j][3 * i + k] = self.m[i][j][k];
                }
            }
        }
        out
    }

    pub fn singular_values(&self) -> [f64; 3] {
        self.flatten().singular_values()
    }
}

/// Expectations of all `σ_{i₁}⊗…⊗σ_{iₙ}` with every `iₖ ∈ {x,y,z}`,
/// flattened with party A most significant.
fn pauli_correlations(rho: &DensityMatrix) -> Vec<f64> {
    let n = rho.n_qubits();
    let paulis: [CMat; 3] = [pauli(1), pauli(2), pauli(3)];
    (0..3usize.pow(n as u32))
        .map(|idx| {
            let factors: Vec<&CMat> = (0..n)
                .map(|q| &paulis[(idx / 3usize.pow((n - 1 - q) as u32)) % 3])
                .collect();
            rho.expectation(&kron_all(factors).unwrap())
        })
        .collect()
}

pub fn correlation_tensor(rho: &DensityMatrix) -> Result<CorrelationTensor, BellError> {
    if rho.n_qubits() != 3 {
        return Err(BellError::WrongQubitCount {
            expected: 3,
            got: rho.n_qubits(),
        });
    }
    let flat = pauli_correlations(rho);
    let mut t = CorrelationTensor::zeros();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                t.m[i][j][k] = flat[9 * i + 3 * j + k];
            }
        }
    }
    Ok(t)
}

/// `T_ij = Tr[ρ(σᵢ⊗σⱼ)]` for a two-qubit state.
pub fn correlation_matrix(rho: &DensityMatrix) -> Result<[[f64; 3]; 3], BellError> {
    if rho.n_qubits() != 2 {
        return Err(BellError::WrongQubitCount {
            expected: 2,
            got: rho.n_qubits(),
        });
    }
    let flat = pauli_correlations(rho);
    Ok(std::array::from_fn(|i| {
        std::array::from_fn(|j| flat[3 * i + j])
    }))
}

/// Upper bounds `(2√2·λ₁, 4·λ₁)` on the Mermin and Svetlichny maxima.
pub fn mermin_svetlichny_bounds(t: &CorrelationTensor) -> (f64, f64) {
    let l1 = t.singular_values()[0];
    (2.0 * SQRT_2 * l1, 4.0 * l1)
}

/// Maximal CHSH value `2√(s₁² + s₂²)` from the two largest singular values
/// of the correlation matrix.
pub fn chsh_max(rho: &DensityMatrix) -> Result<f64, BellError> {
    let t = correlation_matrix(rho)?;
    let s = singular_values_3xn(&t);
    Ok(2.0 * (s[0] * s[0] + s[1] * s[1]).sqrt())
}

/// Builds the named Bell operator from the setting's sharp observables.
pub fn bell_operator(kind: BellKind, setting: &MeasurementSetting) -> Result<CMat, BellError> {
    let n = kind.parties();
    if setting.parties() != n {
        return Err(BellError::ArityMismatch {
            kind,
            expected: n,
            got: setting.parties(),
        });
    }
    let obs: Vec<[CMat; 2]> = setting
        .directions()
        .iter()
        .map(|d| [bloch_operator(d[0]), bloch_operator(d[1])])
        .collect();
    let dim = 1 << n;
    let mut op = CMat::zeros(dim, dim);
    for &(sign, idx) in kind.terms() {
        let term = kron_all((0..n).map(|q| &obs[q][idx[q]]))?;
        op = &op + &term.scale_real(sign);
    }
    Ok(op)
}

/// `Tr[ρ·Op]` for the operator built from `setting`.
pub fn operator_value(
    rho: &DensityMatrix,
    setting: &MeasurementSetting,
    kind: BellKind,
) -> Result<f64, BellError> {
    if rho.n_qubits() != kind.parties() {
        return Err(BellError::ArityMismatch {
            kind,
            expected: kind.parties(),
            got: rho.n_qubits(),
        });
    }
    Ok(rho.expectation(&bell_operator(kind, setting)?))
}

/// Best value found by [`seesaw_max`] and the setting attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct SeesawResult {
    pub value: f64,
    pub setting: MeasurementSetting,
    pub restart: usize,
}

/// Correlation data and term list of one Bell functional.
struct Functional {
    n: usize,
    corr: Vec<f64>,
    terms: &'static [(f64, [usize; 3])],
}

impl Functional {
    fn value(&self, dirs: &[[[f64; 3]; 2]]) -> f64 {
        self.terms
            .iter()
            .map(|&(sign, idx)| {
                let vecs: Vec<[f64; 3]> = (0..self.n).map(|q| dirs[q][idx[q]]).collect();
                sign * self.contract(&vecs, None)[0]
            })
            .sum()
    }

    /// Contracts the tensor with `vecs` on every party except `free`;
    /// returns the free 3-vector (or the scalar in slot 0 when `free` is `None`).
    fn contract(&self, vecs: &[[f64; 3]], free: Option<usize>) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (idx, &c) in self.corr.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let mut w = c;
            let mut slot = 0;
            let mut rem = idx;
            for q in (0..self.n).rev() {
                let comp = rem % 3;
                rem /= 3;
                if Some(q) == free {
                    slot = comp;
                } else {
                    w *= vecs[q][comp];
                }
            }
            out[slot] += w;
        }
        out
    }

    /// Coefficient vectors `(v₀, v₁)` with value = `a₀·v₀ + a₁·v₁` in party `p`.
    fn party_coefficients(&self, dirs: &[[[f64; 3]; 2]], p: usize) -> [[f64; 3]; 2] {
        let mut coeff = [[0.0; 3]; 2];
        for &(sign, idx) in self.terms {
            let vecs: Vec<[f64; 3]> = (0..self.n).map(|q| dirs[q][idx[q]]).collect();
            let v = self.contract(&vecs, Some(p));
            for c in 0..3 {
                coeff[idx[p]][c] += sign * v[c];
            }
        }
        coeff
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| StandardNormal.sample(rng));
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.map(|x| x / n);
        }
    }
}

/// Alternating exact per-party maximization of a Bell functional.
///
/// For fixed other parties the value is `a₀·v₀ + a₁·v₁`, maximized by
/// `aₛ = vₛ/|vₛ|`. Parties are updated in turn until the value changes by
/// less than 1e-13; the best of `restarts` random starts is returned (lowest
/// restart index wins ties). Each restart draws from its own ChaCha stream
/// keyed by `(seed, restart)`.
pub fn seesaw_max(
    rho: &DensityMatrix,
    kind: BellKind,
    restarts: usize,
    seed: u64,
) -> Result<SeesawResult, BellError> {
    let n = kind.parties();
    if rho.n_qubits() != n {
        return Err(BellError::ArityMismatch {
            kind,
            expected: n,
            got: rho.n_qubits(),
        });
    }
    if restarts == 0 {
        return Err(BellError::NoRestarts);
    }
    let f = Functional {
        n,
        corr: pauli_correlations(rho),
        terms: kind.terms(),
    };
    let mut best: Option<(f64, Directions, usize)> = None;
    for r in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let mut dirs: Directions = (0..n)
            .map(|_| [random_unit(&mut rng), random_unit(&mut rng)])
            .collect();
        let mut value = f.value(&dirs);
        for _ in 0..SEESAW_MAX_ITERS {
            let mut moved = false;
            for p in 0..n {
                let coeff = f.party_coefficients(&dirs, p);
                for s in 0..2 {
                    let norm = coeff[s].iter().map(|x| x * x).sum::<f64>().sqrt();
                    if norm > ZERO_COEFF {
                        let next = coeff[s].map(|x| x / norm);
                        moved |= next != dirs[p][s];
                        dirs[p][s] = next;
                    }
                }
            }
            let next_value = f.value(&dirs);
            let change = (next_value - value).abs();
            value = next_value;
            if !moved || change < SEESAW_VALUE_TOL {
                break;
            }
        }
        if best.as_ref().is_none_or(|(v, _, _)| value > *v) {
            best = Some((value, dirs, r));
        }
    }
    let (value, dirs, restart) = best.expect("restarts ≥ 1");
    Ok(SeesawResult {
        value,
        setting: MeasurementSetting { dirs },
        restart,
    })
}

/// CHSH with biased unsharp observables on a singlet, at the optimal angles:
/// satisfied iff `2x_a x_b + 2√2 η_a η_b ≤ 2`.
pub fn chsh_biased_condition(x_a: f64, eta_a: f64, x_b: f64, eta_b: f64) -> bool {
    2.0 * x_a * x_b + 2.0 * SQRT_2 * eta_a * eta_b <= 2.0 + BOUNDARY_TOL
}

/// Whether a unital channel on one side of `|Φ⁺⟩` keeps CHSH ≤ 2, which for
/// unital channels certifies CHSH nonlocality breaking for every input.
pub fn is_chsh_nbc_unital(ch: &QubitChannel) -> Result<bool, BellError> {
    if !ch.is_unital() {
        return Err(BellError::NotUnital(ch.translation()));
    }
    if let Some(w) = is_cp(ch).witness {
        return Err(BellError::NotCp(w));
    }
    let rho = apply_to_party(ch, &phi_plus(), &[0])?;
    Ok(chsh_max(&rho)? <= 2.0 + BOUNDARY_TOL)
}
