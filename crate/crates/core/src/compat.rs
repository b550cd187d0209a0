//! Joint measurability of biased/unsharp qubit observables and
//! incompatibility breaking of channels.
//!
//! An unsharp observable `A^(x,η)` has effects `½((1±x)I ± η â·σ)`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_rational::Ratio;
use thiserror::Error;

use crate::channels::{apply_heisenberg, is_cp, CpViolation, QubitChannel};
use crate::qmat::{bloch_operator, CMat};

/// Slack for closed boundaries (`≤` counts as compatible).
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompatError {
    #[error("invalid observable: {0}")]
    InvalidObservable(String),

    #[error("negative radicand in S({p}, {q})")]
    NegativeRadicand { p: f64, q: f64 },

    #[error("operation supports unital channels only (t = {0:?})")]
    NotUnital([f64; 3]),

    #[error("channel is not completely positive: {0}")]
    NotCp(CpViolation),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnsharpObservable {
    bias: f64,
    vector: [f64; 3],
}

impl UnsharpObservable {
    /// `x·I + η â·σ`; requires a unit axis, `0 ≤ η ≤ 1`, `|x| < 1` and `|x| + η ≤ 1`.
    pub fn new(bias: f64, sharpness: f64, axis: [f64; 3]) -> Result<Self, CompatError> {
        let n = norm(axis);
        if (n - 1.0).abs() > 1e-12 {
            return Err(CompatError::InvalidObservable(format!("axis norm {n} ≠ 1")));
        }
        if !(0.0..=1.0).contains(&sharpness) {
            return Err(CompatError::InvalidObservable(format!(
                "sharpness {sharpness} outside [0, 1]"
            )));
        }
        if bias.abs() >= 1.0 || !bias.is_finite() {
            return Err(CompatError::InvalidObservable(format!(
                "bias {bias} outside (−1, 1)"
            )));
        }
        if bias.abs() + sharpness > 1.0 + BOUNDARY_TOL {
            return Err(CompatError::InvalidObservable(format!(
                "|x| + η = {} > 1",
                bias.abs() + sharpness
            )));
        }
        Ok(Self {
            bias,
            vector: axis.map(|a| a * sharpness),
        })
    }

    /// Projective observable `â·σ`.
    pub fn sharp(axis: [f64; 3]) -> Result<Self, CompatError> {
        Self::new(0.0, 1.0, axis)
    }

    pub fn unbiased(sharpness: f64, axis: [f64; 3]) -> Result<Self, CompatError> {
        Self::new(0.0, sharpness, axis)
    }

    pub(crate) fn from_parts_unchecked(bias: f64, vector: [f64; 3]) -> Self {
        Self { bias, vector }
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    /// `η⃗ = η·â`.
    pub fn sharpness_vector(&self) -> [f64; 3] {
        self.vector
    }

    pub fn sharpness(&self) -> f64 {
        norm(self.vector)
    }

    /// Unit axis, or `None` when the sharpness is zero.
    pub fn axis(&self) -> Option<[f64; 3]> {
        let n = self.sharpness();
        (n > 0.0).then(|| self.vector.map(|v| v / n))
    }

    /// `x·I + η⃗·σ`.
    pub fn operator(&self) -> CMat {
        &CMat::identity(2).scale_real(self.bias) + &bloch_operator(self.vector)
    }

    /// Effects for outcomes `+1` and `−1`.
    pub fn effects(&self) -> [CMat; 2] {
        let op = self.operator();
        let id = CMat::identity(2);
        [(&id + &op).scale_real(0.5), (&id - &op).scale_real(0.5)]
    }
}

fn norm(v: [f64; 3]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// `S(p, q) = ½(√((1+p)² − q²) + √((1−p)² − q²))`.
pub fn s_func(p: f64, q: f64) -> Result<f64, CompatError> {
    let r1 = (1.0 + p).powi(2) - q * q;
    let r2 = (1.0 - p).powi(2) - q * q;
    if r1 < -BOUNDARY_TOL || r2 < -BOUNDARY_TOL {
        return Err(CompatError::NegativeRadicand { p, q });
    }
    Ok(0.5 * (r1.max(0.0).sqrt() + r2.max(0.0).sqrt()))
}

/// Joint measurability of two unsharp qubit observables.
///
/// Unbiased pairs use `|η⃗+ξ⃗| + |η⃗−ξ⃗| ≤ 2`. Biased pairs use
/// `(1 − S_x² − S_y²)(1 − x²/S_x² − y²/S_y²) ≤ (η⃗·ξ⃗ − xy)²` with
/// `S_x = S(x, η)`, `S_y = S(y, ξ)`. Boundaries count as measurable.
pub fn jointly_measurable(a: &UnsharpObservable, b: &UnsharpObservable) -> bool {
    let (eta, xi) = (a.vector, b.vector);
    if a.bias == 0.0 && b.bias == 0.0 {
        return norm(add(eta, xi)) + norm(sub(eta, xi)) <= 2.0 + BOUNDARY_TOL;
    }
    biased_criterion_margin(a, b).is_some_and(|m| m >= -BOUNDARY_TOL)
}

/// `RHS − LHS` of the biased criterion; `None` for invalid observables.
pub fn biased_criterion_margin(a: &UnsharpObservable, b: &UnsharpObservable) -> Option<f64> {
    let (x, y) = (a.bias, b.bias);
    let sx = s_func(x, a.sharpness()).ok()?;
    let sy = s_func(y, b.sharpness()).ok()?;
    let ratio = |bias: f64, s: f64| {
        if bias == 0.0 {
            0.0
        } else {
            bias * bias / (s * s)
        }
    };
    let lhs = (1.0 - sx * sx - sy * sy) * (1.0 - ratio(x, sx) - ratio(y, sy));
    let rhs = (dot(a.vector, b.vector) - x * y).powi(2);
    Some(rhs - lhs)
}

/// Joint observable `G(i,j) = ¼((1 + ijc)I + (iη⃗ + jξ⃗)·σ)` for a compatible
/// unbiased pair, indexed `[G(+,+), G(+,−), G(−,+), G(−,−)]`.
pub fn joint_observable(a: &UnsharpObservable, b: &UnsharpObservable) -> Option<[CMat; 4]> {
    if a.bias != 0.0 || b.bias != 0.0 || !jointly_measurable(a, b) {
        return None;
    }
    let (eta, xi) = (a.vector, b.vector);
    let c = 0.5 * (norm(add(eta, xi)) - norm(sub(eta, xi)));
    let id = CMat::identity(2);
    let effect = |i: f64, j: f64| {
        let v = [0, 1, 2].map(|k| i * eta[k] + j * xi[k]);
        (&id.scale_real(1.0 + i * j * c) + &bloch_operator(v)).scale_real(0.25)
    };
    Some([
        effect(1.0, 1.0),
        effect(1.0, -1.0),
        effect(-1.0, 1.0),
        effect(-1.0, -1.0),
    ])
}

/// `(n + d) / (n(d + 1))`.
pub fn white_noise_ibc_threshold(d: u64, n: u64) -> Ratio<u64> {
    assert!(d >= 2 && n >= 2, "need d ≥ 2 and n ≥ 2");
    Ratio::new(n + d, n * (d + 1))
}

/// Whether the white-noise channel of visibility `eta` is n-incompatibility breaking.
pub fn is_n_ibc_white_noise(eta: f64, d: u64, n: u64) -> bool {
    let th = white_noise_ibc_threshold(d, n);
    eta <= *th.numer() as f64 / *th.denom() as f64
}

/// Exact variant of [`is_n_ibc_white_noise`] for rational visibilities.
pub fn is_n_ibc_white_noise_exact(eta: Ratio<u64>, d: u64, n: u64) -> bool {
    eta <= white_noise_ibc_threshold(d, n)
}

/// Two largest `|ηᵢ|`, descending.
pub fn two_largest_abs(eta: [f64; 3]) -> (f64, f64) {
    let mut e = eta.map(f64::abs);
    e.sort_by(|a, b| b.total_cmp(a));
    (e[0], e[1])
}

/// Whether a unital channel's conjugate makes every pair of sharp qubit
/// observables compatible: `η₍₁₎² + η₍₂₎² ≤ 1` on the two largest `|ηᵢ|`.
pub fn is_2ibc_unital(ch: &QubitChannel) -> Result<bool, CompatError> {
    if !ch.is_unital() {
        return Err(CompatError::NotUnital(ch.translation()));
    }
    if let Some(w) = is_cp(ch).witness {
        return Err(CompatError::NotCp(w));
    }
    let (e1, e2) = two_largest_abs(ch.eta());
    Ok(e1 * e1 + e2 * e2 <= 1.0 + BOUNDARY_TOL)
}

/// Largest sharpness `η` for which two equally biased, equally unsharp
/// observables on orthogonal axes stay compatible: `(1 − x²)/√2`.
pub fn biased_ibc_threshold(x_a: f64) -> f64 {
    (1.0 - x_a * x_a) * FRAC_1_SQRT_2
}

/// `n` near-uniform unit vectors on the Fibonacci lattice.
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let th = golden * i as f64;
            [r * th.cos(), r * th.sin(), z]
        })
        .collect()
}

/// Outcome of [`incompatibility_grid_search`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridWitness {
    /// Largest `|η⃗+ξ⃗| + |η⃗−ξ⃗|` found over the channel outputs.
    pub functional: f64,
    pub axes: ([f64; 3], [f64; 3]),
}

impl GridWitness {
    pub fn all_compatible(&self) -> bool {
        self.functional <= 2.0 + BOUNDARY_TOL
    }
}

fn pair_functional(ch: &QubitChannel, a: [f64; 3], b: [f64; 3]) -> f64 {
    let ea = apply_heisenberg(ch, &UnsharpObservable::from_parts_unchecked(0.0, a));
    let eb = apply_heisenberg(ch, &UnsharpObservable::from_parts_unchecked(0.0, b));
    let (u, v) = (ea.sharpness_vector(), eb.sharpness_vector());
    norm(add(u, v)) + norm(sub(u, v))
}

/// Brute-force search for the least compatible pair of sharp observables
/// after the conjugate channel: all pairs of `n_axes` Fibonacci directions,
/// then a deterministic pattern-search refinement of the best pair.
pub fn incompatibility_grid_search(ch: &QubitChannel, n_axes: usize) -> GridWitness {
    let axes = fibonacci_sphere(n_axes);
    let mut best = GridWitness {
        functional: f64::NEG_INFINITY,
        axes: (axes[0], axes[0]),
    };
    for &a in &axes {
        for &b in &axes {
            let f = pair_functional(ch, a, b);
            if f > best.functional {
                best = GridWitness {
                    functional: f,
                    axes: (a, b),
                };
            }
        }
    }
    let unit = |v: [f64; 3]| {
        let n = norm(v);
        v.map(|x| x / n)
    };
    let (mut a, mut b) = best.axes;
    let mut step = 0.1;
    while step > 1e-9 {
        let mut improved = false;
        for coord in 0..6 {
            for sign in [1.0, -1.0] {
                let (mut a2, mut b2) = (a, b);
                if coord < 3 {
                    a2[coord] += sign * step;
                } else {
                    b2[coord - 3] += sign * step;
                }
                let (a2, b2) = (unit(a2), unit(b2));
                let f = pair_functional(ch, a2, b2);
                if f > best.functional {
                    best = GridWitness {
                        functional: f,
                        axes: (a2, b2),
                    };
                    a = a2;
                    b = b2;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}
