//! Randomized cross-checks of the closed-form results against independent
//! computations. Each suite returns a pass count and a per-case CSV that
//! does not depend on the worker count.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::bell::{chsh_max, correlation_tensor, mermin_svetlichny_bounds, seesaw_max, BellKind};
use crate::channels::{apply_heisenberg, apply_schrodinger, apply_to_party, is_cp, QubitChannel};
use crate::compat::{is_2ibc_unital, UnsharpObservable};
use crate::experiments::{item_rng, sample_noise, w_gap_endpoints, with_workers, ExperimentError};
use crate::states::{
    make_state, random_mixed_state, random_pure_state, sample_acin_with, StateSpec,
};

pub const DUALITY_TOL: f64 = 1e-12;
pub const ORACLE_TOL: f64 = 1e-6;
pub const CHSH_ORACLE_TOL: f64 = 1e-4;
pub const SCALING_TOL: f64 = 1e-10;
pub const W_GAP_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Duality,
    Oracle,
    Equivalence,
    ChshOracle,
    Scaling,
    WGap,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Duality,
        Suite::Oracle,
        Suite::Equivalence,
        Suite::ChshOracle,
        Suite::Scaling,
        Suite::WGap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Duality => "duality",
            Suite::Oracle => "oracle",
            Suite::Equivalence => "equivalence",
            Suite::ChshOracle => "chsh-oracle",
            Suite::Scaling => "scaling",
            Suite::WGap => "w-gap",
        }
    }

    /// Keeps the random streams of different suites apart.
    fn stream_base(self) -> u64 {
        (self as u64 + 1) << 40
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

/// Case counts and optimizer effort for the randomized suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub duality_cases: usize,
    pub oracle_cases: usize,
    pub oracle_restarts: usize,
    pub equivalence_cases: usize,
    pub chsh_oracle_cases: usize,
    pub chsh_restarts: usize,
}

impl VerifyConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            duality_cases: 1000,
            oracle_cases: 1000,
            oracle_restarts: 4,
            equivalence_cases: 500,
            chsh_oracle_cases: 200,
            chsh_restarts: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checked: usize,
    pub passed: usize,
    /// Largest observed deviation (or bound excess) over all cases.
    pub worst: f64,
    pub csv: String,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.checked == self.passed
    }

    fn from_cases(suite: Suite, header: &str, cases: Vec<(bool, f64, String)>) -> Self {
        let mut csv = String::from(header);
        csv.push('\n');
        let mut passed = 0;
        let mut worst = f64::NEG_INFINITY;
        for (ok, dev, line) in &cases {
            passed += usize::from(*ok);
            worst = worst.max(*dev);
            csv.push_str(line);
            csv.push('\n');
        }
        Self {
            suite,
            checked: cases.len(),
            passed,
            worst,
            csv,
        }
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<12} {}/{} passed (worst {:e})",
            self.suite.name(),
            self.passed,
            self.checked,
            self.worst
        )
    }
}

fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| StandardNormal.sample(rng));
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-9 {
            return v.map(|x| x / n);
        }
    }
}

/// Unital CP channel with `η` uniform in the tetrahedron.
pub fn random_unital_cp<R: Rng + ?Sized>(rng: &mut R) -> QubitChannel {
    loop {
        let eta: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..=1.0));
        let ch = QubitChannel::unital(eta);
        if is_cp(&ch).cp {
            return ch;
        }
    }
}

/// CP channel, nonunital with probability ½.
///
/// Nonunital draws are either `s·E + (1−s)·(ρ ↦ σ)` with `E` unital CP
/// and `|t| ≤ 1−s` the Bloch vector of the replacement, or amplitude
/// damping towards a random pole of a random axis.
pub fn random_cp<R: Rng + ?Sized>(rng: &mut R) -> QubitChannel {
    if rng.random_bool(0.5) {
        return random_unital_cp(rng);
    }
    if rng.random_bool(0.5) {
        let s: f64 = rng.random();
        let eta = random_unital_cp(rng).eta().map(|e| s * e);
        let r = (1.0 - s) * rng.random::<f64>();
        let t = random_unit(rng).map(|u| r * u);
        return QubitChannel::new(t, eta);
    }
    let g: f64 = rng.random();
    let k = rng.random_range(0..3usize);
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let mut t = [0.0; 3];
    t[k] = sign * g;
    let mut eta = [(1.0 - g).sqrt(); 3];
    eta[k] = 1.0 - g;
    QubitChannel::new(t, eta)
}

pub fn random_observable<R: Rng + ?Sized>(rng: &mut R) -> UnsharpObservable {
    let sharpness: f64 = rng.random();
    let room = 1.0 - sharpness;
    let bias = if room > 0.0 {
        rng.random_range(-room..room)
    } else {
        0.0
    };
    UnsharpObservable::new(bias, sharpness, random_unit(rng)).expect("valid by construction")
}

fn run_cases<T: Send>(
    workers: usize,
    n: usize,
    f: impl Fn(usize) -> Result<T, ExperimentError> + Sync + Send,
) -> Result<Vec<T>, ExperimentError> {
    with_workers(workers, || (0..n).into_par_iter().map(f).collect())?
}

/// `Tr[E(ρ)A] = Tr[ρE*(A)]` on random CP channels, qubit states and
/// unsharp observables.
pub fn duality(cfg: &VerifyConfig, workers: usize) -> Result<SuiteReport, ExperimentError> {
    let cases = run_cases(workers, cfg.duality_cases, |i| {
        let mut rng = item_rng(cfg.seed, Suite::Duality.stream_base() + i as u64);
        let ch = random_cp(&mut rng);
        let rho = random_mixed_state(&mut rng, 1);
        let a = random_observable(&mut rng);
        let lhs = apply_schrodinger(&ch, &rho)?.expectation(&a.operator());
        let rhs = rho.expectation(&apply_heisenberg(&ch, &a).operator());
        let dev = (lhs - rhs).abs();
        Ok((dev <= DUALITY_TOL, dev, format!("{i},{lhs},{rhs},{dev}")))
    })?;
    Ok(SuiteReport::from_cases(
        Suite::Duality,
        "case,schrodinger,heisenberg,deviation",
        cases,
    ))
}

/// See-saw Mermin/Svetlichny values never exceed the singular-value bounds
/// on random states with random CP noise on party A.
pub fn oracle(cfg: &VerifyConfig, workers: usize) -> Result<SuiteReport, ExperimentError> {
    let cases = run_cases(workers, cfg.oracle_cases, |i| {
        let stream = Suite::Oracle.stream_base() + i as u64;
        let mut rng = item_rng(cfg.seed, stream);
        let spec = sample_acin_with(&mut rng);
        let noise = sample_noise(&mut rng);
        let rho = apply_to_party(&QubitChannel::unital(noise), &make_state(&spec)?, &[0])?;
        let t = correlation_tensor(&rho)?;
        let l1 = t.singular_values()[0];
        let (mb, sb) = mermin_svetlichny_bounds(&t);
        let m = seesaw_max(&rho, BellKind::Mermin, cfg.oracle_restarts, stream)?.value;
        let s = seesaw_max(&rho, BellKind::Svetlichny, cfg.oracle_restarts, stream)?.value;
        let excess = (m - mb).max(s - sb);
        Ok((
            excess <= ORACLE_TOL,
            excess,
            format!("{i},{l1},{mb},{m},{sb},{s}"),
        ))
    })?;
    Ok(SuiteReport::from_cases(
        Suite::Oracle,
        "case,lambda1,mermin_bound,mermin_seesaw,svetlichny_bound,svetlichny_seesaw",
        cases,
    ))
}

/// CHSH nonlocality breaking agrees with pairwise incompatibility breaking
/// of the conjugate channel on random unital CP channels.
pub fn equivalence(cfg: &VerifyConfig, workers: usize) -> Result<SuiteReport, ExperimentError> {
    let cases = run_cases(workers, cfg.equivalence_cases, |i| {
        let mut rng = item_rng(cfg.seed, Suite::Equivalence.stream_base() + i as u64);
        let ch = random_unital_cp(&mut rng);
        let nbc = crate::bell::is_chsh_nbc_unital(&ch)?;
        let ibc = is_2ibc_unital(&ch.conjugate()?).expect("unital CP channel");
        let [x, y, z] = ch.eta();
        Ok((
            nbc == ibc,
            f64::from(u8::from(nbc != ibc)),
            format!("{i},{x},{y},{z},{nbc},{ibc}"),
        ))
    })?;
    Ok(SuiteReport::from_cases(
        Suite::Equivalence,
        "case,eta_x,eta_y,eta_z,chsh_nbc,ibc2",
        cases,
    ))
}

/// The closed-form CHSH maximum against the see-saw optimum on random
/// two-qubit states, half of them pure.
pub fn chsh_oracle(cfg: &VerifyConfig, workers: usize) -> Result<SuiteReport, ExperimentError> {
    let cases = run_cases(workers, cfg.chsh_oracle_cases, |i| {
        let stream = Suite::ChshOracle.stream_base() + i as u64;
        let mut rng = item_rng(cfg.seed, stream);
        let rho = if i % 2 == 0 {
            random_pure_state(&mut rng, 2)
        } else {
            random_mixed_state(&mut rng, 2)
        };
        let closed = chsh_max(&rho)?;
        let found = seesaw_max(&rho, BellKind::Chsh, cfg.chsh_restarts, stream)?.value;
        let dev = (closed - found).abs();
        Ok((dev <= CHSH_ORACLE_TOL, dev, format!("{i},{closed},{found}")))
    })?;
    Ok(SuiteReport::from_cases(
        Suite::ChshOracle,
        "case,chsh_max,seesaw",
        cases,
    ))
}

/// `λ_max` under isotropic noise on `n` parties equals `ηⁿ λ_max`.
pub fn scaling() -> Result<SuiteReport, ExperimentError> {
    let mut cases = Vec::new();
    for spec in [StateSpec::ghz_symmetric(), StateSpec::w_symmetric()] {
        let rho = make_state(&spec)?;
        let clean = correlation_tensor(&rho)?.singular_values()[0];
        for n in 1..=3usize {
            let parties: Vec<usize> = (0..n).collect();
            for eta in [0.3, 0.6, 0.9] {
                let noisy = apply_to_party(&QubitChannel::isotropic(eta), &rho, &parties)?;
                let got = correlation_tensor(&noisy)?.singular_values()[0];
                let want = eta.powi(n as i32) * clean;
                let dev = (got - want).abs();
                cases.push((
                    dev <= SCALING_TOL,
                    dev,
                    format!("{},{n},{eta},{want},{got}", spec.family_name()),
                ));
            }
        }
    }
    Ok(SuiteReport::from_cases(
        Suite::Scaling,
        "family,n_noised,eta,expected,lambda_max",
        cases,
    ))
}

/// Bisected gap endpoints against `(1/√2, 3/√17)`.
pub fn w_gap() -> Result<SuiteReport, ExperimentError> {
    let (lo, hi) = w_gap_endpoints()?;
    let want = [FRAC_1_SQRT_2, 3.0 / 17f64.sqrt()];
    let cases = [("lower", lo, want[0]), ("upper", hi, want[1])]
        .into_iter()
        .map(|(name, got, w)| {
            let dev = (got - w).abs();
            (dev <= W_GAP_TOL, dev, format!("{name},{w},{got}"))
        })
        .collect();
    Ok(SuiteReport::from_cases(
        Suite::WGap,
        "endpoint,expected,bisected",
        cases,
    ))
}

pub fn run_suite(
    suite: Suite,
    cfg: &VerifyConfig,
    workers: usize,
) -> Result<SuiteReport, ExperimentError> {
    match suite {
        Suite::Duality => duality(cfg, workers),
        Suite::Oracle => oracle(cfg, workers),
        Suite::Equivalence => equivalence(cfg, workers),
        Suite::ChshOracle => chsh_oracle(cfg, workers),
        Suite::Scaling => scaling(),
        Suite::WGap => w_gap(),
    }
}
