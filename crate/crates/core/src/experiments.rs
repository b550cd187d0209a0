//! Parameter sweeps, the random-state Monte Carlo and the W-state gap scan.
//!
//! All randomness is drawn from per-item ChaCha8 streams keyed by
//! `(seed, item index)`, and parallel maps collect in input order, so
//! outputs do not depend on the worker count.

use std::f64::consts::FRAC_1_SQRT_2;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use crate::bell::{correlation_tensor, is_chsh_nbc_unital, BellError};
use crate::channels::{apply_to_party, is_cp, ChannelError, QubitChannel};
use crate::states::{make_state, sample_acin_with, StateError, StateSpec};
use crate::thresholds::{analytic_threshold_n, ThresholdError, ThresholdReport};

/// Slack allowed when checking that a grid stays inside a family's domain.
pub const DOMAIN_TOL: f64 = 1e-12;

pub const MERMIN_THRESHOLD: f64 = FRAC_1_SQRT_2;
pub const SVETLICHNY_THRESHOLD: f64 = 1.0;

/// Party that receives the noise in the Monte Carlo.
pub const MC_NOISED_PARTY: usize = 0;

pub const SWEEP_HEADER: [&str; 8] = [
    "family",
    "param1",
    "param2",
    "eta_M",
    "eta_S",
    "eta_2ibc",
    "lambda_max_unit",
    "always_breaks_flag",
];
pub const MC_HEADER: [&str; 5] = ["sample_id", "eta", "lam1", "lam2", "lam3"];
pub const SUMMARY_HEADER: [&str; 4] = [
    "lambda_index",
    "eta_min_mermin",
    "eta_min_svetlichny",
    "count_crossing",
];
pub const W_GAP_HEADER: [&str; 5] = ["eta", "lambda1", "s_nbc", "chsh_nbc", "gap"];

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid config: {0}")]
    Config(String),

    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Threshold(#[from] ThresholdError),

    #[error(transparent)]
    State(#[from] StateError),

    #[error(transparent)]
    Bell(#[from] BellError),

    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// Runs `f` on a dedicated pool with `workers` threads.
pub fn with_workers<T: Send>(
    workers: usize,
    f: impl FnOnce() -> T + Send,
) -> Result<T, ExperimentError> {
    if workers == 0 {
        return Err(ExperimentError::Config("workers must be ≥ 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()?;
    Ok(pool.install(f))
}

/// `ChaCha8` seeded with `seed` on stream `index`.
pub fn item_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

// ---------------------------------------------------------------------------
// Sweeps

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(try_from = "String")]
pub enum SweepFamily {
    Ghz,
    W,
    Ms,
    MixedGhz,
}

impl SweepFamily {
    pub fn name(self) -> &'static str {
        match self {
            SweepFamily::Ghz => "GHZ",
            SweepFamily::W => "W",
            SweepFamily::Ms => "MS",
            SweepFamily::MixedGhz => "MixedGHZ",
        }
    }

    /// Number of swept parameters: W uses `(α, β)`, the others one.
    pub fn arity(self) -> usize {
        if self == SweepFamily::W {
            2
        } else {
            1
        }
    }

    /// Builds the state at a grid point. GHZ and MS sweep `α` with
    /// `β = √(1−α²)`; W sweeps `(α, β)` with `γ = √(1−α²−β²)`; MixedGHZ
    /// sweeps `p`.
    pub fn spec_at(self, p1: f64, p2: Option<f64>) -> Result<StateSpec, ExperimentError> {
        let out_of_domain = || {
            ExperimentError::Config(format!(
                "{} grid point ({p1}, {}) outside the family's domain",
                self.name(),
                fmt_opt(p2)
            ))
        };
        let unit = 0.0..=1.0;
        if !unit.contains(&p1) {
            return Err(out_of_domain());
        }
        let rest = |s: f64| {
            if s > 1.0 + DOMAIN_TOL {
                Err(out_of_domain())
            } else {
                Ok((1.0 - s).max(0.0).sqrt())
            }
        };
        Ok(match self {
            SweepFamily::Ghz => StateSpec::Ghz {
                alpha: p1,
                beta: rest(p1 * p1)?,
            },
            SweepFamily::Ms => StateSpec::Ms {
                alpha: p1,
                beta: rest(p1 * p1)?,
            },
            SweepFamily::MixedGhz => StateSpec::MixedGhz { p: p1 },
            SweepFamily::W => {
                let b = p2.ok_or_else(out_of_domain)?;
                if !unit.contains(&b) {
                    return Err(out_of_domain());
                }
                StateSpec::W {
                    alpha: p1,
                    beta: b,
                    gamma: rest(p1 * p1 + b * b)?,
                }
            }
        })
    }
}

impl FromStr for SweepFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ghz" => Ok(SweepFamily::Ghz),
            "w" => Ok(SweepFamily::W),
            "ms" => Ok(SweepFamily::Ms),
            "mixedghz" => Ok(SweepFamily::MixedGhz),
            _ => Err(format!("unknown sweep family {s:?} (GHZ, W, MS, MixedGHZ)")),
        }
    }
}

impl TryFrom<String> for SweepFamily {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// Evenly spaced `steps` points from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct GridRange {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl GridRange {
    pub fn new(start: f64, stop: f64, steps: usize) -> Self {
        Self { start, stop, steps }
    }

    pub fn single(x: f64) -> Self {
        Self::new(x, x, 1)
    }

    /// A single point is allowed only as `steps = 1` with `start = stop`.
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(ExperimentError::Config("grid bounds must be finite".into()));
        }
        match self.steps {
            0 => Err(ExperimentError::Config(
                "grid needs at least one step".into(),
            )),
            1 if self.start != self.stop => Err(ExperimentError::Config(
                "steps = 1 requires start = stop; use steps ≥ 2 for a range".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let u = i as f64 / last;
                self.start * (1.0 - u) + self.stop * u
            })
            .collect()
    }
}

fn default_n_noised() -> usize {
    1
}

/// Sweep settings, also readable from JSON:
///
/// ```json
/// {"family": "GHZ", "param1": {"start": 0.05, "stop": 0.7, "steps": 66},
///  "n_noised": 1, "output": "ghz.csv"}
/// ```
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub family: SweepFamily,
    pub param1: GridRange,
    #[serde(default)]
    pub param2: Option<GridRange>,
    #[serde(default = "default_n_noised")]
    pub n_noised: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl SweepConfig {
    pub fn new(family: SweepFamily, param1: GridRange, param2: Option<GridRange>) -> Self {
        Self {
            family,
            param1,
            param2,
            n_noised: 1,
            output: None,
        }
    }

    /// All grid points, `param1` outer and `param2` inner.
    pub fn grid(&self) -> Vec<(f64, Option<f64>)> {
        let outer = self.param1.points();
        match &self.param2 {
            None => outer.into_iter().map(|a| (a, None)).collect(),
            Some(inner) => {
                let inner = inner.points();
                outer
                    .into_iter()
                    .flat_map(|a| inner.iter().map(move |&b| (a, Some(b))))
                    .collect()
            }
        }
    }

    /// Checks the grid shape and every grid point against the family domain.
    pub fn validate(&self) -> Result<(), ExperimentError> {
        self.param1.validate()?;
        match (self.family.arity(), &self.param2) {
            (2, Some(g)) => g.validate()?,
            (2, None) => {
                return Err(ExperimentError::Config("W sweeps need param2 (β)".into()));
            }
            (_, Some(_)) => {
                return Err(ExperimentError::Config(format!(
                    "{} sweeps take a single parameter",
                    self.family.name()
                )));
            }
            _ => {}
        }
        if !(1..=3).contains(&self.n_noised) {
            return Err(ExperimentError::Config(format!(
                "n_noised must be 1..=3, got {}",
                self.n_noised
            )));
        }
        for (a, b) in self.grid() {
            self.family.spec_at(a, b)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub family: SweepFamily,
    pub param1: f64,
    pub param2: Option<f64>,
    pub report: ThresholdReport,
}

impl SweepRow {
    pub fn csv_record(&self) -> [String; 8] {
        let r = &self.report;
        [
            self.family.name().to_string(),
            self.param1.to_string(),
            fmt_opt(self.param2),
            r.eta_m.to_string(),
            r.eta_s.to_string(),
            r.eta_2ibc.to_string(),
            r.lambda_max_unit.to_string(),
            r.always_breaks().to_string(),
        ]
    }
}

/// One threshold row per grid point, in grid-major order.
pub fn run_sweep(cfg: &SweepConfig, workers: usize) -> Result<Vec<SweepRow>, ExperimentError> {
    cfg.validate()?;
    let grid = cfg.grid();
    with_workers(workers, || {
        grid.par_iter()
            .map(|&(a, b)| {
                let spec = cfg.family.spec_at(a, b)?;
                Ok(SweepRow {
                    family: cfg.family,
                    param1: a,
                    param2: b,
                    report: analytic_threshold_n(&spec, cfg.n_noised)?,
                })
            })
            .collect()
    })?
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), ExperimentError> {
    let mut w = csv_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for row in rows {
        w.write_record(row.csv_record())?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Monte Carlo

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloConfig {
    pub n_samples: usize,
    pub seed: u64,
    pub mermin_threshold: f64,
    pub svetlichny_threshold: f64,
}

impl MonteCarloConfig {
    pub fn new(n_samples: usize, seed: u64) -> Self {
        Self {
            n_samples,
            seed,
            mermin_threshold: MERMIN_THRESHOLD,
            svetlichny_threshold: SVETLICHNY_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McRecord {
    pub sample_id: u64,
    /// Euclidean norm of the noise vector.
    pub eta: f64,
    /// Singular values of the noised tensor, descending.
    pub lam: [f64; 3],
    pub noise: [f64; 3],
    /// Largest singular value of the same state before noise.
    pub clean_lam1: f64,
}

impl McRecord {
    pub fn csv_record(&self) -> [String; 5] {
        [
            self.sample_id.to_string(),
            self.eta.to_string(),
            self.lam[0].to_string(),
            self.lam[1].to_string(),
            self.lam[2].to_string(),
        ]
    }
}

/// Per-`λ` index minima of the noise norm over samples whose `λ` exceeds
/// the Mermin (`1/√2`) or Svetlichny (`1`) threshold; `count_crossing`
/// counts samples above the Mermin threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSummaryRow {
    /// 1-based.
    pub lambda_index: usize,
    pub eta_min_mermin: Option<f64>,
    pub eta_min_svetlichny: Option<f64>,
    pub count_crossing: usize,
}

impl McSummaryRow {
    pub fn csv_record(&self) -> [String; 4] {
        [
            self.lambda_index.to_string(),
            fmt_opt(self.eta_min_mermin),
            fmt_opt(self.eta_min_svetlichny),
            self.count_crossing.to_string(),
        ]
    }

    /// `η_min(Svetlichny)/η_min(Mermin)`, when both exist.
    pub fn ratio(&self) -> Option<f64> {
        Some(self.eta_min_svetlichny? / self.eta_min_mermin?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McOutput {
    pub records: Vec<McRecord>,
    pub summary: [McSummaryRow; 3],
}

/// Membership in the noise domain: the box `[0,1]³`, the CP tetrahedron
/// and the closed unit ball.
pub fn in_noise_domain(eta: [f64; 3]) -> bool {
    eta.iter().all(|x| (0.0..=1.0).contains(x))
        && eta.iter().map(|x| x * x).sum::<f64>() <= 1.0
        && is_cp(&QubitChannel::unital(eta)).cp
}

/// Uniform draw from the noise domain by rejection from the unit box.
pub fn sample_noise<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let eta: [f64; 3] = std::array::from_fn(|_| rng.random::<f64>());
        if in_noise_domain(eta) {
            return eta;
        }
    }
}

/// One Monte Carlo sample: a random state, noise on party A, and the
/// singular values before and after.
pub fn montecarlo_sample(seed: u64, sample_id: u64) -> Result<McRecord, ExperimentError> {
    let mut rng = item_rng(seed, sample_id);
    let spec = sample_acin_with(&mut rng);
    let noise = sample_noise(&mut rng);
    let rho = make_state(&spec)?;
    let clean_lam1 = correlation_tensor(&rho)?.singular_values()[0];
    let noisy = apply_to_party(&QubitChannel::unital(noise), &rho, &[MC_NOISED_PARTY])?;
    let lam = correlation_tensor(&noisy)?.singular_values();
    Ok(McRecord {
        sample_id,
        eta: noise.iter().map(|x| x * x).sum::<f64>().sqrt(),
        lam,
        noise,
        clean_lam1,
    })
}

pub fn summarize(records: &[McRecord], cfg: &MonteCarloConfig) -> [McSummaryRow; 3] {
    std::array::from_fn(|k| {
        let min_over = |thr: f64| {
            records
                .iter()
                .filter(|r| r.lam[k] > thr)
                .map(|r| r.eta)
                .min_by(f64::total_cmp)
        };
        McSummaryRow {
            lambda_index: k + 1,
            eta_min_mermin: min_over(cfg.mermin_threshold),
            eta_min_svetlichny: min_over(cfg.svetlichny_threshold),
            count_crossing: records
                .iter()
                .filter(|r| r.lam[k] > cfg.mermin_threshold)
                .count(),
        }
    })
}

pub fn run_montecarlo(cfg: &MonteCarloConfig, workers: usize) -> Result<McOutput, ExperimentError> {
    if cfg.n_samples == 0 {
        return Err(ExperimentError::Config("n_samples must be ≥ 1".into()));
    }
    let seed = cfg.seed;
    let records: Vec<McRecord> = with_workers(workers, || {
        (0..cfg.n_samples as u64)
            .into_par_iter()
            .map(|i| montecarlo_sample(seed, i))
            .collect::<Result<_, _>>()
    })??;
    let summary = summarize(&records, cfg);
    Ok(McOutput { records, summary })
}

pub fn write_mc_csv<W: Write>(records: &[McRecord], out: W) -> Result<(), ExperimentError> {
    let mut w = csv_writer(out);
    w.write_record(MC_HEADER)?;
    for r in records {
        w.write_record(r.csv_record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(
    summary: &[McSummaryRow],
    out: W,
) -> Result<(), ExperimentError> {
    let mut w = csv_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for r in summary {
        w.write_record(r.csv_record())?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// W-state gap scan

pub const W_GAP_START: f64 = 0.69;
pub const W_GAP_STOP: f64 = 0.74;
pub const W_GAP_STEPS: usize = 51;
const BISECTION_ITERS: usize = 60;
const S_NBC_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WGapRow {
    pub eta: f64,
    pub lambda1: f64,
    /// Svetlichny nonlocality broken: `4λ₁ ≤ 4`.
    pub s_nbc: bool,
    /// CHSH nonlocality broken by the same channel.
    pub chsh_nbc: bool,
    /// Breaks Svetlichny but not CHSH nonlocality.
    pub gap: bool,
}

impl WGapRow {
    pub fn csv_record(&self) -> [String; 5] {
        [
            self.eta.to_string(),
            self.lambda1.to_string(),
            self.s_nbc.to_string(),
            self.chsh_nbc.to_string(),
            self.gap.to_string(),
        ]
    }
}

/// Isotropic noise `η` on party A of the symmetric W state.
pub fn w_gap_row(eta: f64) -> Result<WGapRow, ExperimentError> {
    let ch = QubitChannel::isotropic(eta);
    let rho = apply_to_party(&ch, &make_state(&StateSpec::w_symmetric())?, &[0])?;
    let lambda1 = correlation_tensor(&rho)?.singular_values()[0];
    let s_nbc = 4.0 * lambda1 <= 4.0 + S_NBC_TOL;
    let chsh_nbc = is_chsh_nbc_unital(&ch)?;
    Ok(WGapRow {
        eta,
        lambda1,
        s_nbc,
        chsh_nbc,
        gap: s_nbc && !chsh_nbc,
    })
}

pub fn run_w_gap_scan() -> Result<Vec<WGapRow>, ExperimentError> {
    GridRange::new(W_GAP_START, W_GAP_STOP, W_GAP_STEPS)
        .points()
        .into_iter()
        .map(w_gap_row)
        .collect()
}

pub fn write_w_gap_csv<W: Write>(rows: &[WGapRow], out: W) -> Result<(), ExperimentError> {
    let mut w = csv_writer(out);
    w.write_record(W_GAP_HEADER)?;
    for r in rows {
        w.write_record(r.csv_record())?;
    }
    w.flush()?;
    Ok(())
}

/// Last `η` where `pred` holds, given it holds at `lo` and fails at `hi`.
fn bisect(
    mut lo: f64,
    mut hi: f64,
    pred: impl Fn(f64) -> Result<bool, ExperimentError>,
) -> Result<f64, ExperimentError> {
    if !pred(lo)? || pred(hi)? {
        return Err(ExperimentError::Config(format!(
            "no single transition in [{lo}, {hi}]"
        )));
    }
    for _ in 0..BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        if pred(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Endpoints of the gap interval: where CHSH breaking stops and where
/// Svetlichny breaking stops.
pub fn w_gap_endpoints() -> Result<(f64, f64), ExperimentError> {
    let lo = bisect(W_GAP_START, W_GAP_STOP, |e| Ok(w_gap_row(e)?.chsh_nbc))?;
    let hi = bisect(W_GAP_START, W_GAP_STOP, |e| Ok(w_gap_row(e)?.s_nbc))?;
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv_string(rows: &[SweepRow]) -> String {
        let mut buf = Vec::new();
        write_sweep_csv(rows, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn ghz_sweep_matches_closed_form() {
        // below α ≈ 0.36 the z singular value |α²−β²| dominates instead
        let cfg = SweepConfig::new(SweepFamily::Ghz, GridRange::new(0.4, 0.7, 9), None);
        for row in run_sweep(&cfg, 1).unwrap() {
            let a = row.param1;
            let b = (1.0 - a * a).sqrt();
            assert!((row.report.eta_m - 1.0 / (4.0 * a * b)).abs() < 1e-12);
            assert!((row.report.eta_s - 1.0 / (2.0 * 2f64.sqrt() * a * b)).abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_ghz_region() {
        let cfg = SweepConfig::new(SweepFamily::MixedGhz, GridRange::new(0.75, 0.99, 5), None);
        for row in run_sweep(&cfg, 2).unwrap() {
            assert!(row.report.eta_s < 1.0);
            assert!((row.report.eta_s - 1.0 / (2f64.sqrt() * row.param1)).abs() < 1e-12);
        }
    }

    #[test]
    fn single_point_grid() {
        let cfg = SweepConfig::new(SweepFamily::Ghz, GridRange::single(0.5), None);
        let text = csv_string(&run_sweep(&cfg, 1).unwrap());
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with(&SWEEP_HEADER.join(",")));
    }

    #[test]
    fn invalid_grids() {
        let bad = [
            SweepConfig::new(SweepFamily::Ghz, GridRange::new(0.0, 1.2, 5), None),
            SweepConfig::new(SweepFamily::Ghz, GridRange::new(0.1, 0.5, 1), None),
            SweepConfig::new(SweepFamily::W, GridRange::new(0.1, 0.5, 3), None),
            SweepConfig::new(
                SweepFamily::W,
                GridRange::new(0.0, 0.9, 3),
                Some(GridRange::new(0.0, 0.9, 3)),
            ),
            SweepConfig::new(
                SweepFamily::Ms,
                GridRange::new(0.1, 0.5, 3),
                Some(GridRange::new(0.0, 0.1, 2)),
            ),
        ];
        for cfg in bad {
            assert!(
                matches!(run_sweep(&cfg, 1), Err(ExperimentError::Config(_))),
                "{cfg:?}"
            );
        }
    }

    #[test]
    fn w_sweep_order_is_grid_major() {
        let cfg = SweepConfig::new(
            SweepFamily::W,
            GridRange::new(0.1, 0.5, 3),
            Some(GridRange::new(0.2, 0.6, 2)),
        );
        let rows = run_sweep(&cfg, 3).unwrap();
        let want = [
            (0.1, 0.2),
            (0.1, 0.6),
            (0.3, 0.2),
            (0.3, 0.6),
            (0.5, 0.2),
            (0.5, 0.6),
        ];
        assert_eq!(rows.len(), want.len());
        for (r, (a, b)) in rows.iter().zip(want) {
            assert!((r.param1 - a).abs() < 1e-15 && (r.param2.unwrap() - b).abs() < 1e-15);
        }
    }

    #[test]
    fn sweep_config_json() {
        let cfg: SweepConfig = serde_json::from_str(
            r#"{"family":"mixedghz","param1":{"start":0.8,"stop":1.0,"steps":3},"n_noised":2}"#,
        )
        .unwrap();
        assert_eq!(cfg.family, SweepFamily::MixedGhz);
        assert_eq!(cfg.n_noised, 2);
        assert!(serde_json::from_str::<SweepConfig>(
            r#"{"family":"X","param1":{"start":0,"stop":1,"steps":2}}"#
        )
        .is_err());
        assert!(serde_json::from_str::<SweepConfig>(
            r#"{"family":"GHZ","param1":{"start":0,"stop":1,"steps":2},"bogus":1}"#
        )
        .is_err());
    }

    #[test]
    fn noise_sampler_stays_in_domain() {
        let mut rng = item_rng(3, 0);
        for _ in 0..500 {
            let eta = sample_noise(&mut rng);
            assert!(in_noise_domain(eta));
        }
        assert!(!in_noise_domain([0.7, 0.0, 0.7]));
        assert!(!in_noise_domain([-0.1, 0.0, 0.0]));
    }

    #[test]
    fn single_sample_summary_is_empty() {
        let out = run_montecarlo(&MonteCarloConfig::new(1, 0x5EED), 1).unwrap();
        assert_eq!(out.records.len(), 1);
        let r = out.records[0];
        for row in out.summary {
            let crossed = r.lam[row.lambda_index - 1] > MERMIN_THRESHOLD;
            assert_eq!(row.eta_min_mermin.is_some(), crossed);
        }
    }

    #[test]
    fn montecarlo_independent_of_workers() {
        let cfg = MonteCarloConfig::new(40, 11);
        let a = run_montecarlo(&cfg, 1).unwrap();
        let b = run_montecarlo(&cfg, 3).unwrap();
        assert_eq!(a, b);
        for r in &a.records {
            assert!(r.lam[0] >= r.lam[1] && r.lam[1] >= r.lam[2] && r.lam[2] >= 0.0);
            let m = r.noise.iter().cloned().fold(0.0, f64::max);
            assert!(r.lam[0] <= m * r.clean_lam1 + 1e-10);
        }
    }

    #[test]
    fn w_gap_examples() {
        let r = w_gap_row(0.72).unwrap();
        assert!(r.s_nbc && !r.chsh_nbc && r.gap);
        let r = w_gap_row(0.70).unwrap();
        assert!(r.s_nbc && r.chsh_nbc && !r.gap);
        let r = w_gap_row(0.73).unwrap();
        assert!(!r.s_nbc && !r.gap);
    }

    #[test]
    fn w_gap_endpoints_bisect() {
        let (lo, hi) = w_gap_endpoints().unwrap();
        assert!((lo - FRAC_1_SQRT_2).abs() < 1e-9);
        assert!((hi - 3.0 / 17f64.sqrt()).abs() < 1e-9);
    }
}
