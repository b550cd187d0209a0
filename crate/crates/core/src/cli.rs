//! Command-line front end. [`run`] parses arguments, dispatches and
//! returns the process exit code so the whole surface is testable
//! in-process.
//!
//! Exit codes: 0 success, 1 I/O or runtime failure, 2 usage error,
//! 3 property violation reported by `verify`.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;
use serde::Deserialize;

use crate::bell::{
    chsh_biased_condition, chsh_max, correlation_tensor, is_chsh_nbc_unital,
    mermin_svetlichny_bounds, seesaw_max, BellKind, DEFAULT_RESTARTS,
};
use crate::channels::{apply_to_party, NoiseVector, QubitChannel};
use crate::compat::{
    incompatibility_grid_search, is_2ibc_unital, is_n_ibc_white_noise_exact, jointly_measurable,
    white_noise_ibc_threshold, UnsharpObservable,
};
use crate::experiments::{
    run_montecarlo, run_sweep, run_w_gap_scan, w_gap_endpoints, write_mc_csv, write_summary_csv,
    write_sweep_csv, write_w_gap_csv, GridRange, MonteCarloConfig, SweepConfig, SweepFamily,
};
use crate::states::{make_state, phi_plus, StateSpec};
use crate::thresholds::{
    analytic_threshold_n, anisotropic_singular_values, numeric_threshold, ThresholdError,
};
use crate::verify::{run_suite, Suite, VerifyConfig};

pub const DEFAULT_SEED: u64 = 0x5EED;

/// Amplitudes typed on the command line are rescaled when their norm is
/// this close to one.
pub const CLI_RENORM_TOL: f64 = 5e-3;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

const STATE_HELP: &str = "State as FAMILY:key=value,... e.g. GHZ:a=0.7071,b=0.7071, \
W:a=0.577,b=0.577,c=0.577, MS:a=0.6,b=0.8, MixedGHZ:p=0.9, \
Acin:l0=..,l1=..,l2=..,l3=..,l4=..,phi=..";
const CHANNEL_HELP: &str = "Qubit channel: iso:ETA, diag:ETA_X,ETA_Y,ETA_Z or \
t=(tx,ty,tz);T=(ex,ey,ez)";

#[derive(Debug, Parser)]
#[command(
    name = "qnib",
    version,
    about = "Incompatibility- and nonlocality-breaking qubit channels"
)]
pub struct Cli {
    /// RNG seed for randomized commands (decimal or 0x-hex); echoed in output headers.
    #[arg(long, global = true, value_parser = parse_seed)]
    pub seed: Option<u64>,

    /// Worker threads for parallel commands (default: available cores).
    #[arg(long, global = true, env = "QNIB_WORKERS")]
    pub workers: Option<usize>,

    /// Output path (CSV file, or a directory for `verify`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// JSON config file; explicit flags take precedence over its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Joint measurability and incompatibility-breaking queries.
    Compat(CompatArgs),
    /// CHSH maximum and CHSH nonlocality breaking of a channel.
    Chsh(ChshArgs),
    /// Correlation tensor, Mermin/Svetlichny bounds and see-saw values.
    Tripartite(TripartiteArgs),
    /// Nonlocality-breaking thresholds of a state family member.
    Threshold(ThresholdArgs),
    /// Threshold sweep over a family's parameters, as CSV.
    ///
    /// Columns: family,param1,param2,eta_M,eta_S,eta_2ibc,lambda_max_unit,always_breaks_flag.
    /// With --w-gap: eta,lambda1,s_nbc,chsh_nbc,gap.
    Sweep(SweepArgs),
    /// Random-state Monte Carlo of noised singular values, as CSV.
    ///
    /// Records: sample_id,eta,lam1,lam2,lam3.
    /// Summary: lambda_index,eta_min_mermin,eta_min_svetlichny,count_crossing.
    Montecarlo(MonteCarloArgs),
    /// Randomized cross-checks; exits 3 on any violation.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct CompatArgs {
    /// Observable pair "OBS;OBS" with OBS = x:BIAS,eta:SHARPNESS[,theta:ANGLE]
    /// (axis in the x-z plane at ANGLE radians from z); the second OBS may be
    /// "orthogonal" (same bias and sharpness, axis rotated by π/2) or "parallel".
    #[arg(long)]
    pub pair: Option<String>,

    /// Check 2-IBC of a unital channel's conjugate.
    #[arg(long, help = CHANNEL_HELP)]
    pub channel: Option<String>,

    /// Also run a Fibonacci-grid incompatibility search with this many axes.
    #[arg(long, requires = "channel")]
    pub grid: Option<usize>,

    /// White-noise visibility (decimal or p/q) for the n-IBC threshold test.
    #[arg(long)]
    pub white_noise: Option<String>,

    /// Dimension for --white-noise.
    #[arg(long, default_value_t = 2)]
    pub dim: u64,

    /// Number of observables for --white-noise.
    #[arg(long, default_value_t = 2)]
    pub n: u64,
}

#[derive(Debug, Args)]
pub struct ChshArgs {
    /// Unital channel applied to one side of |Φ⁺⟩.
    #[arg(long, help = CHANNEL_HELP)]
    pub channel: Option<String>,

    /// Biased observables on a singlet: X_A,ETA_A,X_B,ETA_B.
    #[arg(long, value_delimiter = ',', num_args = 4)]
    pub biased: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct TripartiteArgs {
    #[arg(long, help = STATE_HELP)]
    pub state: String,

    /// Channel applied to the parties in --parties.
    #[arg(long, help = CHANNEL_HELP)]
    pub noise: Option<String>,

    /// Noised parties, e.g. A or A,B,C.
    #[arg(long, value_delimiter = ',', default_value = "A")]
    pub parties: Vec<String>,

    /// See-saw restarts (0 skips the optimizer).
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    pub restarts: usize,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long, help = STATE_HELP)]
    pub state: String,

    /// Number of parties carrying isotropic noise (1..=3).
    #[arg(long, default_value_t = 1)]
    pub n_noised: usize,

    /// Anisotropic noise ETA_X,ETA_Y,ETA_Z on party B (GHZ and W only).
    #[arg(long, value_delimiter = ',', num_args = 3)]
    pub anisotropic: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// GHZ, W, MS or MixedGHZ.
    #[arg(long)]
    pub family: Option<String>,

    /// First parameter grid START:STOP:STEPS (α, or p for MixedGHZ).
    #[arg(long, value_parser = parse_grid)]
    pub param1: Option<GridRange>,

    /// Second parameter grid START:STOP:STEPS (β, W only).
    #[arg(long, value_parser = parse_grid)]
    pub param2: Option<GridRange>,

    /// Number of noised parties (1..=3) [default: 1].
    #[arg(long)]
    pub n_noised: Option<usize>,

    /// Run the symmetric-W gap scan over η ∈ [0.69, 0.74] instead.
    #[arg(long, conflicts_with_all = ["family", "param1", "param2", "n_noised"])]
    pub w_gap: bool,
}

#[derive(Debug, Args)]
pub struct MonteCarloArgs {
    /// Number of random states [default: 100000].
    #[arg(long)]
    pub samples: Option<usize>,

    /// Write the summary CSV here (printed to stdout otherwise).
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite to run: all, duality, oracle, equivalence, chsh-oracle, scaling, w-gap.
    #[arg(long, default_value = "all")]
    pub suite: String,

    /// Divide every randomized case count by this factor.
    #[arg(long, default_value_t = 1)]
    pub scale_down: usize,
}

/// Values accepted from `--config`; every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub family: Option<SweepFamily>,
    pub param1: Option<GridRange>,
    pub param2: Option<GridRange>,
    pub n_noised: Option<usize>,
    pub output: Option<PathBuf>,
    pub n_samples: Option<usize>,
    pub summary: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(String),
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let r = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    r.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

fn parse_grid(s: &str) -> Result<GridRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(format!("grid {s:?} is not START:STOP:STEPS"));
    };
    let f = |x: &str| {
        x.trim()
            .parse::<f64>()
            .map_err(|e| format!("grid value {x:?}: {e}"))
    };
    let steps = n
        .trim()
        .parse::<usize>()
        .map_err(|e| format!("grid steps {n:?}: {e}"))?;
    Ok(GridRange::new(f(a)?, f(b)?, steps))
}

fn parse_state(s: &str) -> Result<StateSpec, CliError> {
    let spec: StateSpec = s.parse().map_err(|e| usage(format!("--state: {e}")))?;
    spec.renormalized(CLI_RENORM_TOL)
        .map_err(|e| usage(format!("--state: {e}")))
}

fn parse_channel(flag: &str, s: &str) -> Result<QubitChannel, CliError> {
    s.parse().map_err(|e| usage(format!("{flag}: {e}")))
}

fn parse_party(s: &str) -> Result<usize, CliError> {
    match s.trim().to_ascii_uppercase().as_str() {
        "A" | "0" => Ok(0),
        "B" | "1" => Ok(1),
        "C" | "2" => Ok(2),
        other => Err(usage(format!(
            "--parties: unknown party {other:?} (A, B, C)"
        ))),
    }
}

fn parse_ratio(s: &str) -> Result<Ratio<u64>, CliError> {
    let bad = || usage(format!("--white-noise: {s:?} is not a number in [0, 1]"));
    if let Some((p, q)) = s.split_once('/') {
        let p: u64 = p.trim().parse().map_err(|_| bad())?;
        let q: u64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(p, q));
    }
    // decimals are read exactly: 0.66 → 66/100
    let s = s.trim();
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.len() > 18 || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let int: u64 = if int.is_empty() {
        0
    } else {
        int.parse().map_err(|_| bad())?
    };
    let den = 10u64.pow(frac.len() as u32);
    let num: u64 = if frac.is_empty() {
        0
    } else {
        frac.parse().map_err(|_| bad())?
    };
    Ok(Ratio::new(int * den + num, den))
}

/// One observable of a `--pair` string.
fn parse_observable(s: &str, first: Option<(f64, f64, f64)>) -> Result<(f64, f64, f64), CliError> {
    match (s.trim(), first) {
        ("orthogonal", Some((x, eta, th))) => {
            return Ok((x, eta, th + std::f64::consts::FRAC_PI_2))
        }
        ("parallel", Some(o)) => return Ok(o),
        ("orthogonal" | "parallel", None) => {
            return Err(usage("--pair: the first observable needs explicit values"))
        }
        _ => {}
    }
    let (mut x, mut eta, mut theta) = (None, None, 0.0);
    for kv in s.split(',') {
        let (k, v) = kv
            .split_once(':')
            .ok_or_else(|| usage(format!("--pair: expected key:value, got {kv:?}")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| usage(format!("--pair: field {}: bad number {v:?}", k.trim())))?;
        match k.trim() {
            "x" => x = Some(v),
            "eta" => eta = Some(v),
            "theta" => theta = v,
            other => return Err(usage(format!("--pair: unknown field {other:?}"))),
        }
    }
    Ok((
        x.ok_or_else(|| usage("--pair: missing field x"))?,
        eta.ok_or_else(|| usage("--pair: missing field eta"))?,
        theta,
    ))
}

fn observable(x: f64, eta: f64, theta: f64) -> Result<UnsharpObservable, CliError> {
    UnsharpObservable::new(x, eta, [theta.sin(), 0.0, theta.cos()])
        .map_err(|e| usage(format!("--pair: {e}")))
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile, CliError> {
    let Some(path) = path else {
        return Ok(ConfigFile::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("--config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("--config {}: {e}", path.display())))
}

struct Globals {
    seed: u64,
    workers: usize,
    out: Option<PathBuf>,
}

fn open_out(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path)?))
}

fn print_tensor(out: &mut dyn Write, t: &crate::bell::CorrelationTensor) -> io::Result<()> {
    writeln!(out, "correlation tensor M[i][j][k] (rows j, columns k):")?;
    for (i, axis) in ["x", "y", "z"].iter().enumerate() {
        writeln!(out, "  i = {axis}")?;
        for j in 0..3 {
            let row: Vec<String> = (0..3).map(|k| format!("{:+.6}", t.get(i, j, k))).collect();
            writeln!(out, "    {}", row.join("  "))?;
        }
    }
    Ok(())
}

fn cmd_compat(a: &CompatArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if a.pair.is_none() && a.channel.is_none() && a.white_noise.is_none() {
        return Err(usage("compat needs --pair, --channel or --white-noise"));
    }
    if let Some(pair) = &a.pair {
        let (s1, s2) = pair
            .split_once(';')
            .ok_or_else(|| usage("--pair: expected two observables separated by ';'"))?;
        let o1 = parse_observable(s1, None)?;
        let o2 = parse_observable(s2, Some(o1))?;
        let (a1, a2) = (observable(o1.0, o1.1, o1.2)?, observable(o2.0, o2.1, o2.2)?);
        let verdict = if jointly_measurable(&a1, &a2) {
            "compatible"
        } else {
            "incompatible"
        };
        writeln!(
            out,
            "pair: x={} eta={} theta={} ; x={} eta={} theta={}",
            o1.0, o1.1, o1.2, o2.0, o2.1, o2.2
        )?;
        writeln!(out, "{verdict}")?;
    }
    if let Some(ch) = &a.channel {
        let ch = parse_channel("--channel", ch)?;
        let conj = ch
            .conjugate()
            .map_err(|e| usage(format!("--channel: {e}")))?;
        let ibc = is_2ibc_unital(&conj).map_err(|e| usage(format!("--channel: {e}")))?;
        writeln!(out, "channel: {ch}")?;
        writeln!(out, "2-IBC: {ibc}")?;
        if let Some(n) = a.grid {
            let w = incompatibility_grid_search(&conj, n);
            writeln!(
                out,
                "grid search ({n} axes): max |η+ξ|+|η−ξ| = {}",
                w.functional
            )?;
            writeln!(
                out,
                "grid search finds all pairs compatible: {}",
                w.all_compatible()
            )?;
        }
    }
    if let Some(wn) = &a.white_noise {
        let eta = parse_ratio(wn)?;
        if eta > Ratio::from_integer(1) {
            return Err(usage("--white-noise: visibility above 1"));
        }
        if a.dim < 2 || a.n < 1 {
            return Err(usage("--dim must be ≥ 2 and --n ≥ 1"));
        }
        let thr = white_noise_ibc_threshold(a.dim, a.n);
        writeln!(
            out,
            "white-noise {}-IBC threshold (d={}): {thr}",
            a.n, a.dim
        )?;
        writeln!(
            out,
            "visibility {eta} breaks {}-incompatibility: {}",
            a.n,
            is_n_ibc_white_noise_exact(eta, a.dim, a.n)
        )?;
    }
    Ok(EXIT_OK)
}

fn cmd_chsh(a: &ChshArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if a.channel.is_none() && a.biased.is_none() {
        return Err(usage("chsh needs --channel or --biased"));
    }
    if let Some(ch) = &a.channel {
        let ch = parse_channel("--channel", ch)?;
        let nbc = is_chsh_nbc_unital(&ch).map_err(|e| usage(format!("--channel: {e}")))?;
        let rho = apply_to_party(&ch, &phi_plus(), &[0])?;
        let ibc = is_2ibc_unital(&ch.conjugate()?).map_err(|e| usage(format!("--channel: {e}")))?;
        writeln!(out, "channel: {ch}")?;
        writeln!(out, "CHSH max on (E⊗I)|Φ⁺⟩: {}", chsh_max(&rho)?)?;
        writeln!(out, "CHSH-NBC: {nbc}")?;
        writeln!(out, "2-IBC of conjugate: {ibc}")?;
    }
    if let Some(v) = &a.biased {
        let ok = chsh_biased_condition(v[0], v[1], v[2], v[3]);
        writeln!(
            out,
            "biased CHSH on singlet: 2·x_a·x_b + 2√2·η_a·η_b ≤ 2: {ok}"
        )?;
    }
    Ok(EXIT_OK)
}

fn cmd_tripartite(a: &TripartiteArgs, g: &Globals, out: &mut dyn Write) -> Result<i32, CliError> {
    let spec = parse_state(&a.state)?;
    let mut rho = make_state(&spec)?;
    writeln!(out, "# seed={}", g.seed)?;
    writeln!(out, "state: {spec}")?;
    if let Some(noise) = &a.noise {
        let ch = parse_channel("--noise", noise)?;
        let parties = a
            .parties
            .iter()
            .map(|p| parse_party(p))
            .collect::<Result<Vec<_>, _>>()?;
        rho = apply_to_party(&ch, &rho, &parties).map_err(|e| usage(format!("--noise: {e}")))?;
        writeln!(out, "noise: {ch} on parties {}", a.parties.join(","))?;
    }
    let t = correlation_tensor(&rho)?;
    print_tensor(out, &t)?;
    let sv = t.singular_values();
    writeln!(out, "singular values: {} {} {}", sv[0], sv[1], sv[2])?;
    writeln!(out, "lambda1 = {}", sv[0])?;
    let (mb, sb) = mermin_svetlichny_bounds(&t);
    writeln!(out, "maxM = {mb}")?;
    writeln!(out, "maxS = {sb}")?;
    if a.restarts > 0 {
        for kind in [BellKind::Mermin, BellKind::Svetlichny] {
            let r = seesaw_max(&rho, kind, a.restarts, g.seed)?;
            writeln!(out, "see-saw {kind}: {}", r.value)?;
        }
    }
    let m = if mb > 2.0 {
        "M-nonlocal possible"
    } else {
        "M-local (Mermin nonlocality broken)"
    };
    let s = if sb > 4.0 {
        "S-nonlocal possible"
    } else {
        "S-local (Svetlichny nonlocality broken)"
    };
    writeln!(out, "verdict: {m}; {s}")?;
    Ok(EXIT_OK)
}

fn cmd_threshold(a: &ThresholdArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let spec = parse_state(&a.state)?;
    if !(1..=3).contains(&a.n_noised) {
        return Err(usage("--n-noised must be 1, 2 or 3"));
    }
    let numeric = numeric_threshold(&make_state(&spec)?, a.n_noised)?;
    writeln!(out, "state: {spec}")?;
    writeln!(out, "n_noised: {}", a.n_noised)?;
    let report = match analytic_threshold_n(&spec, a.n_noised) {
        Ok(r) => {
            writeln!(
                out,
                "source: closed form (numeric λ_max = {})",
                numeric.lambda_max_unit
            )?;
            r
        }
        Err(ThresholdError::Unsupported(_)) => {
            writeln!(out, "source: numeric")?;
            numeric
        }
        Err(e) => return Err(e.into()),
    };
    writeln!(out, "lambda_max_unit: {}", report.lambda_max_unit)?;
    writeln!(out, "eta_M: {}", report.eta_m)?;
    writeln!(out, "eta_S: {}", report.eta_s)?;
    writeln!(out, "eta_2ibc: {}", report.eta_2ibc)?;
    writeln!(out, "always_breaks: {}", report.always_breaks())?;
    if let Some(env) = report.w_envelope {
        writeln!(
            out,
            "W envelope: k={} lambda={} eta_M={} eta_S={}",
            env.k, env.lambda, env.eta_m, env.eta_s
        )?;
    }
    if let Some(v) = &a.anisotropic {
        let nv = NoiseVector::new([v[0], v[1], v[2]])
            .map_err(|e| usage(format!("--anisotropic: {e}")))?;
        let sv = anisotropic_singular_values(&spec, &nv)
            .map_err(|e| usage(format!("--anisotropic: {e}")))?;
        let c = sv.closed_form;
        writeln!(
            out,
            "anisotropic singular values (x, y, z): {} {} {}",
            c[0], c[1], c[2]
        )?;
    }
    Ok(EXIT_OK)
}

fn cmd_sweep(
    a: &SweepArgs,
    cfg: &ConfigFile,
    g: &Globals,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    if a.w_gap {
        let rows = run_w_gap_scan()?;
        let (lo, hi) = w_gap_endpoints()?;
        match &g.out {
            Some(p) => {
                write_w_gap_csv(&rows, open_out(p)?)?;
                writeln!(out, "wrote {} rows to {}", rows.len(), p.display())?;
                writeln!(out, "gap interval: ({lo}, {hi})")?;
            }
            None => write_w_gap_csv(&rows, &mut *out)?,
        }
        return Ok(EXIT_OK);
    }
    let family = match &a.family {
        Some(f) => f
            .parse::<SweepFamily>()
            .map_err(|e| usage(format!("--family: {e}")))?,
        None => cfg
            .family
            .ok_or_else(|| usage("sweep needs --family (or a config file)"))?,
    };
    let param1 = a
        .param1
        .or(cfg.param1)
        .ok_or_else(|| usage("sweep needs --param1 START:STOP:STEPS"))?;
    let sweep = SweepConfig {
        family,
        param1,
        param2: a.param2.or(cfg.param2),
        n_noised: a.n_noised.or(cfg.n_noised).unwrap_or(1),
        output: g.out.clone().or_else(|| cfg.output.clone()),
    };
    sweep.validate().map_err(|e| usage(e.to_string()))?;
    let rows = run_sweep(&sweep, g.workers)?;
    match &sweep.output {
        Some(p) => {
            write_sweep_csv(&rows, open_out(p)?)?;
            writeln!(out, "wrote {} rows to {}", rows.len(), p.display())?;
        }
        None => write_sweep_csv(&rows, &mut *out)?,
    }
    Ok(EXIT_OK)
}

fn cmd_montecarlo(
    a: &MonteCarloArgs,
    cfg: &ConfigFile,
    g: &Globals,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let n = a.samples.or(cfg.n_samples).unwrap_or(100_000);
    if n == 0 {
        return Err(usage("--samples must be ≥ 1"));
    }
    let mc = MonteCarloConfig::new(n, g.seed);
    let result = run_montecarlo(&mc, g.workers)?;
    writeln!(out, "# seed={} samples={n}", g.seed)?;
    match &g.out {
        Some(p) => {
            write_mc_csv(&result.records, open_out(p)?)?;
            writeln!(out, "# records written to {}", p.display())?;
        }
        None => write_mc_csv(&result.records, &mut *out)?,
    }
    match a.summary.as_ref().or(cfg.summary.as_ref()) {
        Some(p) => {
            write_summary_csv(&result.summary, open_out(p)?)?;
            writeln!(out, "# summary written to {}", p.display())?;
        }
        None => {
            writeln!(out, "# summary")?;
            write_summary_csv(&result.summary, &mut *out)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_verify(a: &VerifyArgs, g: &Globals, out: &mut dyn Write) -> Result<i32, CliError> {
    let suites: Vec<Suite> = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![a
            .suite
            .parse()
            .map_err(|e| usage(format!("--suite: {e}")))?]
    };
    if a.scale_down == 0 {
        return Err(usage("--scale-down must be ≥ 1"));
    }
    let base = VerifyConfig::new(g.seed);
    let div = |n: usize| (n / a.scale_down).max(1);
    let cfg = VerifyConfig {
        duality_cases: div(base.duality_cases),
        oracle_cases: div(base.oracle_cases),
        equivalence_cases: div(base.equivalence_cases),
        chsh_oracle_cases: div(base.chsh_oracle_cases),
        ..base
    };
    if let Some(dir) = &g.out {
        std::fs::create_dir_all(dir)?;
    }
    writeln!(out, "# seed={}", g.seed)?;
    let mut all_ok = true;
    for suite in suites {
        let r = run_suite(suite, &cfg, g.workers)?;
        writeln!(out, "{r}")?;
        all_ok &= r.ok();
        if let Some(dir) = &g.out {
            std::fs::write(dir.join(format!("{}.csv", suite.name())), &r.csv)?;
        }
    }
    writeln!(
        out,
        "{}",
        if all_ok {
            "all suites passed"
        } else {
            "VIOLATIONS FOUND"
        }
    )?;
    Ok(if all_ok { EXIT_OK } else { EXIT_VIOLATION })
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = load_config(cli.config.as_deref())?;
    let workers = cli
        .workers
        .or(cfg.workers)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(usage("--workers must be ≥ 1"));
    }
    let g = Globals {
        seed: cli.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED),
        workers,
        out: cli.out.clone().or_else(|| cfg.out.clone()),
    };
    match &cli.command {
        Command::Compat(a) => cmd_compat(a, out),
        Command::Chsh(a) => cmd_chsh(a, out),
        Command::Tripartite(a) => cmd_tripartite(a, &g, out),
        Command::Threshold(a) => cmd_threshold(a, out),
        Command::Sweep(a) => cmd_sweep(a, &cfg, &g, out),
        Command::Montecarlo(a) => cmd_montecarlo(a, &cfg, &g, out),
        Command::Verify(a) => cmd_verify(a, &g, out),
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Runtime(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_FAILURE
        }
    }
}
