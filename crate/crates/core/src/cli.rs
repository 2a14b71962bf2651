//! Command-line front end. [`run`] parses arguments, writes results to
//! stdout or `--out` and returns the process exit code.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseband::estimate_slope;
use crate::config::Config;
use crate::error::Error;
use crate::estimator::{
    check_against_region, check_against_sum, estimate, run_trials, with_thread_cap, EstimateRecord, VerdictRecord,
    DEFAULT_TOL,
};
use crate::jamming::{sample_sequence, JammerDistribution};
use crate::region::{
    dn_branch_holds, dof_mat, gap_bounds, region_dd, region_dn_inner, region_for, region_nn, sum_dof_dd_k,
    sum_dof_dp_k, DofRegion,
};
use crate::scheme::{DpMode, EtaChoice, NpPolicy, SchemeParams, TRACE_HEADER};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_OUTSIDE: i32 = 4;
pub const EXIT_STARVED: i32 = 5;

/// Largest K simulated by `sweep --simulate` on the K axis.
pub const SWEEP_SIM_MAX_K: usize = 4;

#[derive(Debug, Parser)]
#[command(
    name = "jamdof",
    version,
    about = "DoF regions and schemes for the jammed MISO broadcast channel"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Region of a configuration as JSON and a vertex CSV.
    Region(RegionArgs),
    /// Monte-Carlo run of a scheme checked against its region.
    Simulate(SimulateArgs),
    /// Analytic sum-DoF over a grid.
    Sweep(SweepArgs),
    /// High-SNR slope of baseband rates.
    Slope(SlopeArgs),
    /// Subset matrix and equivalence checks between configurations.
    Compare(CompareArgs),
    /// Sampled jammer states, one bitstring per slot.
    States(StatesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[arg(long)]
    pub config: Config,
    /// Inline distribution or @file.
    #[arg(long)]
    pub dist: String,
    /// JSON path; the vertex CSV goes next to it with a .csv extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// What to print when --out is absent.
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: Config,
    #[arg(long)]
    pub dist: String,
    /// Comma-separated symbol budgets.
    #[arg(long)]
    pub budgets: Option<String>,
    /// Block length for DN, NN and PN.
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// NP policy.
    #[arg(long, default_value = "corner-1")]
    pub policy: NpPolicy,
    /// DP mode.
    #[arg(long, default_value = "mat-corner")]
    pub mode: DpMode,
    /// DD/ND split of the total budget: a value in [0, 1] or "opt".
    #[arg(long)]
    pub eta: Option<EtaChoice>,
    /// NN time-sharing fractions (also the DN fallback split).
    #[arg(long)]
    pub share: Option<String>,
    #[arg(long)]
    pub max_slots: Option<u64>,
    /// Write the slot trace of trial 0 here.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// `k=A..B`, `dn=N` or `equiv=N`.
    #[arg(long)]
    pub grid: String,
    /// Add simulated columns.
    #[arg(long)]
    pub simulate: bool,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Per-receiver budget (or block length) of simulated points.
    #[arg(long, default_value_t = 2000)]
    pub n: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SlopeArgs {
    #[arg(long, default_value = "PP")]
    pub config: Config,
    #[arg(long)]
    pub dist: String,
    /// SNR points in dB: `a,b,c,...` or `start:stop:step`.
    #[arg(long, default_value = "30:60:10")]
    pub grid: String,
    #[arg(long, default_value_t = 4000)]
    pub slots: usize,
    #[arg(long)]
    pub share: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Comma-separated configuration names.
    #[arg(long, default_value = "PP,PD,PN,DP,DD,DN,NP,ND,NN")]
    pub configs: String,
    #[arg(long)]
    pub dist: String,
    /// Second distribution for the marginal-equivalence check.
    #[arg(long)]
    pub dist2: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatesArgs {
    #[arg(long)]
    pub dist: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Normalised record of one invocation, embedded in every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub configs: Vec<Config>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub budgets: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<NpPolicy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<DpMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<EtaChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub share: Option<Vec<f64>>,
}

impl ExperimentConfig {
    fn new(command: &str) -> Self {
        ExperimentConfig {
            command: command.into(),
            dist: None,
            configs: Vec::new(),
            budgets: Vec::new(),
            n: None,
            trials: None,
            seed: None,
            out: None,
            tol: None,
            grid: None,
            policy: None,
            mode: None,
            eta: None,
            share: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("experiment config serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, Error> {
        serde_json::from_str(s).map_err(|e| Error::InvalidArgument(format!("experiment config: {e}")))
    }

    /// `# jamdof <version> <json>` line that opens every CSV output.
    pub fn csv_header(&self) -> String {
        format!("# jamdof {VERSION} {}", self.to_json())
    }
}

#[derive(Serialize)]
struct Output<'a, T: Serialize> {
    tool: String,
    experiment: &'a ExperimentConfig,
    #[serde(flatten)]
    result: T,
}

fn json_output<T: Serialize>(exp: &ExperimentConfig, result: T) -> String {
    let out = Output {
        tool: format!("jamdof {VERSION}"),
        experiment: exp,
        result,
    };
    let mut s = serde_json::to_string_pretty(&out).expect("output serializes");
    s.push('\n');
    s
}

/// Failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INVALID,
        message: message.into(),
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e.root() {
        Error::InvalidArgument(_)
        | Error::InvalidDistribution(_)
        | Error::UnsupportedDimension { .. }
        | Error::NotSymmetric => EXIT_INVALID,
        Error::DegenerateMarginal { .. } => EXIT_DEGENERATE,
        Error::Starved { .. } => EXIT_STARVED,
        Error::Numeric(_) | Error::Trial { .. } => EXIT_OTHER,
    }
}

type CmdResult = Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                EXIT_INVALID
            } else {
                let _ = stdout.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "jamdof: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write) -> CmdResult {
    match cmd {
        Command::Region(a) => cmd_region(&a, stdout),
        Command::Simulate(a) => cmd_simulate(&a, stdout),
        Command::Sweep(a) => cmd_sweep(&a, stdout),
        Command::Slope(a) => cmd_slope(&a, stdout),
        Command::Compare(a) => cmd_compare(&a, stdout),
        Command::States(a) => cmd_states(&a, stdout),
    }
}

/// Reads `@path` arguments, passes inline specs through.
pub fn load_dist(spec: &str) -> Result<JammerDistribution, Failure> {
    let text = match spec.strip_prefix('@') {
        Some(path) => {
            std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read distribution file {path}: {e}")))?
        }
        None => spec.to_string(),
    };
    Ok(text.parse::<JammerDistribution>()?)
}

pub fn parse_list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>, Failure>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<T>()
                .map_err(|e| invalid(format!("bad {what} entry {t:?}: {e}")))
        })
        .collect()
}

fn emit(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure {
        code: EXIT_OTHER,
        message: format!("write failed: {e}"),
    };
    match path {
        Some(p) => std::fs::write(p, text).map_err(io),
        None => stdout.write_all(text.as_bytes()).map_err(io),
    }
}

fn fmt_num(x: f64) -> String {
    format!("{x:.6}")
}

fn cmd_region(a: &RegionArgs, stdout: &mut dyn Write) -> CmdResult {
    let dist = load_dist(&a.dist)?;
    let mut exp = ExperimentConfig::new("region");
    exp.dist = Some(dist.to_string());
    exp.configs = vec![a.config];
    exp.out = a.out.clone();

    if a.config.is_k_user() {
        let sum = match a.config {
            Config::DpK => sum_dof_dp_k(&dist)?,
            _ => sum_dof_dd_k(&dist)?,
        };
        #[derive(Serialize)]
        struct Scalar {
            config: Config,
            k: usize,
            sum_dof: f64,
        }
        let json = json_output(
            &exp,
            Scalar {
                config: a.config,
                k: dist.num_receivers(),
                sum_dof: sum,
            },
        );
        let csv = format!(
            "{}\nconfig,k,sum_dof\n{},{},{}\n",
            exp.csv_header(),
            a.config,
            dist.num_receivers(),
            fmt_num(sum)
        );
        return write_pair(a, &json, &csv, stdout);
    }

    let region = region_for(a.config, &dist)?;
    #[derive(Serialize)]
    struct RegionOut {
        config: Config,
        #[serde(flatten)]
        region: crate::region::RegionRecord,
    }
    let json = json_output(
        &exp,
        RegionOut {
            config: a.config,
            region: region.record(),
        },
    );
    let csv = region_csv(&exp, &region)?;
    write_pair(a, &json, &csv, stdout)
}

fn write_pair(a: &RegionArgs, json: &str, csv: &str, stdout: &mut dyn Write) -> CmdResult {
    match &a.out {
        Some(p) => {
            let (jp, cp) = if p.extension().is_some_and(|e| e == "csv") {
                (p.with_extension("json"), p.clone())
            } else {
                (p.clone(), p.with_extension("csv"))
            };
            emit(Some(&jp), json, stdout)?;
            emit(Some(&cp), csv, stdout)?;
        }
        None => match a.format {
            Format::Json => emit(None, json, stdout)?,
            Format::Csv => emit(None, csv, stdout)?,
        },
    }
    Ok(EXIT_OK)
}

/// Two-user regions list vertices; wider regions list halfspaces.
fn region_csv(exp: &ExperimentConfig, region: &DofRegion) -> Result<String, Failure> {
    let mut s = exp.csv_header();
    s.push('\n');
    if region.dim() == 2 {
        s.push_str("vertex,d1,d2\n");
        for (i, v) in region.vertices_2d()?.iter().enumerate() {
            let _ = writeln!(s, "{i},{},{}", fmt_num(v[0]), fmt_num(v[1]));
        }
    } else {
        let cols: Vec<String> = (1..=region.dim()).map(|k| format!("c{k}")).collect();
        let _ = writeln!(s, "halfspace,{},bound", cols.join(","));
        for (i, h) in region.halfspaces().iter().enumerate() {
            let cs: Vec<String> = h.coeffs.iter().map(|&c| fmt_num(c)).collect();
            let _ = writeln!(s, "{i},{},{}", cs.join(","), fmt_num(h.bound));
        }
    }
    Ok(s)
}

fn cmd_simulate(a: &SimulateArgs, stdout: &mut dyn Write) -> CmdResult {
    let dist = load_dist(&a.dist)?;
    let budgets: Vec<u64> = match &a.budgets {
        Some(b) => parse_list(b, "budget")?,
        None => Vec::new(),
    };
    let share: Option<Vec<f64>> = a.share.as_deref().map(|s| parse_list(s, "share")).transpose()?;
    if !(a.tol >= 0.0 && a.tol.is_finite()) {
        return Err(invalid("--tol must be a non-negative number"));
    }
    let params = SchemeParams {
        budgets: budgets.clone(),
        n: a.n,
        dp_mode: a.mode,
        np_policy: a.policy,
        share: share.clone(),
        eta: a.eta,
        max_slots: a.max_slots,
        trace: false,
    };
    let mut exp = ExperimentConfig::new("simulate");
    exp.dist = Some(dist.to_string());
    exp.configs = vec![a.config];
    exp.budgets = budgets;
    exp.n = a.n;
    exp.trials = Some(a.trials);
    exp.seed = Some(a.seed);
    exp.out = a.out.clone();
    exp.tol = Some(a.tol);
    exp.policy = Some(a.policy);
    exp.mode = Some(a.mode);
    exp.eta = a.eta;
    exp.share = share;

    let runs = run_trials(a.config, &dist, &params, a.trials, a.seed)?;
    let emp = crate::estimator::aggregate(&runs);
    let fallback = runs[0].fallback;

    let (against, verdict) = match a.config {
        Config::DpK => (
            "DP-K sum".to_string(),
            check_against_sum(&emp, sum_dof_dp_k(&dist)?, a.tol),
        ),
        Config::DdK => (
            "DD-K sum".to_string(),
            check_against_sum(&emp, sum_dof_dd_k(&dist)?, a.tol),
        ),
        c => (
            c.name().to_string(),
            check_against_region(&emp, &region_for(c, &dist)?, a.tol)?,
        ),
    };
    let mut record = EstimateRecord::new(
        a.config,
        &dist,
        &params,
        a.seed,
        &emp,
        vec![VerdictRecord {
            against,
            verdict,
            tol: a.tol,
        }],
    );
    record.fallback = fallback;

    if let Some(path) = &a.trace {
        let traced = SchemeParams {
            trace: true,
            ..params.clone()
        };
        let seed = crate::rng::derive_seed(a.seed, 0);
        let run = crate::scheme::run_scheme(a.config, &dist, &traced, seed)?;
        let mut s = exp.csv_header();
        s.push('\n');
        s.push_str(TRACE_HEADER);
        s.push('\n');
        for r in run.trace.unwrap_or_default() {
            let _ = writeln!(s, "{r}");
        }
        emit(Some(path), &s, stdout)?;
    }

    emit(a.out.as_deref(), &json_output(&exp, &record), stdout)?;
    Ok(if verdict.is_outside() { EXIT_OUTSIDE } else { EXIT_OK })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    K { from: usize, to: usize },
    Dn(usize),
    Equiv(usize),
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::InvalidArgument(format!("bad grid {s:?}; expected k=A..B, dn=N or equiv=N"));
        let (axis, spec) = s.split_once('=').ok_or_else(bad)?;
        match axis.trim().to_ascii_lowercase().as_str() {
            "k" => {
                let (lo, hi) = spec.split_once("..").ok_or_else(bad)?;
                let from: usize = lo.trim().parse().map_err(|_| bad())?;
                let to: usize = hi.trim().parse().map_err(|_| bad())?;
                if from == 0 || from > to || to > crate::jamming::MAX_RECEIVERS {
                    return Err(bad());
                }
                Ok(Grid::K { from, to })
            }
            "dn" | "equiv" => {
                let n: usize = spec.trim().parse().map_err(|_| bad())?;
                if n == 0 || n > 1000 {
                    return Err(bad());
                }
                Ok(if axis.trim().eq_ignore_ascii_case("dn") {
                    Grid::Dn(n)
                } else {
                    Grid::Equiv(n)
                })
            }
            _ => Err(bad()),
        }
    }
}

/// Independent jamming with the given marginals.
fn independent(l1: f64, l2: f64) -> Result<JammerDistribution, Error> {
    JammerDistribution::two_user(l1 * l2, l1 * (1.0 - l2), (1.0 - l1) * l2, (1.0 - l1) * (1.0 - l2))
}

fn cmd_sweep(a: &SweepArgs, stdout: &mut dyn Write) -> CmdResult {
    let grid: Grid = a.grid.parse()?;
    let mut exp = ExperimentConfig::new("sweep");
    exp.grid = Some(a.grid.clone());
    exp.out = a.out.clone();
    if a.simulate {
        exp.trials = Some(a.trials);
        exp.seed = Some(a.seed);
        exp.n = Some(a.n);
    }
    let mut s = exp.csv_header();
    s.push('\n');
    let mut code = EXIT_OK;

    match grid {
        Grid::K { from, to } => {
            s.push_str("k,dof_mat,dof_dp,dof_dd,dof_nn,gap_dp_dd,lb_dp_dd,gap_mat_dp,lb_mat_dp,bounds_ok");
            if a.simulate {
                s.push_str(",sim_dp,sim_dd");
            }
            s.push('\n');
            let rows: Vec<Result<String, Failure>> =
                with_thread_cap(|| (from..=to).into_par_iter().map(|k| sweep_k_row(k, a)).collect());
            for row in rows {
                let row = row?;
                if row.contains(",false") {
                    code = EXIT_OUTSIDE;
                }
                s.push_str(&row);
            }
        }
        Grid::Dn(n) => {
            s.push_str("lambda1,lambda2,branch,dof_dn,dof_nn,dn_strict,nn_proper_subset");
            if a.simulate {
                s.push_str(",sim_dn");
            }
            s.push('\n');
            let points: Vec<(usize, usize)> = (1..=n).flat_map(|i| (1..=n).map(move |j| (i, j))).collect();
            let rows: Vec<Result<String, Failure>> =
                with_thread_cap(|| points.par_iter().map(|&(i, j)| sweep_dn_row(i, j, n, a)).collect());
            for row in rows {
                s.push_str(&row?);
            }
        }
        Grid::Equiv(n) => {
            s.push_str("lambda,dof_dd,mat_scaled");
            if a.simulate {
                s.push_str(",sim_dd");
            }
            s.push('\n');
            let rows: Vec<Result<String, Failure>> =
                with_thread_cap(|| (1..=n).into_par_iter().map(|i| sweep_equiv_row(i, n, a)).collect());
            for row in rows {
                s.push_str(&row?);
            }
        }
    }
    emit(a.out.as_deref(), &s, stdout)?;
    Ok(code)
}

fn sweep_k_row(k: usize, a: &SweepArgs) -> Result<String, Failure> {
    let dist = JammerDistribution::uniform(k)?;
    let mat = dof_mat(k)?;
    let dp = sum_dof_dp_k(&dist)?;
    let dd = sum_dof_dd_k(&dist)?;
    let nn = dist.lambda_eta();
    let (lb_dp_dd, lb_mat_dp) = gap_bounds(k)?;
    let ok = dp - dd >= lb_dp_dd - 1e-12 && mat - dp >= lb_mat_dp - 1e-12;
    let mut row = format!(
        "{k},{},{},{},{},{},{},{},{},{ok}",
        fmt_num(mat),
        fmt_num(dp),
        fmt_num(dd),
        fmt_num(nn),
        fmt_num(dp - dd),
        fmt_num(lb_dp_dd),
        fmt_num(mat - dp),
        fmt_num(lb_mat_dp),
    );
    if a.simulate {
        if (2..=SWEEP_SIM_MAX_K).contains(&k) {
            let params = SchemeParams::with_budgets(vec![a.n; k]);
            let dp_sim = estimate(Config::DpK, &dist, &params, a.trials, a.seed)?;
            let dd_sim = estimate(Config::DdK, &dist, &params, a.trials, a.seed)?;
            let _ = write!(row, ",{},{}", fmt_num(dp_sim.sum_mean), fmt_num(dd_sim.sum_mean));
        } else {
            row.push_str(",,");
        }
    }
    row.push('\n');
    Ok(row)
}

fn sweep_dn_row(i: usize, j: usize, n: usize, a: &SweepArgs) -> Result<String, Failure> {
    let (l1, l2) = (i as f64 / n as f64, j as f64 / n as f64);
    let dist = independent(l1, l2)?;
    let (dn_region, nn_region) = (region_dn_inner(&dist)?, region_nn(&dist)?);
    let (dn, nn) = (dn_region.max_sum()?, nn_region.max_sum()?);
    let branch = dn_branch_holds(l1, l2);
    let strict = dn > nn + 1e-9;
    let proper = nn_region.is_subset(&dn_region)? && !dn_region.is_subset(&nn_region)?;
    let mut row = format!(
        "{},{},{},{},{},{strict},{proper}",
        fmt_num(l1),
        fmt_num(l2),
        branch as u8,
        fmt_num(dn),
        fmt_num(nn)
    );
    if a.simulate {
        let params = SchemeParams::with_n(a.n);
        let sim = estimate(Config::DN, &dist, &params, a.trials, a.seed)?;
        let _ = write!(row, ",{}", fmt_num(sim.sum_mean));
    }
    row.push('\n');
    Ok(row)
}

fn sweep_equiv_row(i: usize, n: usize, a: &SweepArgs) -> Result<String, Failure> {
    let l = i as f64 / n as f64;
    let dist = JammerDistribution::two_user(l, 0.0, 0.0, 1.0 - l)?;
    let dd = region_dd(&dist)?.max_sum()?;
    let mut row = format!("{},{},{}", fmt_num(l), fmt_num(dd), fmt_num(4.0 * l / 3.0));
    if a.simulate {
        let mut params = SchemeParams::with_budgets(vec![a.n, a.n]);
        params.eta = Some(EtaChoice::Optimal);
        let sim = estimate(Config::DD, &dist, &params, a.trials, a.seed)?;
        let _ = write!(row, ",{}", fmt_num(sim.sum_mean));
    }
    row.push('\n');
    Ok(row)
}

/// SNR grid: `a,b,c` or `start:stop:step` (stop inclusive).
pub fn parse_snr_grid(s: &str) -> Result<Vec<f64>, Failure> {
    if let Some((start, rest)) = s.split_once(':') {
        let (stop, step) = rest
            .split_once(':')
            .ok_or_else(|| invalid(format!("bad SNR grid {s:?}")))?;
        let p = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| invalid(format!("bad SNR grid {s:?}")))
        };
        let (start, stop, step) = (p(start)?, p(stop)?, p(step)?);
        if step.is_nan() || step <= 0.0 || stop < start {
            return Err(invalid(format!("bad SNR grid {s:?}")));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        return Ok((0..count).map(|i| start + i as f64 * step).collect());
    }
    parse_list(s, "SNR")
}

fn cmd_slope(a: &SlopeArgs, stdout: &mut dyn Write) -> CmdResult {
    let dist = load_dist(&a.dist)?;
    let grid = parse_snr_grid(&a.grid)?;
    let share: Option<Vec<f64>> = a.share.as_deref().map(|s| parse_list(s, "share")).transpose()?;
    let mut exp = ExperimentConfig::new("slope");
    exp.dist = Some(dist.to_string());
    exp.configs = vec![a.config];
    exp.grid = Some(a.grid.clone());
    exp.n = Some(a.slots as u64);
    exp.seed = Some(a.seed);
    exp.share = share.clone();
    exp.out = a.out.clone();

    let est = with_thread_cap(|| estimate_slope(a.config, &dist, &grid, a.slots, share.as_deref(), a.seed))?;
    let mut s = exp.csv_header();
    s.push('\n');
    s.push_str("snr_db,receiver,mean_rate,slope,r_squared\n");
    for (p, db) in est.snr_db.iter().enumerate() {
        for r in 0..dist.num_receivers() {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                fmt_num(*db),
                r + 1,
                fmt_num(est.mean_rates[p][r]),
                fmt_num(est.slopes[r]),
                fmt_num(est.r_squared[r])
            );
        }
    }
    emit(a.out.as_deref(), &s, stdout)?;
    Ok(EXIT_OK)
}

/// Inclusions that must hold for every two-user distribution; the flag
/// marks pairs that must be equal.
pub const ASSERTED_INCLUSIONS: [(Config, Config, bool); 8] = [
    (Config::PN, Config::PD, true),
    (Config::PD, Config::PP, true),
    (Config::DN, Config::DD, false),
    (Config::DD, Config::DP, false),
    (Config::NN, Config::ND, false),
    (Config::ND, Config::NP, false),
    (Config::NN, Config::DN, false),
    (Config::ND, Config::DD, false),
];

fn cmd_compare(a: &CompareArgs, stdout: &mut dyn Write) -> CmdResult {
    let dist = load_dist(&a.dist)?;
    let configs: Vec<Config> = parse_list(&a.configs, "config")?;
    if configs.len() < 2 {
        return Err(invalid("compare needs at least two configurations"));
    }
    if let Some(c) = configs.iter().find(|c| c.is_k_user()) {
        return Err(invalid(format!("{c} has no region to compare")));
    }
    let mut exp = ExperimentConfig::new("compare");
    exp.dist = Some(dist.to_string());
    exp.configs = configs.clone();
    exp.out = a.out.clone();

    let regions: Vec<DofRegion> = configs
        .iter()
        .map(|&c| region_for(c, &dist))
        .collect::<Result<_, _>>()?;
    let subset = |i: usize, j: usize| regions[i].is_subset(&regions[j]);

    let mut s = exp.csv_header();
    s.push('\n');
    let names: Vec<&str> = configs.iter().map(|c| c.name()).collect();
    let _ = writeln!(s, "subset,{}", names.join(","));
    for (i, name) in names.iter().enumerate() {
        let cells: Vec<&str> = (0..configs.len())
            .map(|j| subset(i, j).map(|b| if b { "yes" } else { "no" }))
            .collect::<Result<_, _>>()?;
        let _ = writeln!(s, "{name},{}", cells.join(","));
    }

    let mut ok = true;
    let pos = |c: Config| configs.iter().position(|&x| x == c);
    for (sub, sup, equal) in ASSERTED_INCLUSIONS {
        let (Some(i), Some(j)) = (pos(sub), pos(sup)) else {
            continue;
        };
        let holds = subset(i, j)? && (!equal || subset(j, i)?);
        ok &= holds;
        let rel = if equal { "==" } else { "<=" };
        let _ = writeln!(
            s,
            "inclusion,{sub} {rel} {sup},{}",
            if holds { "holds" } else { "violated" }
        );
    }
    for i in 0..configs.len() {
        for j in i + 1..configs.len() {
            if subset(i, j)? && subset(j, i)? {
                let _ = writeln!(s, "equivalent,{},{}", names[i], names[j]);
            }
        }
    }
    let [l00, ..] = dist.two_user_probs()?;
    if l00 == 0.0 {
        if let (Some(i), Some(j)) = (pos(Config::ND), pos(Config::DD)) {
            let same = regions[i].same_halfspaces(&regions[j], 1e-12);
            ok &= same;
            let _ = writeln!(s, "nd-dd-at-zero-l00,{}", if same { "identical" } else { "different" });
        }
    }

    if let Some(spec) = &a.dist2 {
        let other = load_dist(spec)?;
        let (m1, m2) = (dist.marginals(), other.marginals());
        let matched = m1.len() == m2.len() && m1.iter().zip(&m2).all(|(x, y)| (x - y).abs() <= 1e-12);
        let _ = writeln!(s, "marginals,{}", if matched { "matched" } else { "different" });
        for c in [Config::PP, Config::DD, Config::NN] {
            let same = region_for(c, &dist)?.same_halfspaces(&region_for(c, &other)?, 1e-12);
            if matched {
                ok &= same;
            }
            let _ = writeln!(
                s,
                "marginal-equivalence,{c},{}",
                if same { "identical" } else { "different" }
            );
        }
    }

    emit(a.out.as_deref(), &s, stdout)?;
    Ok(if ok { EXIT_OK } else { EXIT_OUTSIDE })
}

fn cmd_states(a: &StatesArgs, stdout: &mut dyn Write) -> CmdResult {
    let dist = load_dist(&a.dist)?;
    let mut exp = ExperimentConfig::new("states");
    exp.dist = Some(dist.to_string());
    exp.n = Some(a.n as u64);
    exp.seed = Some(a.seed);
    exp.out = a.out.clone();
    let seq = sample_sequence(&dist, a.n, a.seed)?;
    let k = dist.num_receivers();
    let mut s = exp.csv_header();
    s.push_str("\nslot,state\n");
    for (t, st) in seq.states.iter().enumerate() {
        let _ = writeln!(s, "{},{}", t + 1, st.to_bitstring(k));
    }
    emit(a.out.as_deref(), &s, stdout)?;
    Ok(EXIT_OK)
}
