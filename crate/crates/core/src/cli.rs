//! The `syncqkd` command line. [`run`] is the whole program; the binary only
//! forwards process arguments and exits with its return value.
//!
//! Exit codes: 0 success (for `simulate`, accepted), 1 usage or estimation
//! error, 2 protocol abort or a failed rigidity bound.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::adversary::{feasibility_curve, invert_stats, thresholds, EveStats, MAX_EPSILON};
use crate::bell::{classify, BellReport};
use crate::correlations::{asynchronicity, to_bias_form, tracial_correlation, BiasForm};
use crate::error::{Error, Result};
use crate::hilbert::{ideal_pvms, DEFAULT_TOL};
use crate::json::to_pretty;
use crate::protocol::{run_protocol, Device, OutcomeSummary, ProtocolConfig};
use crate::rigidity::{sweep, verify_main_bound, TwoProjectionForm, ANGLE_WINDOW, THETA_HAT};

/// Environment variable holding the default worker-thread count.
pub const THREADS_ENV: &str = "SYNCQKD_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILED: i32 = 2;

#[derive(Parser, Debug, Serialize)]
#[command(name = "syncqkd", version, about = "Synchronous-correlation QKD toolkit")]
pub struct Cli {
    /// Worker threads (default: $SYNCQKD_THREADS, else all cores).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Print the ideal correlation, its bias form, Bell values and asynchronicity.
    Ideal,
    /// Run a protocol simulation.
    Simulate(SimulateArgs),
    /// Basis-guessing adversary: a single point or a threshold curve.
    Eve(EveArgs),
    /// Check the rigidity bounds on one canonical form or a random sweep.
    Rigidity(RigidityArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
pub enum ProtocolArg {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
}

#[derive(Args, Debug, Serialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub protocol: ProtocolArg,
    #[arg(long, default_value_t = 100_000)]
    pub n: u64,
    /// Sacrifice period for protocol B.
    #[arg(long, default_value_t = 10)]
    pub m: u64,
    #[arg(long, default_value_t = 0.01)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.01)]
    pub mu: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `ideal`, `uniform`, or a path to a JSON table `{"p": [36 entries]}`.
    #[arg(long, default_value = "ideal")]
    pub device: String,
    /// Write one JSON line per round here.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    /// Also write the outcome document here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Keep going when key bits disagree.
    #[arg(long)]
    pub allow_mismatch: bool,
}

fn parse_epsilon(s: &str) -> std::result::Result<f64, String> {
    let e: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=MAX_EPSILON).contains(&e) {
        Ok(e)
    } else {
        Err(format!("epsilon must lie in [0, 2/3], got {e}"))
    }
}

#[derive(Args, Debug, Serialize)]
pub struct EveArgs {
    /// Eve's basis uncertainty, in [0, 2/3].
    #[arg(long, value_parser = parse_epsilon)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, required_unless_present = "curve")]
    pub mu: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    /// Tabulate the threshold over `mu` in [0, --mu-max].
    #[arg(long, requires_all = ["mu_max", "step"])]
    pub curve: bool,
    #[arg(long)]
    pub mu_max: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Curve data file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct RigidityArgs {
    /// Block angles in radians, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub angles: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub l00: usize,
    #[arg(long, default_value_t = 0)]
    pub l01: usize,
    #[arg(long, default_value_t = 0)]
    pub l10: usize,
    #[arg(long, default_value_t = 0)]
    pub l11: usize,
    /// Verify this many random forms instead of one.
    #[arg(long)]
    pub sweep: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest block count drawn by the sweep.
    #[arg(long, default_value_t = 50)]
    pub max_blocks: usize,
}

/// Enough to rerun the command that produced an output.
#[derive(Serialize)]
pub struct RunManifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a Command,
    pub seed: Option<u64>,
    pub outputs: Vec<String>,
}

impl<'a> RunManifest<'a> {
    fn new(command: &'a Command, seed: Option<u64>, outputs: &[&Path]) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        }
    }
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    manifest: RunManifest<'a>,
    result: T,
}

#[derive(Serialize)]
struct IdealResult {
    /// Entries in `(2 y_A + y_B) * 9 + 3 x_A + x_B` order.
    table: Vec<f64>,
    bias_form: BiasForm,
    #[serde(flatten)]
    bell: BellReport,
    #[serde(rename = "S")]
    s: f64,
}

#[derive(Serialize)]
struct EvePoint {
    epsilon: Option<f64>,
    /// Eve's `(J̃_3, S̃)`; absent without `--epsilon` or at `2/3`.
    eve: Option<EveStats>,
    thresholds: crate::adversary::Thresholds,
}

#[derive(Serialize)]
struct CurveResult {
    lambda: f64,
    delta: f64,
    points: usize,
    monotone: bool,
    /// Grid points with `mu < delta`, where the threshold formula is used
    /// outside its stated range.
    out_of_domain: usize,
}

/// What a command produced, before it is written out.
struct Output {
    stdout: String,
    code: i32,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InputDomain(msg.into())
}

fn thread_count(cli: &Cli) -> Option<usize> {
    cli.threads
        .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()))
        .filter(|&n| n > 0)
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind::{DisplayHelp, DisplayVersion};
            let text = e.render().to_string();
            return if matches!(e.kind(), DisplayHelp | DisplayVersion) {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            } else {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            };
        }
    };

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count(&cli) {
        builder = builder.num_threads(n);
    }
    let result = match builder.build() {
        Ok(pool) => pool.install(|| dispatch(&cli.command)),
        Err(e) => Err(Error::Io(format!("thread pool: {e}"))),
    };
    match result {
        Ok(out) => {
            if stdout.write_all(out.stdout.as_bytes()).is_err() {
                return EXIT_USAGE;
            }
            out.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "syncqkd: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cmd: &Command) -> Result<Output> {
    match cmd {
        Command::Ideal => cmd_ideal(cmd),
        Command::Simulate(a) => cmd_simulate(cmd, a),
        Command::Eve(a) => cmd_eve(cmd, a),
        Command::Rigidity(a) => cmd_rigidity(cmd, a),
    }
}

fn document<T: Serialize>(manifest: RunManifest<'_>, result: T) -> String {
    let mut s = to_pretty(&Document { manifest, result });
    s.push('\n');
    s
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn cmd_ideal(cmd: &Command) -> Result<Output> {
    let p = tracial_correlation(&ideal_pvms())?;
    let result = IdealResult {
        table: p.table().to_vec(),
        bias_form: to_bias_form(&p, DEFAULT_TOL)?,
        bell: classify(&p)?,
        s: asynchronicity(&p).total,
    };
    Ok(Output { stdout: document(RunManifest::new(cmd, None, &[]), result), code: EXIT_OK })
}

fn cmd_simulate(cmd: &Command, a: &SimulateArgs) -> Result<Output> {
    let device = match a.device.as_str() {
        "ideal" => Device::honest(),
        "uniform" => Device::uniform(),
        path => Device::from_file(Path::new(path))?,
    };
    let mut cfg = match a.protocol {
        ProtocolArg::A => ProtocolConfig::a(a.n, a.lambda, a.seed),
        ProtocolArg::B => ProtocolConfig::b(a.n, a.m, a.lambda, a.mu, a.seed),
    };
    cfg.abort_on_mismatch = !a.allow_mismatch;
    let outcome = run_protocol(&cfg, &device)?;

    let mut outputs: Vec<&Path> = Vec::new();
    if let Some(t) = &a.transcript {
        let mut buf = Vec::new();
        outcome.write_transcript(&mut buf)?;
        write_file(t, &buf)?;
        outputs.push(t);
    }
    if let Some(o) = &a.out {
        outputs.push(o);
    }
    let summary: OutcomeSummary<'_> = outcome.summary();
    let text = document(RunManifest::new(cmd, Some(a.seed), &outputs), summary);
    if let Some(o) = &a.out {
        write_file(o, text.as_bytes())?;
    }
    let code = if outcome.accepted() { EXIT_OK } else { EXIT_FAILED };
    Ok(Output { stdout: text, code })
}

fn cmd_eve(cmd: &Command, a: &EveArgs) -> Result<Output> {
    if a.curve {
        let mu_max = a.mu_max.ok_or_else(|| usage("--curve needs --mu-max"))?;
        let step = a.step.ok_or_else(|| usage("--curve needs --step"))?;
        let curve = feasibility_curve(a.lambda, (0.0, mu_max), a.delta, step)?;
        let mut data = Vec::new();
        curve.write_data(&mut data)?;
        let result = CurveResult {
            lambda: curve.lambda,
            delta: curve.delta,
            points: curve.points.len(),
            monotone: curve.monotone,
            out_of_domain: curve.points.iter().filter(|p| !p.in_domain).count(),
        };
        return Ok(match &a.out {
            Some(path) => {
                write_file(path, &data)?;
                Output { stdout: document(RunManifest::new(cmd, None, &[path]), result), code: EXIT_OK }
            }
            None => Output { stdout: String::from_utf8(data).expect("ascii data"), code: EXIT_OK },
        });
    }
    let mu = a.mu.ok_or_else(|| usage("--mu is required without --curve"))?;
    let th = thresholds(a.lambda, mu, a.delta)?;
    let eve = match a.epsilon {
        Some(e) => match invert_stats(a.lambda, mu, e) {
            Ok(s) => Some(s),
            Err(Error::Singular(_)) => None,
            Err(err) => return Err(err),
        },
        None => None,
    };
    let result = EvePoint { epsilon: a.epsilon, eve, thresholds: th };
    Ok(Output { stdout: document(RunManifest::new(cmd, None, &[]), result), code: EXIT_OK })
}

fn cmd_rigidity(cmd: &Command, a: &RigidityArgs) -> Result<Output> {
    if let Some(count) = a.sweep {
        if a.max_blocks == 0 {
            return Err(usage("--max-blocks must be at least 1"));
        }
        let summary = sweep(count, a.max_blocks, a.seed)?;
        let code = if summary.violations == 0 { EXIT_OK } else { EXIT_FAILED };
        return Ok(Output { stdout: document(RunManifest::new(cmd, Some(a.seed), &[]), summary), code });
    }
    for &t in &a.angles {
        if (t - THETA_HAT).abs() > ANGLE_WINDOW + crate::rigidity::MARGIN_TOL {
            return Err(usage(format!(
                "angle {t} outside the window |θ - 2π/3| <= π/6, i.e. [{:.6}, {:.6}]",
                THETA_HAT - ANGLE_WINDOW,
                THETA_HAT + ANGLE_WINDOW
            )));
        }
    }
    let form = TwoProjectionForm::new([a.l00, a.l01, a.l10, a.l11], a.angles.clone())?;
    let report = verify_main_bound(&form)?;
    let code = if report.passed() { EXIT_OK } else { EXIT_FAILED };
    Ok(Output { stdout: document(RunManifest::new(cmd, None, &[]), report), code })
}
