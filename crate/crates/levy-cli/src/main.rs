//! Command-line front end: simulate sample paths, evaluate characteristic
//! functions, and run statistical validation for the supported models.
//!
//! Exit codes: 0 success, 1 a validation check failed, 2 configuration
//! error, 3 I/O error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use levy::models::{JumpLaw, Measure};
use levy::pathsim::{asset_batch, simulate_batch, PathGrid, SamplePath};
use levy::validate::{draw_increments, ecf_gof, martingale_check, moment_check, terminal_cv};
use levy::{LevyError, ModelSpec};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

const MODEL_NAMES: [&str; 10] = [
    "bm", "poisson", "cpp", "merton", "kou", "vg", "cgmy", "nig", "gh", "meixner",
];

#[derive(Debug)]
enum CliError {
    Config(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

fn config_err(e: LevyError) -> CliError {
    CliError::Config(e.to_string())
}

#[derive(Parser)]
#[command(
    name = "levy",
    version,
    about = "Simulate and validate Lévy-process market models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate sample paths of the process or of the exponential asset price.
    Simulate(SimulateArgs),
    /// Evaluate the characteristic function on a frequency grid.
    Cf(CfArgs),
    /// Check the model's sampler against its own analytic structure.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Model: bm, poisson, cpp, merton, kou, vg, cgmy, nig, gh, meixner
    /// (`validate` also accepts `all`).
    #[arg(long)]
    model: Option<String>,
    /// Override one model parameter as KEY=VALUE (repeatable).
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Flat `key = value` configuration file; command-line flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// RNG seed (default 7).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// The process itself, started at 0.
    Process,
    /// The exponential asset price, started at the spot.
    Asset,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Time horizon (default 1).
    #[arg(long = "T")]
    t: Option<f64>,
    /// Number of grid steps (default 250).
    #[arg(long = "N")]
    steps: Option<usize>,
    /// Number of independent paths (default 10).
    #[arg(long)]
    paths: Option<usize>,
    /// Spot price for asset mode (default 100).
    #[arg(long)]
    s0: Option<f64>,
    /// Continuously compounded interest rate (default 0.05).
    #[arg(long, allow_negative_numbers = true)]
    rate: Option<f64>,
    /// Apply the martingale drift correction (asset mode).
    #[arg(long)]
    risk_neutral: bool,
    /// What to output (default process).
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Output format (default csv).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CfArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Evaluation horizon (default 1).
    #[arg(long = "T")]
    t: Option<f64>,
    /// Lowest frequency (default -10).
    #[arg(long, allow_negative_numbers = true)]
    u_min: Option<f64>,
    /// Highest frequency (default 10).
    #[arg(long, allow_negative_numbers = true)]
    u_max: Option<f64>,
    /// Number of grid points (default 201).
    #[arg(long)]
    u_steps: Option<usize>,
    /// Evaluate under the risk-neutral measure.
    #[arg(long)]
    risk_neutral: bool,
    /// Interest rate for the risk-neutral measure (default 0.05).
    #[arg(long, allow_negative_numbers = true)]
    rate: Option<f64>,
    /// Output format (default csv).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Increment horizon for the drawn samples (default 1).
    #[arg(long = "T")]
    t: Option<f64>,
    /// Number of Monte Carlo samples (default 100000).
    #[arg(long)]
    paths: Option<usize>,
    /// Interest rate for the martingale check (default 0.05).
    #[arg(long, allow_negative_numbers = true)]
    rate: Option<f64>,
    /// Spot price for the martingale check (default 100).
    #[arg(long)]
    s0: Option<f64>,
}

/// Flat `key = value` config file contents.
struct FileConfig(BTreeMap<String, String>);

const CONFIG_KEYS: [&str; 13] = [
    "model",
    "seed",
    "t",
    "steps",
    "paths",
    "s0",
    "rate",
    "risk_neutral",
    "mode",
    "format",
    "u_min",
    "u_max",
    "u_steps",
];

fn load_config(path: Option<&Path>) -> Result<FileConfig, CliError> {
    let mut map = BTreeMap::new();
    let Some(path) = path else {
        return Ok(FileConfig(map));
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Config(format!(
                "config line {} is not `key = value`: '{raw}'",
                idx + 1
            )));
        };
        let key = key.trim().to_string();
        if !(CONFIG_KEYS.contains(&key.as_str()) || key.starts_with("param.")) {
            return Err(CliError::Config(format!(
                "unknown config key '{key}' on line {}",
                idx + 1
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(FileConfig(map))
}

impl FileConfig {
    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|e| {
                CliError::Config(format!("config key '{key}' has invalid value '{raw}': {e}"))
            }),
        }
    }

    fn get_str(&self, key: &str) -> Option<String> {
        self.0.get(key).cloned()
    }

    /// The model-parameter overrides, from `param.<name>` entries.
    fn params(&self) -> Result<BTreeMap<String, f64>, CliError> {
        let mut out = BTreeMap::new();
        for (key, raw) in &self.0 {
            if let Some(name) = key.strip_prefix("param.") {
                let value: f64 = raw.parse().map_err(|e| {
                    CliError::Config(format!(
                        "config key '{key}' has invalid value '{raw}': {e}"
                    ))
                })?;
                out.insert(name.to_string(), value);
            }
        }
        Ok(out)
    }
}

fn pick<T>(flag: Option<T>, cfg: Option<T>, default: T) -> T {
    flag.or(cfg).unwrap_or(default)
}

fn default_params(model: &str) -> Option<&'static [(&'static str, f64)]> {
    Some(match model {
        "bm" => &[("mu", 0.5), ("sigma", 0.5)],
        "poisson" => &[("lambda", 100.0)],
        "cpp" => &[("lambda", 100.0), ("jump_mean", 0.0), ("jump_std", 1.0)],
        "merton" => &[
            ("mu", 0.5),
            ("sigma", 0.75),
            ("lambda", 1.5),
            ("jump_mean", 0.0),
            ("jump_std", 1.0),
        ],
        "kou" => &[
            ("mu", 0.5),
            ("sigma", 0.75),
            ("lambda", 1.5),
            ("p", 0.5),
            ("theta1", 0.25),
            ("theta2", 0.25),
        ],
        "vg" => &[("sigma", 0.75), ("nu", 0.5), ("theta", 0.1)],
        "cgmy" => &[("c", 5.0), ("g", 25.0), ("m", 25.0), ("y", 1.0)],
        "nig" => &[("alpha", 2.0), ("beta", 1.0), ("delta", 1.5), ("mu", 0.0)],
        "gh" => &[
            ("alpha", 2.0),
            ("beta", 1.0),
            ("delta", 1.5),
            ("mu", 0.0),
            ("lambda", 1.0),
        ],
        "meixner" => &[("alpha", 0.5), ("beta", 0.0), ("delta", 4.0)],
        _ => return None,
    })
}

fn parse_param(s: &str) -> Result<(String, f64), CliError> {
    let Some((key, raw)) = s.split_once('=') else {
        return Err(CliError::Config(format!(
            "--param expects KEY=VALUE, got '{s}'"
        )));
    };
    let value: f64 = raw.trim().parse().map_err(|e| {
        CliError::Config(format!("parameter '{}' has invalid value '{raw}': {e}", key.trim()))
    })?;
    Ok((key.trim().to_string(), value))
}

fn build_spec(model: &str, overrides: &BTreeMap<String, f64>) -> Result<ModelSpec, CliError> {
    let defaults = default_params(model).ok_or_else(|| {
        CliError::Config(format!(
            "unknown model '{model}' (expected one of {})",
            MODEL_NAMES.join(", ")
        ))
    })?;
    let mut values: BTreeMap<&str, f64> = defaults.iter().copied().collect();
    for (key, value) in overrides {
        match values.get_mut(key.as_str()) {
            Some(slot) => *slot = *value,
            None => {
                let known: Vec<&str> = defaults.iter().map(|(k, _)| *k).collect();
                return Err(CliError::Config(format!(
                    "unknown parameter '{key}' for model '{model}' (expected one of {})",
                    known.join(", ")
                )));
            }
        }
    }
    let g = |k: &str| values[k];
    let spec = match model {
        "bm" => ModelSpec::BrownianMotion {
            mu: g("mu"),
            sigma: g("sigma"),
        },
        "poisson" => ModelSpec::Poisson { lambda: g("lambda") },
        "cpp" => ModelSpec::CompoundPoisson {
            lambda: g("lambda"),
            jumps: JumpLaw::Normal {
                mean: g("jump_mean"),
                std_dev: g("jump_std"),
            },
        },
        "merton" => ModelSpec::Merton {
            mu: g("mu"),
            sigma: g("sigma"),
            lambda: g("lambda"),
            jump_mean: g("jump_mean"),
            jump_std: g("jump_std"),
        },
        "kou" => ModelSpec::Kou {
            mu: g("mu"),
            sigma: g("sigma"),
            lambda: g("lambda"),
            p: g("p"),
            theta1: g("theta1"),
            theta2: g("theta2"),
        },
        "vg" => ModelSpec::VarianceGamma {
            sigma: g("sigma"),
            nu: g("nu"),
            theta: g("theta"),
        },
        "cgmy" => ModelSpec::Cgmy {
            c: g("c"),
            g: g("g"),
            m: g("m"),
            y: g("y"),
        },
        "nig" => ModelSpec::NormalInverseGaussian {
            alpha: g("alpha"),
            beta: g("beta"),
            delta: g("delta"),
            mu: g("mu"),
        },
        "gh" => ModelSpec::GeneralizedHyperbolic {
            alpha: g("alpha"),
            beta: g("beta"),
            delta: g("delta"),
            mu: g("mu"),
            lambda: g("lambda"),
        },
        "meixner" => ModelSpec::Meixner {
            alpha: g("alpha"),
            beta: g("beta"),
            delta: g("delta"),
        },
        _ => unreachable!("model name already checked"),
    };
    spec.validate(false).map_err(config_err)?;
    Ok(spec)
}

/// Resolves the model and its parameters from flags and config.
fn resolve_spec(common: &CommonArgs, cfg: &FileConfig) -> Result<(String, ModelSpec), CliError> {
    let model = common
        .model
        .clone()
        .or_else(|| cfg.get_str("model"))
        .ok_or_else(|| {
            CliError::Config("no model selected; pass --model or set `model` in the config".into())
        })?;
    let mut params = cfg.params()?;
    for s in &common.params {
        let (k, v) = parse_param(s)?;
        params.insert(k, v);
    }
    let spec = build_spec(&model, &params)?;
    Ok((model, spec))
}

fn parse_mode(s: &str) -> Result<Mode, CliError> {
    match s {
        "process" => Ok(Mode::Process),
        "asset" => Ok(Mode::Asset),
        _ => Err(CliError::Config(format!(
            "mode must be 'process' or 'asset', got '{s}'"
        ))),
    }
}

fn parse_format(s: &str) -> Result<Format, CliError> {
    match s {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        _ => Err(CliError::Config(format!(
            "format must be 'csv' or 'json', got '{s}'"
        ))),
    }
}

fn write_output(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(content.as_bytes())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))
        }
    }
}

fn render_paths_csv(grid: &PathGrid, paths: &[SamplePath]) -> String {
    let mut out = String::from("t");
    for k in 0..paths.len() {
        let _ = write!(out, ",path_{k}");
    }
    out.push('\n');
    for (i, t) in grid.times().iter().enumerate() {
        let _ = write!(out, "{t}");
        for p in paths {
            let _ = write!(out, ",{}", p.values[i]);
        }
        out.push('\n');
    }
    out
}

fn render_paths_json(model: &str, grid: &PathGrid, paths: &[SamplePath]) -> String {
    let obj = serde_json::json!({
        "model": model,
        "t_end": grid.t_end(),
        "steps": grid.steps(),
        "times": grid.times(),
        "paths": paths.iter().map(|p| p.values.clone()).collect::<Vec<_>>(),
    });
    let mut s = obj.to_string();
    s.push('\n');
    s
}

fn run_simulate(args: SimulateArgs) -> Result<ExitCode, CliError> {
    let cfg = load_config(args.common.config.as_deref())?;
    let (model, spec) = resolve_spec(&args.common, &cfg)?;
    let seed = pick(args.common.seed, cfg.get("seed")?, 7);
    let t = pick(args.t, cfg.get("t")?, 1.0);
    let steps = pick(args.steps, cfg.get("steps")?, 250);
    let n_paths = pick(args.paths, cfg.get("paths")?, 10);
    let s0 = pick(args.s0, cfg.get("s0")?, 100.0);
    let rate = pick(args.rate, cfg.get("rate")?, 0.05);
    let risk_neutral = args.risk_neutral || cfg.get("risk_neutral")?.unwrap_or(false);
    let mode = match args.mode {
        Some(m) => m,
        None => match cfg.get_str("mode") {
            Some(s) => parse_mode(&s)?,
            None => Mode::Process,
        },
    };
    let format = match args.format {
        Some(f) => f,
        None => match cfg.get_str("format") {
            Some(s) => parse_format(&s)?,
            None => Format::Csv,
        },
    };

    let grid = PathGrid::new(t, steps).map_err(config_err)?;
    let paths = match mode {
        Mode::Process => simulate_batch(&spec, &grid, seed, n_paths),
        Mode::Asset => {
            let measure = if risk_neutral {
                Measure::RiskNeutral { rate }
            } else {
                Measure::Physical
            };
            asset_batch(&spec, &grid, s0, measure, seed, n_paths)
        }
    }
    .map_err(config_err)?;

    let rendered = match format {
        Format::Csv => render_paths_csv(&grid, &paths),
        Format::Json => render_paths_json(&model, &grid, &paths),
    };
    write_output(args.out.as_deref(), &rendered)?;
    Ok(ExitCode::SUCCESS)
}

fn run_cf(args: CfArgs) -> Result<ExitCode, CliError> {
    let cfg = load_config(args.common.config.as_deref())?;
    let (model, spec) = resolve_spec(&args.common, &cfg)?;
    let t = pick(args.t, cfg.get("t")?, 1.0);
    let u_min = pick(args.u_min, cfg.get("u_min")?, -10.0);
    let u_max = pick(args.u_max, cfg.get("u_max")?, 10.0);
    let u_steps = pick(args.u_steps, cfg.get("u_steps")?, 201);
    let rate = pick(args.rate, cfg.get("rate")?, 0.05);
    let risk_neutral = args.risk_neutral || cfg.get("risk_neutral")?.unwrap_or(false);
    let format = match args.format {
        Some(f) => f,
        None => match cfg.get_str("format") {
            Some(s) => parse_format(&s)?,
            None => Format::Csv,
        },
    };
    if u_steps < 2 || u_max <= u_min || u_max.is_nan() || u_min.is_nan() {
        return Err(CliError::Config(format!(
            "frequency grid needs u_min < u_max and at least 2 points \
             (got [{u_min}, {u_max}] with {u_steps})"
        )));
    }
    let u_grid: Vec<f64> = (0..u_steps)
        .map(|j| u_min + (u_max - u_min) * j as f64 / (u_steps - 1) as f64)
        .collect();
    let measure = if risk_neutral {
        Measure::RiskNeutral { rate }
    } else {
        Measure::Physical
    };
    let curve = spec.cf_curve(&u_grid, t, measure).map_err(config_err)?;

    let rendered = match format {
        Format::Csv => {
            let mut out = String::from("u,re,im\n");
            for (u, v) in curve.u.iter().zip(&curve.values) {
                let _ = writeln!(out, "{u},{},{}", v.re, v.im);
            }
            out
        }
        Format::Json => {
            let obj = serde_json::json!({
                "model": model,
                "t": curve.t,
                "measure": if risk_neutral { "risk-neutral" } else { "physical" },
                "u": curve.u,
                "re": curve.values.iter().map(|v| v.re).collect::<Vec<_>>(),
                "im": curve.values.iter().map(|v| v.im).collect::<Vec<_>>(),
            });
            let mut s = obj.to_string();
            s.push('\n');
            s
        }
    };
    write_output(args.out.as_deref(), &rendered)?;
    Ok(ExitCode::SUCCESS)
}

fn run_validate(args: ValidateArgs) -> Result<ExitCode, CliError> {
    let cfg = load_config(args.common.config.as_deref())?;
    let seed = pick(args.common.seed, cfg.get("seed")?, 7);
    let t = pick(args.t, cfg.get("t")?, 1.0);
    let n = pick(args.paths, cfg.get("paths")?, 100_000);
    let rate = pick(args.rate, cfg.get("rate")?, 0.05);
    let s0 = pick(args.s0, cfg.get("s0")?, 100.0);

    let selected = args.common.model.clone().or_else(|| cfg.get_str("model"));
    let specs: Vec<(String, ModelSpec)> = if selected.as_deref() == Some("all") {
        if !args.common.params.is_empty() || !cfg.params()?.is_empty() {
            return Err(CliError::Config(
                "--param cannot be combined with --model all; every model runs \
                 with its default parameters"
                    .into(),
            ));
        }
        MODEL_NAMES
            .iter()
            .map(|name| {
                let spec = build_spec(name, &BTreeMap::new())?;
                Ok((name.to_string(), spec))
            })
            .collect::<Result<_, CliError>>()?
    } else {
        vec![resolve_spec(&args.common, &cfg)?]
    };

    let prefixed = specs.len() > 1;
    let mut all_passed = true;
    for (name, spec) in &specs {
        let prefix = if prefixed {
            format!("{name} ")
        } else {
            String::new()
        };
        let samples = draw_increments(spec, t, n, seed).map_err(config_err)?;
        let ecf = ecf_gof(spec, t, &samples).map_err(config_err)?;
        all_passed &= ecf.passed;
        println!("{prefix}characteristic function: {ecf}");
        let moments = moment_check(spec, t, &samples).map_err(config_err)?;
        all_passed &= moments.passed;
        println!("{prefix}moments: {moments}");
        // run the martingale check only where its three-standard-error rule
        // is statistically meaningful: the terminal value needs a finite
        // coefficient of variation small enough for n samples to resolve
        match spec.validate(true) {
            Err(e) => println!("{prefix}martingale: skipped ({e})"),
            Ok(()) => match terminal_cv(spec, t) {
                None => println!(
                    "{prefix}martingale: skipped (terminal value has infinite variance \
                     at these parameters; the mean test cannot be calibrated)"
                ),
                Some(cv) if cv > (n as f64).sqrt() => println!(
                    "{prefix}martingale: skipped (relative standard error of the \
                     terminal mean exceeds 100% at n = {n}; the test has no power)"
                ),
                Some(_) => {
                    let mart = martingale_check(spec, rate, s0, t, n, seed + 1)
                        .map_err(config_err)?;
                    all_passed &= mart.passed;
                    println!("{prefix}martingale: {mart}");
                }
            },
        }
    }
    if all_passed {
        println!("all checks passed");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("validation FAILED");
        Ok(ExitCode::from(1))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => run_simulate(a),
        Command::Cf(a) => run_cf(a),
        Command::Validate(a) => run_validate(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
