//! `charsum`: command-line front end to the double character sum library.
//!
//! Every numeric flag can also come from a `--config` file of `key = value`
//! lines (the key is the long flag name without dashes). Flags win over the
//! file, the file wins over built-in defaults.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use charsum::exact_sum::{smoothed_char_sum, SumRegistry, SumRequest};
use charsum::harness::{
    emit_csv, emit_gnuplot, run_compare, run_scaling, run_verify, thread_pool_from_env, write_csv, Config, PlotKind,
    VerifyLevel,
};
use charsum::main_term::{
    c_alpha, main_term, ContourSpec, MethodRegistry, OscillatorySpec, DEFAULT_CONTOUR_TOL, DEFAULT_SERIES_TOL,
};
use charsum::weights::SmoothWeight;
use charsum::Error;

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_TOLERANCE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "charsum", version, about = "Double quadratic character sums and their main terms")]
struct Cli {
    /// Settings file with `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact sum S(X, Y) over odd m <= X, n <= Y of (m/n).
    Exact(ExactArgs),
    /// The same sum with plateau weights on both variables.
    Smooth(SmoothArgs),
    /// The transition function at alpha, or the main term at (X, Y).
    Mainterm(MaintermArgs),
    /// C(alpha) from its oscillatory series.
    CAlpha(CAlphaArgs),
    /// Exact sums against main terms, as CSV.
    Compare(CompareArgs),
    /// Error growth on the diagonal X = Y = N with a log-log fit.
    Scaling(ScalingArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct ExactArgs {
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    y: Option<f64>,
    /// naive, periodic or auto.
    #[arg(long)]
    algo: Option<String>,
}

#[derive(Args, Debug)]
struct SmoothArgs {
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    y: Option<f64>,
    /// Plateau parameter U.
    #[arg(long)]
    u: Option<f64>,
}

#[derive(Args, Debug)]
struct MaintermArgs {
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    y: Option<f64>,
    /// Evaluate the transition function at this ratio instead of a main term.
    #[arg(long)]
    alpha: Option<f64>,
    /// contour or series.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Debug)]
struct CAlphaArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    /// Number of series terms; 0 picks it from the tolerance.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Comma-separated X values.
    #[arg(long, value_delimiter = ',')]
    x: Vec<f64>,
    /// Comma-separated Y values.
    #[arg(long, value_delimiter = ',')]
    y: Vec<f64>,
    /// Take every (X, Y) pair instead of zipping.
    #[arg(long)]
    cross: bool,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a gnuplot script here (needs --out).
    #[arg(long)]
    gnuplot: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScalingArgs {
    #[arg(long)]
    nmin: Option<u64>,
    #[arg(long)]
    nmax: Option<u64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    gnuplot: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// fast or full.
    #[arg(long)]
    level: Option<String>,
}

/// Flag value, else config value, else `default`.
struct Settings {
    config: Config,
}

impl Settings {
    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Error> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.config.get_parsed(key),
        }
    }

    fn or<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, Error> {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }

    fn required<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<T, Error> {
        self.pick(flag, key)?
            .ok_or_else(|| Error::InvalidRequest(format!("--{key} is required")))
    }

    fn list(&self, flag: Vec<f64>, key: &str) -> Result<Vec<f64>, Error> {
        if !flag.is_empty() {
            return Ok(flag);
        }
        let Some(raw) = self.config.get(key) else {
            return Err(Error::InvalidRequest(format!("--{key} is required")));
        };
        raw.split(',')
            .map(|v| {
                v.trim()
                    .parse()
                    .map_err(|_| Error::InvalidRequest(format!("config key '{key}': cannot parse '{v}'")))
            })
            .collect()
    }

    fn flag(&self, flag: bool, key: &str) -> Result<bool, Error> {
        Ok(flag || self.config.get_parsed::<bool>(key)?.unwrap_or(false))
    }

    fn path(&self, flag: Option<PathBuf>, key: &str) -> Option<PathBuf> {
        flag.or_else(|| self.config.get(key).map(PathBuf::from))
    }

    fn contour(&self, sigma: Option<f64>, tol: Option<f64>) -> Result<ContourSpec, Error> {
        let spec = ContourSpec::with_sigma(self.or(sigma, "sigma", 0.75)?)
            .with_tol(self.or(tol, "tol", DEFAULT_CONTOUR_TOL)?);
        spec.validate()?;
        Ok(spec)
    }
}

fn print_value(v: impl std::fmt::Display) -> Result<(), Error> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{v}")?;
    Ok(())
}

fn write_records(records: &[charsum::harness::SumRecord], out: Option<&Path>, gnuplot: Option<PathBuf>, kind: PlotKind) -> Result<(), Error> {
    match out {
        Some(path) => {
            emit_csv(records, path)?;
            if let Some(script) = gnuplot {
                emit_gnuplot(path, &script, kind)?;
            }
        }
        None => {
            if gnuplot.is_some() {
                return Err(Error::InvalidRequest("--gnuplot needs --out".into()));
            }
            write_csv(records, std::io::stdout().lock())?;
        }
    }
    Ok(())
}

/// Runs the command; `Ok(false)` means a verification failure.
fn run(cli: Cli) -> Result<bool, Error> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let cfg = Settings { config };

    match cli.command {
        Command::Exact(a) => {
            let req = SumRequest::sharp(
                cfg.required(a.x, "x")?,
                cfg.required(a.y, "y")?,
                &cfg.or(a.algo, "algo", "auto".to_string())?,
            );
            let registry = SumRegistry::with_builtins();
            print_value(charsum::exact_sum::double_char_sum_in(&req, &registry)?)?;
        }
        Command::Smooth(a) => {
            let w = SmoothWeight::plateau(cfg.required(a.u, "u")?)?;
            let req = SumRequest::smoothed(cfg.required(a.x, "x")?, cfg.required(a.y, "y")?, w, w);
            print_value(format!("{:.16e}", smoothed_char_sum(&req)?))?;
        }
        Command::Mainterm(a) => {
            let method = cfg.or(a.method, "method", "contour".to_string())?;
            let spec = cfg.contour(a.sigma, a.tol)?;
            let registry = MethodRegistry::with_builtins(spec.sigma);
            let m = registry.get(&method)?;
            let default_tol = if method == "series" { DEFAULT_SERIES_TOL } else { DEFAULT_CONTOUR_TOL };
            let tol = cfg.or(a.tol, "tol", default_tol)?;
            let value = match cfg.pick(a.alpha, "alpha")? {
                Some(alpha) => m.transition(alpha, tol)?,
                None => {
                    let (x, y) = (cfg.required(a.x, "x")?, cfg.required(a.y, "y")?);
                    if method == "contour" {
                        main_term(x, y, &spec.with_tol(tol))?
                    } else {
                        if !(x > 0.0 && y > 0.0) {
                            return Err(Error::InvalidRequest(format!("need X, Y > 0, got X = {x}, Y = {y}")));
                        }
                        let pi2 = std::f64::consts::PI.powi(2);
                        2.0 / pi2 * x.powf(1.5) * m.transition(y / x, tol)?
                    }
                }
            };
            print_value(format!("{value:.16e}"))?;
        }
        Command::CAlpha(a) => {
            let spec = OscillatorySpec {
                k: cfg.or(a.k, "k", 0)?,
                tol: cfg.or(a.tol, "tol", DEFAULT_SERIES_TOL)?,
            };
            print_value(format!("{:.16e}", c_alpha(cfg.required(a.alpha, "alpha")?, &spec)?))?;
        }
        Command::Compare(a) => {
            let xs = cfg.list(a.x, "x")?;
            let ys = cfg.list(a.y, "y")?;
            let spec = cfg.contour(a.sigma, a.tol)?;
            let records = run_compare(&xs, &ys, &spec, cfg.flag(a.cross, "cross")?)?;
            let out = cfg.path(a.out, "out");
            write_records(&records, out.as_deref(), cfg.path(a.gnuplot, "gnuplot"), PlotKind::Compare)?;
        }
        Command::Scaling(a) => {
            let spec = cfg.contour(a.sigma, a.tol)?;
            let fit = run_scaling(
                cfg.or(a.nmin, "nmin", 500)?,
                cfg.or(a.nmax, "nmax", 16_000)?,
                cfg.or(a.steps, "steps", 6)?,
                &spec,
            )?;
            let out = cfg.path(a.out, "out");
            if out.is_some() {
                write_records(&fit.records, out.as_deref(), cfg.path(a.gnuplot, "gnuplot"), PlotKind::Scaling)?;
            }
            let [r1, r2] = fit.reference_exponents;
            let mut err = std::io::stderr().lock();
            writeln!(err, "slope {:.4} (reference {r1}, {r2}), intercept {:.4}, {} points", fit.slope, fit.intercept, fit.points.len())?;
            if out.is_none() {
                write_csv(&fit.records, std::io::stdout().lock())?;
            }
        }
        Command::Verify(a) => {
            let level: VerifyLevel = cfg.or(a.level, "level", "fast".to_string())?.parse()?;
            let report = run_verify(level);
            print_value(&report)?;
            return Ok(report.overall);
        }
    }
    Ok(true)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ToleranceNotMet { .. } => EXIT_TOLERANCE,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();

    let pool = match thread_pool_from_env() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let result = match pool {
        Some(p) => p.install(|| run(cli)),
        None => run(cli),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFY_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
