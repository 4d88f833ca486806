//! Experiment orchestration: sum-versus-main-term comparisons, scaling fits,
//! CSV output, configuration files and the aggregated verification suite.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use log::warn;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};

use crate::char_arith::{chi_tilde, kronecker, PsiLabel};
use crate::error::{Error, Result};
use crate::exact_sum::{
    smoothed_char_sum, truncated_a, truncated_a_tail_bound, truncated_z_forward, truncated_z_reordered, Auto,
    Naive, Periodic, SumAlgorithm, SumRequest, TruncationBox,
};
use crate::main_term::{
    asymptotic_small, c_alpha, c_alpha_yform, d_alpha, d_integral, d_residue_shift, d_smoothed, fhat_closed_form,
    pv_main, toshow_residual, ContourSpec, OscillatorySpec,
};
use crate::special_fn::{gamma, gamma_ratio_check, sin_pi, zeta, zeta_fe_factor};
use crate::thresholds as th;
use crate::weights::{mellin_numeric, SmoothWeight};
use crate::Complex;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "CHARSUM_THREADS";

/// Builds a rayon pool sized by `CHARSUM_THREADS`, or `None` when unset.
pub fn thread_pool_from_env() -> Result<Option<rayon::ThreadPool>> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidRequest(format!("{THREADS_ENV} must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map(Some)
        .map_err(|e| Error::InvalidRequest(format!("cannot build thread pool: {e}")))
}

// ---------------------------------------------------------------------------
// Records and CSV.

/// The exact side of a comparison: an integer for sharp sums, a real for smoothed ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exact {
    Int(i64),
    Real(f64),
}

impl Exact {
    pub fn as_f64(self) -> f64 {
        match self {
            Exact::Int(v) => v as f64,
            Exact::Real(v) => v,
        }
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exact::Int(v) => write!(f, "{v}"),
            Exact::Real(v) => write!(f, "{}", fmt_float(*v)),
        }
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// `X Y^{1/4} + Y X^{1/4}`, the size of the expected error.
pub fn error_scale(x: f64, y: f64) -> f64 {
    x * y.powf(0.25) + y * x.powf(0.25)
}

/// One comparison of an exact sum against its main term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumRecord {
    pub x: f64,
    pub y: f64,
    pub alpha: f64,
    pub exact: Exact,
    pub main: f64,
    pub abs_err: f64,
    pub norm_err: f64,
}

impl SumRecord {
    pub fn new(x: f64, y: f64, exact: Exact, main: f64) -> Self {
        let abs_err = (exact.as_f64() - main).abs();
        SumRecord {
            x,
            y,
            alpha: y / x,
            exact,
            main,
            abs_err,
            norm_err: abs_err / error_scale(x, y),
        }
    }
}

pub const CSV_HEADER: [&str; 7] = ["X", "Y", "alpha", "exact", "main", "abs_err", "norm_err"];

/// Writes `records` as CSV with full double precision.
pub fn emit_csv(records: &[SumRecord], path: &Path) -> Result<()> {
    write_csv(records, std::fs::File::create(path)?)
}

/// [`emit_csv`] into any writer.
pub fn write_csv<W: Write>(records: &[SumRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            fmt_float(r.x),
            fmt_float(r.y),
            fmt_float(r.alpha),
            r.exact.to_string(),
            fmt_float(r.main),
            fmt_float(r.abs_err),
            fmt_float(r.norm_err),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a file written by [`emit_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<SumRecord>> {
    let mut rd = csv::Reader::from_path(path)?;
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::InvalidRequest(format!("unexpected CSV header {header:?}")));
    }
    let bad = |what: &str, v: &str| Error::InvalidRequest(format!("cannot parse {what} '{v}'"));
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let f = |i: usize| row[i].parse::<f64>().map_err(|_| bad(CSV_HEADER[i], &row[i]));
        let exact = if row[3].contains(['.', 'e', 'E', 'n', 'N', 'i']) {
            Exact::Real(f(3)?)
        } else {
            Exact::Int(row[3].parse().map_err(|_| bad("exact", &row[3]))?)
        };
        out.push(SumRecord {
            x: f(0)?,
            y: f(1)?,
            alpha: f(2)?,
            exact,
            main: f(4)?,
            abs_err: f(5)?,
            norm_err: f(6)?,
        });
    }
    Ok(out)
}

/// Kind of figure produced by [`emit_gnuplot`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Normalized error against X.
    Compare,
    /// log |S - main| against log N with the reference slopes.
    Scaling,
}

/// Writes a gnuplot script that plots the CSV at `csv_path`.
pub fn emit_gnuplot(csv_path: &Path, script_path: &Path, kind: PlotKind) -> Result<()> {
    let mut f = std::fs::File::create(script_path)?;
    let data = csv_path.display();
    writeln!(f, "set datafile separator ','")?;
    writeln!(f, "set key autotitle columnhead")?;
    writeln!(f, "set grid")?;
    match kind {
        PlotKind::Compare => {
            writeln!(f, "set logscale x")?;
            writeln!(f, "set xlabel 'X'")?;
            writeln!(f, "set ylabel 'normalized error'")?;
            writeln!(f, "plot '{data}' using 1:7 with linespoints title 'norm_err'")?;
        }
        PlotKind::Scaling => {
            writeln!(f, "set logscale xy")?;
            writeln!(f, "set xlabel 'N'")?;
            writeln!(f, "set ylabel '|S - main|'")?;
            writeln!(f, "first = system(\"awk -F, 'NR==2{{print $1, $6}}' {data}\")")?;
            writeln!(f, "n0 = real(word(first, 1)); e0 = real(word(first, 2))")?;
            writeln!(
                f,
                "plot '{data}' using 1:6 with points title 'abs_err', \\\n     e0*(x/n0)**{} title 'N^{{{}}}', \\\n     e0*(x/n0)**{} title 'N^{{{}}}'",
                th::REFERENCE_EXPONENT,
                th::REFERENCE_EXPONENT,
                th::OLDER_EXPONENT,
                th::OLDER_EXPONENT
            )?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Experiments.

/// [`crate::main_term::main_term`] with `D` evaluated once per distinct `alpha`.
struct TransitionCache {
    spec: ContourSpec,
    values: HashMap<u64, f64>,
}

impl TransitionCache {
    fn new(spec: ContourSpec) -> Self {
        TransitionCache {
            spec,
            values: HashMap::new(),
        }
    }

    fn main_term(&mut self, x: f64, y: f64) -> Result<f64> {
        let alpha = y / x;
        let d = match self.values.get(&alpha.to_bits()) {
            Some(&d) => d,
            None => {
                let d = d_alpha(alpha, &self.spec.scaled_for(alpha))?;
                self.values.insert(alpha.to_bits(), d);
                d
            }
        };
        Ok(2.0 / (PI * PI) * x.powf(1.5) * d)
    }
}

/// Compares `S(X, Y)` with the main term for zipped (or, with `cross`, all)
/// pairs of `xs` and `ys`.
pub fn run_compare(xs: &[f64], ys: &[f64], spec: &ContourSpec, cross: bool) -> Result<Vec<SumRecord>> {
    spec.validate()?;
    if xs.iter().chain(ys).any(|&v| !(v >= 10.0)) {
        return Err(Error::InvalidRequest("compare needs every X, Y >= 10".into()));
    }
    let pairs: Vec<(f64, f64)> = if cross {
        xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect()
    } else {
        if xs.len() != ys.len() {
            return Err(Error::InvalidRequest(format!(
                "{} X values but {} Y values; pass --cross to take all pairs",
                xs.len(),
                ys.len()
            )));
        }
        xs.iter().copied().zip(ys.iter().copied()).collect()
    };
    let mut cache = TransitionCache::new(*spec);
    pairs
        .into_iter()
        .map(|(x, y)| {
            let exact = Auto.double_char_sum(x, y)?;
            let main = cache.main_term(x, y)?;
            Ok(SumRecord::new(x, y, Exact::Int(exact), main))
        })
        .collect()
}

/// Least-squares fit of `log |S - main|` against `log N` at `X = Y = N`.
#[derive(Debug, Clone)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    /// `(ln N, ln abs_err)` of the points used in the fit.
    pub points: Vec<(f64, f64)>,
    pub records: Vec<SumRecord>,
    /// Exponents the slope is reported against.
    pub reference_exponents: [f64; 2],
}

impl ScalingFit {
    /// Least-squares line through `points`.
    pub fn fit(points: Vec<(f64, f64)>, records: Vec<SumRecord>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidRequest("need at least two points to fit a line".into()));
        }
        let n = points.len() as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
        let my = points.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        if sxx == 0.0 {
            return Err(Error::InvalidRequest("all N values coincide".into()));
        }
        let slope = sxy / sxx;
        Ok(ScalingFit {
            slope,
            intercept: my - slope * mx,
            points,
            records,
            reference_exponents: [th::REFERENCE_EXPONENT, th::OLDER_EXPONENT],
        })
    }
}

/// Geometric grid of `steps` sizes from `nmin` to `nmax`, duplicates removed.
pub fn scaling_grid(nmin: u64, nmax: u64, steps: usize) -> Result<Vec<u64>> {
    if steps < 4 {
        return Err(Error::InvalidRequest(format!("steps must be >= 4, got {steps}")));
    }
    if !(100 <= nmin && nmin < nmax && nmax <= 50_000) {
        return Err(Error::InvalidRequest(format!(
            "need 100 <= Nmin < Nmax <= 50000, got Nmin = {nmin}, Nmax = {nmax}"
        )));
    }
    let ratio = nmax as f64 / nmin as f64;
    let mut grid: Vec<u64> = Vec::with_capacity(steps);
    for i in 0..steps {
        let n = (nmin as f64 * ratio.powf(i as f64 / (steps - 1) as f64)).round() as u64;
        if grid.last() == Some(&n) {
            warn!("scaling grid: duplicate N = {n} dropped");
            continue;
        }
        grid.push(n);
    }
    Ok(grid)
}

/// Sums against main terms on the diagonal `X = Y = N` and the fitted exponent.
pub fn run_scaling(nmin: u64, nmax: u64, steps: usize, spec: &ContourSpec) -> Result<ScalingFit> {
    spec.validate()?;
    let grid = scaling_grid(nmin, nmax, steps)?;
    let mut cache = TransitionCache::new(*spec);
    let mut records = Vec::with_capacity(grid.len());
    let mut points = Vec::with_capacity(grid.len());
    for n in grid {
        let x = n as f64;
        let exact = Auto.double_char_sum(x, x)?;
        let rec = SumRecord::new(x, x, Exact::Int(exact), cache.main_term(x, x)?);
        if rec.abs_err == 0.0 {
            warn!("scaling: N = {n} has zero error and is left out of the fit");
        } else {
            points.push((x.ln(), rec.abs_err.ln()));
        }
        records.push(rec);
    }
    ScalingFit::fit(points, records)
}

// ---------------------------------------------------------------------------
// Configuration.

/// Flat `key = value` settings, one per line, `#` starting a comment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidRequest(format!("config line {}: expected key=value", i + 1)))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(Error::InvalidRequest(format!("config line {}: empty key", i + 1)));
            }
            values.insert(k.to_string(), v.trim().to_string());
        }
        Ok(Config { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Parsed value of `key`, `None` when absent.
    pub fn get_parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::InvalidRequest(format!("config key '{key}': cannot parse '{v}'"))),
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }
}

// ---------------------------------------------------------------------------
// Verification.

/// One named check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckEntry {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
    pub note: Option<String>,
}

impl CheckEntry {
    /// Passes when `residual <= threshold` (a NaN residual fails).
    pub fn new(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        CheckEntry {
            name: name.into(),
            residual,
            threshold,
            pass: residual <= threshold,
            note: None,
        }
    }

    fn from_result(name: &str, threshold: f64, r: Result<f64>) -> Self {
        match r {
            Ok(v) => CheckEntry::new(name, v, threshold),
            Err(e) => CheckEntry {
                name: name.to_string(),
                residual: f64::NAN,
                threshold,
                pass: false,
                note: Some(e.to_string()),
            },
        }
    }
}

/// Collected checks; `overall` is the conjunction of the entries.
#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    pub entries: Vec<CheckEntry>,
    pub overall: bool,
}

impl VerificationReport {
    pub fn new() -> Self {
        VerificationReport {
            entries: Vec::new(),
            overall: true,
        }
    }

    pub fn push(&mut self, e: CheckEntry) {
        self.overall &= e.pass;
        self.entries.push(e);
    }

    pub fn get(&self, name: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.entries.iter().map(|e| e.name.len()).max().unwrap_or(0);
        for e in &self.entries {
            write!(
                f,
                "{} {:width$}  residual {:>10.3e}  threshold {:>9.2e}",
                if e.pass { "PASS" } else { "FAIL" },
                e.name,
                e.residual,
                e.threshold
            )?;
            if let Some(n) = &e.note {
                write!(f, "  ({n})")?;
            }
            writeln!(f)?;
        }
        write!(f, "overall: {}", if self.overall { "PASS" } else { "FAIL" })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyLevel {
    Fast,
    Full,
}

impl FromStr for VerifyLevel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(VerifyLevel::Fast),
            "full" => Ok(VerifyLevel::Full),
            _ => Err(Error::InvalidRequest(format!("level must be 'fast' or 'full', got '{s}'"))),
        }
    }
}

/// Individual checks, each returning a residual to compare with a threshold.
pub mod checks {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex64::new(re, im)
    }

    /// Mismatches of `kronecker(m, n)` against `chi_tilde(n, m)` for odd `m, n <= limit`.
    pub fn reciprocity(limit: i64) -> Result<f64> {
        let mut bad = 0u64;
        for n in (1..=limit).step_by(2) {
            for m in (1..=limit).step_by(2) {
                if kronecker(m, n)? != chi_tilde(n, m)? {
                    bad += 1;
                }
            }
        }
        Ok(bad as f64)
    }

    /// Mismatches against Legendre symbols from a table of squares, primes `<= limit`.
    pub fn legendre_oracle(limit: u64) -> Result<f64> {
        let mut bad = 0u64;
        for p in (3..=limit).filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)) {
            let mut square = vec![false; p as usize];
            for x in 1..p {
                square[(x * x % p) as usize] = true;
            }
            for m in 1..p {
                let want = if square[m as usize] { 1 } else { -1 };
                if kronecker(m as i64, p as i64)?.value() != want {
                    bad += 1;
                }
            }
        }
        Ok(bad as f64)
    }

    /// Failures of `(m1 m2 / n) = (m1/n)(m2/n)` on seeded random triples.
    pub fn multiplicativity(samples: usize) -> Result<f64> {
        let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
        let mut bad = 0u64;
        for _ in 0..samples {
            let m1 = rng.gen_range(-1_000_000i64..1_000_000);
            let m2 = rng.gen_range(-1_000_000i64..1_000_000);
            let n = 2 * rng.gen_range(0i64..500_000) + 1;
            if kronecker(m1 * m2, n)? != kronecker(m1, n)? * kronecker(m2, n)? {
                bad += 1;
            }
        }
        Ok(bad as f64)
    }

    /// Grid points where naive and periodic sums differ.
    pub fn algorithm_equivalence(grid: &[f64]) -> Result<f64> {
        let mut bad = 0u64;
        for &x in grid {
            for &y in grid {
                if Naive.double_char_sum(x, y)? != Periodic.double_char_sum(x, y)? {
                    bad += 1;
                }
            }
        }
        Ok(bad as f64)
    }

    pub fn zeta_two() -> Result<f64> {
        Ok((zeta(c(2.0, 0.0))? - PI * PI / 6.0).norm())
    }

    pub fn zeta_zero() -> Result<f64> {
        Ok((zeta(c(0.0, 0.0))? + 0.5).norm())
    }

    pub fn gamma_half() -> Result<f64> {
        Ok((gamma(c(0.5, 0.0))? - PI.sqrt()).norm())
    }

    /// The 15 points `sigma in {1/4, 1/2, 3/4}`, `t in {0, 1, 5, 20, 100}`.
    pub fn fe_grid() -> Vec<Complex> {
        let mut v = Vec::new();
        for sigma in [0.25, 0.5, 0.75] {
            for t in [0.0, 1.0, 5.0, 20.0, 100.0] {
                v.push(c(sigma, t));
            }
        }
        v
    }

    /// Largest `|zeta(s) - chi(s) zeta(1-s)|` over [`fe_grid`].
    pub fn zeta_functional_equation() -> Result<f64> {
        let mut worst: f64 = 0.0;
        for s in fe_grid() {
            let r = (zeta(s)? - zeta_fe_factor(s)? * zeta(c(1.0, 0.0) - s)?).norm();
            worst = worst.max(r);
        }
        Ok(worst)
    }

    pub fn gamma_ratio_points() -> Vec<Complex> {
        vec![c(0.5, 0.0), c(0.25, 2.0), c(0.75, 0.0), c(0.3, -4.0), c(0.6, 7.5)]
    }

    /// Largest Gamma-ratio residual over [`gamma_ratio_points`].
    pub fn gamma_ratio() -> Result<f64> {
        gamma_ratio_points()
            .into_iter()
            .map(gamma_ratio_check)
            .try_fold(0.0f64, |w, r| Ok(w.max(r?)))
    }

    fn gamma_grid() -> Vec<Complex> {
        let mut v = Vec::new();
        for i in 0..=12 {
            for t in [0.0, 0.5, 3.0, 10.0, 25.0, 50.0] {
                v.push(c(-3.0 + 0.5 * i as f64 + 0.123, t));
            }
        }
        v
    }

    /// Largest relative residual of `Gamma(s+1) = s Gamma(s)`.
    pub fn gamma_recurrence() -> Result<f64> {
        gamma_grid().into_iter().try_fold(0.0f64, |w, s| {
            let g = gamma(s)?;
            Ok(w.max((gamma(s + 1.0)? - s * g).norm() / (s * g).norm()))
        })
    }

    /// Largest `|Gamma(s) Gamma(1-s) sin(pi s)/pi - 1|`.
    pub fn gamma_reflection() -> Result<f64> {
        gamma_grid().into_iter().try_fold(0.0f64, |w, s| {
            let v = gamma(s)? * gamma(c(1.0, 0.0) - s)? * sin_pi(s) / PI;
            Ok(w.max((v - 1.0).norm()))
        })
    }

    /// `|zeta(3) - sum_{n <= 10^6} n^{-3}|`.
    pub fn zeta_three_direct() -> Result<f64> {
        let direct: f64 = (1..=1_000_000u64).rev().map(|n| (n as f64).powi(-3)).sum();
        Ok((zeta(c(3.0, 0.0))?.re - direct).abs())
    }

    /// Largest `|phi^(1) phi^(1/2) - 2| sqrt(U)`.
    pub fn mellin_product(us: &[f64]) -> Result<f64> {
        us.iter().try_fold(0.0f64, |w, &u| {
            let phi = SmoothWeight::plateau(u)?;
            let p = mellin_numeric(&phi, c(1.0, 0.0), 1e-12)? * mellin_numeric(&phi, c(0.5, 0.0), 1e-12)?;
            Ok(w.max((p - 2.0).norm() * u.sqrt()))
        })
    }

    /// Largest `|phi^(s) - 1/s| U^{sigma}` at `sigma = 3/4`, `t in {0, 5, 20}`.
    pub fn mellin_shift(us: &[f64]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &u in us {
            let phi = SmoothWeight::plateau(u)?;
            for t in [0.0, 5.0, 20.0] {
                let s = c(0.75, t);
                let d = (mellin_numeric(&phi, s, 1e-12)? - s.inv()).norm();
                worst = worst.max(d * u.powf(0.75));
            }
        }
        Ok(worst)
    }

    /// Largest `|phi^(sigma + it)| (1 + t^j) / U^{j-1}` over the decay grid.
    pub fn mellin_decay(ts: &[f64]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for u in [10.0, 40.0] {
            let phi = SmoothWeight::plateau(u)?;
            for sigma in [0.5, 0.75, 1.0] {
                for &t in ts {
                    let m = mellin_numeric(&phi, c(sigma, t), 1e-12)?.norm();
                    for j in 1..=3 {
                        worst = worst.max(m * (1.0 + t.powi(j)) / u.powi(j - 1));
                    }
                }
            }
        }
        Ok(worst)
    }

    /// Grid points in the plateau where the weight is not exactly 1.
    pub fn plateau_exact(u: f64, points: usize) -> Result<f64> {
        let phi = SmoothWeight::plateau(u)?;
        let (a, b) = (1.0 / u + 1e-9, 1.0 - 1.0 / u - 1e-9);
        let bad = (0..=points)
            .map(|i| a + (b - a) * i as f64 / points as f64)
            .filter(|&x| phi.eval(x) != 1.0)
            .count();
        Ok(bad as f64)
    }

    /// `|S - S_smooth| / ((X^{3/2} + Y^{3/2}) log(XY) / U)` at `X = Y = n`, `U = 40`.
    pub fn smooth_difference(n: f64) -> Result<f64> {
        let u = 40.0;
        let phi = SmoothWeight::plateau(u)?;
        let s = Auto.double_char_sum(n, n)? as f64;
        let sm = smoothed_char_sum(&SumRequest::smoothed(n, n, phi, phi))?;
        Ok((s - sm).abs() / ((2.0 * n.powf(1.5)) * (n * n).ln() / u))
    }

    /// Mean over sizes of `|S - S_U| / |S - S_{2U}|`, reported as its
    /// distance outside [`th::SMOOTH_HALVING`] (0 when inside).
    pub fn smooth_halving(sizes: &[f64], u: f64) -> Result<f64> {
        let mut ratio = 0.0;
        for &n in sizes {
            let s = Auto.double_char_sum(n, n)? as f64;
            let d = |uu: f64| -> Result<f64> {
                let w = SmoothWeight::plateau(uu)?;
                Ok((s - smoothed_char_sum(&SumRequest::smoothed(n, n, w, w))?).abs())
            };
            ratio += d(u)? / d(2.0 * u)?;
        }
        ratio /= sizes.len() as f64;
        let (lo, hi) = th::SMOOTH_HALVING;
        Ok((lo - ratio).max(ratio - hi).max(0.0))
    }

    /// Forward against reordered truncated double series.
    pub fn reordering(side: u64) -> Result<f64> {
        let bx = TruncationBox::new(side, side)?;
        let mut worst: f64 = 0.0;
        for (s, w, p, q) in [
            (c(3.0, 0.0), c(3.0, 0.0), PsiLabel::One, PsiLabel::One),
            (c(3.0, 0.0), c(4.0, 0.0), PsiLabel::MinusOne, PsiLabel::Two),
            (c(2.5, 1.0), c(2.0, -3.0), PsiLabel::MinusTwo, PsiLabel::MinusOne),
        ] {
            let a = truncated_z_forward(s, w, p, q, bx)?;
            let b = truncated_z_reordered(s, w, p, q, bx)?;
            worst = worst.max((a - b).norm());
        }
        Ok(worst)
    }

    /// `|A(2M, 2N) - A(M, N)|` divided by the analytic tail bound at `M = N = side`.
    pub fn truncation_tail(side: u64) -> Result<f64> {
        let s = c(3.0, 0.0);
        let small = TruncationBox::new(side, side)?;
        let big = TruncationBox::new(2 * side, 2 * side)?;
        let diff = (truncated_a(s, s, big)? - truncated_a(s, s, small)?).norm();
        Ok(diff / truncated_a_tail_bound(s, s, small)?)
    }

    /// Largest `|C(alpha) - D(alpha)|`.
    pub fn c_equals_d(alphas: &[f64]) -> Result<f64> {
        let spec = ContourSpec::default().with_tol(th::C_EQUALS_D_CONTOUR_TOL);
        alphas.iter().try_fold(0.0f64, |w, &a| {
            let cv = c_alpha(a, &OscillatorySpec::default())?;
            let dv = d_alpha(a, &spec)?;
            Ok(w.max((cv - dv).abs()))
        })
    }

    /// u-form against y-form of `C` at fixed series length.
    pub fn c_forms(alpha: f64, k: usize) -> Result<f64> {
        let spec = OscillatorySpec { k, tol: 1e-10 };
        Ok((c_alpha(alpha, &spec)? - c_alpha_yform(alpha, &spec)?).abs())
    }

    /// Largest relative residual at `1/4 + it`.
    pub fn toshow(ts: &[f64]) -> Result<f64> {
        ts.iter()
            .try_fold(0.0f64, |w, &t| Ok(w.max(toshow_residual(c(0.25, t))?)))
    }

    /// `|fhat(1/2) - zeta(3)/2|`.
    pub fn fhat_half() -> Result<f64> {
        Ok((fhat_closed_form(c(0.5, 0.0))? - zeta(c(3.0, 0.0))? / 2.0).norm())
    }

    /// Largest pairwise difference of the line integral across `sigmas` at the fixed height.
    pub fn contour_shift(alphas: &[f64], sigmas: &[f64]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &a in alphas {
            let vals: Vec<f64> = sigmas
                .iter()
                .map(|&s| Ok(d_integral(a, s, th::FIXED_HEIGHT, 1e-11)?.value))
                .collect::<Result<_>>()?;
            for i in 0..vals.len() {
                for j in i + 1..vals.len() {
                    worst = worst.max((vals[i] - vals[j]).abs());
                }
            }
        }
        Ok(worst)
    }

    /// Largest residue-capture residual.
    pub fn residue_capture(alphas: &[f64]) -> Result<f64> {
        alphas
            .iter()
            .try_fold(0.0f64, |w, &a| Ok(w.max(d_residue_shift(a, th::FIXED_HEIGHT)?.residual)))
    }

    /// `|D(alpha) - asymptotic_small(alpha)| / alpha^{5/2}`.
    pub fn small_alpha(alpha: f64) -> Result<f64> {
        let d = d_alpha(alpha, &ContourSpec::default().with_tol(1e-10))?;
        Ok((d - asymptotic_small(alpha)).abs() / alpha.powf(2.5))
    }

    /// `|D(alpha) - alpha| * alpha`.
    pub fn large_alpha(alpha: f64) -> Result<f64> {
        let d = d_alpha(alpha, &ContourSpec::default().with_tol(1e-3))?;
        Ok((d - alpha).abs() * alpha)
    }

    /// Largest `|D_smoothed(alpha; 1, 1) - D(alpha)|`.
    pub fn indicator_consistency(alphas: &[f64]) -> Result<f64> {
        let ind = SmoothWeight::indicator();
        let spec = ContourSpec::default();
        alphas.iter().try_fold(0.0f64, |w, &a| {
            Ok(w.max((d_smoothed(a, &ind, &ind, &spec)? - d_alpha(a, &spec)?).abs()))
        })
    }

    /// Largest `norm_err` of [`run_compare`] on the given pairs.
    pub fn compare_norm(xs: &[f64], ys: &[f64]) -> Result<f64> {
        let recs = run_compare(xs, ys, &ContourSpec::default(), false)?;
        Ok(recs.iter().map(|r| r.norm_err).fold(0.0, f64::max))
    }

    /// Largest `|main - pv_main| / main` over records with `Y <= X / (100 log X)`.
    pub fn pv_regime(xs: &[f64], ys: &[f64]) -> Result<f64> {
        let recs = run_compare(xs, ys, &ContourSpec::default(), true)?;
        Ok(recs
            .iter()
            .filter(|r| r.y <= r.x / (100.0 * r.x.ln()))
            .map(|r| (r.main - pv_main(r.x, r.y)).abs() / r.main)
            .fold(0.0, f64::max))
    }

    /// `|S - pv_main| / pv_main`.
    pub fn pv_sum(x: f64, y: f64) -> Result<f64> {
        let s = Periodic.double_char_sum(x, y)? as f64;
        let pv = pv_main(x, y);
        Ok((s - pv).abs() / pv)
    }

    /// Fitted slope of the scaling experiment, and the largest normalized error.
    pub fn scaling(nmin: u64, nmax: u64, steps: usize) -> Result<(f64, f64)> {
        let fit = run_scaling(nmin, nmax, steps, &ContourSpec::default())?;
        let worst = fit.records.iter().map(|r| r.norm_err).fold(0.0, f64::max);
        Ok((fit.slope, worst))
    }

    /// `|S_smooth - (2/pi^2) X^{3/2} D_smoothed(1)| / X^{1.05}` at `X = Y = n`.
    pub fn smoothed_main_term(n: f64, u: f64) -> Result<f64> {
        let phi = SmoothWeight::plateau(u)?;
        let s = smoothed_char_sum(&SumRequest::smoothed(n, n, phi, phi))?;
        let d = d_smoothed(1.0, &phi, &phi, &ContourSpec::default())?;
        let main = 2.0 / (PI * PI) * n.powf(1.5) * d;
        Ok((s - main).abs() / n.powf(th::SMOOTH_MAIN_EXPONENT))
    }
}

fn timed(report: &mut VerificationReport, name: &str, threshold: f64, f: impl FnOnce() -> Result<f64>) {
    let t = Instant::now();
    let entry = CheckEntry::from_result(name, threshold, f());
    log::info!("{name}: {:.3e} in {:.2?}", entry.residual, t.elapsed());
    report.push(entry);
}

/// Runs the verification suite. `Fast` uses reduced grids.
pub fn run_verify(level: VerifyLevel) -> VerificationReport {
    let full = level == VerifyLevel::Full;
    let mut r = VerificationReport::new();

    timed(&mut r, "reciprocity", 0.0, || checks::reciprocity(if full { 2001 } else { 501 }));
    timed(&mut r, "legendre_oracle", 0.0, || checks::legendre_oracle(if full { 997 } else { 199 }));
    timed(&mut r, "multiplicativity", 0.0, || checks::multiplicativity(10_000));
    let grid: &[f64] = if full {
        &[10.0, 31.0, 100.0, 100.5, 317.0, 500.0, 1000.0]
    } else {
        &[10.0, 31.0, 100.0, 100.5, 317.0]
    };
    timed(&mut r, "algorithm_equivalence", 0.0, || checks::algorithm_equivalence(grid));

    timed(&mut r, "zeta_two", th::ZETA_ANCHOR, checks::zeta_two);
    timed(&mut r, "zeta_zero", th::ZETA_ANCHOR, checks::zeta_zero);
    timed(&mut r, "gamma_half", th::GAMMA_ANCHOR, checks::gamma_half);
    timed(&mut r, "zeta_functional_equation", th::ZETA_FE, checks::zeta_functional_equation);
    timed(&mut r, "gamma_ratio", th::GAMMA_RATIO, checks::gamma_ratio);
    timed(&mut r, "gamma_recurrence", th::GAMMA_RECURRENCE, checks::gamma_recurrence);
    timed(&mut r, "gamma_reflection", th::GAMMA_REFLECTION, checks::gamma_reflection);
    timed(&mut r, "zeta_three_direct", 1e-9, checks::zeta_three_direct);

    let us: &[f64] = &[16.0, 64.0, 256.0, 1024.0];
    timed(&mut r, "mellin_product", th::MELLIN_PRODUCT, || checks::mellin_product(us));
    timed(&mut r, "mellin_shift", th::MELLIN_SHIFT, || checks::mellin_shift(&[16.0, 256.0]));
    timed(&mut r, "mellin_decay", th::MELLIN_DECAY, || checks::mellin_decay(&[1.0, 5.0, 25.0, 100.0]));
    timed(&mut r, "plateau_exact", 0.0, || checks::plateau_exact(40.0, 100_000));

    timed(&mut r, "smooth_difference", th::SMOOTH_DIFFERENCE, || {
        checks::smooth_difference(if full { 2000.0 } else { 500.0 })
    });
    if full {
        timed(&mut r, "smooth_halving", 0.0, || checks::smooth_halving(&[1000.0, 2000.0, 4000.0], 20.0));
    }
    timed(&mut r, "reordering", th::REORDERING, || checks::reordering(if full { 501 } else { 101 }));
    timed(&mut r, "truncation_tail", 1.0, || checks::truncation_tail(if full { 2001 } else { 301 }));

    let alphas: &[f64] = if full { &[0.125, 0.5, 1.0, 2.0, 8.0] } else { &[0.5, 1.0, 2.0] };
    timed(&mut r, "c_equals_d", th::C_EQUALS_D, || checks::c_equals_d(alphas));
    timed(&mut r, "c_forms", th::C_FORMS, || checks::c_forms(0.7, 50));
    timed(&mut r, "toshow", th::TOSHOW, || checks::toshow(&[0.0, 1.0, 2.0, 5.0, 10.0]));
    timed(&mut r, "fhat_half", 1e-12, checks::fhat_half);
    let shift_alphas: &[f64] = if full { &[0.5, 1.0, 2.0] } else { &[1.0] };
    timed(&mut r, "contour_shift", th::CONTOUR_SHIFT, || {
        checks::contour_shift(shift_alphas, &[0.6, 0.75, 0.9])
    });
    let res_alphas: &[f64] = if full { &[0.25, 1.0, 4.0] } else { &[1.0] };
    timed(&mut r, "residue_capture", th::RESIDUE_CAPTURE, || checks::residue_capture(res_alphas));
    timed(&mut r, "small_alpha", th::SMALL_ALPHA, || checks::small_alpha(1e-4));
    timed(&mut r, "large_alpha", th::LARGE_ALPHA, || checks::large_alpha(1e3));
    timed(&mut r, "indicator_consistency", th::INDICATOR_CONSISTENCY, || {
        checks::indicator_consistency(if full { &[0.5, 1.0, 2.0] } else { &[1.0] })
    });

    timed(&mut r, "compare_norm_err", th::NORM_ERR, || {
        checks::compare_norm(&[100.0, 1000.0, 100.0], &[100.0, 1000.0, 100_000.0])
    });
    timed(&mut r, "pv_regime", th::PV_REGIME, || checks::pv_regime(&[100_000.0], &[10.0, 50.0]));
    timed(&mut r, "pv_sum", th::PV_SUM, || checks::pv_sum(1e5, 100.0));
    if full {
        let scaling = checks::scaling(500, 16_000, 6);
        let (slope, worst) = match scaling {
            Ok((s, w)) => (Ok(s), Ok(w)),
            Err(e) => (Err(Error::InvalidRequest(e.to_string())), Err(e)),
        };
        r.push(CheckEntry::from_result("scaling_slope", th::SCALING_SLOPE, slope));
        r.push(CheckEntry::from_result("scaling_norm_err", th::NORM_ERR, worst));
        timed(&mut r, "smoothed_main_term", th::SMOOTH_MAIN, || checks::smoothed_main_term(4000.0, 40.0));
    }
    r
}
