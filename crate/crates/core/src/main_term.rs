//! The transition function of the double character sum, computed two ways.
//!
//! * `D(alpha)` as a vertical-line integral of
//!   `(alpha/2pi)^s Gamma(s - 3/2) sin(pi s/2) zeta(2s - 1) / s`
//!   ([`d_alpha`], [`d_smoothed`]).
//! * `C(alpha)` as a series of oscillatory real integrals that never touches
//!   zeta or Gamma ([`c_alpha`], [`c_alpha_yform`]).
//!
//! The two agree, which makes `C = D` a check on the whole analytic stack.
//! The module also carries the closed-form residues, the small/large `alpha`
//! asymptotics and the assembled main term `(2/pi^2) X^{3/2} D(Y/X)`.
//!
//! Line integrals are split into a core `|t| <= 32`, done by adaptive
//! Gauss–Kronrod, and a tail of fixed-width 21-point panels. Node `j` of every
//! tail panel lies on one arithmetic progression, which lets the zeta factor be
//! evaluated in batches ([`crate::special_fn::zeta_batch`]). The integrand only
//! decays like a power of `t`, so the tail is truncated at a height `T` that is
//! either fixed or doubled until the last piece is negligible.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quad::{gk21_apply, gk21_nodes, integrate, integrate_with, Adaptive, FilonRule, FILON_NODES};
use crate::special_fn::{gamma, ln_gamma, ln_sin_pi, sin_pi, zeta, zeta2, zeta_batch};
use crate::weights::{mellin, SmoothWeight};
use crate::Complex;

const SQRT_PI: f64 = 1.772_453_850_905_516;
const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Half-width of the adaptively integrated core of every line integral.
pub const CORE_HEIGHT: f64 = 32.0;
/// Largest truncation height the adaptive mode may reach.
pub const MAX_HEIGHT: f64 = 4096.0;
/// Width of the fixed tail panels.
const TAIL_PANEL: f64 = 0.5;
/// Default absolute tolerance for `D`.
pub const DEFAULT_CONTOUR_TOL: f64 = 1e-5;
/// Default absolute tolerance for `C`.
pub const DEFAULT_SERIES_TOL: f64 = 1e-10;
/// Tolerance passed to numerical Mellin transforms inside [`d_smoothed`].
const MELLIN_TOL: f64 = 1e-10;

/// A vertical line `Re s = sigma` truncated at `|Im s| <= t` (`t = 0` means
/// choose `t` adaptively) with an absolute tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    pub sigma: f64,
    pub t: f64,
    pub tol: f64,
}

impl Default for ContourSpec {
    fn default() -> Self {
        ContourSpec {
            sigma: 0.75,
            t: 0.0,
            tol: DEFAULT_CONTOUR_TOL,
        }
    }
}

impl ContourSpec {
    pub fn with_sigma(sigma: f64) -> Self {
        ContourSpec {
            sigma,
            ..Self::default()
        }
    }

    pub fn with_height(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// The same spec with `tol` multiplied by `max(1, alpha)`.
    ///
    /// `D(alpha)` grows like `alpha`, and so does the integrand's tail, so for
    /// large `alpha` an absolute tolerance is read as a relative one.
    pub fn scaled_for(self, alpha: f64) -> Self {
        self.with_tol(self.tol * alpha.max(1.0))
    }

    /// Abscissa strictly inside (1/2, 1), at least 1e-3 from both ends.
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.501 && self.sigma <= 0.999) {
            return Err(Error::InvalidRequest(format!(
                "sigma must lie in [0.501, 0.999], got {}",
                self.sigma
            )));
        }
        self.validate_height_and_tol()
    }

    fn validate_height_and_tol(&self) -> Result<()> {
        if !(self.tol >= 1e-12) {
            return Err(Error::InvalidRequest(format!("tol must be >= 1e-12, got {}", self.tol)));
        }
        if !(self.t >= 0.0) || !self.t.is_finite() {
            return Err(Error::InvalidRequest(format!("T must be finite and >= 0, got {}", self.t)));
        }
        Ok(())
    }
}

/// Truncation and tolerance for the `C` series (`k = 0` means adaptive).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorySpec {
    pub k: usize,
    pub tol: f64,
}

impl Default for OscillatorySpec {
    fn default() -> Self {
        OscillatorySpec {
            k: 0,
            tol: DEFAULT_SERIES_TOL,
        }
    }
}

impl OscillatorySpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol >= 1e-10) {
            return Err(Error::InvalidRequest(format!("tol must be >= 1e-10, got {}", self.tol)));
        }
        Ok(())
    }
}

fn check_alpha(op: &'static str, alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::domain(op, format!("alpha must be positive and finite, got {alpha}")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Line integrals.

/// A function integrated along vertical lines. Implementations must satisfy
/// `K(conj s) = conj K(s)`; the tail is folded onto `t > 0` using it.
pub trait LineKernel: Sync {
    fn eval(&self, s: Complex) -> Result<Complex>;

    /// `K(sigma + i(t0 + k dt))` for `k = 0..count`.
    fn eval_progression(&self, sigma: f64, t0: f64, dt: f64, count: usize) -> Result<Vec<Complex>> {
        (0..count)
            .map(|k| self.eval(Complex::new(sigma, t0 + dt * k as f64)))
            .collect()
    }
}

/// Result of `int_{-T}^{T} K(sigma + it) dt`.
#[derive(Debug, Clone, Copy)]
pub struct LineIntegral {
    /// Real part of the integral.
    pub value: f64,
    /// Imaginary part, zero up to rounding for a real-symmetric kernel.
    pub imag_residual: f64,
    /// Truncation height actually used.
    pub height: f64,
    /// Quadrature error estimate (truncation not included).
    pub quad_error: f64,
    /// Size of the last tail piece; a proxy for truncation error in adaptive mode.
    pub last_increment: f64,
}

/// `int_{t_a}^{t_b} K dt` by `panels` equal 21-point panels, evaluated node
/// column by node column. Returns (integral, summed |Kronrod - Gauss|).
fn composite_tail<K: LineKernel + ?Sized>(
    kernel: &K,
    sigma: f64,
    t_a: f64,
    t_b: f64,
    panels: usize,
) -> Result<(Complex, f64)> {
    let h = (t_b - t_a) / panels as f64;
    let offsets = gk21_nodes(0.0, h);
    let columns: Vec<Vec<Complex>> = offsets
        .iter()
        .map(|&o| kernel.eval_progression(sigma, t_a + o, h, panels))
        .collect::<Result<_>>()?;
    let mut total = Complex::new(0.0, 0.0);
    let mut err = 0.0;
    for p in 0..panels {
        let vals: [Complex; 21] = std::array::from_fn(|j| columns[j][p]);
        let (v, e) = gk21_apply(&vals, 0.0, h);
        total += v;
        err += e;
    }
    Ok((total, err))
}

fn tail_piece<K: LineKernel + ?Sized>(kernel: &K, sigma: f64, t_a: f64, t_b: f64) -> Result<(Complex, f64)> {
    let panels = ((t_b - t_a) / TAIL_PANEL).ceil().max(1.0) as usize;
    composite_tail(kernel, sigma, t_a, t_b, panels)
}

/// `int_{-T}^{T} K(sigma + it) dt` with `T` fixed (`height > 0`) or chosen by
/// doubling from [`CORE_HEIGHT`] until the newest piece is below `tol / 2`.
/// `tol` is absolute, on the integral itself.
pub fn line_integral<K: LineKernel + ?Sized>(kernel: &K, sigma: f64, height: f64, tol: f64) -> Result<LineIntegral> {
    let core_h = if height > 0.0 { height.min(CORE_HEIGHT) } else { CORE_HEIGHT };
    let breaks: Vec<f64> = {
        let n = (2.0 * core_h).ceil() as usize;
        (0..=n).map(|i| -core_h + 2.0 * core_h * i as f64 / n as f64).collect()
    };
    let opts = Adaptive {
        abs_tol: tol / 4.0,
        rel_tol: 0.0,
        max_panels: 20_000,
    };
    let core = integrate(|t| kernel.eval(Complex::new(sigma, t)), &breaks, opts)?;
    let mut value = core.value.re;
    let mut quad_error = core.error;
    let mut last_increment = 0.0;
    let mut top = core_h;

    if height > core_h {
        let (piece, err) = tail_piece(kernel, sigma, core_h, height)?;
        value += 2.0 * piece.re;
        quad_error += 2.0 * err;
        last_increment = 2.0 * piece.re.abs();
        top = height;
    } else if height == 0.0 {
        loop {
            let next = 2.0 * top;
            let (piece, err) = tail_piece(kernel, sigma, top, next)?;
            value += 2.0 * piece.re;
            quad_error += 2.0 * err;
            last_increment = 2.0 * piece.re.abs();
            top = next;
            if last_increment < tol / 2.0 {
                break;
            }
            if top >= MAX_HEIGHT {
                return Err(Error::ToleranceNotMet {
                    op: "line_integral",
                    requested: tol,
                    achieved: last_increment,
                });
            }
        }
    }
    Ok(LineIntegral {
        value,
        imag_residual: core.value.im,
        height: top,
        quad_error,
        last_increment,
    })
}

/// `(alpha/2pi)^s Gamma(s - 3/2) sin(pi s/2) zeta(2s - 1) / s`.
#[derive(Debug, Clone, Copy)]
pub struct DKernel {
    ln_ratio: f64,
}

impl DKernel {
    pub fn new(alpha: f64) -> Result<Self> {
        check_alpha("DKernel", alpha)?;
        Ok(DKernel {
            ln_ratio: alpha.ln() - LN_2PI,
        })
    }

    fn prefactor(&self, s: Complex) -> Result<Complex> {
        let ln = s * self.ln_ratio + ln_gamma(s - 1.5)? + ln_sin_pi(s * 0.5);
        Ok(ln.exp() / s)
    }
}

impl LineKernel for DKernel {
    fn eval(&self, s: Complex) -> Result<Complex> {
        Ok(self.prefactor(s)? * zeta(s * 2.0 - 1.0)?)
    }

    fn eval_progression(&self, sigma: f64, t0: f64, dt: f64, count: usize) -> Result<Vec<Complex>> {
        let z = zeta_batch(2.0 * sigma - 1.0, 2.0 * t0, 2.0 * dt, count)?;
        z.into_iter()
            .enumerate()
            .map(|(k, zk)| Ok(self.prefactor(Complex::new(sigma, t0 + dt * k as f64))? * zk))
            .collect()
    }
}

/// `(1/sqrt(pi)) int_{-T}^{T}` of the `D` integrand on `Re s = sigma`, i.e. the
/// integral `(1/(i sqrt(pi))) int_{(sigma)} ... ds` that `D` subtracts.
///
/// Any `sigma` off the poles `1/2, 3/2, -1/2, ...` and `1` is accepted, so
/// this also serves lines left of the pole at `1/2`.
pub fn d_integral(alpha: f64, sigma: f64, height: f64, tol: f64) -> Result<LineIntegral> {
    check_alpha("d_integral", alpha)?;
    let near_pole = |p: f64| (sigma - p).abs() < 1e-3;
    if near_pole(1.0) || (sigma < 2.0 && ((sigma - 1.5) % 1.0 + 1.0) % 1.0 < 1e-3) || near_pole(0.5) {
        return Err(Error::domain("d_integral", format!("sigma = {sigma} is on or next to a pole")));
    }
    let kernel = DKernel::new(alpha)?;
    let mut r = line_integral(&kernel, sigma, height, tol * SQRT_PI).map_err(|e| unscale("d_integral", e))?;
    r.value /= SQRT_PI;
    r.imag_residual /= SQRT_PI;
    r.quad_error /= SQRT_PI;
    r.last_increment /= SQRT_PI;
    Ok(r)
}

/// Reports a tolerance failure of the unnormalized integral in the caller's units.
fn unscale(op: &'static str, e: Error) -> Error {
    match e {
        Error::ToleranceNotMet { requested, achieved, .. } => Error::ToleranceNotMet {
            op,
            requested: requested / SQRT_PI,
            achieved: achieved / SQRT_PI,
        },
        e => e,
    }
}

fn check_imag(op: &'static str, r: &LineIntegral, tol: f64) -> Result<()> {
    if r.imag_residual.abs() > 10.0 * tol {
        return Err(Error::ToleranceNotMet {
            op,
            requested: 10.0 * tol,
            achieved: r.imag_residual.abs(),
        });
    }
    Ok(())
}

/// `D(alpha) = sqrt(alpha) + alpha - (1/(i sqrt(pi))) int_{(sigma)} ... ds`.
pub fn d_alpha(alpha: f64, spec: &ContourSpec) -> Result<f64> {
    check_alpha("d_alpha", alpha)?;
    spec.validate()?;
    let r = d_integral(alpha, spec.sigma, spec.t, spec.tol)?;
    check_imag("d_alpha", &r, spec.tol)?;
    Ok(alpha.sqrt() + alpha - r.value)
}

/// Line integrals at `Re s = 3/4` and `1/4` at the same height; their
/// difference should be the residue `sqrt(alpha)` from the pole at `s = 1/2`.
#[derive(Debug, Clone, Copy)]
pub struct ResidueShift {
    pub right: f64,
    pub left: f64,
    pub residual: f64,
}

/// Height used by [`d_residue_shift_check`] on both lines.
pub const RESIDUE_CHECK_HEIGHT: f64 = 4096.0;

/// `|(I_{3/4} - I_{1/4}) - sqrt(alpha)|` for the `D` integrand.
pub fn d_residue_shift_check(alpha: f64) -> Result<f64> {
    Ok(d_residue_shift(alpha, RESIDUE_CHECK_HEIGHT)?.residual)
}

/// [`d_residue_shift_check`] at a chosen height, with both integrals exposed.
pub fn d_residue_shift(alpha: f64, height: f64) -> Result<ResidueShift> {
    check_alpha("d_residue_shift_check", alpha)?;
    if !(height > 0.0) {
        return Err(Error::InvalidRequest("residue check needs a fixed height".into()));
    }
    let tol = 1e-11;
    let right = d_integral(alpha, 0.75, height, tol)?.value;
    let left = d_integral(alpha, 0.25, height, tol)?.value;
    Ok(ResidueShift {
        right,
        left,
        residual: ((right - left) - alpha.sqrt()).abs(),
    })
}

// ---------------------------------------------------------------------------
// Smoothed main term.

struct SmoothedKernel {
    ln_ratio: f64,
    phi: SmoothWeight,
    psi: SmoothWeight,
}

impl SmoothedKernel {
    fn prefactor(&self, s: Complex) -> Result<Complex> {
        let ln = s * self.ln_ratio + ln_gamma(s - 0.5)? + ln_sin_pi(s * 0.5);
        let m = mellin(&self.phi, Complex::new(1.5, 0.0) - s, MELLIN_TOL)? * mellin(&self.psi, s, MELLIN_TOL)?;
        Ok(ln.exp() * m)
    }
}

impl LineKernel for SmoothedKernel {
    fn eval(&self, s: Complex) -> Result<Complex> {
        Ok(self.prefactor(s)? * zeta(s * 2.0 - 1.0)?)
    }

    fn eval_progression(&self, sigma: f64, t0: f64, dt: f64, count: usize) -> Result<Vec<Complex>> {
        let z = zeta_batch(2.0 * sigma - 1.0, 2.0 * t0, 2.0 * dt, count)?;
        z.into_iter()
            .enumerate()
            .map(|(k, zk)| Ok(self.prefactor(Complex::new(sigma, t0 + dt * k as f64))? * zk))
            .collect()
    }
}

/// Weighted transition function
/// `[phi^(1) psi^(1/2) sqrt(alpha) + psi^(1) phi^(1/2) alpha] / 2
///  + (1/(i sqrt(pi))) int_{(sigma)} (alpha/2pi)^s phi^(3/2 - s) psi^(s) Gamma(s - 1/2) sin(pi s/2) zeta(2s - 1) ds`.
///
/// With both weights the indicator this reproduces [`d_alpha`] node for node.
pub fn d_smoothed(alpha: f64, phi: &SmoothWeight, psi: &SmoothWeight, spec: &ContourSpec) -> Result<f64> {
    check_alpha("d_smoothed", alpha)?;
    spec.validate()?;
    let one = Complex::new(1.0, 0.0);
    let half = Complex::new(0.5, 0.0);
    let residues = (mellin(phi, one, MELLIN_TOL)? * mellin(psi, half, MELLIN_TOL)? * alpha.sqrt()
        + mellin(psi, one, MELLIN_TOL)? * mellin(phi, half, MELLIN_TOL)? * alpha)
        .re
        / 2.0;
    let kernel = SmoothedKernel {
        ln_ratio: alpha.ln() - LN_2PI,
        phi: *phi,
        psi: *psi,
    };
    let mut r =
        line_integral(&kernel, spec.sigma, spec.t, spec.tol * SQRT_PI).map_err(|e| unscale("d_smoothed", e))?;
    r.value /= SQRT_PI;
    r.imag_residual /= SQRT_PI;
    check_imag("d_smoothed", &r, spec.tol)?;
    Ok(residues + r.value)
}

// ---------------------------------------------------------------------------
// C(alpha): zeta-free and Gamma-free.

/// Series length that guarantees the `C` tail is below `tol / 2`:
/// `sum_{k > K} min(2/3, 2/beta_k) / k^2` with `beta_k = pi k^2 alpha / 2`.
/// Grows like `alpha^{-1/3}` as `alpha -> 0`.
pub fn c_series_length(alpha: f64, tol: f64) -> usize {
    let c = PI * alpha / 2.0;
    // beta_k >= 3 for k > sqrt(3/c), after which the bound is 2/(c k^4)
    let k1 = (3.0 / c).sqrt().ceil();
    let k2 = (4.0 / (3.0 * c * tol)).cbrt().ceil();
    k1.max(k2).max(1.0) as usize
}

/// `F(beta) = int_1^inf t^{-5/2} sin(beta t) dt` by two integrations by parts
/// and a Filon rule on what remains.
///
/// For `beta < 1` the integration by parts starts at `a = 1/beta`, and
/// `[1, a]` (less than one period) is integrated directly.
pub fn inner_u(beta: f64, tol: f64, rule: &FilonRule) -> Result<f64> {
    let a = if beta < 1.0 { 1.0 / beta } else { 1.0 };
    let head = if a > 1.0 {
        integrate_with(
            |t: f64| t.powf(-2.5) * (beta * t).sin(),
            &[1.0, a.sqrt(), a],
            Adaptive::abs(tol / 4.0),
        )?
        .value
    } else {
        0.0
    };
    let ba = beta * a;
    let b2 = beta * beta;
    let boundary = a.powf(-2.5) * ba.cos() / beta + 2.5 * a.powf(-3.5) * ba.sin() / b2;
    // the remainder G is multiplied by 35 / (4 beta^2); |int_{t_m}^inf| <= (2/7) t_m^{-7/2}
    let scale = 35.0 / (4.0 * b2);
    let t_max = (scale * (2.0 / 7.0) / (tol / 4.0)).powf(2.0 / 7.0).max(a);
    let mut g = 0.0;
    let mut lo = a;
    while lo < t_max {
        let hi = (lo * 1.08).min(t_max);
        let vals: [f64; FILON_NODES] = rule.nodes(lo, hi).map(|t| t.powf(-4.5));
        g += rule.apply(&vals, lo, hi, beta).im;
        lo = hi;
    }
    Ok(head + boundary - scale * g)
}

/// `int_a^inf x^{-p} e^{ix} dx` by its asymptotic expansion, to absolute
/// error `tol`. Needs `a` well above `p`.
fn oscillatory_tail(a: f64, p: f64, tol: f64) -> Result<Complex> {
    let mut term = Complex::new(0.0, 1.0) * Complex::from_polar(a.powf(-p), a);
    let mut sum = Complex::new(0.0, 0.0);
    let mut prod = 1.0;
    for j in 0..200 {
        sum += term;
        let q = p + j as f64;
        prod *= q / a;
        // remainder after j + 1 terms: prod(p..p+j) |I_{p+j+1}(a)| <= prod(p..p+j) a^{-p-j} / (p+j)
        let bound = prod * a.powf(1.0 - p) / q;
        if bound < tol {
            return Ok(sum);
        }
        term *= Complex::new(0.0, -q / a);
        if q > a {
            break;
        }
    }
    Err(Error::ToleranceNotMet {
        op: "oscillatory_tail",
        requested: tol,
        achieved: prod,
    })
}

/// Where [`inner_y`] hands over from quadrature to the asymptotic expansion.
const Y_SPLIT: f64 = 40.0;

/// `F(beta) = beta^{3/2} int_beta^inf x^{-5/2} sin x dx`, the same quantity as
/// [`inner_u`] reached by the substitution `x = beta t`.
pub fn inner_y(beta: f64, tol: f64) -> Result<f64> {
    let scale = beta.powf(1.5);
    let tol_x = tol / scale;
    let start = beta.max(Y_SPLIT);
    let mut total = oscillatory_tail(start, 2.5, tol_x / 2.0)?.im;
    if beta < Y_SPLIT {
        let mut breaks = vec![beta];
        // geometric breaks near a small lower limit, then one per unit length
        let mut x = beta;
        while x < 1.0 {
            x *= 4.0;
            if x < 1.0 {
                breaks.push(x);
            }
        }
        let first = beta.max(1.0).floor() + 1.0;
        let mut k = first;
        while k < Y_SPLIT {
            breaks.push(k);
            k += 1.0;
        }
        breaks.push(Y_SPLIT);
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let opts = Adaptive {
            abs_tol: tol_x / 2.0,
            rel_tol: 0.0,
            max_panels: 10_000,
        };
        total += integrate_with(|x: f64| x.powf(-2.5) * x.sin(), &breaks, opts)?.value;
    }
    Ok(scale * total)
}

fn c_series<F: FnMut(f64, f64) -> Result<f64>>(alpha: f64, spec: &OscillatorySpec, mut inner: F) -> Result<f64> {
    check_alpha("c_alpha", alpha)?;
    spec.validate()?;
    let k_max = if spec.k == 0 {
        c_series_length(alpha, spec.tol)
    } else {
        spec.k
    };
    // (2/pi) sum_k err_k / k^2 <= (pi/3) err_k, kept below tol/2
    let inner_tol = spec.tol * 3.0 / (2.0 * PI);
    let mut terms = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let kk = (k * k) as f64;
        terms.push(inner(PI * kk * alpha / 2.0, inner_tol)? / kk);
    }
    // smallest first
    let sum: f64 = terms.iter().rev().sum();
    Ok(alpha + 2.0 / PI * sum)
}

/// `C(alpha) = alpha + (2/pi) sum_k k^{-2} int_1^inf t^{-5/2} sin(pi k^2 alpha t / 2) dt`.
///
/// Uses only elementary functions and real quadrature.
pub fn c_alpha(alpha: f64, spec: &OscillatorySpec) -> Result<f64> {
    let rule = FilonRule::new();
    c_series(alpha, spec, |beta, tol| inner_u(beta, tol, &rule))
}

/// [`c_alpha`] with the inner integrals taken in the original variable.
pub fn c_alpha_yform(alpha: f64, spec: &OscillatorySpec) -> Result<f64> {
    c_series(alpha, spec, inner_y)
}

// ---------------------------------------------------------------------------
// Closed forms.

/// Residue of `Z(s, w)` on the line `w = 3/2 - s`:
/// `sqrt(pi) sin(pi s/2) Gamma(s - 1/2) zeta(2s - 1) / (2 (2pi)^s)`.
pub fn residue_z_diagonal(s: Complex) -> Result<Complex> {
    let g = gamma(s - 0.5)?;
    let z = zeta(s * 2.0 - 1.0)?;
    Ok(sin_pi(s * 0.5) * g * z * SQRT_PI / ((s * LN_2PI).exp() * 2.0))
}

/// Residue of `A(s, w)` on `w = 3/2 - s`: [`residue_z_diagonal`] divided by `zeta_2(2) = pi^2/8`.
pub fn residue_a_diagonal(s: Complex) -> Result<Complex> {
    Ok(residue_z_diagonal(s)? * (8.0 / (PI * PI)))
}

/// `zeta_2(2x) / (2 zeta_2(2x + 1))`, the residue of `A` on `s = 1` (as a
/// function of `w = x`) and on `w = 1` (as a function of `s = x`).
pub fn residue_lines_s1_w1(x: Complex) -> Result<Complex> {
    let num = zeta2(x * 2.0)?;
    let den = zeta2(x * 2.0 + 1.0)?;
    if den == Complex::new(0.0, 0.0) {
        return Err(Error::pole("residue_lines_s1_w1", x));
    }
    Ok(num / (den * 2.0))
}

/// `sqrt(alpha) + (pi/18) alpha^{3/2}`, the small-`alpha` expansion.
pub fn asymptotic_small(alpha: f64) -> f64 {
    alpha.sqrt() + PI / 18.0 * alpha.powf(1.5)
}

/// `alpha`, the large-`alpha` limit.
pub fn asymptotic_large(alpha: f64) -> f64 {
    alpha
}

/// `(2/pi^2) X Y^{1/2}`: the main term when `Y` is small against `X`.
pub fn pv_main(x: f64, y: f64) -> f64 {
    2.0 / (PI * PI) * x * y.sqrt()
}

/// `(2/pi^2) X^{3/2} D(Y/X)`, with `D` evaluated at [`ContourSpec::scaled_for`].
pub fn main_term(x: f64, y: f64, spec: &ContourSpec) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::domain("main_term", format!("need X, Y > 0, got X = {x}, Y = {y}")));
    }
    let alpha = y / x;
    Ok(2.0 / (PI * PI) * x.powf(1.5) * d_alpha(alpha, &spec.scaled_for(alpha))?)
}

/// `2^s zeta(2 + 2s) Gamma(s) sin(pi s/2) / (pi^s (s + 3/2))` for `0 < Re s < 1`.
pub fn fhat_closed_form(s: Complex) -> Result<Complex> {
    if !(s.re > 0.0 && s.re < 1.0) {
        return Err(Error::domain("fhat_closed_form", format!("need 0 < Re s < 1, got {s}")));
    }
    let ln = s * (2f64.ln() - PI.ln());
    Ok(ln.exp() * zeta(s * 2.0 + 2.0)? * gamma(s)? * sin_pi(s * 0.5) / (s + 1.5))
}

/// Relative residual `|L - R| / max(|L|, |R|)` of
/// `-2 sqrt(pi) (2pi)^s Gamma(-s - 3/2) sin(pi s/2) zeta(-2s - 1) / s = (2/pi) fhat(s)`.
pub fn toshow_residual(s: Complex) -> Result<f64> {
    if s == Complex::new(0.0, 0.0) {
        return Err(Error::pole("toshow_residual", s));
    }
    let lhs = -(s * LN_2PI).exp() * gamma(-s - 1.5)? * sin_pi(s * 0.5) * zeta(-s * 2.0 - 1.0)? * (2.0 * SQRT_PI) / s;
    let rhs = fhat_closed_form(s)? * (2.0 / PI);
    Ok((lhs - rhs).norm() / lhs.norm().max(rhs.norm()))
}

// ---------------------------------------------------------------------------
// Method registry.

/// A way of evaluating the transition function at `alpha`.
pub trait MainTermMethod: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn transition(&self, alpha: f64, tol: f64) -> Result<f64>;
}

/// `D(alpha)` by contour integration.
pub struct ContourMethod {
    pub sigma: f64,
}

impl MainTermMethod for ContourMethod {
    fn name(&self) -> &'static str {
        "contour"
    }
    fn description(&self) -> &'static str {
        "vertical-line integral with Gamma and zeta"
    }
    fn transition(&self, alpha: f64, tol: f64) -> Result<f64> {
        d_alpha(alpha, &ContourSpec::with_sigma(self.sigma).with_tol(tol))
    }
}

/// `C(alpha)` by the oscillatory series.
pub struct SeriesMethod;

impl MainTermMethod for SeriesMethod {
    fn name(&self) -> &'static str {
        "series"
    }
    fn description(&self) -> &'static str {
        "series of oscillatory integrals, no special functions"
    }
    fn transition(&self, alpha: f64, tol: f64) -> Result<f64> {
        c_alpha(alpha, &OscillatorySpec { k: 0, tol: tol.max(1e-10) })
    }
}

/// Name-keyed collection of [`MainTermMethod`]s.
#[derive(Clone, Default)]
pub struct MethodRegistry {
    entries: BTreeMap<&'static str, Arc<dyn MainTermMethod>>,
}

impl MethodRegistry {
    pub fn with_builtins(sigma: f64) -> Self {
        let mut r = Self::default();
        r.register(Arc::new(ContourMethod { sigma }));
        r.register(Arc::new(SeriesMethod));
        r
    }

    pub fn register(&mut self, m: Arc<dyn MainTermMethod>) {
        self.entries.insert(m.name(), m);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn MainTermMethod>> {
        self.entries.get(name).cloned().ok_or_else(|| {
            Error::InvalidRequest(format!(
                "unknown main-term method '{name}' (available: {})",
                self.names().join(", ")
            ))
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }
}
