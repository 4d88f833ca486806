//! Cutoff functions on (0, 1) and their Mellin transforms
//! `w^(s) = int_0^1 w(x) x^{s-1} dx`.
//!
//! A plateau weight with parameter `U` is exactly 1 on `[1/U, 1 - 1/U]` and
//! falls to 0 through the smooth step `H(t) = g(t) / (g(t) + g(1 - t))`,
//! `g(t) = exp(-1/t)`, on each side.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use std::sync::OnceLock;

use crate::quad::{integrate, Adaptive, FilonRule};
use crate::Complex;

/// Smallest plateau parameter accepted.
pub const MIN_PLATEAU_U: f64 = 4.0;

/// The left transition band is cut off at `x = 1 / (LEFT_CUTOFF * U)`, where
/// the weight is below `exp(-LEFT_CUTOFF)`.
const LEFT_CUTOFF: f64 = 80.0;

/// Above this `|Im s|` the bands are integrated by Filon panels.
const OSCILLATION_SPLIT: f64 = 50.0;

/// Panel counts tried by the Filon band rule before giving up.
const FILON_PANELS: [usize; 4] = [16, 32, 64, 128];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightKind {
    Plateau,
    Indicator,
}

/// A cutoff function supported in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothWeight {
    kind: WeightKind,
    u: f64,
}

impl SmoothWeight {
    /// Smooth plateau weight; `u` must be at least [`MIN_PLATEAU_U`].
    pub fn plateau(u: f64) -> Result<Self> {
        if !(u >= MIN_PLATEAU_U) || !u.is_finite() {
            return Err(Error::domain(
                "SmoothWeight::plateau",
                format!("U must be a finite number >= {MIN_PLATEAU_U}, got {u}"),
            ));
        }
        Ok(SmoothWeight {
            kind: WeightKind::Plateau,
            u,
        })
    }

    /// Indicator function of (0, 1).
    pub fn indicator() -> Self {
        SmoothWeight {
            kind: WeightKind::Indicator,
            u: f64::INFINITY,
        }
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    /// Plateau parameter (infinite for the indicator).
    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn eval(&self, x: f64) -> f64 {
        weight_eval(self, x)
    }
}

/// The smooth step: 0 for `t <= 0`, 1 for `t >= 1`.
#[inline]
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        1.0 / (1.0 + (1.0 / t - 1.0 / (1.0 - t)).exp())
    }
}

pub fn weight_eval(w: &SmoothWeight, x: f64) -> f64 {
    match w.kind {
        WeightKind::Indicator => {
            if x > 0.0 && x < 1.0 {
                1.0
            } else {
                0.0
            }
        }
        WeightKind::Plateau => smooth_step(w.u * x) * smooth_step(w.u * (1.0 - x)),
    }
}

/// `1/s`, the Mellin transform of the indicator of (0, 1).
pub fn mellin_indicator(s: Complex) -> Result<Complex> {
    if s == Complex::new(0.0, 0.0) {
        return Err(Error::pole("mellin_indicator", s));
    }
    Ok(s.inv())
}

/// Breakpoints on `[a, b]`: just the ends, or half periods of `e^{-i t v}`
/// when `|t|` is large.
fn band_breaks(a: f64, b: f64, t: f64) -> Vec<f64> {
    if t.abs() <= OSCILLATION_SPLIT {
        return vec![a, b];
    }
    let step = PI / t.abs();
    let n = ((b - a) / step).ceil().max(1.0) as usize;
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

fn filon_rule() -> &'static FilonRule {
    static RULE: OnceLock<FilonRule> = OnceLock::new();
    RULE.get_or_init(FilonRule::new)
}

/// Filon sum over `panels` panels of `[a, b]`, graded quadratically toward
/// `edge`, where the weight meets the plateau and is hardest to interpolate.
fn filon_band(w: &SmoothWeight, s: Complex, a: f64, b: f64, edge: f64, panels: usize) -> Complex {
    let rule = filon_rule();
    let point = |i: usize| {
        let r = (i as f64 / panels as f64).powi(2);
        if edge == a {
            a + (b - a) * r
        } else {
            b - (b - a) * r
        }
    };
    let mut acc = Complex::new(0.0, 0.0);
    for i in 0..panels {
        let (p, q) = (point(i), point(i + 1));
        let (lo, hi) = if p < q { (p, q) } else { (q, p) };
        let values = rule.nodes(lo, hi).map(|v| (-s.re * v).exp() * weight_eval(w, (-v).exp()));
        acc += rule.apply(&values, lo, hi, -s.im);
    }
    acc
}

/// `int_a^b e^{-s v} w(e^{-v}) dv`, the Mellin integral in the variable `v = -ln x`.
///
/// The factor `e^{-i t v}` is integrated exactly by Filon panels when `|t|` is
/// large, which keeps the cost independent of `t`; the panel count doubles
/// until successive sums agree to `tol`.
fn band_integral(w: &SmoothWeight, s: Complex, a: f64, b: f64, edge: f64, tol: f64) -> Result<Complex> {
    if s.im.abs() > OSCILLATION_SPLIT {
        let mut prev = filon_band(w, s, a, b, edge, FILON_PANELS[0]);
        for &p in &FILON_PANELS[1..] {
            let next = filon_band(w, s, a, b, edge, p);
            if (next - prev).norm() <= tol {
                return Ok(next);
            }
            prev = next;
        }
    }
    let breaks = band_breaks(a, b, s.im);
    let opts = Adaptive {
        abs_tol: tol,
        rel_tol: 0.0,
        max_panels: 4 * breaks.len() + 2000,
    };
    let r = integrate(
        |v: f64| Ok((-s * v).exp() * weight_eval(w, (-v).exp())),
        &breaks,
        opts,
    )?;
    Ok(r.value)
}

/// Numerical Mellin transform `int_0^1 w(x) x^{s-1} dx` to absolute error `tol`.
///
/// For plateau weights the flat part has the closed form
/// `((1 - 1/U)^s - U^{-s}) / s`, so quadrature is only spent on the two
/// transition bands.
pub fn mellin_numeric(w: &SmoothWeight, s: Complex, tol: f64) -> Result<Complex> {
    if !(s.re > 0.0) {
        return Err(Error::domain(
            "mellin_numeric",
            format!("Re s must be positive, got {s}"),
        ));
    }
    if !(tol >= 1e-12) {
        return Err(Error::domain("mellin_numeric", format!("tol must be >= 1e-12, got {tol}")));
    }
    match w.kind {
        WeightKind::Indicator => {
            // int_0^V e^{-s v} dv with the tail beyond V below tol/2
            let v_max = (2.0 / (s.re * tol)).ln().max(1.0) / s.re;
            band_integral(w, s, 0.0, v_max, 0.0, tol / 2.0)
        }
        WeightKind::Plateau => {
            let u = w.u;
            let v_right = -(-1.0 / u).ln_1p();
            let v_left = u.ln();
            let flat = ((-s * v_right).exp() - (-s * v_left).exp()) / s;
            let right = band_integral(w, s, 0.0, v_right, v_right, tol / 2.0)?;
            let left = band_integral(w, s, v_left, v_left + LEFT_CUTOFF.ln(), v_left, tol / 2.0)?;
            Ok(flat + right + left)
        }
    }
}

/// Mellin transform used by the main-term integrals: closed form for the
/// indicator, quadrature for plateau weights.
pub fn mellin(w: &SmoothWeight, s: Complex, tol: f64) -> Result<Complex> {
    match w.kind {
        WeightKind::Indicator => mellin_indicator(s),
        WeightKind::Plateau => mellin_numeric(w, s, tol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn eval_examples() {
        let w = SmoothWeight::plateau(10.0).unwrap();
        assert_eq!(w.eval(0.5), 1.0);
        assert_eq!(w.eval(-0.2), 0.0);
        let v = w.eval(0.05);
        assert!(v > 0.0 && v < 1.0);
        assert_eq!(w.eval(1.0), 0.0);
        assert_eq!(w.eval(0.0), 0.0);
        assert!(SmoothWeight::plateau(3.0).is_err());
    }

    #[test]
    fn indicator_eval() {
        let w = SmoothWeight::indicator();
        assert_eq!(w.eval(0.3), 1.0);
        assert_eq!(w.eval(1.0), 0.0);
        assert_eq!(w.eval(0.0), 0.0);
    }

    #[test]
    fn step_is_symmetric() {
        for i in 1..100 {
            let t = i as f64 / 100.0;
            assert!((smooth_step(t) + smooth_step(1.0 - t) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn indicator_transform() {
        let w = SmoothWeight::indicator();
        assert!((mellin_numeric(&w, c(2.0, 0.0), 1e-12).unwrap() - 0.5).norm() < 1e-12);
        let s = c(0.75, 5.0);
        assert!((mellin_numeric(&w, s, 1e-10).unwrap() - s.inv()).norm() < 1e-10);
        let s = c(0.75, 120.0);
        assert!((mellin_numeric(&w, s, 1e-10).unwrap() - s.inv()).norm() < 1e-10);
        assert_eq!(mellin_indicator(c(1.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert_eq!(mellin_indicator(c(0.5, 0.0)).unwrap(), c(2.0, 0.0));
        assert!(mellin_indicator(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn plateau_transform_at_one() {
        let u = 20.0;
        let w = SmoothWeight::plateau(u).unwrap();
        let fine = mellin_numeric(&w, c(1.0, 0.0), 1e-12).unwrap();
        let coarse = mellin_numeric(&w, c(1.0, 0.0), 1e-8).unwrap();
        assert!(fine.im.abs() < 1e-15);
        assert!((fine - coarse).norm() < 1e-8);
        assert!(fine.re >= 1.0 - 2.0 / u && fine.re <= 1.0);
        // symmetric step: total mass is exactly 1 - 1/U
        assert!((fine.re - (1.0 - 1.0 / u)).abs() < 1e-11);
    }

    #[test]
    fn plateau_transform_against_direct_quadrature() {
        let w = SmoothWeight::plateau(12.0).unwrap();
        for s in [c(0.75, 0.0), c(0.75, 7.0), c(1.5, -30.0)] {
            let direct = crate::quad::integrate_with(
                |x: f64| (s - 1.0).scale(x.ln()).exp() * w.eval(x),
                &[1e-4, 1.0 / 12.0, 0.5, 11.0 / 12.0, 1.0],
                Adaptive::abs(1e-12),
            )
            .unwrap()
            .value;
            let got = mellin_numeric(&w, s, 1e-11).unwrap();
            assert!((got - direct).norm() < 1e-10, "{s}: {got} vs {direct}");
        }
    }

    #[test]
    fn oscillatory_branch_is_continuous() {
        let w = SmoothWeight::plateau(40.0).unwrap();
        let a = mellin_numeric(&w, c(0.75, OSCILLATION_SPLIT - 1e-9), 1e-11).unwrap();
        let b = mellin_numeric(&w, c(0.75, OSCILLATION_SPLIT + 1e-9), 1e-11).unwrap();
        assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn filon_bands_match_adaptive() {
        for u in [10.0, 160.0] {
            let w = SmoothWeight::plateau(u).unwrap();
            let (a, b) = (u.ln(), u.ln() + LEFT_CUTOFF.ln());
            for t in [60.0, 700.0, 3000.0] {
                let s = c(0.75, t);
                let breaks = band_breaks(a, b, t);
                let slow = integrate(
                    |v: f64| Ok((-s * v).exp() * weight_eval(&w, (-v).exp())),
                    &breaks,
                    Adaptive::abs(1e-13),
                )
                .unwrap()
                .value;
                let fast = band_integral(&w, s, a, b, a, 1e-12).unwrap();
                assert!((fast - slow).norm() < 2e-12, "U = {u}, t = {t}: {fast} vs {slow}");
            }
        }
    }

}
