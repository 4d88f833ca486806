//! One-dimensional quadrature: the 21-point Gauss–Kronrod rule, a globally
//! adaptive driver built on it, and a Filon-type rule for `f(t) e^{i w t}`.

use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::Complex;

/// Kronrod abscissae on [0, 1]; odd indices are the embedded Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_745_484_766,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Values the integrators can accumulate: `f64` and [`Complex`].
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex {
    fn zero() -> Self {
        Complex::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// The 21 Kronrod nodes mapped to `[a, b]`, in increasing order.
pub fn gk21_nodes(a: f64, b: f64) -> [f64; 21] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [0.0; 21];
    for i in 0..10 {
        out[i] = c - h * XGK[i];
        out[20 - i] = c + h * XGK[i];
    }
    out[10] = c;
    out
}

/// Applies the rule to values at [`gk21_nodes`]; returns (Kronrod, |Kronrod - Gauss|).
pub fn gk21_apply<T: QuadValue>(values: &[T; 21], a: f64, b: f64) -> (T, f64) {
    let h = 0.5 * (b - a);
    let mut k = values[10] * WGK[10];
    let mut g = T::zero();
    for i in 0..10 {
        let pair = values[i] + values[20 - i];
        k = k + pair * WGK[i];
        if i % 2 == 1 {
            g = g + pair * WG[i / 2];
        }
    }
    (k * h, (k - g).magnitude() * h)
}

/// One 21-point Gauss–Kronrod panel: returns (estimate, error estimate).
pub fn gk21<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> (T, f64) {
    let nodes = gk21_nodes(a, b);
    let values: [T; 21] = std::array::from_fn(|i| f(nodes[i]));
    gk21_apply(&values, a, b)
}

/// Fallible variant of [`gk21`].
pub fn try_gk21<T: QuadValue, F: FnMut(f64) -> Result<T>>(f: &mut F, a: f64, b: f64) -> Result<(T, f64)> {
    let nodes = gk21_nodes(a, b);
    let mut values = [T::zero(); 21];
    for (v, &x) in values.iter_mut().zip(nodes.iter()) {
        *v = f(x)?;
    }
    Ok(gk21_apply(&values, a, b))
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub panels: usize,
}

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Adaptive {
    pub fn abs(abs_tol: f64) -> Self {
        Adaptive {
            abs_tol,
            rel_tol: 0.0,
            max_panels: 4000,
        }
    }
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss–Kronrod integration over the given breakpoints.
///
/// `breaks` must be increasing with at least two entries; each gap starts as
/// its own panel, so callers can place breakpoints where the integrand has
/// trouble. The panel with the largest error estimate is bisected until the
/// summed estimate meets `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<T, F>(mut f: F, breaks: &[f64], opts: Adaptive) -> Result<QuadResult<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> Result<T>,
{
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidRequest(format!(
            "integration breakpoints must be increasing, got {breaks:?}"
        )));
    }
    let mut heap = BinaryHeap::new();
    let mut total = T::zero();
    let mut err = 0.0;
    for w in breaks.windows(2) {
        let (v, e) = try_gk21(&mut f, w[0], w[1])?;
        total = total + v;
        err += e;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.magnitude());
        if err <= target {
            break;
        }
        if heap.len() >= opts.max_panels {
            return Err(Error::ToleranceNotMet {
                op: "integrate",
                requested: target,
                achieved: err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            // panel cannot be split further in double precision
            return Err(Error::ToleranceNotMet {
                op: "integrate",
                requested: target,
                achieved: err,
            });
        }
        let (lv, le) = try_gk21(&mut f, worst.a, mid)?;
        let (rv, re) = try_gk21(&mut f, mid, worst.b)?;
        total = total - worst.value + lv + rv;
        err += le + re - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
        });
    }
    // re-sum in position order so the result does not depend on refinement history
    let mut panels: Vec<Panel<T>> = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().fold(T::zero(), |acc, p| acc + p.value);
    let error = panels.iter().map(|p| p.error).sum();
    Ok(QuadResult {
        value,
        error,
        panels: panels.len(),
    })
}

/// Infallible convenience wrapper around [`integrate`].
pub fn integrate_with<T, F>(mut f: F, breaks: &[f64], opts: Adaptive) -> Result<QuadResult<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    integrate(|x| Ok(f(x)), breaks, opts)
}

// ---------------------------------------------------------------------------
// Filon-type rule.

/// Number of interpolation nodes in [`FilonRule`].
pub const FILON_NODES: usize = 8;

/// Interpolatory rule for `int_a^b f(t) e^{i w t} dt` with `f` sampled at
/// Chebyshev points. The oscillation is integrated exactly, so the panel width
/// is limited only by how well a degree-7 polynomial fits `f`.
#[derive(Debug, Clone)]
pub struct FilonRule {
    nodes: [f64; FILON_NODES],
    /// `coef[j][k]`: coefficient of `y^k` in the j-th Lagrange basis polynomial.
    coef: [[f64; FILON_NODES]; FILON_NODES],
}

impl Default for FilonRule {
    fn default() -> Self {
        Self::new()
    }
}

impl FilonRule {
    pub fn new() -> Self {
        let n = FILON_NODES;
        let nodes: [f64; FILON_NODES] = std::array::from_fn(|j| {
            (std::f64::consts::PI * (2 * j + 1) as f64 / (2 * n) as f64).cos()
        });
        let mut coef = [[0.0; FILON_NODES]; FILON_NODES];
        for j in 0..n {
            // expand prod_{i != j} (y - x_i) / (x_j - x_i)
            let mut poly = vec![1.0];
            let mut denom = 1.0;
            for i in 0..n {
                if i == j {
                    continue;
                }
                let mut next = vec![0.0; poly.len() + 1];
                for (k, &p) in poly.iter().enumerate() {
                    next[k + 1] += p;
                    next[k] -= p * nodes[i];
                }
                poly = next;
                denom *= nodes[j] - nodes[i];
            }
            for k in 0..n {
                coef[j][k] = poly[k] / denom;
            }
        }
        FilonRule { nodes, coef }
    }

    /// Sample points of the rule on `[a, b]`.
    pub fn nodes(&self, a: f64, b: f64) -> [f64; FILON_NODES] {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        std::array::from_fn(|j| c + h * self.nodes[j])
    }

    /// `int_a^b p(t) e^{i w t} dt` where `p` interpolates `values` at [`FilonRule::nodes`].
    pub fn apply(&self, values: &[f64; FILON_NODES], a: f64, b: f64, w: f64) -> Complex {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mu = moments(w * h);
        let mut acc = Complex::new(0.0, 0.0);
        for k in 0..FILON_NODES {
            let ak: f64 = (0..FILON_NODES).map(|j| values[j] * self.coef[j][k]).sum();
            acc += mu[k] * ak;
        }
        acc * Complex::from_polar(h, w * c)
    }
}

/// `mu_k = int_{-1}^{1} y^k e^{i w y} dy` for `k < FILON_NODES`.
fn moments(w: f64) -> [Complex; FILON_NODES] {
    let mut mu = [Complex::new(0.0, 0.0); FILON_NODES];
    if w.abs() >= 4.0 {
        // forward recurrence is stable once |w| exceeds the degree
        let e_pos = Complex::from_polar(1.0, w);
        let e_neg = e_pos.conj();
        let iw = Complex::new(0.0, w);
        mu[0] = Complex::new(2.0 * w.sin() / w, 0.0);
        for k in 1..FILON_NODES {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            mu[k] = (e_pos - e_neg * sign - mu[k - 1] * k as f64) / iw;
        }
    } else {
        // Taylor series of e^{iwy}
        for (k, m) in mu.iter_mut().enumerate() {
            let mut term = Complex::new(1.0, 0.0);
            let mut acc = Complex::new(0.0, 0.0);
            for j in 0..60 {
                if (k + j) % 2 == 0 {
                    acc += term * (2.0 / (k + j + 1) as f64);
                }
                term *= Complex::new(0.0, w) / (j + 1) as f64;
                if term.norm() < 1e-18 {
                    break;
                }
            }
            *m = acc;
        }
    }
    mu
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk21_is_exact_for_polynomials() {
        let (v, e) = gk21(&mut |x: f64| x.powi(19) + 3.0 * x * x, -1.0, 2.0);
        let want = (2f64.powi(20) - 1.0) / 20.0 + 9.0;
        assert!((v - want).abs() < 1e-9 * want);
        assert!(e < 1e-6 * want);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let r = integrate_with(|x: f64| x.sqrt().recip(), &[0.0, 1.0], Adaptive::abs(1e-10)).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn adaptive_complex_oscillatory() {
        let w = 40.0;
        let r = integrate_with(
            |x: f64| Complex::from_polar(1.0, w * x),
            &[0.0, 1.0, 2.0],
            Adaptive::abs(1e-12),
        )
        .unwrap();
        let want = (Complex::from_polar(1.0, 2.0 * w) - 1.0) / Complex::new(0.0, w);
        assert!((r.value - want).norm() < 1e-12);
    }

    #[test]
    fn adaptive_reports_failure() {
        let opts = Adaptive {
            abs_tol: 1e-14,
            rel_tol: 0.0,
            max_panels: 3,
        };
        let r = integrate_with(|x: f64| (1.0 / x).sin(), &[1e-6, 1.0], opts);
        assert!(matches!(r, Err(Error::ToleranceNotMet { .. })));
    }

    #[test]
    fn moments_agree_across_switch() {
        for w in [3.999, 4.0, 4.5, 0.3, 12.0] {
            let mu = moments(w);
            for (k, m) in mu.iter().enumerate() {
                let r = integrate_with(
                    |y: f64| Complex::from_polar(y.powi(k as i32), w * y),
                    &[-1.0, 0.0, 1.0],
                    Adaptive::abs(1e-15),
                )
                .unwrap();
                assert!((r.value - m).norm() < 1e-12, "w={w} k={k}: {m} vs {}", r.value);
            }
        }
    }

    #[test]
    fn filon_exact_for_low_degree() {
        let rule = FilonRule::new();
        let (a, b, w) = (1.0, 3.0, 25.0);
        let vals = rule.nodes(a, b).map(|t| t * t - 2.0 * t);
        let got = rule.apply(&vals, a, b, w);
        let want = integrate_with(
            |t: f64| Complex::from_polar(t * t - 2.0 * t, w * t),
            &[1.0, 2.0, 3.0],
            Adaptive::abs(1e-14),
        )
        .unwrap()
        .value;
        assert!((got - want).norm() < 1e-12, "{got} vs {want}");
    }
}
