//! Complex Gamma and Riemann zeta functions in double precision.
//!
//! Gamma uses a Lanczos approximation (g = 7, nine terms) on `Re s >= 1/2` and
//! the reflection formula below that. Zeta uses Euler–Maclaurin summation with
//! the Bernoulli numbers B2..B30 and the functional equation for `Re s < 0`.
//!
//! Products such as `Gamma(s) * sin(pi s / 2)` overflow or underflow separately
//! long before the product does, so log-space versions ([`ln_gamma`],
//! [`ln_sin_pi`]) are exposed for callers that combine them.

use std::f64::consts::{LN_2, PI};
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::Complex;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LN_PI: f64 = 1.144_729_885_849_400_2;

/// B_{2k} / (2k)! for k = 1..=15.
const EM_COEFFS: [f64; 15] = {
    const B: [(f64, f64); 15] = [
        (1.0, 6.0),
        (-1.0, 30.0),
        (1.0, 42.0),
        (-1.0, 30.0),
        (5.0, 66.0),
        (-691.0, 2730.0),
        (7.0, 6.0),
        (-3617.0, 510.0),
        (43867.0, 798.0),
        (-174611.0, 330.0),
        (854513.0, 138.0),
        (-236364091.0, 2730.0),
        (8553103.0, 6.0),
        (-23749461029.0, 870.0),
        (8615841276005.0, 14322.0),
    ];
    let mut out = [0.0; 15];
    let mut fact = 1.0;
    let mut k = 0;
    while k < 15 {
        let n = 2.0 * (k as f64 + 1.0);
        fact *= (n - 1.0) * n;
        out[k] = B[k].0 / B[k].1 / fact;
        k += 1;
    }
    out
};

// ---------------------------------------------------------------------------
// Test hook: additive perturbation of zeta.

static ZETA_SHIFT: AtomicU64 = AtomicU64::new(0);

/// Keeps a perturbation of [`zeta`] active until dropped.
///
/// Every zeta value returned by this module (including [`zeta_batch`]) has
/// `eps` added while the guard lives. It exists so the verification suite can
/// demonstrate that its checks notice a broken zeta. The setting is process
/// wide, so callers must serialize against other zeta users themselves.
#[must_use = "the perturbation is removed when the guard is dropped"]
pub struct ZetaPerturbation {
    previous: u64,
}

impl ZetaPerturbation {
    pub fn new(eps: f64) -> Self {
        let previous = ZETA_SHIFT.swap(eps.to_bits(), Ordering::SeqCst);
        ZetaPerturbation { previous }
    }
}

impl Drop for ZetaPerturbation {
    fn drop(&mut self) {
        ZETA_SHIFT.store(self.previous, Ordering::SeqCst);
    }
}

#[inline]
fn zeta_shift() -> f64 {
    f64::from_bits(ZETA_SHIFT.load(Ordering::Relaxed))
}

// ---------------------------------------------------------------------------
// Elementary helpers.

#[inline]
fn is_nonpositive_integer(s: Complex) -> bool {
    s.im == 0.0 && s.re <= 0.0 && s.re == s.re.round()
}

/// `sin(pi x)` for real x, exactly zero at integers.
pub fn sin_pi_real(x: f64) -> f64 {
    // reduce to r in [-1, 1]
    let r = x - 2.0 * (x / 2.0).round();
    let (sign, a) = if r < 0.0 { (-1.0, -r) } else { (1.0, r) };
    let a = if a > 0.5 { 1.0 - a } else { a };
    sign * (PI * a).sin()
}

/// `cos(pi x)` for real x, exactly zero at half-integers.
pub fn cos_pi_real(x: f64) -> f64 {
    let r = (x - 2.0 * (x / 2.0).round()).abs();
    if r > 0.5 {
        -(PI * (0.5 - (1.0 - r))).sin()
    } else {
        (PI * (0.5 - r)).sin()
    }
}

/// `sin(pi z)` with argument reduction on the real part.
pub fn sin_pi(z: Complex) -> Complex {
    let (sy, cy) = ((PI * z.im).sinh(), (PI * z.im).cosh());
    Complex::new(sin_pi_real(z.re) * cy, cos_pi_real(z.re) * sy)
}

/// `cos(pi z)` with argument reduction on the real part.
pub fn cos_pi(z: Complex) -> Complex {
    let (sy, cy) = ((PI * z.im).sinh(), (PI * z.im).cosh());
    Complex::new(cos_pi_real(z.re) * cy, -sin_pi_real(z.re) * sy)
}

/// A logarithm of `sin(pi z)`, stable for large `|Im z|`.
///
/// Only `exp` of the result is meaningful: the imaginary part is not reduced to
/// the principal branch. Returns `-inf` real part at the zeros.
pub fn ln_sin_pi(z: Complex) -> Complex {
    if z.im > 10.0 {
        // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z})
        let x = z.re - 2.0 * (z.re / 2.0).round();
        let e = Complex::new(0.0, 2.0 * PI * x).exp() * (-2.0 * PI * z.im).exp();
        Complex::new(PI * z.im - LN_2, PI * (0.5 - x)) + (Complex::new(1.0, 0.0) - e).ln()
    } else if z.im < -10.0 {
        ln_sin_pi(z.conj()).conj()
    } else {
        sin_pi(z).ln()
    }
}

// ---------------------------------------------------------------------------
// Gamma.

fn lanczos_ln_gamma(z: Complex) -> Complex {
    debug_assert!(z.re >= 0.5);
    let zm1 = z - 1.0;
    let mut x = Complex::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (zm1 + i as f64);
    }
    let t = zm1 + LANCZOS_G + 0.5;
    (zm1 + 0.5) * t.ln() - t + LN_SQRT_2PI + x.ln()
}

/// A logarithm of `Gamma(s)` (branch not normalized; intended for `exp`).
pub fn ln_gamma(s: Complex) -> Result<Complex> {
    if is_nonpositive_integer(s) {
        return Err(Error::pole("gamma", s));
    }
    if s.re >= 0.5 {
        Ok(lanczos_ln_gamma(s))
    } else {
        let one_minus = Complex::new(1.0, 0.0) - s;
        Ok(Complex::new(LN_PI, 0.0) - ln_sin_pi(s) - lanczos_ln_gamma(one_minus))
    }
}

/// The complex Gamma function.
pub fn gamma(s: Complex) -> Result<Complex> {
    if is_nonpositive_integer(s) {
        return Err(Error::pole("gamma", s));
    }
    if s.re >= 0.5 {
        Ok(lanczos_ln_gamma(s).exp())
    } else {
        let one_minus = Complex::new(1.0, 0.0) - s;
        Ok(PI / (sin_pi(s) * lanczos_ln_gamma(one_minus).exp()))
    }
}

/// `|Gamma(LHS) / Gamma(...) - RHS|` for the duplication-type identity
/// `Gamma((1-s)/2) / Gamma(s/2) = 2^s sin(pi s/2) Gamma(1-s) / sqrt(pi)`.
pub fn gamma_ratio_check(s: Complex) -> Result<f64> {
    let one = Complex::new(1.0, 0.0);
    let lhs = gamma((one - s) * 0.5)? / gamma(s * 0.5)?;
    let rhs = (s * LN_2).exp() * sin_pi(s * 0.5) * gamma(one - s)? / PI.sqrt();
    Ok((lhs - rhs).norm())
}

// ---------------------------------------------------------------------------
// Zeta.

/// Direct-sum length for Euler–Maclaurin at argument `z`.
#[inline]
fn em_terms(z_abs: f64) -> usize {
    ((z_abs / 2.0).ceil() as usize + 12).max(24)
}

/// Euler–Maclaurin remainder after summing `n < n_terms`:
/// `N^{1-s}/(s-1) + N^{-s}/2 + sum_k B_{2k}/(2k)! s(s+1)..(s+2k-2) N^{-s-2k+1}`.
fn em_tail(s: Complex, n_terms: usize) -> Complex {
    let n = n_terms as f64;
    let ln_n = n.ln();
    let n_pow = (-s * ln_n).exp();
    let one = Complex::new(1.0, 0.0);
    let mut acc = n_pow * n / (s - one) + n_pow * 0.5;
    let inv_n2 = 1.0 / (n * n);
    let mut poch = s;
    let mut pw = n_pow / n;
    for (k, &c) in EM_COEFFS.iter().enumerate() {
        let term = poch * pw * c;
        acc += term;
        let j = 2.0 * k as f64 + 1.0;
        poch *= (s + j) * (s + j + 1.0);
        pw *= inv_n2;
    }
    acc
}

fn zeta_em(s: Complex) -> Complex {
    let n_terms = em_terms(s.norm());
    let mut sum = Complex::new(0.0, 0.0);
    for n in 1..n_terms {
        let ln_n = (n as f64).ln();
        sum += (-s * ln_n).exp();
    }
    sum + em_tail(s, n_terms)
}

fn zeta_unperturbed(s: Complex) -> Result<Complex> {
    if s.re == 1.0 && s.im == 0.0 {
        return Err(Error::pole("zeta", s));
    }
    if s.re < 0.0 {
        if s.im == 0.0 && s.re == s.re.round() && (s.re as i64) % 2 == 0 {
            return Ok(Complex::new(0.0, 0.0));
        }
        let chi = zeta_fe_factor(s)?;
        Ok(chi * zeta_em(Complex::new(1.0, 0.0) - s))
    } else {
        Ok(zeta_em(s))
    }
}

/// The Riemann zeta function.
pub fn zeta(s: Complex) -> Result<Complex> {
    Ok(zeta_unperturbed(s)? + zeta_shift())
}

/// `zeta(x + i(y0 + k dy))` for `k = 0..count`.
///
/// Much cheaper than `count` separate calls: each `n^{-s}` in the direct sum
/// is advanced along the progression by one complex multiply.
pub fn zeta_batch(x: f64, y0: f64, dy: f64, count: usize) -> Result<Vec<Complex>> {
    let node = |k: usize| Complex::new(x, y0 + dy * k as f64);
    if x == 1.0 && (0..count).any(|k| node(k).im == 0.0) {
        return Err(Error::pole("zeta", Complex::new(1.0, 0.0)));
    }
    let shift = zeta_shift();
    if x < 0.0 {
        // zeta(s) = chi(s) zeta(1 - s), and 1 - s runs along the mirrored progression
        let mirrored = zeta_batch_em(1.0 - x, -y0, -dy, count);
        let mut out = Vec::with_capacity(count);
        for (k, z) in mirrored.into_iter().enumerate() {
            let s = node(k);
            if s.im == 0.0 && s.re == s.re.round() && (s.re as i64) % 2 == 0 {
                out.push(Complex::new(shift, 0.0));
            } else {
                out.push(zeta_fe_factor(s)? * z + shift);
            }
        }
        return Ok(out);
    }
    Ok(zeta_batch_em(x, y0, dy, count)
        .into_iter()
        .map(|z| z + shift)
        .collect())
}

const BATCH_CHUNK: usize = 256;
/// Independent multiply chains per chunk; breaks the serial dependency of
/// `cur *= step` so the inner loop vectorizes.
const LANES: usize = 8;

fn zeta_batch_em(x: f64, y0: f64, dy: f64, count: usize) -> Vec<Complex> {
    let mut out = Vec::with_capacity(count);
    let mut acc_re = [0.0f64; BATCH_CHUNK];
    let mut acc_im = [0.0f64; BATCH_CHUNK];
    let mut start = 0;
    while start < count {
        let len = BATCH_CHUNK.min(count - start);
        let blocks = len.div_ceil(LANES);
        let ya = y0 + dy * start as f64;
        let yb = y0 + dy * (start + len - 1) as f64;
        let z_abs = x.hypot(ya.abs().max(yb.abs()));
        let n_terms = em_terms(z_abs);
        acc_re.fill(0.0);
        acc_im.fill(0.0);
        for n in 1..n_terms {
            let ln_n = (n as f64).ln();
            let mag = (-x * ln_n).exp();
            let step = Complex::from_polar(1.0, -dy * ln_n);
            let mut lane_re = [0.0f64; LANES];
            let mut lane_im = [0.0f64; LANES];
            let mut cur = Complex::from_polar(mag, -ya * ln_n);
            for j in 0..LANES {
                lane_re[j] = cur.re;
                lane_im[j] = cur.im;
                cur *= step;
            }
            let jump = Complex::from_polar(1.0, -dy * LANES as f64 * ln_n);
            for b in 0..blocks {
                let base = b * LANES;
                for j in 0..LANES {
                    acc_re[base + j] += lane_re[j];
                    acc_im[base + j] += lane_im[j];
                    let (r, i) = (lane_re[j], lane_im[j]);
                    lane_re[j] = r * jump.re - i * jump.im;
                    lane_im[j] = r * jump.im + i * jump.re;
                }
            }
        }
        for k in 0..len {
            let s = Complex::new(x, ya + dy * k as f64);
            out.push(Complex::new(acc_re[k], acc_im[k]) + em_tail(s, n_terms));
        }
        start += len;
    }
    out
}

/// `zeta_2(s) = (1 - 2^{-s}) zeta(s)`, zeta with the Euler factor at 2 removed.
pub fn zeta2(s: Complex) -> Result<Complex> {
    let factor = Complex::new(1.0, 0.0) - (-s * LN_2).exp();
    Ok(factor * zeta(s)?)
}

/// `chi(s) = 2^s pi^{s-1} sin(pi s/2) Gamma(1-s)`, so that `zeta(s) = chi(s) zeta(1-s)`.
///
/// Finite except at the positive odd integers.
pub fn zeta_fe_factor(s: Complex) -> Result<Complex> {
    let one = Complex::new(1.0, 0.0);
    let base = s * LN_2 + (s - one) * LN_PI;
    if s.re > 0.5 {
        // sin(pi s/2) Gamma(1-s) = pi / (2 cos(pi s/2) Gamma(s))
        if s.im == 0.0 && s.re == s.re.round() && (s.re as i64) % 2 == 1 {
            return Err(Error::pole("zeta_fe_factor", s));
        }
        let ln_cos = ln_sin_pi(s * 0.5 + 0.5);
        Ok((base + LN_PI - LN_2 - ln_cos - lanczos_ln_gamma(s)).exp())
    } else {
        let half = s * 0.5;
        if half.im == 0.0 && half.re == half.re.round() {
            // sin vanishes; Gamma(1-s) is finite for Re s <= 1/2
            return Ok(Complex::new(0.0, 0.0));
        }
        Ok((base + ln_sin_pi(half) + lanczos_ln_gamma(one - s)).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn rel(a: Complex, b: Complex) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn gamma_anchors() {
        assert!((gamma(c(0.5, 0.0)).unwrap() - PI.sqrt()).norm() <= 1e-12 * PI.sqrt());
        assert!((gamma(c(1.0, 0.0)).unwrap() - 1.0).norm() <= 1e-12);
        assert!((gamma(c(5.0, 0.0)).unwrap() - 24.0).norm() <= 1e-12 * 24.0);
        for k in 0..5 {
            assert!(gamma(c(-(k as f64), 0.0)).is_err());
        }
    }

    #[test]
    fn gamma_against_reference_values() {
        // high-precision references
        let cases = [
            (c(0.25, 0.0), c(3.625_609_908_221_908_3, 0.0)),
            (c(-1.5, 0.0), c(2.363_271_801_207_355, 0.0)),
            (c(1.0, 1.0), c(0.498_015_668_118_356_04, -0.154_949_828_301_810_69)),
            (c(-3.0, 0.5), c(-0.138_814_960_127_554_2, 0.190_501_729_656_406_8)),
        ];
        for (s, want) in cases {
            let got = gamma(s).unwrap();
            assert!(rel(got, want) < 1e-12, "Gamma({s}) = {got}, want {want}");
        }
    }

    #[test]
    fn gamma_stirling_band() {
        let g = gamma(c(-0.75, 5.0)).unwrap().norm();
        let predicted = (-5.0 * PI / 2.0).exp() * 5f64.powf(-1.25);
        let r = g / predicted;
        assert!((1.0 / 3.0..=3.0).contains(&r), "ratio {r}");
        assert!((g - 1.287_48e-4).abs() < 1e-8);
    }

    #[test]
    fn gamma_recurrence_and_reflection_grid() {
        let mut sigma = -3.0;
        while sigma <= 3.0 {
            let mut t = 0.0;
            while t <= 50.0 {
                let s = c(sigma + 0.13, t);
                let g = gamma(s).unwrap();
                let g1 = gamma(s + 1.0).unwrap();
                assert!(rel(g1, s * g) < 1e-11, "recurrence at {s}");
                let one = c(1.0, 0.0);
                if t < 30.0 {
                    let refl = g * gamma(one - s).unwrap() * sin_pi(s) / PI;
                    assert!((refl - 1.0).norm() < 1e-10, "reflection at {s}: {refl}");
                }
                t += 5.0;
            }
            sigma += 0.5;
        }
    }

    #[test]
    fn ln_gamma_matches_gamma_where_both_finite() {
        for s in [c(0.3, 2.0), c(-2.7, 1.0), c(4.0, -7.0), c(0.75, 40.0)] {
            let a = ln_gamma(s).unwrap().exp();
            let b = gamma(s).unwrap();
            assert!(rel(a, b) < 1e-12, "{s}");
        }
        // far up the line Gamma * sin stays finite only in log space
        let s = c(-0.75, 3000.0);
        let prod = (ln_gamma(s).unwrap() + ln_sin_pi(s * 0.5)).exp();
        assert!(prod.is_finite() && prod.norm() > 0.0);
    }

    #[test]
    fn ln_sin_pi_branches_agree() {
        for z in [c(0.3, 9.0), c(-1.7, 11.0), c(2.25, -12.0), c(0.5, 10.5)] {
            let direct = sin_pi(z);
            let via = ln_sin_pi(z).exp();
            assert!(rel(via, direct) < 1e-13, "{z}");
        }
        assert_eq!(sin_pi_real(3.0), 0.0);
        assert_eq!(cos_pi_real(2.5), 0.0);
    }

    #[test]
    fn zeta_anchors() {
        assert!((zeta(c(2.0, 0.0)).unwrap() - PI * PI / 6.0).norm() <= 1e-10);
        assert!((zeta(c(0.0, 0.0)).unwrap() + 0.5).norm() <= 1e-10);
        assert!(zeta(c(1.0, 0.0)).is_err());
        assert!(zeta(c(0.5, 14.134_725)).unwrap().norm() <= 1e-5);
        assert_eq!(zeta(c(-2.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert!((zeta(c(-1.0, 0.0)).unwrap() + 1.0 / 12.0).norm() < 1e-13);
    }

    #[test]
    fn zeta_against_reference_values() {
        let cases = [
            (c(0.5, 0.0), c(-1.460_354_508_809_586_8, 0.0)),
            (c(3.0, 0.0), c(1.202_056_903_159_594_3, 0.0)),
            (c(0.5, 10.0), c(1.544_895_220_296_752_8, -0.115_336_465_271_273_38)),
            (c(-0.5, 0.0), c(-0.207_886_224_977_354_57, 0.0)),
            (c(0.75, 100.0), c(2.002_991_995_255_395_8, -0.054_392_071_190_092_587)),
        ];
        for (s, want) in cases {
            let got = zeta(s).unwrap();
            assert!((got - want).norm() < 1e-10, "zeta({s}) = {got}, want {want}");
        }
    }

    #[test]
    fn zeta_functional_equation_grid() {
        for sigma in [0.25, 0.5, 0.75] {
            for t in [0.0, 1.0, 5.0, 20.0, 100.0] {
                let s = c(sigma, t);
                let lhs = zeta(s).unwrap();
                let rhs = zeta_fe_factor(s).unwrap() * zeta(c(1.0, 0.0) - s).unwrap();
                assert!((lhs - rhs).norm() <= 1e-9, "{s}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn zeta_three_against_direct_sum() {
        let direct: f64 = (1..=1_000_000u64).rev().map(|n| (n as f64).powi(-3)).sum();
        assert!((zeta(c(3.0, 0.0)).unwrap().re - direct).abs() <= 1e-9);
    }

    #[test]
    fn zeta2_values() {
        assert!((zeta2(c(2.0, 0.0)).unwrap() - PI * PI / 8.0).norm() < 1e-12);
        assert!(zeta2(c(0.0, 0.0)).unwrap().norm() < 1e-15);
        let z3 = zeta(c(3.0, 0.0)).unwrap();
        assert!((zeta2(c(3.0, 0.0)).unwrap() - z3 * 0.875).norm() < 1e-14);
    }

    #[test]
    fn fe_factor_properties() {
        let a = zeta_fe_factor(c(0.5, 3.0)).unwrap() * zeta_fe_factor(c(0.5, -3.0)).unwrap();
        assert!((a - 1.0).norm() < 1e-12);
        let ratio = zeta(c(-0.5, 0.0)).unwrap() / zeta(c(1.5, 0.0)).unwrap();
        assert!((ratio - zeta_fe_factor(c(-0.5, 0.0)).unwrap()).norm() < 1e-12);
        let m = zeta_fe_factor(c(0.25, 10.0)).unwrap().norm() / 11f64.powf(0.25);
        assert!((1.0 / 3.0..=3.0).contains(&m));
        assert!(zeta_fe_factor(c(1.0, 0.0)).is_err());
        assert!(zeta_fe_factor(c(3.0, 0.0)).is_err());
        assert!(zeta_fe_factor(c(2.0, 0.0)).unwrap().is_finite());
        assert!(zeta_fe_factor(c(-1.0, 0.0)).unwrap().is_finite());
    }

    #[test]
    fn gamma_ratio_points() {
        assert!(gamma_ratio_check(c(0.5, 0.0)).unwrap() <= 1e-12);
        assert!(gamma_ratio_check(c(0.25, 2.0)).unwrap() <= 1e-10);
        assert!(gamma_ratio_check(c(0.75, 0.0)).unwrap() <= 1e-12);
        assert!(gamma_ratio_check(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn batch_matches_scalar() {
        for (x, y0, dy) in [(0.5, 30.0, 1.0), (0.2, -400.0, 3.7), (-0.5, 64.5, 1.0), (1.5, 0.0, 0.25)] {
            let b = zeta_batch(x, y0, dy, 150).unwrap();
            for (k, z) in b.iter().enumerate() {
                let s = c(x, y0 + dy * k as f64);
                let want = zeta(s).unwrap();
                assert!((z - want).norm() < 1e-11 * want.norm().max(1.0), "{s}: {z} vs {want}");
            }
        }
    }

    #[test]
    fn zeta_far_up_the_line() {
        // used by the contour integrals well above |Im s| = 200
        let cases = [
            (c(0.5, 2000.0), c(0.790_610_233_326_534_7, 0.017_205_108_684_126_07)),
            (c(0.2, 8000.0), c(-4.928_334_072_505_999, -2.133_612_069_881_071_5)),
            (c(0.8, 5000.5), c(0.471_337_097_343_591_67, 0.112_972_930_974_349)),
            (c(-0.5, 3000.0), c(-255.868_896_841_129_05, 542.391_986_442_171_7)),
        ];
        for (s, want) in cases {
            let got = zeta(s).unwrap();
            assert!(rel(got, want) < 1e-10, "zeta({s}) = {got}, want {want}");
            let b = zeta_batch(s.re, s.im, 1.0, 1).unwrap()[0];
            assert!(rel(b, want) < 1e-10, "batch zeta({s}) = {b}");
        }
    }
}
