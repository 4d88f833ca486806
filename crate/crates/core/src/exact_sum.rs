//! Exact double character sums over odd integers,
//! `S(X, Y) = sum_{m <= X odd} sum_{n <= Y odd} (m/n)`,
//! their smoothly weighted versions, and finite truncations of the associated
//! double Dirichlet series.
//!
//! Sum algorithms implement [`SumAlgorithm`] and are looked up by name in a
//! [`SumRegistry`]. Rows are processed in parallel on the current rayon pool;
//! results never depend on the schedule.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::char_arith::{chi_tilde_unchecked, jacobi_odd, PsiLabel};
use crate::error::{Error, Result};
use crate::special_fn::{zeta, zeta2};
use crate::weights::SmoothWeight;
use crate::Complex;

/// Number of odd integers in `[1, x]`.
pub fn odd_count(x: f64) -> u64 {
    if x < 1.0 {
        0
    } else {
        (x.floor() as u64).div_ceil(2)
    }
}

fn check_bounds(x: f64, y: f64) -> Result<()> {
    if !(x >= 1.0 && y >= 1.0) || !x.is_finite() || !y.is_finite() {
        return Err(Error::domain("double_char_sum", format!("need X, Y >= 1, got X = {x}, Y = {y}")));
    }
    if x * y >= 9.0e18 {
        return Err(Error::Overflow { op: "double_char_sum" });
    }
    Ok(())
}

/// One way of computing the sharp sum `S(X, Y)`.
pub trait SumAlgorithm: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn double_char_sum(&self, x: f64, y: f64) -> Result<i64>;
}

/// Double loop over odd pairs, one Jacobi symbol per term.
pub struct Naive;

impl SumAlgorithm for Naive {
    fn name(&self) -> &'static str {
        "naive"
    }
    fn description(&self) -> &'static str {
        "double loop over odd (m, n); O(XY) symbol evaluations"
    }
    fn double_char_sum(&self, x: f64, y: f64) -> Result<i64> {
        check_bounds(x, y)?;
        let rows = odd_count(x);
        let cols = odd_count(y);
        Ok((0..rows)
            .into_par_iter()
            .map(|i| {
                let m = 2 * i + 1;
                let mut acc = 0i64;
                for j in 0..cols {
                    acc += jacobi_odd(m, 2 * j + 1);
                }
                acc
            })
            .sum())
    }
}

/// `sum_{m <= X odd} (m/n)` for one odd `n`, using periodicity in `m`.
///
/// Odd `m` in `[1, 2n)` run once through every residue class mod `n`, so the
/// row is `q * (period sum) + (partial period)`.
pub fn periodic_row_sum(x: f64, n: u64) -> i64 {
    debug_assert!(n & 1 == 1);
    let count = odd_count(x);
    let q = count / n;
    let r = count % n;
    let mut partial = 0i64;
    for i in 0..r {
        partial += jacobi_odd(2 * i + 1, n);
    }
    if q == 0 {
        return partial;
    }
    let mut period = partial;
    for i in r..n {
        period += jacobi_odd(2 * i + 1, n);
    }
    q as i64 * period + partial
}

/// Rows over `n`, each row in `O(n)` by periodicity.
pub struct Periodic;

impl SumAlgorithm for Periodic {
    fn name(&self) -> &'static str {
        "periodic"
    }
    fn description(&self) -> &'static str {
        "rows over odd n, each row from one period of m -> (m/n); O(Y^2)"
    }
    fn double_char_sum(&self, x: f64, y: f64) -> Result<i64> {
        check_bounds(x, y)?;
        let cols = odd_count(y);
        Ok((0..cols)
            .into_par_iter()
            .map(|j| periodic_row_sum(x, 2 * j + 1))
            .sum())
    }
}

/// Periodic when `Y < X`, naive otherwise.
pub struct Auto;

impl SumAlgorithm for Auto {
    fn name(&self) -> &'static str {
        "auto"
    }
    fn description(&self) -> &'static str {
        "periodic when Y < X, otherwise naive"
    }
    fn double_char_sum(&self, x: f64, y: f64) -> Result<i64> {
        if y < x {
            Periodic.double_char_sum(x, y)
        } else {
            Naive.double_char_sum(x, y)
        }
    }
}

/// Name-keyed collection of sum algorithms.
#[derive(Clone, Default)]
pub struct SumRegistry {
    entries: BTreeMap<&'static str, Arc<dyn SumAlgorithm>>,
}

impl SumRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry holding `naive`, `periodic` and `auto`.
    pub fn with_builtins() -> Self {
        let mut r = Self::new();
        r.register(Arc::new(Naive));
        r.register(Arc::new(Periodic));
        r.register(Arc::new(Auto));
        r
    }

    /// Adds or replaces an algorithm under its own name.
    pub fn register(&mut self, algo: Arc<dyn SumAlgorithm>) {
        self.entries.insert(algo.name(), algo);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn SumAlgorithm>> {
        self.entries.get(name).cloned().ok_or_else(|| {
            Error::InvalidRequest(format!(
                "unknown sum algorithm '{name}' (available: {})",
                self.names().join(", ")
            ))
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }
}

/// A request for a sharp or smoothed sum.
#[derive(Debug, Clone)]
pub struct SumRequest {
    pub x: f64,
    pub y: f64,
    pub algorithm: String,
    pub weight_m: Option<SmoothWeight>,
    pub weight_n: Option<SmoothWeight>,
}

impl SumRequest {
    pub fn sharp(x: f64, y: f64, algorithm: &str) -> Self {
        SumRequest {
            x,
            y,
            algorithm: algorithm.to_string(),
            weight_m: None,
            weight_n: None,
        }
    }

    pub fn smoothed(x: f64, y: f64, phi: SmoothWeight, psi: SmoothWeight) -> Self {
        SumRequest {
            x,
            y,
            algorithm: "auto".to_string(),
            weight_m: Some(phi),
            weight_n: Some(psi),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x >= 1.0 && self.y >= 1.0) {
            return Err(Error::InvalidRequest(format!(
                "X and Y must be >= 1, got X = {}, Y = {}",
                self.x, self.y
            )));
        }
        if self.weight_m.is_some() != self.weight_n.is_some() {
            return Err(Error::InvalidRequest(
                "supply both weights or neither".to_string(),
            ));
        }
        Ok(())
    }
}

/// Sharp sum for a request without weights.
pub fn double_char_sum(req: &SumRequest) -> Result<i64> {
    double_char_sum_in(req, &SumRegistry::with_builtins())
}

/// Sharp sum, resolving the algorithm in a caller-supplied registry.
pub fn double_char_sum_in(req: &SumRequest, registry: &SumRegistry) -> Result<i64> {
    req.validate()?;
    if req.weight_m.is_some() {
        return Err(Error::InvalidRequest(
            "double_char_sum takes no weights; use smoothed_char_sum".to_string(),
        ));
    }
    registry.get(&req.algorithm)?.double_char_sum(req.x, req.y)
}

/// Kahan–Babuška accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `sum_{m, n odd} (m/n) phi(m/X) psi(n/Y)`.
pub fn smoothed_char_sum(req: &SumRequest) -> Result<f64> {
    req.validate()?;
    let (Some(phi), Some(psi)) = (req.weight_m, req.weight_n) else {
        return Err(Error::InvalidRequest(
            "smoothed_char_sum needs both weights".to_string(),
        ));
    };
    // both weights vanish at and beyond 1, so m < X and n < Y
    let wm: Vec<(u64, f64)> = (0..odd_count(req.x))
        .map(|i| 2 * i + 1)
        .map(|m| (m, phi.eval(m as f64 / req.x)))
        .filter(|&(_, v)| v != 0.0)
        .collect();
    let rows: Vec<f64> = (0..odd_count(req.y))
        .into_par_iter()
        .map(|j| {
            let n = 2 * j + 1;
            let wn = psi.eval(n as f64 / req.y);
            if wn == 0.0 {
                return 0.0;
            }
            let mut acc = Compensated::default();
            for &(m, v) in &wm {
                match jacobi_odd(m, n) {
                    1 => acc.add(v),
                    -1 => acc.add(-v),
                    _ => {}
                }
            }
            acc.value() * wn
        })
        .collect();
    let mut total = Compensated::default();
    for r in rows {
        total.add(r);
    }
    Ok(total.value())
}

/// Truncation box `m <= M`, `n <= N` for the finite double Dirichlet series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncationBox {
    pub m: u64,
    pub n: u64,
}

impl TruncationBox {
    pub fn new(m: u64, n: u64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidRequest(format!("box sides must be >= 1, got {m} x {n}")));
        }
        Ok(TruncationBox { m, n })
    }
}

fn check_half_plane(op: &'static str, s: Complex, w: Complex) -> Result<()> {
    if s.re < 2.0 || w.re < 2.0 {
        return Err(Error::domain(op, format!("need Re s, Re w >= 2, got s = {s}, w = {w}")));
    }
    Ok(())
}

fn odd_powers(limit: u64, s: Complex) -> Vec<Complex> {
    (0..odd_count(limit as f64))
        .map(|i| (-s * ((2 * i + 1) as f64).ln()).exp())
        .collect()
}

/// Generic finite box sum `sum_rows sum_cols coeff(row, col) a[row] b[col]`,
/// rows summed in parallel and combined in index order.
fn box_sum<F>(rows: &[Complex], cols: &[Complex], coeff: F) -> Complex
where
    F: Fn(u64, u64) -> f64 + Sync,
{
    let partial: Vec<Complex> = rows
        .par_iter()
        .enumerate()
        .map(|(i, &ri)| {
            let a = 2 * i as u64 + 1;
            let mut acc = Complex::new(0.0, 0.0);
            for (j, &cj) in cols.iter().enumerate() {
                let c = coeff(a, 2 * j as u64 + 1);
                if c != 0.0 {
                    acc += cj * c;
                }
            }
            acc * ri
        })
        .collect();
    partial.into_iter().fold(Complex::new(0.0, 0.0), |a, b| a + b)
}

/// `sum_{m <= M odd} sum_{n <= N odd} (m/n) m^{-w} n^{-s}` for `Re s, Re w >= 2`.
pub fn truncated_a(s: Complex, w: Complex, bx: TruncationBox) -> Result<Complex> {
    check_half_plane("truncated_a", s, w)?;
    let ms = odd_powers(bx.m, w);
    let ns = odd_powers(bx.n, s);
    Ok(box_sum(&ms, &ns, |m, n| jacobi_odd(m, n) as f64))
}

/// Majorant for `|A(s, w) - truncated_a(s, w, box)|`:
/// `sum_{m > M} m^{-Re w} zeta(Re s) + zeta(Re w) sum_{n > N} n^{-Re s}`,
/// with each tail bounded by its integral.
pub fn truncated_a_tail_bound(s: Complex, w: Complex, bx: TruncationBox) -> Result<f64> {
    check_half_plane("truncated_a_tail_bound", s, w)?;
    let (a, b) = (w.re, s.re);
    let tail = |k: u64, p: f64| (k as f64).powf(1.0 - p) / (p - 1.0);
    let zs = zeta(Complex::new(b, 0.0))?.re;
    let zw = zeta(Complex::new(a, 0.0))?.re;
    Ok(tail(bx.m, a) * zs + zw * tail(bx.n, b))
}

/// `zeta_2(2s + 2w - 1) sum_{m <= M} sum_{n <= N} (m/n) psi(n) psi'(m) m^{-w} n^{-s}`.
pub fn truncated_z_forward(
    s: Complex,
    w: Complex,
    psi: PsiLabel,
    psi_prime: PsiLabel,
    bx: TruncationBox,
) -> Result<Complex> {
    check_half_plane("truncated_z_forward", s, w)?;
    let ms = odd_powers(bx.m, w);
    let ns = odd_powers(bx.n, s);
    let inner = box_sum(&ms, &ns, |m, n| {
        (jacobi_odd(m, n) * psi.eval_odd(n as i64) * psi_prime.eval_odd(m as i64)) as f64
    });
    Ok(zeta2(s * 2.0 + w * 2.0 - 1.0)? * inner)
}

/// The same box sum with the order of summation exchanged and `(m/n)`
/// rewritten through reciprocity as `chi~_n(m)`.
pub fn truncated_z_reordered(
    s: Complex,
    w: Complex,
    psi: PsiLabel,
    psi_prime: PsiLabel,
    bx: TruncationBox,
) -> Result<Complex> {
    check_half_plane("truncated_z_reordered", s, w)?;
    let ms = odd_powers(bx.m, w);
    let ns = odd_powers(bx.n, s);
    let inner = box_sum(&ns, &ms, |n, m| {
        (chi_tilde_unchecked(n as i64, m as i64) * psi.eval_odd(n as i64) * psi_prime.eval_odd(m as i64)) as f64
    });
    Ok(zeta2(s * 2.0 + w * 2.0 - 1.0)? * inner)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(x: f64, y: f64) -> i64 {
        let mut acc = 0;
        let mut m = 1;
        while m as f64 <= x {
            let mut n = 1;
            while n as f64 <= y {
                acc += crate::char_arith::kronecker(m, n).unwrap().value();
                n += 2;
            }
            m += 2;
        }
        acc
    }

    #[test]
    fn small_examples() {
        for name in ["naive", "periodic", "auto"] {
            let r = SumRequest::sharp(3.0, 3.0, name);
            assert_eq!(double_char_sum(&r).unwrap(), 3);
            let r = SumRequest::sharp(1.0, 9.0, name);
            assert_eq!(double_char_sum(&r).unwrap(), 5);
        }
    }

    #[test]
    fn algorithms_agree_with_brute_force() {
        for &(x, y) in &[(10.0, 31.0), (31.0, 10.0), (100.5, 17.0), (7.0, 7.0), (99.0, 100.0)] {
            let want = brute(x, y);
            assert_eq!(Naive.double_char_sum(x, y).unwrap(), want);
            assert_eq!(Periodic.double_char_sum(x, y).unwrap(), want);
        }
        assert_eq!(
            Naive.double_char_sum(500.0, 500.0).unwrap(),
            Periodic.double_char_sum(500.0, 500.0).unwrap()
        );
    }

    #[test]
    fn square_rows_count_coprime_m() {
        for k in [1u64, 3, 5, 9, 15] {
            let n = k * k;
            let x = 1000.0;
            let want = (1..=1000u64).filter(|m| m % 2 == 1 && gcd(*m, n) == 1).count() as i64;
            assert_eq!(periodic_row_sum(x, n), want);
        }
    }

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn boundary_includes_odd_x() {
        assert_eq!(odd_count(9.0), 5);
        assert_eq!(odd_count(9.9), 5);
        assert_eq!(odd_count(8.9), 4);
        assert_eq!(odd_count(0.5), 0);
    }

    #[test]
    fn request_validation() {
        let phi = SmoothWeight::plateau(10.0).unwrap();
        let mut r = SumRequest::sharp(10.0, 10.0, "auto");
        r.weight_m = Some(phi);
        assert!(r.validate().is_err());
        assert!(double_char_sum(&SumRequest::sharp(0.5, 10.0, "auto")).is_err());
        assert!(double_char_sum(&SumRequest::sharp(10.0, 10.0, "fast")).is_err());
        assert!(matches!(
            Naive.double_char_sum(1e10, 1e10),
            Err(Error::Overflow { .. })
        ));
    }

    #[test]
    fn registry_lookup() {
        let r = SumRegistry::with_builtins();
        assert_eq!(r.names(), vec!["auto", "naive", "periodic"]);
        assert_eq!(r.get("naive").unwrap().name(), "naive");
        assert!(r.get("nope").is_err());
    }

    #[test]
    fn smoothed_examples() {
        let phi = SmoothWeight::plateau(10.0).unwrap();
        let v = smoothed_char_sum(&SumRequest::smoothed(3.0, 3.0, phi, phi)).unwrap();
        assert!((0.0..=3.0).contains(&v));

        let wide = SmoothWeight::plateau(200.0).unwrap();
        let v = smoothed_char_sum(&SumRequest::smoothed(100.0, 100.0, wide, wide)).unwrap();
        let sharp = Naive.double_char_sum(99.5, 99.5).unwrap();
        assert_eq!(v, sharp as f64);
    }

    #[test]
    fn smoothed_close_to_sharp() {
        let (x, y, u) = (2000.0f64, 2000.0f64, 40.0);
        let phi = SmoothWeight::plateau(u).unwrap();
        let v = smoothed_char_sum(&SumRequest::smoothed(x, y, phi, phi)).unwrap();
        let s = Naive.double_char_sum(x, y).unwrap() as f64;
        let bound = 10.0 * (x.powf(1.5) + y.powf(1.5)) * (x * y).ln() / u;
        assert!((v - s).abs() <= bound, "{v} vs {s}");
    }

    #[test]
    fn truncated_a_basics() {
        let s = Complex::new(4.0, 0.0);
        let one = TruncationBox::new(1, 1).unwrap();
        assert_eq!(truncated_a(s, s, one).unwrap(), Complex::new(1.0, 0.0));
        assert!(truncated_a(Complex::new(1.5, 0.0), s, one).is_err());
        assert!(TruncationBox::new(0, 3).is_err());
    }

    #[test]
    fn truncated_a_tail_majorant() {
        let s = Complex::new(3.0, 1.0);
        let w = Complex::new(3.0, -2.0);
        let small = TruncationBox::new(301, 301).unwrap();
        let big = TruncationBox::new(602, 602).unwrap();
        let diff = (truncated_a(s, w, big).unwrap() - truncated_a(s, w, small).unwrap()).norm();
        assert!(diff <= truncated_a_tail_bound(s, w, small).unwrap());
    }

    #[test]
    fn reordering_is_exact_up_to_rounding() {
        let s = Complex::new(3.0, 0.0);
        let w = Complex::new(4.0, 0.0);
        let bx = TruncationBox::new(501, 501).unwrap();
        let a = truncated_z_forward(s, w, PsiLabel::MinusOne, PsiLabel::Two, bx).unwrap();
        let b = truncated_z_reordered(s, w, PsiLabel::MinusOne, PsiLabel::Two, bx).unwrap();
        assert!((a - b).norm() <= 1e-12);

        let one = TruncationBox::new(1, 1).unwrap();
        let z = truncated_z_forward(s, w, PsiLabel::Two, PsiLabel::MinusTwo, one).unwrap();
        let want = zeta2(s * 2.0 + w * 2.0 - 1.0).unwrap();
        assert!((z - want).norm() < 1e-15);
    }
}
