//! Kronecker symbols, the four real characters modulo 8, the reciprocity-twisted
//! character `chi_tilde`, and squarefree decomposition.
//!
//! Lower arguments are restricted to `n >= 1`. Every caller in this crate sums
//! over positive odd `n`, so negative lower arguments are rejected instead of
//! being given a sign convention nobody uses.

use crate::error::{Error, Result};

/// A value of a real character: always -1, 0 or +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SymbolValue(i8);

impl SymbolValue {
    pub const ZERO: SymbolValue = SymbolValue(0);
    pub const ONE: SymbolValue = SymbolValue(1);
    pub const MINUS_ONE: SymbolValue = SymbolValue(-1);

    /// Builds a value from an integer, rejecting anything outside {-1, 0, 1}.
    pub fn new(v: i64) -> Result<Self> {
        match v {
            -1..=1 => Ok(SymbolValue(v as i8)),
            _ => Err(Error::domain("SymbolValue::new", format!("{v} is not in {{-1,0,1}}"))),
        }
    }

    #[inline]
    pub fn value(self) -> i64 {
        self.0 as i64
    }
}

impl std::ops::Mul for SymbolValue {
    type Output = SymbolValue;
    #[inline]
    fn mul(self, rhs: SymbolValue) -> SymbolValue {
        SymbolValue(self.0 * rhs.0)
    }
}

impl From<SymbolValue> for i64 {
    fn from(v: SymbolValue) -> i64 {
        v.0 as i64
    }
}

/// Jacobi symbol (a/n) for odd `n >= 1` and `0 <= a < n` or any `a >= 0`.
///
/// Binary variant: strips factors of two with `trailing_zeros` instead of
/// dividing, then swaps with the reciprocity sign flip.
#[inline]
pub fn jacobi_odd(a: u64, n: u64) -> i64 {
    debug_assert!(n & 1 == 1);
    let mut a = a % n;
    let mut n = n;
    let mut t: i64 = 1;
    while a != 0 {
        let z = a.trailing_zeros();
        a >>= z;
        // (2/n) = -1 iff n = 3, 5 mod 8
        if z & 1 == 1 && matches!(n & 7, 3 | 5) {
            t = -t;
        }
        if a & n & 2 != 0 {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Kronecker symbol (m/2) for the prime 2.
#[inline]
fn kronecker_two(m: i64) -> i64 {
    if m & 1 == 0 {
        0
    } else {
        match m.rem_euclid(8) {
            1 | 7 => 1,
            _ => -1,
        }
    }
}

/// The Kronecker symbol `(m/n)` for any integer `m` and `n >= 1`.
///
/// Completely multiplicative in each argument. Returns an error for `n <= 0`.
pub fn kronecker(m: i64, n: i64) -> Result<SymbolValue> {
    if n <= 0 {
        return Err(Error::domain(
            "kronecker",
            format!("lower argument must be >= 1, got {n}"),
        ));
    }
    Ok(SymbolValue(kronecker_unchecked(m, n) as i8))
}

/// [`kronecker`] without the domain check. `n` must be at least 1.
#[inline]
pub fn kronecker_unchecked(m: i64, n: i64) -> i64 {
    debug_assert!(n >= 1);
    let z = n.trailing_zeros();
    let odd = (n >> z) as u64;
    let mut t = 1i64;
    if z > 0 {
        let k2 = kronecker_two(m);
        if k2 == 0 {
            return 0;
        }
        if z & 1 == 1 {
            t = k2;
        }
    }
    // (m/odd) for negative m: (-1/odd) times (|m|/odd)
    let (abs, neg) = if m < 0 { (m.unsigned_abs(), true) } else { (m as u64, false) };
    let mut j = jacobi_odd(abs % odd, odd);
    if neg && odd & 3 == 3 {
        j = -j;
    }
    t * j
}

/// Label of one of the four real characters of conductor dividing 8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PsiLabel {
    One,
    MinusOne,
    Two,
    MinusTwo,
}

impl PsiLabel {
    pub const ALL: [PsiLabel; 4] = [PsiLabel::One, PsiLabel::MinusOne, PsiLabel::Two, PsiLabel::MinusTwo];

    /// Maps j in {1, -1, 2, -2} to its label.
    pub fn from_j(j: i64) -> Result<Self> {
        match j {
            1 => Ok(PsiLabel::One),
            -1 => Ok(PsiLabel::MinusOne),
            2 => Ok(PsiLabel::Two),
            -2 => Ok(PsiLabel::MinusTwo),
            _ => Err(Error::domain("PsiLabel::from_j", format!("j = {j} is not one of 1, -1, 2, -2"))),
        }
    }

    pub fn j(self) -> i64 {
        match self {
            PsiLabel::One => 1,
            PsiLabel::MinusOne => -1,
            PsiLabel::Two => 2,
            PsiLabel::MinusTwo => -2,
        }
    }

    /// Evaluates the character at odd `n` with no checks.
    #[inline]
    pub fn eval_odd(self, n: i64) -> i64 {
        let r = n.rem_euclid(8);
        match self {
            PsiLabel::One => 1,
            PsiLabel::MinusOne => {
                if r & 3 == 1 {
                    1
                } else {
                    -1
                }
            }
            PsiLabel::Two => {
                if r == 1 || r == 7 {
                    1
                } else {
                    -1
                }
            }
            PsiLabel::MinusTwo => {
                if r == 1 || r == 3 {
                    1
                } else {
                    -1
                }
            }
        }
    }
}

/// `psi_j(n) = (j/n)` for odd `n` and j in {1, -1, 2, -2}.
pub fn psi_character(j: i64, n: i64) -> Result<SymbolValue> {
    let label = PsiLabel::from_j(j)?;
    if n & 1 == 0 {
        return Err(Error::domain("psi_character", format!("n = {n} is even")));
    }
    Ok(SymbolValue(label.eval_odd(n) as i8))
}

/// `chi_n(m)` when `n = 1 mod 4` and `chi_{-n}(m)` when `n = 3 mod 4`, where
/// `chi_d(m) = (d/m)`.
///
/// The upper argument of the underlying Kronecker symbol is `m`, so `m` must be
/// at least 1.
pub fn chi_tilde(n: i64, m: i64) -> Result<SymbolValue> {
    if n <= 0 || n & 1 == 0 {
        return Err(Error::domain("chi_tilde", format!("n must be odd and positive, got {n}")));
    }
    if m <= 0 {
        return Err(Error::domain("chi_tilde", format!("m must be >= 1, got {m}")));
    }
    Ok(SymbolValue(chi_tilde_unchecked(n, m) as i8))
}

#[inline]
pub(crate) fn chi_tilde_unchecked(n: i64, m: i64) -> i64 {
    let d = if n & 3 == 1 { n } else { -n };
    kronecker_unchecked(d, m)
}

/// `m = m0 * m1^2` with `m0` squarefree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SquarefreeDecomposition {
    pub m0: u64,
    pub m1: u64,
}

impl SquarefreeDecomposition {
    pub fn reconstruct(&self) -> u64 {
        self.m0 * self.m1 * self.m1
    }
}

fn check_positive(m: i64) -> Result<u64> {
    if m <= 0 {
        Err(Error::domain("squarefree_decompose", format!("m must be >= 1, got {m}")))
    } else {
        Ok(m as u64)
    }
}

/// Squarefree decomposition by trial division up to `sqrt(m)`.
pub fn squarefree_decompose(m: i64) -> Result<SquarefreeDecomposition> {
    let mut rest = check_positive(m)?;
    let (mut m0, mut m1) = (1u64, 1u64);
    let mut p = 2u64;
    while p * p <= rest {
        if rest % p == 0 {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            m1 *= p.pow(e / 2);
            if e & 1 == 1 {
                m0 *= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    m0 *= rest;
    Ok(SquarefreeDecomposition { m0, m1 })
}

/// Smallest-prime-factor table for decomposing many integers up to a bound.
#[derive(Debug, Clone)]
pub struct SpfSieve {
    spf: Vec<u32>,
}

impl SpfSieve {
    pub fn new(limit: u32) -> Self {
        let n = limit as usize + 1;
        let mut spf = vec![0u32; n];
        for i in 2..n {
            if spf[i] == 0 {
                let mut j = i;
                while j < n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        SpfSieve { spf }
    }

    pub fn limit(&self) -> u32 {
        (self.spf.len() - 1) as u32
    }

    /// Decomposes `m`, falling back to trial division above the sieve limit.
    pub fn decompose(&self, m: i64) -> Result<SquarefreeDecomposition> {
        let mut rest = check_positive(m)?;
        if rest > self.limit() as u64 {
            return squarefree_decompose(m);
        }
        let (mut m0, mut m1) = (1u64, 1u64);
        while rest > 1 {
            let p = self.spf[rest as usize] as u64;
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            m1 *= p.pow(e / 2);
            if e & 1 == 1 {
                m0 *= p;
            }
        }
        Ok(SquarefreeDecomposition { m0, m1 })
    }
}

/// Decomposes every integer in `ms` using one shared sieve.
pub fn squarefree_decompose_bulk(ms: &[i64]) -> Result<Vec<SquarefreeDecomposition>> {
    let max = ms.iter().copied().max().unwrap_or(1).clamp(1, u32::MAX as i64 / 2);
    let sieve = SpfSieve::new(max as u32);
    ms.iter().map(|&m| sieve.decompose(m)).collect()
}
