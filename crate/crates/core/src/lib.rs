//! Exact double sums of quadratic characters over odd integers, the analytic
//! main terms that describe them, and a harness that compares the two.
//!
//! The crate is organised bottom-up:
//!
//! * [`char_arith`]: Kronecker symbols and friends, all in exact integer arithmetic.
//! * [`special_fn`]: complex Gamma and zeta.
//! * [`quad`]: Gauss–Kronrod quadrature used by the analytic layers.
//! * [`weights`]: smooth plateau cutoffs and their Mellin transforms.
//! * [`exact_sum`]: the sharp and smoothed double sums, plus truncated Dirichlet series.
//! * [`main_term`]: the transition functions `D(alpha)` and `C(alpha)` and related closed forms.
//! * [`harness`]: experiments, CSV output, scaling fits and the verification suite.

pub mod char_arith;
pub mod error;
pub mod exact_sum;
pub mod harness;
pub mod main_term;
pub mod quad;
pub mod special_fn;
pub mod thresholds;
pub mod weights;

pub use error::{Error, Result};

/// Double-precision complex number used by every analytic routine.
pub type Complex = num_complex::Complex64;
