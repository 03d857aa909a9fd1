//! Exact integer arithmetic and error-bounded real functions: Bernoulli's
//! triangle, `ζ(j)` at integer `j ≥ 2`, and the Lambert W function.
//!
//! "Bernoulli triangle" (partial sums of binomial coefficients) and
//! "Bernoulli numbers" (the Euler–Maclaurin coefficients) are unrelated
//! objects that both happen to live here.

mod binomial;
mod lambert;
mod real;
mod zeta;

pub use binomial::{bernoulli_triangle, bernoulli_triangle_row, binomial, binomial_row};
pub use lambert::{lambert_w0, lambert_w0_float, lambert_w0_integers};
pub(crate) use lambert::inverse_square;
pub use real::{HighPrecisionReal, MAX_SCALE};
pub(crate) use real::{check_scale, ulp};
pub use zeta::{bernoulli_number, zeta_int};
