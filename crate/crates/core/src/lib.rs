//! Exact and Monte Carlo statistics of Lüroth expansion digits.
//!
//! The digits of a uniformly random point under the Lüroth map are IID with
//! `P(X = n) = 1/(n(n+1))`. This crate computes, exactly and by simulation:
//!
//! * the probability `ρ_k` that the maximum of `k` digits is attained once,
//!   through the zeta / Bernoulli-triangle closed form and through a direct
//!   series ([`extrema`]);
//! * the partial-fraction expansion of `ρ_{k,m}/k` ([`extrema::PartialFractionExpansion`]);
//! * the ingredients of the almost-sure trimmed-sum law
//!   `(S_k − M_k)/(k log k) → 1` ([`mori`]);
//! * reproducible Monte Carlo for all of the above ([`simulation`]) and for
//!   continued-fraction digits under the Gauss measure ([`gauss_cf`]).
//!
//! Core routines that make sense over several number types are generic over
//! [`Scalar`]; the exact instantiation is [`Rational`].

pub mod cli;
pub mod error;
pub mod extrema;
pub mod gauss_cf;
pub mod luroth;
pub mod mori;
pub mod precision;
pub mod rng;
pub mod scalar;
pub mod simulation;

pub use error::{Error, Result};
pub use precision::HighPrecisionReal;
pub use scalar::Scalar;

/// Arbitrary-size signed integer.
pub type Integer = num_bigint::BigInt;

/// Exact rational in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

/// Digit expansion carried out in exact rational arithmetic.
pub type ExactExpansion = luroth::DigitSequence<Rational>;

/// Digit expansion carried out in double precision.
pub type FloatExpansion = luroth::DigitSequence<f64>;

/// Partial-fraction coefficients evaluated over exact rationals.
pub type ExactPartialFraction = extrema::PartialFractionExpansion;
