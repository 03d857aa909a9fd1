//! Uniqueness of the sample maximum of IID Lüroth digits.
//!
//! With `p_m = 1/(m(m+1))` and `τ_m = 1/m`, the probability that the maximum
//! of `k` digits equals `m` and is attained once is
//! `ρ_{k,m} = k p_m (1 − τ_m)^{k−1} = k (m−1)^{k−1} / (m^k (m+1))`.
//! Writing `Q_k(m) = ρ_{k,m}/k`, the partial-fraction identity
//!
//! ```text
//! Q_k(m) = 2^{k−1} (1/m − 1/(m+1)) + Σ_{j=2}^{k} c(j,k) / m^j,
//! c(j,k) = (−1)^{j+1} T(k−1, k−j)
//! ```
//!
//! summed over `m` gives the closed form
//! `ρ_k = k (2^{k−1} + Σ_{j=2}^{k} (−1)^{j+1} T(k−1, k−j) ζ(j))`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::precision::{bernoulli_triangle_row, check_scale, ulp, zeta_int, HighPrecisionReal};
use crate::scalar::Scalar;

/// Largest `k` accepted by [`rho_exact`].
pub const RHO_EXACT_MAX_K: u64 = 200;

/// Extra working bits on top of `target + k` for the alternating sum.
pub const CANCELLATION_GUARD_BITS: u32 = 64;

/// Hard cap on the number of terms [`rho_series`] will sum.
pub const SERIES_TERM_BUDGET: u64 = 1_000_000_000;

const SERIES_CHUNK: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhoMethod {
    ExactFormula,
    Series,
    MonteCarlo,
}

impl fmt::Display for RhoMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RhoMethod::ExactFormula => "exact-formula",
            RhoMethod::Series => "series",
            RhoMethod::MonteCarlo => "monte-carlo",
        })
    }
}

/// An estimate of `ρ_k`. For Monte Carlo estimates the error bound is the
/// standard error, not a certified bound.
#[derive(Clone, Debug)]
pub struct RhoEstimate {
    pub k: u64,
    pub value: HighPrecisionReal,
    pub error_bound: f64,
    pub method: RhoMethod,
}

impl RhoEstimate {
    pub fn value_f64(&self) -> f64 {
        self.value.to_f64()
    }
}

/// `c(j, k) = (−1)^{j+1} T(k−1, k−j)` for `1 ≤ j ≤ k`, and `c(k+1, k) = 0`.
pub fn coeff_c(j: u64, k: u64) -> Result<BigInt> {
    if k < 1 {
        return domain("k", k, ">= 1");
    }
    if j < 1 || j > k + 1 {
        return domain("j", j, "1 <= j <= k+1");
    }
    if j == k + 1 {
        return Ok(BigInt::zero());
    }
    let row = bernoulli_triangle_row(k - 1);
    Ok(signed(j, row[(k - j) as usize].clone()))
}

fn signed(j: u64, t: BigInt) -> BigInt {
    if j % 2 == 1 {
        t
    } else {
        -t
    }
}

/// Coefficients of the partial-fraction expansion of `Q_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialFractionExpansion {
    k: u64,
    telescope: BigInt,
    powers: Vec<BigInt>,
}

impl PartialFractionExpansion {
    pub fn new(k: u64) -> Result<Self> {
        if k < 1 {
            return domain("k", k, ">= 1");
        }
        let row = bernoulli_triangle_row(k - 1);
        let powers = (2..=k)
            .map(|j| signed(j, row[(k - j) as usize].clone()))
            .collect();
        Ok(Self {
            k,
            telescope: BigInt::one() << (k - 1),
            powers,
        })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// `2^{k−1}`, the coefficient of `1/m − 1/(m+1)`; equals `c(1, k)`.
    pub fn telescope_coefficient(&self) -> &BigInt {
        &self.telescope
    }

    /// `c(j, k)` for `2 ≤ j ≤ k`.
    pub fn power_coefficient(&self, j: u64) -> Option<&BigInt> {
        if j < 2 {
            return None;
        }
        self.powers.get((j - 2) as usize)
    }

    /// `(j, c(j, k))` for `j = 2..=k`.
    pub fn power_coefficients(&self) -> impl Iterator<Item = (u64, &BigInt)> {
        self.powers.iter().enumerate().map(|(i, c)| (i as u64 + 2, c))
    }

    /// Evaluates the expansion at `m`.
    pub fn evaluate<T: Scalar>(&self, m: u64) -> Result<T> {
        if m < 1 {
            return domain("m", m, ">= 1");
        }
        let mm = T::from_u64(m);
        let inv = T::one() / mm.clone();
        let telescope =
            T::from_bigint(&self.telescope) * (inv.clone() - T::one() / T::from_u64(m + 1));
        let mut power = inv.clone();
        let mut sum = T::zero();
        for c in &self.powers {
            power = power * inv.clone();
            sum = sum + T::from_bigint(c) * power.clone();
        }
        Ok(telescope + sum)
    }
}

fn check_km(k: u64, m: u64) -> Result<()> {
    if k < 1 {
        return domain("k", k, ">= 1");
    }
    if m < 1 {
        return domain("m", m, ">= 1");
    }
    Ok(())
}

/// `Q_k(m) = (m−1)^{k−1} / (m^k (m+1))`.
pub fn q_k<T: Scalar>(m: u64, k: u64) -> Result<T> {
    check_km(k, m)?;
    let e = (k - 1) as usize;
    let num = num_traits::pow(T::from_u64(m - 1), e);
    let den = num_traits::pow(T::from_u64(m), e + 1) * T::from_u64(m + 1);
    Ok(num / den)
}

/// `Q_k(m)` evaluated through its partial-fraction expansion.
pub fn q_k_via_partial_fraction<T: Scalar>(m: u64, k: u64) -> Result<T> {
    check_km(k, m)?;
    PartialFractionExpansion::new(k)?.evaluate(m)
}

/// `ρ_{k,m} = k·Q_k(m)`.
pub fn rho_km<T: Scalar>(k: u64, m: u64) -> Result<T> {
    Ok(T::from_u64(k) * q_k::<T>(m, k)?)
}

/// `Σ_{k=1}^{K} ρ_{k,m}`, which tends to `p_m/τ_m² = m/(m+1)`.
pub fn rho_sum_over_k(m: u64, k_max: u64) -> Result<BigRational> {
    check_km(k_max, m)?;
    let ratio = BigRational::new(BigInt::from(m - 1), BigInt::from(m));
    let mut weight = BigRational::new(BigInt::one(), BigInt::from(m) * BigInt::from(m + 1));
    let mut sum = BigRational::zero();
    for k in 1..=k_max {
        sum += &weight * BigRational::from_integer(BigInt::from(k));
        weight *= &ratio;
    }
    Ok(sum)
}

/// `ρ_k` from the closed form, within `2^-target_bits`.
///
/// The bracket `2^{k−1} + Σ_j (−1)^{j+1} T(k−1, k−j) ζ(j)` is about `1/k`
/// while its terms are about `2^{k−1}`, so roughly `k` bits cancel. Every
/// `ζ(j)` is evaluated at `target + k + 64` bits and the terms are summed
/// from `j = k` down to `j = 2` before adding `2^{k−1}`.
pub fn rho_exact(k: u64, target_bits: u32) -> Result<RhoEstimate> {
    if k < 1 || k > RHO_EXACT_MAX_K {
        return domain("k", k, "1 <= k <= 200");
    }
    if k == 1 {
        return Ok(RhoEstimate {
            k,
            value: HighPrecisionReal::one(),
            error_bound: 0.0,
            method: RhoMethod::ExactFormula,
        });
    }
    let working = target_bits + k as u32 + CANCELLATION_GUARD_BITS;
    check_scale(working)?;
    let row = bernoulli_triangle_row(k - 1);
    let mut acc = HighPrecisionReal::zero();
    for j in (2..=k).rev() {
        let z = zeta_int(j as u32, working)?;
        let coeff = signed(j, row[(k - j) as usize].clone());
        acc = &acc + &z.mul_integer(&coeff);
    }
    let bracket = &acc + &HighPrecisionReal::from_integer(BigInt::one() << (k - 1));
    let value = bracket.mul_integer(&BigInt::from(k));
    let error_bound = value.error_bound();
    if error_bound > ulp(target_bits) {
        return Err(Error::Uncertified {
            target: target_bits,
            achieved: error_bound,
        });
    }
    Ok(RhoEstimate {
        k,
        value,
        error_bound,
        method: RhoMethod::ExactFormula,
    })
}

/// `ρ_{k,m}` in double precision, stable for large `m`.
fn rho_km_f64(k: u64, m: u64) -> f64 {
    if m == 1 {
        return if k == 1 { 0.5 } else { 0.0 };
    }
    let mf = m as f64;
    let log_term = (k - 1) as f64 * (-1.0 / mf).ln_1p() - mf.ln() - (mf + 1.0).ln();
    k as f64 * log_term.exp()
}

/// Neumaier-compensated sum; order-dependent but deterministic.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `ρ_k` as the truncated series `Σ_{m=1}^{M} ρ_{k,m}` with `M = ⌈k/tol⌉`.
///
/// The error bound is the analytic tail bound `k/(M+1)` plus a rounding
/// allowance. The sum is split into fixed-size chunks, so the result does
/// not depend on how many threads run it.
pub fn rho_series(k: u64, tol: f64) -> Result<RhoEstimate> {
    if k < 1 {
        return domain("k", k, ">= 1");
    }
    if !(tol > 0.0) || !tol.is_finite() {
        return domain("tol", tol, "> 0");
    }
    let needed = (k as f64 / tol).ceil();
    if needed > SERIES_TERM_BUDGET as f64 {
        return Err(Error::TermBudget {
            needed: needed.min(u64::MAX as f64) as u64,
            budget: SERIES_TERM_BUDGET,
        });
    }
    let terms = needed as u64;
    let chunks = terms.div_ceil(SERIES_CHUNK);
    let partials: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * SERIES_CHUNK + 1;
            let hi = ((c + 1) * SERIES_CHUNK).min(terms);
            compensated_sum((lo..=hi).map(|m| rho_km_f64(k, m)))
        })
        .collect();
    let value = compensated_sum(partials.into_iter());
    let tail = k as f64 / (terms as f64 + 1.0);
    // Each term carries O(k) roundings through ln_1p/exp; the compensated
    // sums add a few more.
    let rounding = (2.0 * k as f64 + 32.0) * f64::EPSILON * value.abs();
    let error_bound = (tail + rounding) * (1.0 + 1e-12);
    Ok(RhoEstimate {
        k,
        value: HighPrecisionReal::from_f64(value)?.widen(error_bound),
        error_bound,
        method: RhoMethod::Series,
    })
}

/// `ρ_k` for `k = 2..=k_max` from the closed form.
pub fn corollary_sequence(k_max: u64, target_bits: u32) -> Result<Vec<RhoEstimate>> {
    if k_max < 2 {
        return domain("k_max", k_max, ">= 2");
    }
    (2..=k_max)
        .into_par_iter()
        .map(|k| rho_exact(k, target_bits))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_traits::ToPrimitive;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn coefficient_edges() {
        for k in 1..=30u64 {
            assert_eq!(coeff_c(1, k).unwrap(), BigInt::one() << (k - 1));
            assert_eq!(coeff_c(k + 1, k).unwrap(), BigInt::zero());
            let sign = if k % 2 == 1 { 1 } else { -1 };
            assert_eq!(coeff_c(k, k).unwrap(), BigInt::from(sign));
            if k >= 2 {
                assert_eq!(coeff_c(2, k).unwrap(), BigInt::one() - (BigInt::one() << (k - 1)));
            }
        }
        assert!(coeff_c(0, 3).is_err());
        assert!(coeff_c(5, 3).is_err());
    }

    #[test]
    fn coefficient_recurrence() {
        for k in 2..=40u64 {
            for j in 2..=k {
                let lhs = coeff_c(j, k).unwrap();
                let rhs = coeff_c(j, k - 1).unwrap() - coeff_c(j - 1, k - 1).unwrap();
                assert_eq!(lhs, rhs, "j={j} k={k}");
            }
        }
    }

    #[test]
    fn expansion_matches_coeff_c() {
        let pf = PartialFractionExpansion::new(7).unwrap();
        assert_eq!(pf.telescope_coefficient(), &coeff_c(1, 7).unwrap());
        for (j, c) in pf.power_coefficients() {
            assert_eq!(c, &coeff_c(j, 7).unwrap());
        }
        assert_eq!(pf.power_coefficient(1), None);
        assert_eq!(pf.power_coefficient(8), None);
    }

    #[test]
    fn q_k_examples() {
        for m in 1..10u64 {
            assert_eq!(q_k::<Rational>(m, 1).unwrap(), q(1, (m * (m + 1)) as i64));
        }
        assert_eq!(q_k::<Rational>(3, 2).unwrap(), q(1, 18));
        assert_eq!(q_k::<Rational>(1, 5).unwrap(), q(0, 1));
        for k in 1..8u64 {
            for m in 1..8u64 {
                let lhs = q_k::<Rational>(m, k + 1).unwrap();
                let rhs = (q(1, 1) - q(1, m as i64)) * q_k::<Rational>(m, k).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn partial_fraction_examples() {
        for m in 1..10u64 {
            assert_eq!(
                q_k_via_partial_fraction::<Rational>(m, 1).unwrap(),
                q(1, (m * (m + 1)) as i64)
            );
        }
        assert_eq!(q_k_via_partial_fraction::<Rational>(3, 2).unwrap(), q(1, 18));
    }

    #[test]
    fn float_evaluation_tracks_exact() {
        for &(m, k) in &[(3u64, 2u64), (10, 5), (40, 3)] {
            let exact = q_k::<Rational>(m, k).unwrap().to_f64().unwrap();
            assert!((q_k::<f64>(m, k).unwrap() - exact).abs() <= 1e-15 * exact);
        }
    }

    #[test]
    fn rho_km_examples() {
        for k in 2..10 {
            assert_eq!(rho_km::<Rational>(k, 1).unwrap(), q(0, 1));
        }
        assert_eq!(rho_km::<Rational>(2, 2).unwrap(), q(1, 6));
        assert_eq!(rho_km::<Rational>(1, 4).unwrap(), q(1, 20));
        let exact = rho_km::<Rational>(7, 13).unwrap().to_f64().unwrap();
        assert!((rho_km_f64(7, 13) - exact).abs() < 1e-15 * exact);
    }

    #[test]
    fn rho_km_is_a_subprobability() {
        for k in 1..=12u64 {
            let total: Rational = (1..=60).map(|m| rho_km::<Rational>(k, m).unwrap()).sum();
            assert!(total <= q(1, 1));
        }
    }

    #[test]
    fn sum_over_k_limits() {
        assert_eq!(rho_sum_over_k(1, 1).unwrap(), q(1, 2));
        assert_eq!(rho_sum_over_k(1, 50).unwrap(), q(1, 2));
        let s = rho_sum_over_k(2, 100).unwrap();
        assert!(((s - q(2, 3)).to_f64().unwrap()).abs() <= 1e-12);
        let s = rho_sum_over_k(5, 400).unwrap();
        assert!(((s - q(5, 6)).to_f64().unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn rho_exact_small_k() {
        let one = rho_exact(1, 128).unwrap();
        assert!(one.value.is_exact());
        assert_eq!(one.value_f64(), 1.0);
        let two = rho_exact(2, 128).unwrap();
        let closed = 4.0 - std::f64::consts::PI.powi(2) / 3.0;
        assert!((two.value_f64() - closed).abs() < 1e-15);
        assert!(two.error_bound <= 2f64.powi(-128));
        assert_eq!(two.method, RhoMethod::ExactFormula);
    }

    #[test]
    fn rho_exact_domain() {
        assert!(rho_exact(0, 64).is_err());
        assert!(rho_exact(201, 64).is_err());
        assert!(matches!(rho_exact(10, 990), Err(Error::PrecisionTooHigh(_))));
    }

    #[test]
    fn rho_exact_large_k_survives_cancellation() {
        let r = rho_exact(200, 64).unwrap();
        let v = r.value_f64();
        assert!(v > 0.99 && v < 1.0, "rho_200 = {v}");
    }

    #[test]
    fn rho_series_small_k() {
        let s = rho_series(1, 1e-6).unwrap();
        assert!((s.value_f64() - 1.0).abs() <= 1e-6);
        let s = rho_series(2, 1e-6).unwrap();
        let closed = 4.0 - std::f64::consts::PI.powi(2) / 3.0;
        assert!((s.value_f64() - closed).abs() <= 1e-6);
        assert!(s.error_bound <= 1e-6 * 1.001);
    }

    #[test]
    fn rho_series_budget() {
        assert!(matches!(rho_series(40, 1e-9), Err(Error::TermBudget { .. })));
        assert!(rho_series(3, 0.0).is_err());
    }

    #[test]
    fn corollary_sequence_shape() {
        let seq = corollary_sequence(2, 128).unwrap();
        assert_eq!(seq.len(), 1);
        assert_eq!(seq[0].k, 2);
        assert!(corollary_sequence(1, 128).is_err());
    }
}
