//! Riemann zeta at integer arguments by Euler–Maclaurin summation.
//!
//! For `s ≥ 2` and cutoff `N`,
//!
//! ```text
//! ζ(s) = Σ_{n<N} n^-s + N^{1-s}/(s-1) + N^-s/2
//!        + Σ_{i=1}^{M} B_{2i}/(2i)! · s(s+1)…(s+2i-2) · N^{-s-2i+1} + R_M
//! ```
//!
//! and for real `s` the remainder `R_M` is bounded by the first omitted
//! correction term. Every piece is an exact rational rounded once to the
//! working scale, so the error bound is a count of half-ulps plus `|R_M|`.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::binomial::binomial;
use super::real::{bound_add, check_scale, div_round, ulp, HighPrecisionReal};
use crate::error::{domain, Result};

static BERNOULLI: Mutex<Vec<BigRational>> = Mutex::new(Vec::new());

/// Bernoulli number `B_n` (with `B_1 = −1/2`), from the exact recurrence
/// `Σ_{i=0}^{m} C(m+1, i) B_i = 0`.
pub fn bernoulli_number(n: usize) -> BigRational {
    let mut cache = BERNOULLI.lock().unwrap();
    if cache.is_empty() {
        cache.push(BigRational::one());
    }
    while cache.len() <= n {
        let m = cache.len();
        let mut acc = BigRational::zero();
        for (i, b) in cache.iter().enumerate() {
            if i > 1 && i % 2 == 1 {
                continue; // odd Bernoulli numbers past B_1 vanish
            }
            acc += b * BigRational::from_integer(binomial(m as u64 + 1, i as u64));
        }
        let b = -acc / BigRational::from_integer(BigInt::from(m + 1));
        cache.push(b);
    }
    cache[n].clone()
}

/// `ζ(j)` with absolute error at most `2^-precision_bits`.
pub fn zeta_int(j: u32, precision_bits: u32) -> Result<HighPrecisionReal> {
    if j < 2 {
        return domain("j", j, "j >= 2");
    }
    if precision_bits < 16 {
        return domain("precision_bits", precision_bits, ">= 16");
    }
    check_scale(precision_bits)?;
    let guard = 24;
    let scale = precision_bits + guard;
    check_scale(scale)?;
    let mut cutoff = (scale / 4 + j / 2 + 8) as u64;
    loop {
        if let Some(z) = euler_maclaurin(j, cutoff, scale) {
            if z.certifies(precision_bits) {
                return Ok(z);
            }
        }
        cutoff *= 2;
    }
}

/// One Euler–Maclaurin evaluation; `None` when the correction terms start
/// growing before they fall below the working ulp.
fn euler_maclaurin(s: u32, cutoff: u64, scale: u32) -> Option<HighPrecisionReal> {
    let one = BigInt::one() << scale;
    let mut sum = BigInt::zero();
    let mut roundings: u64 = 0;
    for n in (1..cutoff).rev() {
        let p = BigInt::from(n).pow(s);
        sum += div_round(&one, &p);
        roundings += 1;
    }
    let big_n = BigInt::from(cutoff);
    let n_pow_s = big_n.pow(s);
    // N^{1-s}/(s-1) + N^{-s}/2 = (2N + s - 1) / (2 (s-1) N^s)
    let head_num = &one * (2u64 * cutoff + s as u64 - 1);
    let head_den = &n_pow_s * (2u64 * (s as u64 - 1));
    sum += div_round(&head_num, &head_den);
    roundings += 1;

    let threshold = BigRational::new(BigInt::one(), one.clone());
    let mut rising = BigInt::from(s); // s(s+1)…(s+2i-2)
    let mut factorial = BigInt::from(2u32); // (2i)!
    let mut n_power = &n_pow_s * &big_n; // N^{s+2i-1}
    let mut previous: Option<BigRational> = None;
    let mut i = 1usize;
    loop {
        let b = bernoulli_number(2 * i);
        let term = b * BigRational::new(rising.clone(), &factorial * &n_power);
        let mag = term.abs();
        if mag < threshold {
            let rem = super::real::HighPrecisionReal::from_rational(&mag, scale + 8).to_f64();
            let rounding = (roundings as f64) * ulp(scale + 1);
            let err = bound_add(rounding, rem.abs() * 1.0001 + ulp(scale + 8));
            return Some(HighPrecisionReal::from_parts(sum, scale, err));
        }
        if let Some(prev) = &previous {
            if mag >= *prev {
                return None;
            }
        }
        sum += div_round(&(term.numer() * &one), term.denom());
        roundings += 1;
        previous = Some(mag);
        let next = 2 * i as u64;
        rising = rising * (s as u64 + next - 1) * (s as u64 + next);
        factorial = factorial * (next + 1) * (next + 2);
        n_power = n_power * (&big_n * &big_n);
        i += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn first_bernoulli_numbers() {
        let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(bernoulli_number(0), r(1, 1));
        assert_eq!(bernoulli_number(1), r(-1, 2));
        assert_eq!(bernoulli_number(2), r(1, 6));
        assert_eq!(bernoulli_number(3), r(0, 1));
        assert_eq!(bernoulli_number(4), r(-1, 30));
        assert_eq!(bernoulli_number(12), r(-691, 2730));
    }

    #[test]
    fn rejects_small_argument() {
        assert!(zeta_int(1, 64).is_err());
        assert!(zeta_int(0, 64).is_err());
        assert!(zeta_int(2, 8).is_err());
    }

    #[test]
    fn double_precision_values() {
        let z2 = zeta_int(2, 64).unwrap().to_f64();
        assert!((z2 - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-15);
        let z3 = zeta_int(3, 64).unwrap().to_f64();
        assert!((z3 - 1.202_056_903_159_594_2).abs() < 1e-15);
    }

    #[test]
    fn large_argument_is_dominated_by_two() {
        let z = zeta_int(60, 128).unwrap();
        let minus_one = (z - HighPrecisionReal::one()).to_f64();
        let ratio = minus_one / 2f64.powi(-60);
        assert!((0.9..=1.1).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn error_bound_meets_request() {
        for &(j, p) in &[(2, 16), (2, 300), (7, 128), (150, 400)] {
            let z = zeta_int(j, p).unwrap();
            assert!(z.error_bound() <= ulp(p), "j={j} p={p}");
        }
    }

    #[test]
    fn refining_precision_stays_within_bounds() {
        for j in [2u32, 3, 5, 17, 40] {
            let lo = zeta_int(j, 64).unwrap();
            let hi = zeta_int(j, 256).unwrap();
            let gap = (&lo - &hi).to_rational().abs().to_f64().unwrap();
            assert!(gap <= lo.error_bound() + hi.error_bound());
        }
    }
}
