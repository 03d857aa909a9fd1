//! The Lüroth map `L(x) = N(x)((N(x)+1)x − 1)` with digit `N(x) = ⌊1/x⌋`,
//! digit expansion and reconstruction, and the digit distribution.
//!
//! Digit `n` owns the half-open interval `(1/(n+1), 1/n]`, so `x = 1/n`
//! has digit `n` and the map sends it to `1`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{domain, Error, Result};
use crate::precision::HighPrecisionReal;
use crate::scalar::Scalar;

/// Precision used by [`max_cdf_exact`].
pub const CDF_PRECISION_BITS: u32 = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    ExactExpansion,
    Sampled,
}

/// A finite run of Lüroth digits (all `≥ 1`).
///
/// For an exact expansion of `x` to `n` digits, `remainder = L^n(x)` and
/// `x = reconstruct(digits) + remainder · Π 1/(dᵢ(dᵢ+1))`.
#[derive(Clone, Debug, PartialEq)]
pub struct DigitSequence<T> {
    digits: Vec<u64>,
    provenance: Provenance,
    remainder: Option<T>,
}

impl<T> DigitSequence<T> {
    pub fn sampled(digits: Vec<u64>) -> Result<Self> {
        if let Some(&d) = digits.iter().find(|&&d| d == 0) {
            return domain("digit", d, ">= 1");
        }
        Ok(Self {
            digits,
            provenance: Provenance::Sampled,
            remainder: None,
        })
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn remainder(&self) -> Option<&T> {
        self.remainder.as_ref()
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }
}

fn check_unit<T: Scalar>(x: &T) -> Result<()> {
    if *x <= T::zero() || *x > T::one() {
        return domain("x", format!("{x:?}"), "0 < x <= 1");
    }
    Ok(())
}

/// `N(x)`: the unique `n` with `1/(n+1) < x ≤ 1/n`.
pub fn digit<T: Scalar>(x: &T) -> Result<u64> {
    check_unit(x)?;
    let recip = T::one() / x.clone();
    recip
        .floor_u64()
        .ok_or_else(|| Error::DigitOverflow(format!("{recip:?}")))
}

/// One application of the Lüroth map.
pub fn luroth_step<T: Scalar>(x: &T) -> Result<T> {
    let n = digit(x)?;
    let nn = T::from_u64(n);
    let next = nn.clone() * ((nn + T::one()) * x.clone() - T::one());
    Ok(next)
}

/// Digits `N(L^{i−1}(x))` for `i = 1..=count` and the remainder `L^count(x)`.
pub fn expand<T: Scalar>(x: &T, count: usize) -> Result<DigitSequence<T>> {
    if count == 0 {
        return domain("count", count, ">= 1");
    }
    let mut digits = Vec::with_capacity(count);
    let mut cur = x.clone();
    for _ in 0..count {
        let n = digit(&cur)?;
        let nn = T::from_u64(n);
        cur = nn.clone() * ((nn + T::one()) * cur - T::one());
        digits.push(n);
    }
    Ok(DigitSequence {
        digits,
        provenance: Provenance::ExactExpansion,
        remainder: Some(cur),
    })
}

/// Exact expansion of the dyadic rational a double represents.
///
/// These are the Lüroth digits of that exact binary fraction, not of any
/// real number the double was meant to approximate.
pub fn expand_f64(x: f64, count: usize) -> Result<DigitSequence<BigRational>> {
    let r = BigRational::from_float(x).ok_or_else(|| Error::Domain {
        name: "x",
        value: x.to_string(),
        expected: "finite",
    })?;
    expand(&r, count)
}

fn check_digits(digits: &[u64]) -> Result<()> {
    if digits.is_empty() {
        return Err(Error::EmptyDigits);
    }
    if digits.contains(&0) {
        return domain("digit", 0, ">= 1");
    }
    Ok(())
}

/// Truncation value `r(d₁..dₙ) = 1/(d₁+1) + r(d₂..dₙ)/(d₁(d₁+1))`, `r(∅) = 0`.
pub fn reconstruct<T: Scalar>(digits: &[u64]) -> Result<T> {
    check_digits(digits)?;
    Ok(fold_digits(digits, T::zero()))
}

/// Inverse of [`expand`]: folds the remainder back in, giving `x` exactly
/// for exact expansions.
pub fn reconstruct_with_remainder<T: Scalar>(seq: &DigitSequence<T>) -> Result<T> {
    check_digits(&seq.digits)?;
    let tail = seq.remainder.clone().unwrap_or_else(T::zero);
    Ok(fold_digits(&seq.digits, tail))
}

fn fold_digits<T: Scalar>(digits: &[u64], tail: T) -> T {
    digits.iter().rev().fold(tail, |acc, &d| {
        let dd = T::from_u64(d);
        let d1 = dd.clone() + T::one();
        T::one() / d1.clone() + acc / (dd * d1)
    })
}

/// `P(X = n) = 1/(n(n+1))`.
pub fn pmf<T: Scalar>(n: u64) -> Result<T> {
    if n < 1 {
        return domain("n", n, ">= 1");
    }
    Ok(T::one() / (T::from_u64(n) * T::from_u64(n + 1)))
}

/// `P(X ≥ n) = 1/n`.
pub fn tail<T: Scalar>(n: u64) -> Result<T> {
    if n < 1 {
        return domain("n", n, ">= 1");
    }
    Ok(T::one() / T::from_u64(n))
}

/// `P(max(X₁..X_k) ≤ n) = (n/(n+1))^k`, computed from the exact rational.
pub fn max_cdf_exact(k: u64, n: u64) -> Result<HighPrecisionReal> {
    if k < 1 {
        return domain("k", k, ">= 1");
    }
    if n < 1 {
        return domain("n", n, ">= 1");
    }
    let k32 = u32::try_from(k).map_err(|_| Error::Domain {
        name: "k",
        value: k.to_string(),
        expected: "< 2^32",
    })?;
    let r = BigRational::new(BigInt::from(n).pow(k32), BigInt::from(n + 1).pow(k32));
    Ok(HighPrecisionReal::from_rational(&r, CDF_PRECISION_BITS))
}

/// Inverse-CDF draw: `⌊1/u⌋` for `u ∈ (0, 1)`.
///
/// The floating reciprocal is corrected with exact sign tests so the result
/// is the Lüroth digit of the dyadic rational `u`, i.e. `sample_digit(u)`
/// equals `digit` applied to `u` converted exactly.
pub fn sample_digit(u: f64) -> Result<u64> {
    if !(u > 0.0 && u < 1.0) {
        return domain("u", u, "0 < u < 1");
    }
    let guess = (1.0 / u).floor();
    if guess >= 9.007_199_254_740_992e15 {
        // Past 2^53 the fma sign test below is not exact; fall back.
        let r = BigRational::from_float(u).expect("finite");
        return digit(&r);
    }
    let mut n = guess as u64;
    // u·n ≤ 1 < u·(n+1); fma rounds once, so the sign of u·m − 1 is exact.
    while n > 1 && u.mul_add(n as f64, -1.0) > 0.0 {
        n -= 1;
    }
    while u.mul_add((n + 1) as f64, -1.0) <= 0.0 {
        n += 1;
    }
    Ok(n)
}

/// Length of the branch-`n` preimage of `(a, b]`: `(b − a)/(n(n+1))`.
pub fn preimage_length(a: &BigRational, b: &BigRational, n: u64) -> Result<BigRational> {
    if !(BigRational::zero() <= *a && a < b && *b <= BigRational::one()) {
        return domain("(a, b]", format!("({a}, {b}]"), "0 <= a < b <= 1");
    }
    // On branch n, L is affine with slope n(n+1) and maps (1/(n+1), 1/n]
    // onto (0, 1]; invert at both ends.
    let slope = BigRational::from_integer(BigInt::from(n) * BigInt::from(n + 1));
    let base = BigRational::new(BigInt::one(), BigInt::from(n + 1));
    let lo = &base + a / &slope;
    let hi = &base + b / &slope;
    Ok(hi - lo)
}
