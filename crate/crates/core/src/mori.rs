//! Deterministic inputs to the almost-sure trimmed-sum law with one
//! trimmed term: the normaliser `A(x) = x ln x`, its inverse
//! `B(x) = x/W(x)`, the series `J₂`, and the centring constants `c_k`.

use num_bigint::BigInt;
use num_traits::{Float, ToPrimitive, Zero};

use crate::error::{domain, Result};
use crate::precision::{inverse_square, lambert_w0, lambert_w0_float, HighPrecisionReal};

/// Precision of the Lambert-W values feeding [`j2_partial`].
pub const J2_PRECISION_BITS: u32 = 64;

/// Largest cutoff summed term by term in [`harmonic`].
pub const HARMONIC_DIRECT_LIMIT: u64 = 100_000_000;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Fixed-point scale of the `J₂` accumulator.
const J2_SCALE: u32 = 128;

/// `A(x) = x ln x` for `x > 1`.
pub fn a_of<T: Float>(x: T) -> Result<T> {
    if !(x > T::one()) || !x.is_finite() {
        return domain("x", x.to_f64().unwrap_or(f64::NAN), "finite and > 1");
    }
    Ok(x * x.ln())
}

/// `B(x) = x / W(x)` for `x > 0`, so that `A(B(x)) = x`.
pub fn b_of<T: Float>(x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return domain("x", x.to_f64().unwrap_or(f64::NAN), "finite and > 0");
    }
    Ok(x / lambert_w0_float(x).expect("x > 0"))
}

/// `J₂(N) = Σ_{n=2}^{N} (1/n²)(n²/W(n)² − (n−1)²/W(n−1)²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct J2PartialSum {
    pub n: u64,
    pub value: f64,
    pub last_term: f64,
}

/// Partial sums `J₂(2), …, J₂(n_max)`.
///
/// Terms are formed from 64-bit Lambert-W values in 128-bit fixed point and
/// accumulated exactly in that fixed point, so the sums are reproducible
/// and monotone whenever the terms are nonnegative.
pub fn j2_partial_sums(n_max: u64) -> Result<Vec<J2PartialSum>> {
    if n_max < 2 {
        return domain("N", n_max, ">= 2");
    }
    use rayon::prelude::*;
    // 1/W(n)² for n = 1..=n_max
    let inv_sq: Vec<BigInt> = (1..=n_max)
        .into_par_iter()
        .map(|n| lambert_w0(n as f64, J2_PRECISION_BITS).map(|w| inverse_square(&w, J2_SCALE)))
        .collect::<Result<_>>()?;
    let scale = (-(J2_SCALE as f64)).exp2();
    let mut acc = BigInt::zero();
    let mut out = Vec::with_capacity(n_max as usize - 1);
    for n in 2..=n_max {
        // 1/W(n)² − ((n−1)/n)²/W(n−1)², with the second part rounded once.
        let prev = &inv_sq[n as usize - 2] * BigInt::from((n - 1) * (n - 1));
        let nn = BigInt::from(n * n);
        let prev = (&prev + (&nn >> 1u32)) / &nn;
        let term = &inv_sq[n as usize - 1] - prev;
        acc += &term;
        out.push(J2PartialSum {
            n,
            value: acc.to_f64().unwrap_or(f64::NAN) * scale,
            last_term: term.to_f64().unwrap_or(f64::NAN) * scale,
        });
    }
    Ok(out)
}

/// `J₂(n)`.
pub fn j2_partial(n: u64) -> Result<J2PartialSum> {
    Ok(*j2_partial_sums(n)?.last().expect("n >= 2"))
}

/// `H_n = Σ_{i=1}^{n} 1/i`; summed directly (smallest terms first) up to
/// [`HARMONIC_DIRECT_LIMIT`], asymptotic expansion beyond.
pub fn harmonic(n: u64) -> f64 {
    if n <= HARMONIC_DIRECT_LIMIT {
        (1..=n).rev().map(|i| 1.0 / i as f64).sum()
    } else {
        let x = n as f64;
        let inv2 = 1.0 / (x * x);
        x.ln() + EULER_GAMMA + 0.5 / x - inv2 / 12.0 + inv2 * inv2 / 120.0
    }
}

/// `c_k = (k / A(k)) · E(X₁ | X₁ < A(k))`.
///
/// `X₁ < A(k)` is read as `X₁ ≤ ⌈A(k)⌉ − 1`. With `n·p_n = 1/(n+1)` the
/// truncated mean is `H_{⌈A⌉} − 1` and `P(X₁ < A) = 1 − 1/⌈A⌉`.
pub fn c_k(k: u64) -> Result<f64> {
    if k < 2 {
        return domain("k", k, ">= 2");
    }
    let a = a_of(k as f64)?;
    let cutoff = a.ceil() as u64;
    let truncated_mean = harmonic(cutoff) - 1.0;
    let below = 1.0 - 1.0 / cutoff as f64;
    Ok(k as f64 / a * truncated_mean / below)
}

/// `W(x) − (ln x − ln ln x)` for `x ≥ e²`.
pub fn w_asymptotic_gap(x: f64) -> Result<f64> {
    if !(x >= std::f64::consts::E.powi(2)) || !x.is_finite() {
        return domain("x", x, "finite and >= e^2");
    }
    let w = lambert_w0(x, 64)?;
    let approx = HighPrecisionReal::from_f64(x.ln() - x.ln().ln())?;
    Ok((w - approx).to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn a_and_b_special_values() {
        assert!((a_of(E).unwrap() - E).abs() < 1e-15);
        assert!((b_of(E).unwrap() - E).abs() < 1e-14);
        let rt = a_of(b_of(10.0f64).unwrap()).unwrap();
        assert!((rt - 10.0).abs() <= 1e-10 * 10.0);
        assert!(a_of(1.0f64).is_err());
        assert!(b_of(0.0f64).is_err());
        assert!((a_of(E as f32).unwrap() - E as f32).abs() < 1e-6);
    }

    #[test]
    fn first_j2_term() {
        let j = j2_partial(2).unwrap();
        // W(2) = 0.852605502013725…, W(1) = 0.567143290409783…
        let (w2, w1) = (0.852_605_502_013_725_5f64, 0.567_143_290_409_783_8f64);
        let expected = 0.25 * (4.0 / (w2 * w2) - 1.0 / (w1 * w1));
        assert!((j.value - expected).abs() < 1e-14);
        assert!((j.value - 0.598).abs() < 1e-3);
        assert_eq!(j.value, j.last_term);
    }

    #[test]
    fn j2_sums_grow() {
        let sums = j2_partial_sums(1000).unwrap();
        assert_eq!(sums.len(), 999);
        assert!(sums.windows(2).all(|w| w[1].value > w[0].value));
        assert!(sums[998].value > sums[98].value && sums[98].value > sums[8].value);
        assert!(j2_partial(1).is_err());
    }

    #[test]
    fn harmonic_regimes_agree() {
        let direct = harmonic(1000);
        let x = 1000f64;
        let asym = x.ln() + EULER_GAMMA + 0.5 / x - 1.0 / (12.0 * x * x);
        assert!((direct - asym).abs() < 1e-12);
        assert_eq!(harmonic(1), 1.0);
        assert!((harmonic(4) - 25.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn c_k_small_arguments() {
        // k = 3: A = 3 ln 3 ≈ 3.2958, cutoff 4, mean 1/2+1/3+1/4 over 3/4.
        let expected = 3.0 / (3.0 * 3f64.ln()) * (13.0 / 12.0) / 0.75;
        assert!((c_k(3).unwrap() - expected).abs() < 1e-14);
        assert!(c_k(1).is_err());
    }

    #[test]
    fn gap_is_small_and_shrinking() {
        let g3 = w_asymptotic_gap(1e3).unwrap();
        let g9 = w_asymptotic_gap(1e9).unwrap();
        assert!(g3 > 0.1 && g3 < 0.3, "gap(1e3) = {g3}");
        assert!(g9 < g3 && g9 > 0.0);
        assert!(w_asymptotic_gap(1.0).is_err());
    }
}
