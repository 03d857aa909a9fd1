//! Continued-fraction digits of Gauss-measure random points, explored by
//! Monte Carlo.
//!
//! Digits come from iterating `G(x) = {1/x}` in double precision, which
//! loses roughly a bit per digit, so expansions are capped at
//! [`MAX_CF_DEPTH`]. The digits are stationary but not independent, so each
//! trial draws a fresh point instead of slicing one long orbit.

use std::fmt;

use crate::error::{domain, Result};
use crate::rng::RngStream;
use crate::simulation::{collect_trials, McResult, MedianResult};

/// Deepest expansion trusted from double-precision iteration.
pub const MAX_CF_DEPTH: usize = 40;

/// Minimum trial count for the Monte Carlo routines here.
pub const MIN_CF_SAMPLES: u64 = 10_000;

fn check_open_unit(x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return domain("x", x, "0 < x < 1");
    }
    Ok(())
}

/// `G(x) = 1/x − ⌊1/x⌋`.
pub fn gauss_step(x: f64) -> Result<f64> {
    check_open_unit(x)?;
    let r = 1.0 / x;
    Ok(r - r.floor())
}

/// `a(x) = ⌊1/x⌋`.
pub fn cf_digit(x: f64) -> Result<u64> {
    check_open_unit(x)?;
    Ok((1.0 / x).floor() as u64)
}

/// Inverse CDF of the Gauss measure: `2^u − 1`, whose CDF is `log₂(1 + x)`.
pub fn sample_gauss_measure(u: f64) -> Result<f64> {
    check_open_unit(u)?;
    Ok((u * std::f64::consts::LN_2).exp_m1())
}

/// `P(a₁ = n) = log₂(1 + 1/(n(n+2)))` under the Gauss measure.
pub fn gauss_kuzmin(n: u64) -> Result<f64> {
    if n < 1 {
        return domain("n", n, ">= 1");
    }
    let nf = n as f64;
    Ok((1.0 / (nf * (nf + 2.0))).ln_1p() / std::f64::consts::LN_2)
}

/// First `k` continued-fraction digits of a point.
#[derive(Clone, Debug, PartialEq)]
pub struct CfSample {
    pub seed_point: f64,
    pub digits: Vec<u64>,
}

/// Why an expansion stopped early.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HitZero {
    pub depth: usize,
}

/// Expands `x` to `k ≤ MAX_CF_DEPTH` digits; an iterate that lands on 0
/// (a rational point, or floating-point collapse) aborts the expansion.
pub fn cf_expand(x: f64, k: usize) -> Result<std::result::Result<CfSample, HitZero>> {
    check_open_unit(x)?;
    if k < 1 || k > MAX_CF_DEPTH {
        return domain("k", k, "1 <= k <= 40");
    }
    Ok(expand_unchecked(x, k))
}

fn expand_unchecked(x: f64, k: usize) -> std::result::Result<CfSample, HitZero> {
    let mut digits = Vec::with_capacity(k);
    let mut cur = x;
    for depth in 0..k {
        if cur <= 0.0 {
            return Err(HitZero { depth });
        }
        let r = 1.0 / cur;
        let a = r.floor();
        // `as` saturates, so a subnormal iterate cannot wrap around.
        digits.push(a as u64);
        cur = r - a;
    }
    Ok(CfSample {
        seed_point: x,
        digits,
    })
}

fn gauss_trial(stream: RngStream, k: usize) -> std::result::Result<CfSample, HitZero> {
    let u = stream.draws().next_open_unit();
    let x = (u * std::f64::consts::LN_2).exp_m1();
    expand_unchecked(x, k)
}

/// A Monte Carlo estimate with the count of trials that hit zero. Aborted
/// trials are excluded from the estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CfRhoResult {
    pub k: usize,
    pub result: McResult,
    pub aborted: u64,
}

fn unique_max(digits: &[u64]) -> bool {
    let max = *digits.iter().max().expect("nonempty");
    digits.iter().filter(|&&d| d == max).count() == 1
}

fn check_cf(k: usize, samples: u64) -> Result<()> {
    if k < 1 || k > MAX_CF_DEPTH {
        return domain("k", k, "1 <= k <= 40");
    }
    if samples < MIN_CF_SAMPLES {
        return domain("samples", samples, ">= 10000");
    }
    Ok(())
}

/// `μ_G`-probability that the maximum of `a₁..a_k` is attained once.
pub fn mc_cf_rho(k: usize, samples: u64, seed: u64) -> Result<CfRhoResult> {
    Ok(mc_cf_rho_curve(k, samples, seed)?.pop().expect("k >= 1"))
}

/// [`mc_cf_rho`] for every prefix length `1..=k_max` of the same trials.
pub fn mc_cf_rho_curve(k_max: usize, samples: u64, seed: u64) -> Result<Vec<CfRhoResult>> {
    check_cf(k_max, samples)?;
    // Per trial: None if aborted, else the uniqueness flag of every prefix.
    let trials: Vec<Option<Vec<bool>>> = collect_trials(samples, seed, |s| {
        gauss_trial(s, k_max).ok().map(|sample| {
            (1..=k_max).map(|k| unique_max(&sample.digits[..k])).collect()
        })
    });
    let aborted = trials.iter().filter(|t| t.is_none()).count() as u64;
    let completed = samples - aborted;
    (1..=k_max)
        .map(|k| {
            let hits = trials
                .iter()
                .flatten()
                .filter(|flags| flags[k - 1])
                .count() as u64;
            Ok(CfRhoResult {
                k,
                result: McResult::from_counts(hits, completed.max(1), seed),
                aborted,
            })
        })
        .collect()
}

/// Which reference constant a statistic is nearer to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NearerConstant {
    /// `ln 2 ≈ 0.693`
    Ln2,
    /// `1/ln 2 ≈ 1.443`
    InvLn2,
}

impl fmt::Display for NearerConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NearerConstant::Ln2 => "ln2",
            NearerConstant::InvLn2 => "1/ln2",
        })
    }
}

/// Median of `(Σaᵢ − max aᵢ)/(k ln k)`, reported against both `ln 2` and
/// `1/ln 2` without asserting either.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CfTrimmedResult {
    pub k: usize,
    pub summary: MedianResult,
    pub aborted: u64,
    pub nearer: NearerConstant,
}

pub fn mc_cf_trimmed(k: usize, samples: u64, seed: u64) -> Result<CfTrimmedResult> {
    check_cf(k, samples)?;
    if k < 2 {
        return domain("k", k, ">= 2");
    }
    let kf = k as f64;
    let trials: Vec<Option<f64>> = collect_trials(samples, seed, |s| {
        gauss_trial(s, k).ok().map(|sample| {
            let sum: u128 = sample.digits.iter().map(|&d| d as u128).sum();
            let max = *sample.digits.iter().max().unwrap() as u128;
            (sum - max) as f64 / (kf * kf.ln())
        })
    });
    let aborted = trials.iter().filter(|t| t.is_none()).count() as u64;
    let values: Vec<f64> = trials.into_iter().flatten().collect();
    let summary = MedianResult::from_values(values, seed);
    let ln2 = std::f64::consts::LN_2;
    let nearer = if (summary.median - ln2).abs() <= (summary.median - 1.0 / ln2).abs() {
        NearerConstant::Ln2
    } else {
        NearerConstant::InvLn2
    };
    Ok(CfTrimmedResult {
        k,
        summary,
        aborted,
        nearer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_ratio_is_fixed() {
        let phi_inv = (5f64.sqrt() - 1.0) / 2.0;
        assert_eq!(cf_digit(phi_inv).unwrap(), 1);
        assert!((gauss_step(phi_inv).unwrap() - phi_inv).abs() < 1e-15);
    }

    #[test]
    fn exact_reciprocals() {
        assert_eq!(cf_digit(0.25).unwrap(), 4);
        assert_eq!(gauss_step(0.25).unwrap(), 0.0);
        assert_eq!(cf_digit(2.0 / 7.0).unwrap(), 3);
        assert!((gauss_step(2.0 / 7.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(gauss_step(0.0).is_err() && gauss_step(1.0).is_err());
    }

    #[test]
    fn expansion_of_rational_hits_zero() {
        assert_eq!(cf_expand(0.25, 3).unwrap(), Err(HitZero { depth: 1 }));
        let s = cf_expand(2.0 / 7.0, 1).unwrap().unwrap();
        assert_eq!(s.digits, vec![3]);
        assert!(cf_expand(0.3, 41).is_err());
    }

    #[test]
    fn gauss_sampler_endpoints() {
        assert!((sample_gauss_measure(0.5).unwrap() - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        let lo = sample_gauss_measure(1e-12).unwrap();
        assert!(lo > 0.0 && lo < 1e-11);
        let hi = sample_gauss_measure(1.0 - 1e-12).unwrap();
        assert!(hi < 1.0 && hi > 1.0 - 1e-11);
    }

    #[test]
    fn gauss_kuzmin_sums_to_one() {
        // Σ_{n≤N} telescopes to log₂(2(N+1)/(N+2)).
        let n = 1000u64;
        let s: f64 = (1..=n).map(|i| gauss_kuzmin(i).unwrap()).sum();
        let expected = (2.0 * (n as f64 + 1.0) / (n as f64 + 2.0)).log2();
        assert!((s - expected).abs() < 1e-12);
    }

    #[test]
    fn single_digit_max_is_unique() {
        let r = mc_cf_rho(1, 10_000, 1).unwrap();
        assert_eq!(r.result.estimate, 1.0);
    }

    #[test]
    fn k2_trimmed_is_the_minimum() {
        let r = mc_cf_trimmed(2, 10_000, 4).unwrap();
        assert!(r.summary.lower_quartile >= 1.0 / (2.0 * 2f64.ln()) - 1e-12);
    }

    #[test]
    fn curve_matches_single_calls() {
        let curve = mc_cf_rho_curve(5, 10_000, 9).unwrap();
        let single = mc_cf_rho(5, 10_000, 9).unwrap();
        assert_eq!(curve[4], single);
        assert_eq!(curve.len(), 5);
    }
}
