//! Reproducible Monte Carlo over IID Lüroth digits.
//!
//! Trial `i` of a run with seed `s` draws from [`RngStream`] `(s, i)`.
//! Trials are grouped into fixed-size chunks, chunk results are collected
//! in order and reduced sequentially, so every estimate is bit-identical
//! for any rayon pool size.

use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::luroth::max_cdf_exact;
use crate::rng::RngStream;

const TRIAL_CHUNK: u64 = 4096;

/// Minimum trial count for [`mc_rho`] and [`mc_max_scaled_cdf`].
pub const MIN_SAMPLES: u64 = 100;

/// A mean-type Monte Carlo estimate; `standard_error` is the sample
/// standard deviation over `√samples`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McResult {
    pub estimate: f64,
    pub standard_error: f64,
    pub samples: u64,
    pub seed: u64,
}

impl McResult {
    /// Estimate of a Bernoulli success probability.
    pub fn from_counts(successes: u64, samples: u64, seed: u64) -> Self {
        assert!(samples > 0 && successes <= samples);
        let n = samples as f64;
        let p = successes as f64 / n;
        let se = if samples > 1 {
            // s² = n/(n−1) · p(1−p), SE = s/√n
            (p * (1.0 - p) / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self {
            estimate: p,
            standard_error: se,
            samples,
            seed,
        }
    }

    /// Whether `value` lies within `sigmas` standard errors of the estimate.
    pub fn agrees_with(&self, value: f64, sigmas: f64) -> bool {
        (self.estimate - value).abs() <= sigmas * self.standard_error
    }
}

/// A median estimate with quartiles. The standard error comes from the
/// order statistics bracketing the median at ±½√n ranks (about one sigma).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MedianResult {
    pub median: f64,
    pub standard_error: f64,
    pub lower_quartile: f64,
    pub upper_quartile: f64,
    pub samples: u64,
    pub seed: u64,
}

impl MedianResult {
    pub fn from_values(mut values: Vec<f64>, seed: u64) -> Self {
        assert!(!values.is_empty());
        values.sort_by(f64::total_cmp);
        let n = values.len();
        let half_width = ((n as f64).sqrt() / 2.0).ceil() as usize;
        let mid = n / 2;
        let lo = mid.saturating_sub(half_width);
        let hi = (mid + half_width).min(n - 1);
        Self {
            median: median_sorted(&values),
            standard_error: (values[hi] - values[lo]) / 2.0,
            lower_quartile: values[n / 4],
            upper_quartile: values[(3 * n) / 4],
            samples: n as u64,
            seed,
        }
    }

    pub fn interquartile_range(&self) -> f64 {
        self.upper_quartile - self.lower_quartile
    }
}

fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Median of a slice (NaNs sort last).
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    median_sorted(&v)
}

fn chunks(samples: u64) -> impl IndexedParallelIterator<Item = std::ops::Range<u64>> {
    (0..samples.div_ceil(TRIAL_CHUNK) as usize)
        .into_par_iter()
        .map(move |c| {
            let c = c as u64;
            c * TRIAL_CHUNK..((c + 1) * TRIAL_CHUNK).min(samples)
        })
}

/// Number of trials `i < samples` for which `trial(RngStream(seed, i))` holds.
pub fn count_successes<F>(samples: u64, seed: u64, trial: F) -> u64
where
    F: Fn(RngStream) -> bool + Sync,
{
    let per_chunk: Vec<u64> = chunks(samples)
        .map(|r| r.filter(|&i| trial(RngStream::new(seed, i))).count() as u64)
        .collect();
    per_chunk.into_iter().sum()
}

/// `f(RngStream(seed, i))` for every trial, in trial order.
pub fn collect_trials<T, F>(samples: u64, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(RngStream) -> T + Sync,
{
    let per_chunk: Vec<Vec<T>> = chunks(samples)
        .map(|r| r.map(|i| f(RngStream::new(seed, i))).collect())
        .collect();
    per_chunk.into_iter().flatten().collect()
}

/// Whether the maximum of `k` fresh digits is attained exactly once.
fn unique_max_trial(stream: RngStream, k: u64) -> bool {
    let mut draws = stream.draws();
    let mut max = 0u64;
    let mut multiplicity = 0u32;
    for _ in 0..k {
        let d = draws.next_digit();
        if d > max {
            max = d;
            multiplicity = 1;
        } else if d == max {
            multiplicity += 1;
        }
    }
    multiplicity == 1
}

fn check_trials(k: u64, samples: u64) -> Result<()> {
    if k < 1 {
        return domain("k", k, ">= 1");
    }
    if samples < MIN_SAMPLES {
        return domain("samples", samples, ">= 100");
    }
    Ok(())
}

/// Fraction of trials in which the maximum of `k` digits is unique.
pub fn mc_rho(k: u64, samples: u64, seed: u64) -> Result<McResult> {
    check_trials(k, samples)?;
    let hits = count_successes(samples, seed, |s| unique_max_trial(s, k));
    Ok(McResult::from_counts(hits, samples, seed))
}

/// Largest digit value `n` with `n < c·k`, i.e. `⌈ck⌉ − 1`.
fn scaled_threshold(k: u64, c: f64) -> Result<u64> {
    if !(c > 0.0) || !c.is_finite() {
        return domain("c", c, "finite and > 0");
    }
    let ck = c * k as f64;
    if ck >= 9.2e18 {
        return domain("c*k", ck, "< 2^63");
    }
    Ok(ck.ceil() as u64 - 1)
}

/// Estimate of `P(M_k / k < c)`.
pub fn mc_max_scaled_cdf(k: u64, c: f64, samples: u64, seed: u64) -> Result<McResult> {
    check_trials(k, samples)?;
    let bound = scaled_threshold(k, c)?;
    let hits = count_successes(samples, seed, |s| {
        let mut draws = s.draws();
        (0..k).all(|_| draws.next_digit() <= bound)
    });
    Ok(McResult::from_counts(hits, samples, seed))
}

/// Exact finite-`k` value of `P(M_k/k < c) = (1 − 1/⌈ck⌉)^k`.
pub fn max_scaled_cdf_exact(k: u64, c: f64) -> Result<f64> {
    if k < 1 {
        return domain("k", k, ">= 1");
    }
    let bound = scaled_threshold(k, c)?;
    if bound == 0 {
        return Ok(0.0);
    }
    Ok(max_cdf_exact(k, bound)?.to_f64())
}

/// Limit `e^{−1/c}` of `P(M_k/k < c)`.
pub fn max_scaled_cdf_limit(c: f64) -> f64 {
    (-1.0 / c).exp()
}

/// `(S − M)/(k ln k)` from exact integer sum and maximum.
pub fn trimmed_statistic(sum: u128, max: u64, k: u64) -> f64 {
    let kf = k as f64;
    (sum - max as u128) as f64 / (kf * kf.ln())
}

fn check_checkpoints(k_max: u64, checkpoints: &[u64]) -> Result<()> {
    if checkpoints.is_empty() {
        return domain("checkpoints", "[]", "nonempty");
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return domain("checkpoints", format!("{checkpoints:?}"), "strictly increasing");
    }
    if checkpoints[0] < 2 || *checkpoints.last().unwrap() > k_max {
        return domain("checkpoints", format!("{checkpoints:?}"), "within [2, k_max]");
    }
    Ok(())
}

/// One sample path `X₁..X_{k_max}` (stream 0 of `seed`), reporting
/// `(S_k − M_k)/(k ln k)` at each checkpoint.
pub fn mc_trimmed_trajectory(k_max: u64, checkpoints: &[u64], seed: u64) -> Result<Vec<(u64, f64)>> {
    check_checkpoints(k_max, checkpoints)?;
    let mut draws = RngStream::new(seed, 0).draws();
    let mut sum: u128 = 0;
    let mut max = 0u64;
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().peekable();
    for k in 1..=*checkpoints.last().unwrap() {
        let d = draws.next_digit();
        sum += d as u128;
        max = max.max(d);
        if next.peek() == Some(&&k) {
            out.push((k, trimmed_statistic(sum, max, k)));
            next.next();
        }
    }
    Ok(out)
}

/// [`mc_trimmed_trajectory`] for several seeds, in seed order.
pub fn trimmed_ensemble(
    k_max: u64,
    checkpoints: &[u64],
    seeds: &[u64],
) -> Result<Vec<Vec<(u64, f64)>>> {
    check_checkpoints(k_max, checkpoints)?;
    seeds
        .par_iter()
        .map(|&s| mc_trimmed_trajectory(k_max, checkpoints, s))
        .collect()
}

/// Median over trials of `(S_k − k ln k)/k`.
///
/// The limit is a Cauchy law whose location and scale are not pinned down
/// here, so callers should only rely on boundedness and tightness of the
/// median and quartiles. The mean does not exist.
pub fn mc_stable_centering(k: u64, samples: u64, seed: u64) -> Result<MedianResult> {
    if k < 100 {
        return domain("k", k, ">= 100");
    }
    if samples < 1 {
        return domain("samples", samples, ">= 1");
    }
    let kf = k as f64;
    let centre = kf * kf.ln();
    let values = collect_trials(samples, seed, |s| {
        let mut draws = s.draws();
        let sum: u128 = (0..k).map(|_| draws.next_digit() as u128).sum();
        (sum as f64 - centre) / kf
    });
    Ok(MedianResult::from_values(values, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_standard_error() {
        let r = McResult::from_counts(50, 100, 0);
        assert_eq!(r.estimate, 0.5);
        assert!((r.standard_error - (0.25f64 / 99.0).sqrt()).abs() < 1e-15);
        assert_eq!(McResult::from_counts(100, 100, 0).standard_error, 0.0);
    }

    #[test]
    fn single_digit_maximum_is_always_unique() {
        let r = mc_rho(1, 1000, 5).unwrap();
        assert_eq!(r.estimate, 1.0);
        assert_eq!(r.standard_error, 0.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(mc_rho(0, 1000, 0).is_err());
        assert!(mc_rho(2, 10, 0).is_err());
        assert!(mc_max_scaled_cdf(10, 0.0, 1000, 0).is_err());
        assert!(mc_trimmed_trajectory(10, &[5, 3], 0).is_err());
        assert!(mc_trimmed_trajectory(10, &[1, 3], 0).is_err());
        assert!(mc_trimmed_trajectory(10, &[3, 11], 0).is_err());
        assert!(mc_stable_centering(10, 100, 0).is_err());
    }

    #[test]
    fn trimmed_statistic_at_two_is_the_minimum() {
        for seed in 0..50 {
            let path = mc_trimmed_trajectory(2, &[2], seed).unwrap();
            let mut d = RngStream::new(seed, 0).draws();
            let (a, b) = (d.next_digit(), d.next_digit());
            let expected = a.min(b) as f64 / (2.0 * 2f64.ln());
            assert_eq!(path, vec![(2, expected)]);
            assert!(expected >= 1.0 / (2.0 * 2f64.ln()));
        }
    }

    #[test]
    fn huge_scale_cdf_is_one() {
        let r = mc_max_scaled_cdf(1000, 1e6, 1000, 3).unwrap();
        assert!((r.estimate - 1.0).abs() <= r.standard_error.max(1e-3));
    }

    #[test]
    fn exact_scaled_cdf_threshold() {
        // c·k integer: M < ck means M ≤ ck − 1.
        let v = max_scaled_cdf_exact(1000, 1.0).unwrap();
        assert!((v - (1000.0 * (-1.0f64 / 1000.0).ln_1p()).exp()).abs() < 1e-14);
        assert_eq!(max_scaled_cdf_exact(2, 0.25).unwrap(), 0.0);
    }

    #[test]
    fn median_helpers() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        let m = MedianResult::from_values((0..101).map(f64::from).collect(), 0);
        assert_eq!(m.median, 50.0);
        assert_eq!(m.lower_quartile, 25.0);
        assert_eq!(m.upper_quartile, 75.0);
        assert!(m.standard_error > 0.0);
    }
}
