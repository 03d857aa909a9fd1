//! Principal branch of the Lambert W function on `x ≥ 0`.

use num_bigint::BigInt;
use num_traits::{Float, Signed};

use super::real::{bound_add, check_scale, ulp, HighPrecisionReal};
use crate::error::{domain, Result};

/// `W(x)` in the working float type, for `x ≥ 0`.
///
/// Seeds with `x(1 − x)` near zero, Winitzki's approximation on `(1/4, e]`
/// and `L₁ − L₂ + L₂/L₁` above `e`. Below `e` the iteration is Halley's on
/// `w·e^w − x`; above `e` it is Newton's on `w + ln w − ln x`, which does
/// not overflow for large `x`.
pub fn lambert_w0_float<T: Float>(x: T) -> Option<T> {
    if x.is_nan() || x < T::zero() {
        return None;
    }
    if x.is_infinite() {
        return Some(x);
    }
    if x == T::zero() {
        return Some(T::zero());
    }
    let one = T::one();
    let two = one + one;
    let e = one.exp();
    let eps = T::epsilon();
    let quarter = one / (two * two);
    if x <= e {
        let mut w = if x < quarter {
            x * (one - x)
        } else {
            let l = x.ln_1p();
            l * (one - (one + l).ln() / (two + l))
        };
        for _ in 0..40 {
            let ew = w.exp();
            let f = w * ew - x;
            let wp1 = w + one;
            let step = f / (ew * wp1 - (w + two) * f / (two * wp1));
            w = w - step;
            if step.abs() <= two * eps * w.abs() {
                break;
            }
        }
        Some(w)
    } else {
        let lx = x.ln();
        let l2 = lx.ln();
        let mut w = lx - l2 + l2 / lx;
        for _ in 0..40 {
            let f = w + w.ln() - lx;
            let step = f * w / (w + one);
            w = w - step;
            if step.abs() <= two * eps * w.abs() {
                break;
            }
        }
        Some(w)
    }
}

/// `W(x)` on the principal branch, to `precision_bits`.
///
/// The returned centre `w ≥ 0` satisfies `|w·e^w − x| ≤ 2^-p·max(1, x)`,
/// checked after the fact with the propagated evaluation error included.
/// The error bound of the result bounds `|w − W(x)|`.
pub fn lambert_w0(x: f64, precision_bits: u32) -> Result<HighPrecisionReal> {
    if !(x >= 0.0) || !x.is_finite() {
        return domain("x", x, "finite and >= 0");
    }
    if x == 0.0 {
        return Ok(HighPrecisionReal::zero());
    }
    let x_hp = HighPrecisionReal::from_f64(x)?;
    let size = x.max(1.0);
    let tolerance = ulp(precision_bits) * size;
    let scale = precision_bits + 48 + size.log2().ceil() as u32;
    check_scale(scale + 64)?;

    let seed = lambert_w0_float(x).expect("x >= 0");
    let mut w = HighPrecisionReal::from_f64(seed)?.rescale(scale);
    for _ in 0..12 {
        let ew = w.exp(scale + 16);
        let residual = (&w.mul(&ew, scale + 16) - &x_hp).rescale(scale + 8);
        let res_upper = residual.abs_upper();
        if res_upper <= tolerance {
            // |w − W(x)| ≤ |g(w) − x| / min g' between them; g' = e^w (w+1)
            // and the two points are so close that a 1% cushion covers it.
            let slope = ew.to_f64() * (w.to_f64() + 1.0);
            let err = bound_add(res_upper / slope * 1.01, 0.0);
            let centre = if w.mantissa().is_negative() {
                HighPrecisionReal::zero()
            } else {
                HighPrecisionReal::from_parts(w.mantissa().clone(), w.scale(), 0.0)
            };
            return Ok(centre.widen(err));
        }
        // Newton step on centres; the next pass re-certifies the residual.
        let slope = ew.mul(&(&w + &HighPrecisionReal::one()), scale + 16);
        let step = strip(&residual).div(&strip(&slope), scale + 8)?;
        w = strip(&(&w - &step)).rescale(scale);
    }
    Err(crate::error::Error::Uncertified {
        target: precision_bits,
        achieved: f64::NAN,
    })
}

fn strip(x: &HighPrecisionReal) -> HighPrecisionReal {
    HighPrecisionReal::from_parts(x.mantissa().clone(), x.scale(), 0.0)
}

/// `W(n)` for consecutive integers `1..=n_max` at `precision_bits`.
pub fn lambert_w0_integers(n_max: u64, precision_bits: u32) -> Result<Vec<HighPrecisionReal>> {
    use rayon::prelude::*;
    (1..=n_max)
        .into_par_iter()
        .map(|n| lambert_w0(n as f64, precision_bits))
        .collect()
}

/// Mantissa of `1/w²` at `scale`, for `w` bounded away from zero.
pub(crate) fn inverse_square(w: &HighPrecisionReal, scale: u32) -> BigInt {
    let m = w.mantissa();
    let num = BigInt::from(1u8) << (scale + 2 * w.scale());
    super::real::div_round(&num, &(m * m))
}
