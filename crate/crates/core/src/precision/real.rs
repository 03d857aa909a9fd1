//! Fixed-point reals with a conservative absolute error bound.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Mutex;

use num_bigint::{BigInt, Sign};
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest scale (bits after the binary point) the error bookkeeping supports.
/// Error bounds are kept as `f64`, which cannot represent `2^-s` much past this.
pub const MAX_SCALE: u32 = 1000;

/// `2^-bits` as an `f64`.
pub(crate) fn ulp(bits: u32) -> f64 {
    (-(bits as f64)).exp2()
}

/// Upper bound on `a + b` for nonnegative bounds. Rounds away the `f64`
/// addition error.
pub(crate) fn bound_add(a: f64, b: f64) -> f64 {
    (a + b) * (1.0 + 4.0 * f64::EPSILON)
}

pub(crate) fn bound_mul(a: f64, b: f64) -> f64 {
    a * b * (1.0 + 4.0 * f64::EPSILON)
}

/// Rounds `n / 2^shift` to the nearest integer (ties away from zero).
pub(crate) fn shift_round(n: &BigInt, shift: u32) -> BigInt {
    if shift == 0 {
        return n.clone();
    }
    let half = BigInt::one() << (shift - 1);
    match n.sign() {
        Sign::Minus => -((-n + half) >> shift),
        _ => (n + half) >> shift,
    }
}

/// Rounds `num / den` to the nearest integer, `den > 0`.
pub(crate) fn div_round(num: &BigInt, den: &BigInt) -> BigInt {
    let twice = num << 1u32;
    let (q, _) = (twice + den).div_mod_floor(&(den << 1u32));
    q
}

/// A real number `mantissa · 2^-scale` known to lie within `error` of the
/// quantity it approximates.
///
/// Arithmetic propagates error bounds conservatively: the bound of a result
/// is the sum of the operand bounds (scaled where needed) plus the rounding
/// committed by the operation itself.
#[derive(Clone, Debug, PartialEq)]
pub struct HighPrecisionReal {
    mantissa: BigInt,
    scale: u32,
    error: f64,
}

impl HighPrecisionReal {
    pub fn zero() -> Self {
        Self::from_integer(BigInt::zero())
    }

    pub fn one() -> Self {
        Self::from_integer(BigInt::one())
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self {
            mantissa: n.into(),
            scale: 0,
            error: 0.0,
        }
    }

    /// Builds `mantissa · 2^-scale` with the given absolute error bound.
    pub fn from_parts(mantissa: BigInt, scale: u32, error: f64) -> Self {
        assert!(error >= 0.0 && !error.is_nan(), "error bound must be nonnegative");
        Self {
            mantissa,
            scale,
            error,
        }
    }

    /// Nearest value at `scale`; the rounding (at most half an ulp) is
    /// recorded in the error bound.
    pub fn from_rational(r: &BigRational, scale: u32) -> Self {
        let num = r.numer() << scale;
        let den = r.denom();
        let (q, rem) = num.div_mod_floor(den);
        if rem.is_zero() {
            return Self::from_parts(q, scale, 0.0);
        }
        Self::from_parts(div_round(&num, den), scale, ulp(scale + 1))
    }

    /// The exact dyadic value of a finite `f64`.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return crate::error::domain("x", x, "finite");
        }
        let r = BigRational::from_float(x).expect("finite float");
        let den_bits = r.denom().bits().saturating_sub(1) as u32;
        Ok(Self::from_parts(r.numer().clone(), den_bits, 0.0))
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn error_bound(&self) -> f64 {
        self.error
    }

    pub fn is_exact(&self) -> bool {
        self.error == 0.0
    }

    /// Adds `extra` to the error bound.
    pub fn widen(mut self, extra: f64) -> Self {
        assert!(extra >= 0.0);
        self.error = bound_add(self.error, extra);
        self
    }

    /// Whether the error bound is at most `2^-bits`.
    pub fn certifies(&self, bits: u32) -> bool {
        self.error <= ulp(bits)
    }

    /// Exact value of the stored centre.
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.mantissa.clone(), BigInt::one() << self.scale)
    }

    /// Nearest `f64` to the stored centre.
    pub fn to_f64(&self) -> f64 {
        let bits = self.mantissa.bits() as i64;
        // Keep 64 significant bits so the integer conversion cannot overflow.
        let drop = (bits - 64).max(0);
        let top = (&self.mantissa >> drop as usize).to_f64().unwrap_or(f64::NAN);
        let exp = drop - self.scale as i64;
        if exp < -1000 {
            // Two steps to stay clear of intermediate underflow.
            top * ((exp + 1000) as f64).exp2() * (-1000f64).exp2()
        } else {
            top * (exp as f64).exp2()
        }
    }

    /// Upper bound on the magnitude of the approximated quantity.
    pub fn abs_upper(&self) -> f64 {
        let c = self.to_f64().abs();
        bound_add(c * (1.0 + 4.0 * f64::EPSILON), self.error)
    }

    /// Upper bound on `|a − b|` for the quantities `a` and `b` approximated
    /// by `self` and `other`.
    pub fn distance_upper(&self, other: &Self) -> f64 {
        let d = (self - other).without_error();
        bound_add(d.abs_upper(), bound_add(self.error, other.error))
    }

    fn without_error(mut self) -> Self {
        self.error = 0.0;
        self
    }

    /// Rounds the centre to `scale` bits, recording the rounding.
    pub fn rescale(&self, scale: u32) -> Self {
        match scale.cmp(&self.scale) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => Self {
                mantissa: &self.mantissa << (scale - self.scale),
                scale,
                error: self.error,
            },
            Ordering::Less => {
                let shift = self.scale - scale;
                let m = shift_round(&self.mantissa, shift);
                let exact = (&m << shift) == self.mantissa;
                let err = if exact {
                    self.error
                } else {
                    bound_add(self.error, ulp(scale + 1))
                };
                Self::from_parts(m, scale, err)
            }
        }
    }

    /// Exact multiplication by an integer; the error bound scales by `|n|`.
    pub fn mul_integer(&self, n: &BigInt) -> Self {
        let factor = n.abs().to_f64().unwrap_or(f64::INFINITY);
        Self {
            mantissa: &self.mantissa * n,
            scale: self.scale,
            error: bound_mul(self.error, factor),
        }
    }

    /// Product rounded to `scale` bits.
    pub fn mul(&self, other: &Self, scale: u32) -> Self {
        let raw = Self {
            mantissa: &self.mantissa * &other.mantissa,
            scale: self.scale + other.scale,
            error: 0.0,
        };
        let a = self.to_f64().abs();
        let b = other.to_f64().abs();
        let prop = bound_add(
            bound_add(bound_mul(a, other.error), bound_mul(b, self.error)),
            bound_mul(self.error, other.error),
        );
        raw.rescale(scale).widen(prop)
    }

    /// Quotient rounded to `scale` bits. `other` must be bounded away from
    /// zero by more than its own error.
    pub fn div(&self, other: &Self, scale: u32) -> Result<Self> {
        let b = other.to_f64().abs();
        if !(b > other.error) {
            return crate::error::domain("divisor", other.to_f64(), "bounded away from zero");
        }
        // mantissa_q = (a_m / 2^sa) / (b_m / 2^sb) · 2^scale
        let shift = scale as i64 + other.scale as i64 - self.scale as i64;
        let (num, den) = if shift >= 0 {
            (&self.mantissa << shift as usize, other.mantissa.clone())
        } else {
            (self.mantissa.clone(), &other.mantissa << (-shift) as usize)
        };
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num, den) };
        let q = div_round(&num, &den);
        let a = self.to_f64().abs();
        let blo = b - other.error;
        // |a/b − a'/b'| ≤ (ea + |a|/|b|·eb) / (|b| − eb)
        let prop = bound_mul(bound_add(self.error, bound_mul(a / b, other.error)), 1.0 / blo)
            * (1.0 + 8.0 * f64::EPSILON);
        Ok(Self::from_parts(q, scale, bound_add(prop, ulp(scale + 1))))
    }

    /// Compares centres, returning `None` when the error intervals overlap.
    pub fn certified_cmp(&self, other: &Self) -> Option<Ordering> {
        let d = self - other;
        let centre = d.to_f64();
        if centre.abs() > d.error * (1.0 + 1e-9) {
            centre.partial_cmp(&0.0)
        } else {
            None
        }
    }

    /// Decimal rendering of the centre with `digits` fractional digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        let ten = BigInt::from(10u32).pow(digits as u32);
        let scaled = shift_round(&(&self.mantissa * ten), self.scale);
        let neg = scaled.is_negative();
        let s = scaled.abs().to_string();
        let s = if s.len() <= digits {
            format!("{}{}", "0".repeat(digits + 1 - s.len()), s)
        } else {
            s
        };
        let (int, frac) = s.split_at(s.len() - digits);
        let sign = if neg { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }

    /// `e^self` with `scale` bits after the binary point.
    pub fn exp(&self, scale: u32) -> Self {
        let (m, err) = exp_fixed(&self.mantissa, self.scale, scale);
        let centre = Self::from_parts(m, scale, 0.0);
        // Input error δ moves e^x by at most e^x·(e^δ − 1).
        let ex = centre.to_f64().abs();
        let prop = if self.error == 0.0 {
            0.0
        } else {
            bound_mul(ex, self.error.exp_m1() * (1.0 + 1e-12)) * 1.0001
        };
        centre.widen(bound_add(err, prop))
    }
}

impl fmt::Display for HighPrecisionReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.17e} ± {:.3e}", self.to_f64(), self.error)
    }
}

fn add_impl(a: &HighPrecisionReal, b: &HighPrecisionReal, negate_b: bool) -> HighPrecisionReal {
    let scale = a.scale.max(b.scale);
    let am = &a.mantissa << (scale - a.scale);
    let bm = &b.mantissa << (scale - b.scale);
    let mantissa = if negate_b { am - bm } else { am + bm };
    let error = if a.error == 0.0 && b.error == 0.0 {
        0.0
    } else {
        bound_add(a.error, b.error)
    };
    HighPrecisionReal {
        mantissa,
        scale,
        error,
    }
}

impl Add for &HighPrecisionReal {
    type Output = HighPrecisionReal;
    fn add(self, rhs: Self) -> HighPrecisionReal {
        add_impl(self, rhs, false)
    }
}

impl Sub for &HighPrecisionReal {
    type Output = HighPrecisionReal;
    fn sub(self, rhs: Self) -> HighPrecisionReal {
        add_impl(self, rhs, true)
    }
}

impl Add for HighPrecisionReal {
    type Output = HighPrecisionReal;
    fn add(self, rhs: Self) -> HighPrecisionReal {
        add_impl(&self, &rhs, false)
    }
}

impl Sub for HighPrecisionReal {
    type Output = HighPrecisionReal;
    fn sub(self, rhs: Self) -> HighPrecisionReal {
        add_impl(&self, &rhs, true)
    }
}

impl Neg for HighPrecisionReal {
    type Output = HighPrecisionReal;
    fn neg(mut self) -> HighPrecisionReal {
        self.mantissa = -self.mantissa;
        self
    }
}

pub(crate) fn check_scale(bits: u32) -> Result<()> {
    if bits > MAX_SCALE {
        Err(Error::PrecisionTooHigh(bits))
    } else {
        Ok(())
    }
}

// ln 2 cache: (scale, mantissa) with |mantissa·2^-scale − ln 2| ≤ 2^-scale.
static LN2: Mutex<Option<(u32, BigInt)>> = Mutex::new(None);

/// ln 2 at `scale` bits, error at most `2^-scale`.
pub(crate) fn ln2_fixed(scale: u32) -> BigInt {
    {
        let cache = LN2.lock().unwrap();
        if let Some((s, m)) = cache.as_ref() {
            if *s >= scale + 2 {
                return shift_round(m, s - scale);
            }
        }
    }
    let target = (scale + 64).max(512);
    let m = ln2_series(target);
    let out = shift_round(&m, target - scale);
    *LN2.lock().unwrap() = Some((target, m));
    out
}

// ln 2 = 2·atanh(1/3) = Σ 2/((2i+1)·3^(2i+1)).
fn ln2_series(scale: u32) -> BigInt {
    let work = scale + 16;
    let one = BigInt::one() << work;
    let mut power = &one / 3u32; // 3^-(2i+1), truncated
    let mut sum = BigInt::zero();
    let mut i = 0u32;
    while !power.is_zero() {
        sum += (&power << 1u32) / (2 * i + 1);
        power /= 9u32;
        i += 1;
    }
    // Each truncation loses < 1 unit at `work`; ~scale/3 terms.
    shift_round(&sum, 16)
}

/// `e^x` for `x = m · 2^-in_scale`, as a mantissa at `out_scale` plus an
/// absolute error bound.
pub(crate) fn exp_fixed(m: &BigInt, in_scale: u32, out_scale: u32) -> (BigInt, f64) {
    const HALVINGS: u32 = 10;
    let x = m.to_f64().unwrap_or(0.0) * (-(in_scale as f64)).exp2();
    // x = q·ln2 + y with |y| ≤ ln2/2 (plus rounding).
    let q = (x / std::f64::consts::LN_2).round() as i64;
    let magnitude = (q.max(0) as u32) + 1;
    let work = out_scale + magnitude + 40;
    let ln2 = ln2_fixed(work + 16);
    let x_w = if work >= in_scale {
        m << (work - in_scale)
    } else {
        shift_round(m, in_scale - work)
    };
    let y = x_w - shift_round(&(ln2 * q), 16);
    // z = y / 2^HALVINGS, kept at scale work + HALVINGS so no bits are lost.
    let zscale = work + HALVINGS;
    let one = BigInt::one() << zscale;
    let mut term = one.clone();
    let mut sum = one.clone();
    let mut n = 1u32;
    loop {
        term = shift_round(&(&term * &y), zscale) / n;
        if term.is_zero() {
            break;
        }
        sum += &term;
        n += 1;
    }
    let mut val = sum;
    for _ in 0..HALVINGS {
        val = shift_round(&(&val * &val), zscale);
    }
    // Relative error: Taylor rounding (n+2 ulps) and ln2·q (|q|+1 ulps at
    // work+16) doubled by each squaring, plus squaring roundings.
    let rel = ((n as f64 + 4.0) * ulp(zscale) + (q.unsigned_abs() as f64 + 2.0) * ulp(work + 16))
        * (1u64 << HALVINGS) as f64
        * 2.0;
    // Scale by 2^q and move to out_scale.
    let total_shift = zscale as i64 - q - out_scale as i64;
    let out = if total_shift >= 0 {
        shift_round(&val, total_shift as u32)
    } else {
        val << (-total_shift) as u32
    };
    let value = out.to_f64().unwrap_or(f64::INFINITY) * (-(out_scale as f64)).exp2();
    let err = bound_add(bound_mul(value.abs() * 1.0001, rel), ulp(out_scale));
    (out, err)
}
