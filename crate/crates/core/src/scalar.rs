//! Number types the generic routines run over.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

/// An ordered field the Lüroth map and the `ρ_{k,m}` algebra can be
/// evaluated in. Exact for [`BigRational`], rounded for `f32`/`f64`.
pub trait Scalar: Clone + PartialOrd + Debug + Num + Signed + Send + Sync {
    fn from_u64(n: u64) -> Self;

    fn from_bigint(n: &BigInt) -> Self;

    /// `⌊self⌋` when `self ≥ 0` and the result fits in a `u64`.
    fn floor_u64(&self) -> Option<u64>;

    /// Whether arithmetic in this type is exact.
    fn is_exact() -> bool;

    fn as_f64(&self) -> f64;
}

macro_rules! impl_float_scalar {
    ($f:ty) => {
        impl Scalar for $f {
            fn from_u64(n: u64) -> Self {
                n as $f
            }

            fn from_bigint(n: &BigInt) -> Self {
                <$f as FromPrimitive>::from_f64(n.to_f64().unwrap_or(f64::NAN))
                    .unwrap_or(<$f>::NAN)
            }

            fn floor_u64(&self) -> Option<u64> {
                if self.is_sign_negative() || !self.is_finite() {
                    return None;
                }
                Float::floor(*self).to_u64()
            }

            fn is_exact() -> bool {
                false
            }

            fn as_f64(&self) -> f64 {
                *self as f64
            }
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl Scalar for BigRational {
    fn from_u64(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_bigint(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }

    fn floor_u64(&self) -> Option<u64> {
        if self.is_negative() {
            return None;
        }
        self.floor().to_integer().to_u64()
    }

    fn is_exact() -> bool {
        true
    }

    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_agrees_across_types() {
        let r = BigRational::new(BigInt::from(10), BigInt::from(3));
        assert_eq!(r.floor_u64(), Some(3));
        assert_eq!((10.0f64 / 3.0).floor_u64(), Some(3));
        assert_eq!((10.0f32 / 3.0).floor_u64(), Some(3));
        assert_eq!((-0.5f64).floor_u64(), None);
        assert_eq!(f64::INFINITY.floor_u64(), None);
    }
}
