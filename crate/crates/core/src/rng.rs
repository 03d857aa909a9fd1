//! Addressable random streams.
//!
//! A draw is identified by `(seed, stream, index)` and is a pure function of
//! those three numbers: the key is derived from `seed`, the ChaCha8 stream
//! id is `stream`, and the block position is `index`. Monte Carlo trials use
//! their trial number as the stream, so results do not depend on which
//! worker runs which trial.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TWO_POW_63: u64 = 1 << 63;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Cursor positioned at draw 0.
    pub fn draws(&self) -> Draws {
        self.draws_from(0)
    }

    /// Cursor positioned at draw `index`.
    pub fn draws_from(&self, index: u64) -> Draws {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        // One draw is one u64, i.e. two 32-bit words.
        rng.set_word_pos(2 * index as u128);
        Draws { rng }
    }
}

pub struct Draws {
    rng: ChaCha8Rng,
}

impl Draws {
    pub fn next_bits(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `(0, 1)` with 53 random bits; never 0 or 1.
    pub fn next_open_unit(&mut self) -> f64 {
        ((self.next_bits() >> 11) as f64 + 0.5) * (-53f64).exp2()
    }

    /// A Lüroth digit: the exact digit of `u = (r+1)/2^63` for a uniform
    /// 63-bit `r`. Since `u ≥ 2^-63`, digits never exceed `2^63`.
    pub fn next_digit(&mut self) -> u64 {
        digit_from_bits(self.next_bits())
    }
}

/// `⌊2^63/(r+1)⌋` with `r` the top 63 bits of `bits`: the Lüroth digit of
/// the dyadic `(r+1)/2^63 ∈ [2^-63, 1]`. Tail probabilities are exact up to
/// `2^-63`.
pub fn digit_from_bits(bits: u64) -> u64 {
    TWO_POW_63 / ((bits >> 1) + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::luroth::digit;
    use crate::Rational;
    use num_bigint::BigInt;

    #[test]
    fn draws_are_addressable() {
        let s = RngStream::new(42, 7);
        let seq: Vec<u64> = {
            let mut d = s.draws();
            (0..20).map(|_| d.next_bits()).collect()
        };
        for i in 0..20 {
            assert_eq!(s.draws_from(i).next_bits(), seq[i as usize]);
        }
    }

    #[test]
    fn streams_and_seeds_differ() {
        let a = RngStream::new(1, 0).draws().next_bits();
        let b = RngStream::new(1, 1).draws().next_bits();
        let c = RngStream::new(2, 0).draws().next_bits();
        assert!(a != b && a != c && b != c);
    }

    #[test]
    fn open_unit_never_hits_endpoints() {
        let mut d = RngStream::new(3, 0).draws();
        for _ in 0..10_000 {
            let u = d.next_open_unit();
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn bit_digits_are_exact_luroth_digits() {
        for bits in [0u64, 1, 2, 3, 1000, u64::MAX, u64::MAX - 1, 1 << 62, 12345678901234567] {
            let r = bits >> 1;
            let u = Rational::new(BigInt::from(r) + 1, BigInt::from(TWO_POW_63));
            assert_eq!(digit_from_bits(bits), digit(&u).unwrap(), "bits={bits}");
        }
        assert_eq!(digit_from_bits(0), TWO_POW_63);
        assert_eq!(digit_from_bits(u64::MAX), 1);
    }
}
