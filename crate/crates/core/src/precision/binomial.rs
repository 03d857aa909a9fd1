//! Binomial coefficients and Bernoulli's triangle of their partial sums.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{domain, Result};

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        // acc = C(n, i) here, and C(n, i+1) = C(n, i)·(n−i)/(i+1) exactly.
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Row `l` of the binomial coefficients, `C(l, 0..=l)`.
pub fn binomial_row(l: u64) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(l as usize + 1);
    let mut acc = BigInt::one();
    row.push(acc.clone());
    for i in 0..l {
        acc = acc * (l - i) / (i + 1);
        row.push(acc.clone());
    }
    row
}

/// `T(l, j) = Σ_{i=0}^{j} C(l, i)`, an entry of Bernoulli's triangle.
pub fn bernoulli_triangle(l: u64, j: i64) -> Result<BigInt> {
    if j < 0 || j as u64 > l {
        return domain("j", j, "0 <= j <= l");
    }
    Ok(binomial_row(l)
        .into_iter()
        .take(j as usize + 1)
        .fold(BigInt::zero(), |acc, c| acc + c))
}

/// Row `l` of Bernoulli's triangle, `T(l, 0..=l)`.
pub fn bernoulli_triangle_row(l: u64) -> Vec<BigInt> {
    let mut acc = BigInt::zero();
    binomial_row(l)
        .into_iter()
        .map(|c| {
            acc += c;
            acc.clone()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pascal(rows: usize) -> Vec<Vec<BigInt>> {
        let mut t: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
        for n in 1..rows {
            let prev = &t[n - 1];
            let mut row = vec![BigInt::one(); n + 1];
            for k in 1..n {
                row[k] = &prev[k - 1] + &prev[k];
            }
            t.push(row);
        }
        t
    }

    #[test]
    fn small_values() {
        assert_eq!(binomial(0, 0), BigInt::one());
        assert_eq!(binomial(3, 1), BigInt::from(3));
        assert_eq!(binomial(3, 4), BigInt::zero());
    }

    #[test]
    fn matches_pascal_table() {
        let t = pascal(60);
        assert_eq!(binomial(39, 20), t[39][20]);
        assert_eq!(binomial(39, 20), BigInt::from(68923264410u64));
        for n in 0..60u64 {
            assert_eq!(binomial_row(n), t[n as usize]);
        }
    }

    #[test]
    fn triangle_rows_and_edges() {
        let row: Vec<BigInt> = [1, 4, 7, 8].iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(bernoulli_triangle_row(3), row);
        for l in 0..40u64 {
            assert_eq!(bernoulli_triangle(l, 0).unwrap(), BigInt::one());
            assert_eq!(bernoulli_triangle(l, l as i64).unwrap(), BigInt::one() << l);
        }
        for l in 1..=40u64 {
            assert_eq!(
                bernoulli_triangle(l, l as i64 - 1).unwrap(),
                (BigInt::one() << l) - 1
            );
        }
    }

    #[test]
    fn triangle_differences_are_binomials() {
        for l in 1..=30u64 {
            let row = bernoulli_triangle_row(l);
            for j in 1..=l as usize {
                assert_eq!(&row[j] - &row[j - 1], binomial(l, j as u64));
            }
        }
    }

    #[test]
    fn triangle_rejects_out_of_range() {
        assert!(bernoulli_triangle(3, -1).is_err());
        assert!(bernoulli_triangle(3, 4).is_err());
    }
}
