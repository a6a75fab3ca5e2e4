//! Integral LLL on a Gram matrix (all arithmetic in exact integers).
//!
//! Works on the Gram matrix of the basis only: sub-determinants `d[i]` and
//! scaled Gram-Schmidt coefficients `lambda[i][j]` stay integral, so no
//! rational arithmetic is needed. Lovász parameter is 3/4.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub(crate) struct LllOutput {
    /// Row `i` expresses reduced vector `i` in the input basis.
    pub transform: Vec<Vec<BigInt>>,
    /// Squared norm of the first reduced vector under the input form.
    pub first_norm_sq: BigInt,
    #[allow(dead_code)]
    pub swaps: usize,
}

struct State<'a> {
    gram: &'a [Vec<BigInt>],
    t: Vec<Vec<BigInt>>,
    lambda: Vec<Vec<BigInt>>,
    d: Vec<BigInt>,
    swaps: usize,
}

impl State<'_> {
    // 1-based indices throughout to keep the recurrences readable.
    fn inner(&self, a: usize, b: usize) -> BigInt {
        let ta = &self.t[a - 1];
        let tb = &self.t[b - 1];
        let mut acc = BigInt::zero();
        for (i, x) in ta.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let mut row = BigInt::zero();
            for (j, y) in tb.iter().enumerate() {
                if !y.is_zero() {
                    row += &self.gram[i][j] * y;
                }
            }
            acc += x * row;
        }
        acc
    }

    fn size_reduce(&mut self, k: usize, l: usize) {
        let twice: BigInt = &self.lambda[k][l] * 2;
        if twice.abs() <= self.d[l] {
            return;
        }
        // nearest integer to lambda / d
        let q = (twice + &self.d[l]).div_floor(&(&self.d[l] * 2));
        let tl = self.t[l - 1].clone();
        for (x, y) in self.t[k - 1].iter_mut().zip(&tl) {
            *x -= &q * y;
        }
        let dl = self.d[l].clone();
        self.lambda[k][l] -= &q * dl;
        for i in 1..l {
            let v = &q * &self.lambda[l][i];
            self.lambda[k][i] -= v;
        }
    }

    fn swap(&mut self, k: usize, kmax: usize) {
        self.swaps += 1;
        self.t.swap(k - 1, k - 2);
        for j in 1..k - 1 {
            let a = std::mem::take(&mut self.lambda[k][j]);
            let b = std::mem::replace(&mut self.lambda[k - 1][j], a);
            self.lambda[k][j] = b;
        }
        let lam = self.lambda[k][k - 1].clone();
        let b = (&self.d[k - 2] * &self.d[k] + &lam * &lam) / &self.d[k - 1];
        for i in k + 1..=kmax {
            let t = self.lambda[i][k].clone();
            self.lambda[i][k] = (&self.d[k] * &self.lambda[i][k - 1] - &lam * &t) / &self.d[k - 1];
            self.lambda[i][k - 1] = (&b * &t + &lam * &self.lambda[i][k]) / &self.d[k];
        }
        self.d[k - 1] = b;
    }
}

/// Reduces the basis whose integer Gram matrix is `gram` (k x k).
/// Fails with `NotPsd` if the form is not positive definite on the basis.
pub(crate) fn integral_lll(gram: &[Vec<BigInt>]) -> Result<LllOutput> {
    let n = gram.len();
    if n == 0 {
        return Err(Error::RankDeficient);
    }
    let mut s = State {
        gram,
        t: (0..n)
            .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect(),
        lambda: vec![vec![BigInt::zero(); n + 1]; n + 1],
        d: vec![BigInt::zero(); n + 1],
        swaps: 0,
    };
    s.d[0] = BigInt::one();
    s.d[1] = gram[0][0].clone();
    if !s.d[1].is_positive() {
        return Err(Error::NotPsd);
    }
    let mut k = 2;
    let mut kmax = 1;
    while k <= n {
        if k > kmax {
            kmax = k;
            for j in 1..=k {
                let mut u = s.inner(k, j);
                for i in 1..j {
                    u = (&s.d[i] * u - &s.lambda[k][i] * &s.lambda[j][i]) / &s.d[i - 1];
                }
                if j < k {
                    s.lambda[k][j] = u;
                } else {
                    if !u.is_positive() {
                        return Err(Error::NotPsd);
                    }
                    s.d[k] = u;
                }
            }
        }
        s.size_reduce(k, k - 1);
        let lhs = &s.d[k] * &s.d[k - 2] * 4;
        let rhs = &s.d[k - 1] * &s.d[k - 1] * 3 - &s.lambda[k][k - 1] * &s.lambda[k][k - 1] * 4;
        if lhs < rhs {
            s.swap(k, kmax);
            k = (k - 1).max(2);
        } else {
            for l in (1..k - 1).rev() {
                s.size_reduce(k, l);
            }
            k += 1;
        }
    }
    Ok(LllOutput {
        first_norm_sq: s.d[1].clone(),
        transform: s.t,
        swaps: s.swaps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
    }

    #[test]
    fn reduces_skewed_plane_basis() {
        // basis (100,1), (99,1) under the identity form
        let gram = g(&[&[10001, 9901], &[9901, 9802]]);
        let out = integral_lll(&gram).unwrap();
        assert_eq!(out.first_norm_sq, BigInt::from(1));
        let t = &out.transform;
        let det = &t[0][0] * &t[1][1] - &t[0][1] * &t[1][0];
        assert_eq!(det.abs(), BigInt::one());
    }

    #[test]
    fn rejects_dependent_basis() {
        let gram = g(&[&[1, 2], &[2, 4]]);
        assert!(matches!(integral_lll(&gram), Err(Error::NotPsd)));
    }

    #[test]
    fn single_vector() {
        let out = integral_lll(&g(&[&[7]])).unwrap();
        assert_eq!(out.first_norm_sq, BigInt::from(7));
    }
}
