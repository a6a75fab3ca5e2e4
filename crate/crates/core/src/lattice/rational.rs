//! Exact rational helpers shared by the lattice code.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn from_bigint(v: &BigInt) -> Rational {
    Rational::from_integer(v.clone())
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| ln_abs(r).exp() * sign(r))
}

fn sign(r: &Rational) -> f64 {
    if r.is_negative() {
        -1.0
    } else {
        1.0
    }
}

fn ln_abs_int(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits < 1000 {
        v.abs().to_f64().unwrap().ln()
    } else {
        let shift = bits - 64;
        let top: BigInt = v.abs() >> shift;
        top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Natural log of |r|; `-inf` for zero.
pub fn ln_abs(r: &Rational) -> f64 {
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    ln_abs_int(r.numer()) - ln_abs_int(r.denom())
}

/// Formats as `"num/den"` (denominator always present).
pub fn format(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse(s: &str) -> Option<Rational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (s.trim().parse::<BigInt>().ok()?, BigInt::one()),
    };
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Least common multiple of all denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// Rank of a rational matrix given by rows.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &m[r][c];
            for j in c..cols {
                let t = &f * &m[r][j];
                m[i][j] -= t;
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

pub fn determinant(matrix: &[Vec<Rational>]) -> Rational {
    let n = matrix.len();
    let mut m = matrix.to_vec();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &m[c][c];
            for j in c..n {
                let t = &f * &m[c][j];
                m[i][j] -= t;
            }
        }
    }
    det
}

/// Solves `sum_j x_j * columns[j] = rhs` for a full-column-rank system.
/// Returns `None` when the system is inconsistent.
pub fn solve_columns(columns: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let k = columns.len();
    let n = rhs.len();
    // augmented n x (k+1)
    let mut m: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rational> = columns.iter().map(|c| c[i].clone()).collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    let mut pivots = Vec::with_capacity(k);
    let mut r = 0;
    for c in 0..k {
        let p = (r..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(r, p);
        let inv = m[r][c].recip();
        for j in c..=k {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..n {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for j in c..=k {
                let t = &f * &m[r][j];
                m[i][j] -= t;
            }
        }
        pivots.push(c);
        r += 1;
    }
    if (r..n).any(|i| !m[i][k].is_zero()) {
        return None;
    }
    Some((0..k).map(|i| m[i][k].clone()).collect())
}

/// Exact positive-semidefiniteness test by symmetric elimination with
/// diagonal pivoting.
pub fn is_psd(matrix: &[Vec<Rational>]) -> bool {
    let mut m = matrix.to_vec();
    let mut active: Vec<usize> = (0..m.len()).collect();
    while !active.is_empty() {
        if active.iter().any(|&i| m[i][i].is_negative()) {
            return false;
        }
        let Some(pos) = active.iter().position(|&i| m[i][i].is_positive()) else {
            // all remaining diagonals are zero: PSD iff the block vanishes
            return active
                .iter()
                .all(|&i| active.iter().all(|&j| m[i][j].is_zero()));
        };
        let p = active.swap_remove(pos);
        let pivot = m[p][p].clone();
        for &i in &active {
            if m[i][p].is_zero() {
                continue;
            }
            let f = &m[i][p] / &pivot;
            for &j in &active {
                let t = &f * &m[p][j];
                m[i][j] -= t;
            }
        }
    }
    true
}

pub fn is_integral(r: &Rational) -> bool {
    r.is_integer()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    #[test]
    fn psd_detection() {
        assert!(is_psd(&mat(&[&[16, 16], &[16, 16]])));
        assert!(is_psd(&mat(&[&[0, 0], &[0, 3]])));
        assert!(!is_psd(&mat(&[&[0, 1], &[1, 0]])));
        assert!(!is_psd(&mat(&[&[1, 2], &[2, 1]])));
        assert!(is_psd(&mat(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]])));
    }

    #[test]
    fn rank_and_determinant() {
        let m = mat(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(rank(&m), 2);
        assert!(determinant(&m).is_zero());
        assert_eq!(determinant(&mat(&[&[2, 1], &[1, 3]])), int(5));
    }

    #[test]
    fn solve_overdetermined() {
        // x*(1,0,1) + y*(0,1,1) = (2,3,5)
        let cols = mat(&[&[1, 0, 1], &[0, 1, 1]]);
        let sol = solve_columns(&cols, &[int(2), int(3), int(5)]).unwrap();
        assert_eq!(sol, vec![int(2), int(3)]);
        assert!(solve_columns(&cols, &[int(2), int(3), int(6)]).is_none());
    }

    #[test]
    fn format_roundtrip() {
        let r = Rational::new(BigInt::from(-3), BigInt::from(4));
        assert_eq!(format(&r), "-3/4");
        assert_eq!(parse("-3/4").unwrap(), r);
        assert_eq!(parse("7").unwrap(), int(7));
        assert!(parse("1/0").is_none());
    }

    #[test]
    fn log_of_huge_values() {
        let big = Rational::from_integer(BigInt::from(1) << 3000usize);
        let expected = 3000.0 * std::f64::consts::LN_2;
        assert!((ln_abs(&big) - expected).abs() < 1e-9);
    }
}
