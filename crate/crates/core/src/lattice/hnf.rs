//! Integer row echelon forms: Hermite normal form of a generating set and
//! integral solutions of affine integer systems.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Unimodular row reduction of `rows` to echelon form over the first `cols`
/// columns. Every row operation is mirrored on `track` (same length as
/// `rows`). Returns the pivot columns, one per nonzero leading row.
fn echelon(rows: &mut [Vec<BigInt>], cols: usize, mut track: Option<&mut [Vec<BigInt>]>) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        // smallest nonzero |entry| in column c among rows r..
        while let Some(p) = (r..rows.len())
            .filter(|&i| !rows[i][c].is_zero())
            .min_by(|&a, &b| rows[a][c].abs().cmp(&rows[b][c].abs()))
        {
            rows.swap(r, p);
            if let Some(t) = track.as_deref_mut() {
                t.swap(r, p);
            }
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r][c]);
                if !q.is_zero() {
                    sub_scaled(rows, i, r, &q);
                    if let Some(t) = track.as_deref_mut() {
                        sub_scaled(t, i, r, &q);
                    }
                }
                if !rows[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < rows.len() && !rows[r][c].is_zero() {
            if rows[r][c].is_negative() {
                negate(&mut rows[r]);
                if let Some(t) = track.as_deref_mut() {
                    negate(&mut t[r]);
                }
            }
            pivots.push(c);
            r += 1;
        }
    }
    pivots
}

fn sub_scaled(rows: &mut [Vec<BigInt>], target: usize, source: usize, q: &BigInt) {
    let src = rows[source].clone();
    for (x, s) in rows[target].iter_mut().zip(&src) {
        *x -= q * s;
    }
}

fn negate(row: &mut [BigInt]) {
    for x in row {
        *x = -&*x;
    }
}

/// Hermite normal form (row style, positive pivots, entries above a pivot
/// reduced into `[0, pivot)`) of the lattice generated by `generators`.
/// Zero rows are dropped, so equal lattices give identical output.
pub fn hermite_normal_form(generators: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let cols = generators.first().map_or(0, Vec::len);
    let mut rows = generators.to_vec();
    let pivots = echelon(&mut rows, cols, None);
    rows.truncate(pivots.len());
    for (r, &c) in pivots.iter().enumerate() {
        for i in 0..r {
            let q = rows[i][c].div_floor(&rows[r][c]);
            if !q.is_zero() {
                sub_scaled(&mut rows, i, r, &q);
            }
        }
    }
    rows
}

/// All integral solutions of `equations · y = rhs` as `particular + Z·kernel`.
/// Returns `None` when there is no integral solution.
pub fn integer_solutions(
    equations: &[Vec<BigInt>],
    rhs: &[BigInt],
    n: usize,
) -> Option<(Vec<BigInt>, Vec<Vec<BigInt>>)> {
    let t = equations.len();
    // row i of `rows` is (E u_i) for the tracked unimodular row u_i
    let mut rows: Vec<Vec<BigInt>> = (0..n)
        .map(|i| equations.iter().map(|e| e[i].clone()).collect())
        .collect();
    let mut track: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let pivots = echelon(&mut rows, t, Some(&mut track));
    let rank = pivots.len();

    let mut residual = rhs.to_vec();
    let mut y = vec![BigInt::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        let (w, rem) = residual[c].div_rem(&rows[i][c]);
        if !rem.is_zero() {
            return None;
        }
        for (res, e) in residual.iter_mut().zip(&rows[i]) {
            *res -= &w * e;
        }
        for (yj, u) in y.iter_mut().zip(&track[i]) {
            *yj += &w * u;
        }
    }
    if residual.iter().any(|r| !r.is_zero()) {
        return None;
    }
    let kernel = track[rank..].to_vec();
    Some((y, kernel))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn hnf_is_canonical() {
        let a = hermite_normal_form(&[v(&[2, 0]), v(&[1, 1])]);
        let b = hermite_normal_form(&[v(&[1, 1]), v(&[3, 1]), v(&[0, 2])]);
        assert_eq!(a, b);
        assert_eq!(a, vec![v(&[1, 1]), v(&[0, 2])]);
    }

    #[test]
    fn hnf_drops_dependent_rows() {
        let h = hermite_normal_form(&[v(&[2, 4, 6]), v(&[1, 2, 3]), v(&[3, 6, 9])]);
        assert_eq!(h, vec![v(&[1, 2, 3])]);
    }

    #[test]
    fn affine_integer_solutions() {
        // x + y + z = 3, x - y = 1  ->  one-dimensional family
        let eqs = vec![v(&[1, 1, 1]), v(&[1, -1, 0])];
        let (p, ker) = integer_solutions(&eqs, &v(&[3, 1]), 3).unwrap();
        assert_eq!(ker.len(), 1);
        let check = |y: &[BigInt]| {
            eqs.iter()
                .map(|e| e.iter().zip(y).map(|(a, b)| a * b).sum::<BigInt>())
                .collect::<Vec<_>>()
        };
        assert_eq!(check(&p), v(&[3, 1]));
        let shifted: Vec<BigInt> = p.iter().zip(&ker[0]).map(|(a, b)| a + b * 5).collect();
        assert_eq!(check(&shifted), v(&[3, 1]));
        // 2x = 1 has no integral solution
        assert!(integer_solutions(&[v(&[2])], &v(&[1]), 1).is_none());
    }

    #[test]
    fn no_equations_gives_full_lattice() {
        let (p, ker) = integer_solutions(&[], &[], 2).unwrap();
        assert_eq!(p, v(&[0, 0]));
        assert_eq!(ker.len(), 2);
    }
}
