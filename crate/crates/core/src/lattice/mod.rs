//! Exact lattice subsystem.
//!
//! A [`LatticeState`] holds a basis of a lattice living inside a linear
//! subspace of `R^n` with exact rational coordinates, together with one
//! integral preimage per basis vector: if the lattice is the orthogonal
//! projection of `Z^n` onto a subspace, `preimages[i]` projects exactly onto
//! `basis[i]`. Every unimodular change of basis is applied to both.
//!
//! Reduction runs the integral LLL algorithm on an integer Gram matrix. Real
//! quadratic forms are first scaled by a power of two and rounded
//! ([`gram_integerize`]); the rounding distortion is folded into the
//! approximation factor reported by [`approx_shortest_vector`].

pub mod hnf;
mod lll;
pub mod rational;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
pub use rational::Rational;

/// Default number of bits used when rounding a real form to integers.
pub const DEFAULT_GRAM_BITS: u32 = 64;
/// Upper limit for adaptive widening in [`shortest_vector_embedded`].
pub const MAX_GRAM_BITS: u32 = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState {
    ambient: usize,
    basis: Vec<Vec<Rational>>,
    preimages: Vec<Vec<BigInt>>,
}

impl LatticeState {
    pub fn new(ambient: usize, basis: Vec<Vec<Rational>>, preimages: Vec<Vec<BigInt>>) -> Result<Self> {
        if basis.len() != preimages.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                got: preimages.len(),
            });
        }
        for row in &basis {
            if row.len() != ambient {
                return Err(Error::DimensionMismatch { expected: ambient, got: row.len() });
            }
        }
        for row in &preimages {
            if row.len() != ambient {
                return Err(Error::DimensionMismatch { expected: ambient, got: row.len() });
            }
        }
        if rational::rank(&basis) != basis.len() {
            return Err(Error::RankDeficient);
        }
        Ok(Self { ambient, basis, preimages })
    }

    /// `Z^n` with the standard basis.
    pub fn integer_lattice(n: usize) -> Self {
        let rows: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect();
        Self::from_integer_rows(rows).expect("standard basis is independent")
    }

    /// Full-rank integer lattice; each basis vector is its own preimage.
    pub fn from_integer_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        let basis = rows
            .iter()
            .map(|r| r.iter().map(rational::from_bigint).collect())
            .collect();
        Self::new(n, basis, rows)
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_integer_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
        )
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn preimages(&self) -> &[Vec<BigInt>] {
        &self.preimages
    }

    pub fn basis_f64(&self) -> Vec<DVector<f64>> {
        self.basis
            .iter()
            .map(|b| DVector::from_iterator(self.ambient, b.iter().map(rational::to_f64)))
            .collect()
    }

    /// Integer coordinates of `v` in the current basis, if `v` is a lattice vector.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vec<BigInt>> {
        if v.len() != self.ambient {
            return None;
        }
        let coords = rational::solve_columns(&self.basis, v)?;
        coords
            .into_iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }

    /// True when both bases generate the same lattice.
    pub fn same_lattice(&self, other: &LatticeState) -> bool {
        self.rank() == other.rank()
            && other.basis.iter().all(|b| self.coordinates(b).is_some())
            && self.basis.iter().all(|b| other.coordinates(b).is_some())
    }

    /// `B^T form B` for an integer form on the ambient coordinates.
    pub fn gram_under(&self, form: &[Vec<BigInt>]) -> Vec<Vec<Rational>> {
        let images: Vec<Vec<Rational>> = self
            .basis
            .iter()
            .map(|b| {
                form.iter()
                    .map(|row| {
                        row.iter()
                            .zip(b)
                            .fold(Rational::zero(), |acc, (f, x)| acc + rational::from_bigint(f) * x)
                    })
                    .collect()
            })
            .collect();
        self.basis
            .iter()
            .map(|bi| images.iter().map(|fbj| rational::dot(bi, fbj)).collect())
            .collect()
    }

    pub fn euclidean_gram(&self) -> Vec<Vec<Rational>> {
        self.basis
            .iter()
            .map(|bi| self.basis.iter().map(|bj| rational::dot(bi, bj)).collect())
            .collect()
    }

    /// `det(Λ)^2`, the determinant of the Euclidean Gram matrix.
    pub fn determinant_squared(&self) -> Rational {
        rational::determinant(&self.euclidean_gram())
    }

    /// `ln det(Λ)`.
    pub fn log_determinant(&self) -> f64 {
        0.5 * rational::ln_abs(&self.determinant_squared())
    }

    /// Applies an integer change of basis: new row `i` is `sum_j t[i][j] * old_j`.
    pub fn transformed(&self, t: &[Vec<BigInt>]) -> Self {
        let combine_r = |coeffs: &[BigInt]| -> Vec<Rational> {
            (0..self.ambient)
                .map(|c| {
                    coeffs.iter().zip(&self.basis).fold(Rational::zero(), |acc, (q, b)| {
                        if q.is_zero() {
                            acc
                        } else {
                            acc + rational::from_bigint(q) * &b[c]
                        }
                    })
                })
                .collect()
        };
        let combine_z = |coeffs: &[BigInt]| -> Vec<BigInt> {
            (0..self.ambient)
                .map(|c| coeffs.iter().zip(&self.preimages).map(|(q, p)| q * &p[c]).sum())
                .collect()
        };
        Self {
            ambient: self.ambient,
            basis: t.iter().map(|row| combine_r(row)).collect(),
            preimages: t.iter().map(|row| combine_z(row)).collect(),
        }
    }

    /// Debug dump: rationals as `"num/den"` strings.
    pub fn to_json(&self) -> Value {
        json!({
            "rank": self.rank(),
            "ambient": self.ambient,
            "basis": self.basis.iter()
                .map(|b| b.iter().map(rational::format).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "preimages": self.preimages.iter()
                .map(|p| p.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

/// Integer PSD matrix standing in for the real form `matrix / 2^scale_bits`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramForm {
    pub matrix: Vec<Vec<BigInt>>,
    pub scale_bits: u32,
    /// Diagonal shift added after rounding to restore positive semidefiniteness.
    pub shift: BigInt,
    source_max_abs: f64,
}

impl GramForm {
    /// An integer form used as-is (scale 2^0).
    pub fn from_integers(matrix: Vec<Vec<BigInt>>) -> Self {
        Self { matrix, scale_bits: 0, shift: BigInt::zero(), source_max_abs: 0.0 }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        Self::from_integers(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        Self::from_integers(
            (0..n)
                .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn is_psd(&self) -> bool {
        rational::is_psd(&self.rational_matrix())
    }

    fn rational_matrix(&self) -> Vec<Vec<Rational>> {
        self.matrix
            .iter()
            .map(|r| r.iter().map(rational::from_bigint).collect())
            .collect()
    }

    /// Bound on `|x^T (G/2^p - M) x|` for unit `x`.
    pub fn distortion_bound(&self) -> f64 {
        let p = 2f64.powi(self.scale_bits as i32);
        2.0 * self.dim() as f64 * self.source_max_abs / p + self.shift.to_f64().unwrap_or(f64::INFINITY) / p
    }
}

/// Rounds `2^bits * m` to integers and adds the smallest diagonal shift `c`
/// that makes the result positive semidefinite.
pub fn gram_integerize(m: &DMatrix<f64>, bits: u32) -> Result<GramForm> {
    let k = m.nrows();
    if m.ncols() != k {
        return Err(Error::DimensionMismatch { expected: k, got: m.ncols() });
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotPsd);
    }
    let max_abs = m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    for i in 0..k {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * max_abs.max(f64::MIN_POSITIVE) {
                return Err(Error::NotSymmetric);
            }
        }
    }
    let scale = 2f64.powi(bits as i32);
    let mut base = vec![vec![BigInt::zero(); k]; k];
    for i in 0..k {
        for j in 0..k {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]) * scale;
            base[i][j] = BigInt::from_f64(v.round()).ok_or(Error::NotPsd)?;
        }
    }

    let shifted = |c: &BigInt| -> Vec<Vec<Rational>> {
        (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        let mut v = base[i][j].clone();
                        if i == j {
                            v += c;
                        }
                        Rational::from_integer(v)
                    })
                    .collect()
            })
            .collect()
    };

    // float estimate of the needed shift, then exact adjustment
    let approx = DMatrix::from_fn(k, k, |i, j| base[i][j].to_f64().unwrap_or(0.0));
    let lambda_min = if k == 0 {
        0.0
    } else {
        approx.symmetric_eigen().eigenvalues.min()
    };
    let mut c = BigInt::from_f64((-lambda_min).ceil().max(0.0)).unwrap_or_default();
    let mut step = BigInt::one();
    while !rational::is_psd(&shifted(&c)) {
        c += &step;
        step *= 2;
    }
    // shrink back to the smallest feasible shift
    let mut lo = (&c - &step).max(BigInt::zero());
    if c > BigInt::zero() && rational::is_psd(&shifted(&lo)) {
        lo = BigInt::zero();
        if rational::is_psd(&shifted(&lo)) {
            c = lo.clone();
        }
    }
    while lo < c {
        let mid: BigInt = (&lo + &c) / 2;
        if rational::is_psd(&shifted(&mid)) {
            c = mid;
        } else {
            lo = mid + 1;
        }
    }
    let trace: f64 = (0..k).map(|i| m[(i, i)]).sum::<f64>() * scale;
    if c.is_positive() && c.to_f64().unwrap_or(f64::INFINITY) > trace {
        return Err(Error::PrecisionLoss { bits, shift: c.to_string() });
    }
    let matrix = shifted(&c).into_iter().map(|r| r.into_iter().map(|v| v.to_integer()).collect()).collect();
    Ok(GramForm { matrix, scale_bits: bits, shift: c, source_max_abs: max_abs })
}

/// LLL-reduces `state` under the integer form `gram` on the ambient
/// coordinates. Returns the reduced lattice and `||b_1'||^2` under `gram`.
pub fn lll_reduce(state: &LatticeState, gram: &GramForm) -> Result<(LatticeState, Rational)> {
    if gram.dim() != state.ambient {
        return Err(Error::DimensionMismatch { expected: state.ambient, got: gram.dim() });
    }
    if state.rank() == 0 {
        return Err(Error::RankDeficient);
    }
    if !gram.is_psd() {
        return Err(Error::NotPsd);
    }
    let g = state.gram_under(&gram.matrix);
    let den = rational::common_denominator(g.iter().flatten());
    let g_int: Vec<Vec<BigInt>> = g
        .iter()
        .map(|r| r.iter().map(|v| (v * rational::from_bigint(&den)).to_integer()).collect())
        .collect();
    let out = lll::integral_lll(&g_int)?;
    let reduced = state.transformed(&out.transform);
    Ok((reduced, Rational::new(out.first_norm_sq, den)))
}

/// Result of an approximate shortest vector computation.
#[derive(Debug, Clone)]
pub struct ShortVector {
    pub vector: Vec<Rational>,
    pub preimage: Vec<BigInt>,
    /// Norm of `vector` under the real form.
    pub norm: f64,
    /// Certified approximation factor: `norm <= gamma * lambda_1`.
    pub gamma: f64,
    /// Multiplicative norm distortion introduced by integer rounding.
    pub distortion: f64,
    /// The LLL-reduced lattice (same lattice, new basis).
    pub reduced: LatticeState,
}

/// Approximate shortest nonzero vector under `x -> sqrt(x^T M x)` for a real
/// PSD `M` on the ambient coordinates.
pub fn approx_shortest_vector(state: &LatticeState, norm_matrix: &DMatrix<f64>, bits: u32) -> Result<ShortVector> {
    let n = state.ambient;
    if norm_matrix.nrows() != n || norm_matrix.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: norm_matrix.nrows() });
    }
    let eig = norm_matrix.clone().symmetric_eigen();
    let root = DMatrix::from_fn(n, n, |i, j| eig.eigenvalues[i].max(0.0).sqrt() * eig.eigenvectors[(j, i)]);
    shortest_vector_embedded(state, &|v: &DVector<f64>| &root * v, bits)
}

/// Same as [`approx_shortest_vector`], with the form given through a linear
/// embedding `E` so that `||x|| = |E x|_2`. Lets callers supply a
/// numerically stable factor instead of an explicit matrix.
pub fn shortest_vector_embedded(
    state: &LatticeState,
    embed: &dyn Fn(&DVector<f64>) -> DVector<f64>,
    bits: u32,
) -> Result<ShortVector> {
    let k = state.rank();
    if k == 0 {
        return Err(Error::RankDeficient);
    }
    let images: Vec<DVector<f64>> = state.basis_f64().iter().map(embed).collect();
    let g_real = DMatrix::from_fn(k, k, |i, j| images[i].dot(&images[j]));
    let max_abs = g_real.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if !(max_abs > 0.0 && max_abs.is_finite()) {
        return Err(Error::NotPsd);
    }
    let exp = max_abs.log2().floor() as i32;
    let normalized = &g_real * 2f64.powi(-exp);
    // Ill-conditioned forms can round to a singular integer Gram; widen until it is definite.
    let mut bits = bits;
    let (gram, out) = loop {
        let attempt = gram_integerize(&normalized, bits)
            .and_then(|g| lll::integral_lll(&g.matrix).map(|o| (g, o)));
        match attempt {
            Ok(pair) => break pair,
            Err(Error::NotPsd | Error::PrecisionLoss { .. }) if bits < MAX_GRAM_BITS => {
                log::debug!("integer Gram not definite at {bits} bits, retrying");
                bits *= 2;
            }
            Err(e) => return Err(e),
        }
    };
    let reduced = state.transformed(&out.transform);

    let reduced_images: Vec<DVector<f64>> = reduced.basis_f64().iter().map(embed).collect();
    let norm = reduced_images[0].norm();

    // generalized eigenvalue range of (rounded form, real form) on the reduced basis
    let t: Vec<Vec<BigInt>> = out.transform;
    let g_int_reduced = DMatrix::from_fn(k, k, |i, j| {
        let mut acc = BigInt::zero();
        for (a, ta) in t[i].iter().enumerate() {
            if ta.is_zero() {
                continue;
            }
            for (b, tb) in t[j].iter().enumerate() {
                if !tb.is_zero() {
                    acc += ta * &gram.matrix[a][b] * tb;
                }
            }
        }
        scaled_to_f64(&acc, bits as i32 - exp)
    });
    let g_real_reduced = DMatrix::from_fn(k, k, |i, j| reduced_images[i].dot(&reduced_images[j]));
    let distortion = match g_real_reduced.clone().cholesky() {
        Some(ch) => {
            let l_inv = ch.l().try_inverse().unwrap_or_else(|| DMatrix::zeros(k, k));
            let sym = &l_inv * &g_int_reduced * l_inv.transpose();
            let sym = (&sym + sym.transpose()) * 0.5;
            let ev = sym.symmetric_eigen().eigenvalues;
            let (lo, hi) = (ev.min(), ev.max());
            if lo > 0.0 {
                (hi / lo).sqrt()
            } else {
                f64::INFINITY
            }
        }
        None => f64::INFINITY,
    };
    let gamma = 2f64.powf((k as f64 - 1.0) / 2.0) * distortion;
    Ok(ShortVector {
        vector: reduced.basis[0].clone(),
        preimage: reduced.preimages[0].clone(),
        norm,
        gamma,
        distortion,
        reduced,
    })
}

fn scaled_to_f64(v: &BigInt, bits: i32) -> f64 {
    let len = v.bits() as i32;
    if len > 900 {
        let shift = (len - 900) as usize;
        let top: BigInt = v >> shift;
        top.to_f64().unwrap() * 2f64.powi(shift as i32 - bits)
    } else {
        v.to_f64().unwrap() * 2f64.powi(-bits)
    }
}

/// Projects the lattice onto the orthogonal complement of the lattice
/// vector `v`, carrying integral preimages along.
pub fn project_lattice(state: &LatticeState, v: &[Rational]) -> Result<LatticeState> {
    if v.iter().all(Zero::is_zero) {
        return Err(Error::NotInLattice);
    }
    let mut c = state.coordinates(v).ok_or(Error::NotInLattice)?;
    let g = c.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    for x in &mut c {
        *x /= &g;
    }
    let mut basis = state.basis.clone();
    let mut pre = state.preimages.clone();

    // unimodular column operations on c, mirrored as row operations on the
    // basis, until c = e_1; the first basis vector is then v / g
    loop {
        let nonzero: Vec<usize> = (0..c.len()).filter(|&i| !c[i].is_zero()).collect();
        if nonzero.len() == 1 {
            break;
        }
        let i = *nonzero.iter().min_by_key(|&&i| c[i].abs()).unwrap();
        for &j in &nonzero {
            if j == i {
                continue;
            }
            let q = c[j].div_floor(&c[i]);
            if q.is_zero() {
                continue;
            }
            let cj = &c[j] - &q * &c[i];
            c[j] = cj;
            let qr = rational::from_bigint(&q);
            let bj = basis[j].clone();
            for (x, y) in basis[i].iter_mut().zip(&bj) {
                *x += &qr * y;
            }
            let pj = pre[j].clone();
            for (x, y) in pre[i].iter_mut().zip(&pj) {
                *x += &q * y;
            }
        }
    }
    let lead = (0..c.len()).find(|&i| !c[i].is_zero()).unwrap();
    c.swap(0, lead);
    basis.swap(0, lead);
    pre.swap(0, lead);
    if c[0].is_negative() {
        for x in &mut basis[0] {
            *x = -&*x;
        }
        for x in &mut pre[0] {
            *x = -&*x;
        }
    }
    let primitive = basis[0].clone();
    let vv = rational::dot(&primitive, &primitive);
    let projected: Vec<Vec<Rational>> = basis[1..]
        .iter()
        .map(|b| {
            let f = rational::dot(b, &primitive) / &vv;
            b.iter().zip(&primitive).map(|(x, p)| x - &f * p).collect()
        })
        .collect();
    LatticeState::new(state.ambient, projected, pre[1..].to_vec())
}

/// Exact `min ||sum c_i b_i||^2_gram` over nonzero integer `c` with
/// `|c_i| <= bound`. Only for small ranks.
pub fn brute_force_shortest(state: &LatticeState, gram: &GramForm, bound: i64) -> Result<Rational> {
    let k = state.rank();
    if k == 0 || k > 8 {
        return Err(Error::TooLarge(format!("rank {k} outside 1..=8")));
    }
    if bound < 1 {
        return Err(Error::TooLarge("coefficient bound must be positive".into()));
    }
    let points = (2.0 * bound as f64 + 1.0).powi(k as i32);
    if points > 2e8 {
        return Err(Error::TooLarge(format!("{points:.0} coefficient vectors")));
    }
    if gram.dim() != state.ambient {
        return Err(Error::DimensionMismatch { expected: state.ambient, got: gram.dim() });
    }
    let g = state.gram_under(&gram.matrix);
    let den = rational::common_denominator(g.iter().flatten());
    let g_int: Vec<Vec<BigInt>> = g
        .iter()
        .map(|r| r.iter().map(|v| (v * rational::from_bigint(&den)).to_integer()).collect())
        .collect();

    let max_entry = g_int.iter().flatten().map(|v| v.bits()).max().unwrap_or(0);
    let coeff_bits = 64 - (bound as u64 * k as u64).leading_zeros() as u64;
    let best = if max_entry + 2 * coeff_bits < 120 {
        let g128: Vec<Vec<i128>> = g_int
            .iter()
            .map(|r| r.iter().map(|v| v.to_i128().unwrap()).collect())
            .collect();
        BigInt::from(enumerate_i128(&g128, bound))
    } else {
        enumerate_big(&g_int, bound)
    };
    Ok(Rational::new(best, den))
}

fn next_coeffs(c: &mut [i64], bound: i64) -> bool {
    for x in c.iter_mut().rev() {
        if *x < bound {
            *x += 1;
            return true;
        }
        *x = -bound;
    }
    false
}

// only vectors whose first nonzero coefficient is positive (v and -v agree)
fn canonical_sign(c: &[i64]) -> bool {
    c.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

fn enumerate_i128(g: &[Vec<i128>], bound: i64) -> i128 {
    let k = g.len();
    let mut c = vec![-bound; k];
    let mut best: Option<i128> = None;
    loop {
        if canonical_sign(&c) {
            let mut q = 0i128;
            for i in 0..k {
                if c[i] == 0 {
                    continue;
                }
                let mut row = 0i128;
                for j in 0..k {
                    row += g[i][j] * c[j] as i128;
                }
                q += c[i] as i128 * row;
            }
            best = Some(best.map_or(q, |b| b.min(q)));
        }
        if !next_coeffs(&mut c, bound) {
            break;
        }
    }
    best.expect("at least one nonzero vector")
}

fn enumerate_big(g: &[Vec<BigInt>], bound: i64) -> BigInt {
    let k = g.len();
    let mut c = vec![-bound; k];
    let mut best: Option<BigInt> = None;
    loop {
        if canonical_sign(&c) {
            let mut q = BigInt::zero();
            for i in 0..k {
                for j in 0..k {
                    q += &g[i][j] * (c[i] * c[j]);
                }
            }
            best = Some(match best {
                Some(b) if b <= q => b,
                _ => q,
            });
        }
        if !next_coeffs(&mut c, bound) {
            break;
        }
    }
    best.expect("at least one nonzero vector")
}

/// A coefficient bound that makes [`brute_force_shortest`] exhaustive:
/// any `c` with `c^T G c <= min_i G_ii` has `c_i^2 <= min_i G_ii * (G^-1)_ii`.
pub fn exhaustive_coefficient_bound(state: &LatticeState, gram: &GramForm) -> Option<i64> {
    let g = state.gram_under(&gram.matrix);
    let k = g.len();
    let gf = DMatrix::from_fn(k, k, |i, j| rational::to_f64(&g[i][j]));
    let inv = gf.clone().try_inverse()?;
    let radius = (0..k).map(|i| gf[(i, i)]).fold(f64::INFINITY, f64::min);
    let worst = (0..k).map(|i| inv[(i, i)]).fold(0.0f64, f64::max);
    let b = (radius * worst).sqrt() * (1.0 + 1e-6) + 1.0;
    b.is_finite().then(|| b.floor() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rational::int;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn integerize_identity() {
        let g = gram_integerize(&DMatrix::identity(2, 2), 8).unwrap();
        assert_eq!(g.matrix, GramForm::from_i64(&[vec![256, 0], vec![0, 256]]).matrix);
        assert!(g.shift.is_zero());
    }

    #[test]
    fn integerize_diagonal() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![0.04, 100.0]));
        let g = gram_integerize(&m, 10).unwrap();
        assert_eq!(g.matrix, GramForm::from_i64(&[vec![41, 0], vec![0, 102400]]).matrix);
        assert!(g.shift.is_zero());
    }

    #[test]
    fn integerize_rank_deficient() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let g = gram_integerize(&m, 4).unwrap();
        assert_eq!(g.matrix, GramForm::from_i64(&[vec![16, 16], vec![16, 16]]).matrix);
        assert!(g.shift.is_zero());
        assert!(g.is_psd());
    }

    #[test]
    fn integerize_needs_shift() {
        // rank one (1, 0.3)(1, 0.3)^T rounds to [[16, 5], [5, 1]], which is indefinite
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 0.09]);
        let g = gram_integerize(&m, 4).unwrap();
        assert_eq!(g.shift, BigInt::from(1));
        assert!(g.is_psd());
    }

    #[test]
    fn integerize_rejects_asymmetric_and_lossy() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(gram_integerize(&m, 8), Err(Error::NotSymmetric)));
        let bad = DMatrix::from_row_slice(2, 2, &[0.001, 1.0, 1.0, 0.001]);
        assert!(matches!(gram_integerize(&bad, 4), Err(Error::PrecisionLoss { .. })));
    }

    #[test]
    fn lll_identity_basis() {
        let lat = LatticeState::integer_lattice(2);
        let (red, first) = lll_reduce(&lat, &GramForm::identity(2)).unwrap();
        assert_eq!(first, int(1));
        assert!(red.same_lattice(&lat));
    }

    #[test]
    fn lll_skewed_basis() {
        let lat = LatticeState::from_i64_rows(&[vec![100, 1], vec![99, 1]]).unwrap();
        let gram = GramForm::identity(2);
        let (red, first) = lll_reduce(&lat, &gram).unwrap();
        let lambda = brute_force_shortest(&lat, &gram, 200).unwrap();
        assert_eq!(lambda, int(1));
        assert!(first <= int(2) * lambda);
        assert!(red.same_lattice(&lat));
        for (b, z) in red.basis().iter().zip(red.preimages()) {
            let zb: Vec<Rational> = z.iter().map(rational::from_bigint).collect();
            assert_eq!(b, &zb);
        }
    }

    #[test]
    fn lll_weighted_form() {
        let lat = LatticeState::integer_lattice(2);
        let gram = GramForm::from_i64(&[vec![4, 0], vec![0, 1]]);
        let (red, first) = lll_reduce(&lat, &gram).unwrap();
        assert_eq!(first, int(1));
        let b0 = &red.basis()[0];
        assert!(b0[0].is_zero() && b0[1].abs() == int(1));
        assert_eq!(brute_force_shortest(&lat, &gram, 4).unwrap(), int(1));
    }

    #[test]
    fn lll_errors() {
        let lat = LatticeState::integer_lattice(2);
        let indefinite = GramForm::from_i64(&[vec![0, 1], vec![1, 0]]);
        assert!(matches!(lll_reduce(&lat, &indefinite), Err(Error::NotPsd)));
        assert!(matches!(
            LatticeState::from_i64_rows(&[vec![1, 2], vec![2, 4]]),
            Err(Error::RankDeficient)
        ));
    }

    #[test]
    fn brute_force_examples() {
        let z2 = LatticeState::integer_lattice(2);
        assert_eq!(brute_force_shortest(&z2, &GramForm::identity(2), 2).unwrap(), int(1));
        let z3 = LatticeState::integer_lattice(3);
        let g = GramForm::from_i64(&[vec![9, 0, 0], vec![0, 4, 0], vec![0, 0, 1]]);
        assert_eq!(brute_force_shortest(&z3, &g, 3).unwrap(), int(1));
        assert!(brute_force_shortest(&z3, &g, 0).is_err());
    }

    #[test]
    fn shortest_vector_anisotropic() {
        let lat = LatticeState::integer_lattice(2);
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![0.04, 100.0]));
        let sv = approx_shortest_vector(&lat, &m, DEFAULT_GRAM_BITS).unwrap();
        assert!((sv.norm - 0.2).abs() < 1e-12);
        assert_eq!(sv.vector[1], int(0));
        assert_eq!(sv.vector[0].abs(), int(1));
        assert_eq!(sv.preimage[0].abs(), BigInt::one());
        assert!(sv.gamma >= 2f64.sqrt() && sv.gamma < 2f64.sqrt() * (1.0 + 1e-9));
    }

    #[test]
    fn shortest_vector_identity() {
        let lat = LatticeState::integer_lattice(2);
        let sv = approx_shortest_vector(&lat, &DMatrix::identity(2, 2), DEFAULT_GRAM_BITS).unwrap();
        assert!((sv.norm - 1.0).abs() < 1e-15);
    }

    #[test]
    fn shortest_vector_rank_one_projected() {
        let lat = LatticeState::new(2, vec![vec![r(1, 2), r(-1, 2)]], vec![vec![BigInt::one(), BigInt::zero()]]).unwrap();
        let sv = approx_shortest_vector(&lat, &DMatrix::identity(2, 2), DEFAULT_GRAM_BITS).unwrap();
        assert!((sv.norm - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(sv.vector[0].abs(), r(1, 2));
        assert_eq!(sv.vector[0], -sv.vector[1].clone());
        assert_eq!(sv.preimage[0].abs(), BigInt::one());
        assert!(sv.preimage[1].is_zero());
        assert!((sv.gamma - 1.0).abs() < 1e-9);
    }

    #[test]
    fn project_axis() {
        let lat = LatticeState::integer_lattice(2);
        let p = project_lattice(&lat, &[int(0), int(1)]).unwrap();
        assert_eq!(p.rank(), 1);
        assert_eq!(p.basis()[0][1], int(0));
        assert_eq!(p.basis()[0][0].abs(), int(1));
        assert_eq!(p.determinant_squared(), int(1));
    }

    #[test]
    fn project_diagonal() {
        let lat = LatticeState::integer_lattice(2);
        let v = [int(1), int(1)];
        let p = project_lattice(&lat, &v).unwrap();
        assert_eq!(p.rank(), 1);
        assert_eq!(p.determinant_squared(), r(1, 2));
        let b = &p.basis()[0];
        assert_eq!(b[0].abs(), r(1, 2));
        assert_eq!(b[0], -b[1].clone());
        // det(Z^2) = |v| * det(projection)
        let lhs = lat.determinant_squared();
        let rhs = rational::dot(&v, &v) * p.determinant_squared();
        assert_eq!(lhs, rhs);
        assert!((p.log_determinant().exp() - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn project_rejects_non_members() {
        let lat = LatticeState::integer_lattice(2);
        assert!(matches!(project_lattice(&lat, &[r(1, 2), int(0)]), Err(Error::NotInLattice)));
        assert!(matches!(project_lattice(&lat, &[int(0), int(0)]), Err(Error::NotInLattice)));
    }

    #[test]
    fn project_non_primitive_vector() {
        let lat = LatticeState::integer_lattice(3);
        let p = project_lattice(&lat, &[int(2), int(4), int(0)]).unwrap();
        assert_eq!(p.rank(), 2);
        // same as projecting along the primitive (1,2,0)
        let q = project_lattice(&lat, &[int(1), int(2), int(0)]).unwrap();
        assert!(p.same_lattice(&q));
        assert_eq!(p.determinant_squared(), r(1, 5));
    }

    #[test]
    fn json_dump_uses_fraction_strings() {
        let lat = LatticeState::new(2, vec![vec![r(1, 2), r(-1, 2)]], vec![vec![BigInt::one(), BigInt::zero()]]).unwrap();
        let j = lat.to_json();
        assert_eq!(j["basis"][0][0], "1/2");
        assert_eq!(j["basis"][0][1], "-1/2");
        assert_eq!(j["preimages"][0][0], "1");
    }
}
