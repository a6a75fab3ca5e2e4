//! Dimension reduction: restrict the search to a hyperplane that contains
//! every integral point of the current outer ellipsoid, slice that
//! ellipsoid, and restart from an enclosing box in the smaller frame.
//!
//! The affine subspace `W` is kept exactly as an integer system
//! `z_j^T y = r_j` (one equation per reduction); its integral points are the
//! integer solutions of that system. A floating frame `y = x0 + U u` with
//! orthonormal `U` provides reduced coordinates.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::barrier::{approx_volumetric_center, evaluate_barrier, BarrierState, Polytope};
use crate::error::{Error, Result};
use crate::lattice::{hnf, project_lattice, rational, LatticeState, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceState {
    pub x0: DVector<f64>,
    /// Orthonormal columns spanning `W0`.
    pub frame: DMatrix<f64>,
    pub equations: Vec<Vec<BigInt>>,
    pub rhs: Vec<BigInt>,
}

impl SubspaceState {
    pub fn full(n: usize) -> Self {
        Self {
            x0: DVector::zeros(n),
            frame: DMatrix::identity(n, n),
            equations: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.x0.len()
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn to_ambient(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.x0 + &self.frame * u
    }

    pub fn to_reduced(&self, y: &DVector<f64>) -> DVector<f64> {
        self.frame.transpose() * (y - &self.x0)
    }

    /// Exact membership of an integer point.
    pub fn contains_integral(&self, y: &[BigInt]) -> bool {
        self.equations
            .iter()
            .zip(&self.rhs)
            .all(|(z, r)| &z.iter().zip(y).map(|(a, b)| a * b).sum::<BigInt>() == r)
    }

    /// Exact rational projector onto `W0`, `I - Z (Z^T Z)^-1 Z^T`, applied to `e_i`.
    pub fn projected_unit_vectors(&self) -> Vec<Vec<Rational>> {
        let n = self.ambient_dim();
        let z: Vec<Vec<Rational>> = self
            .equations
            .iter()
            .map(|r| r.iter().map(rational::from_bigint).collect())
            .collect();
        (0..n)
            .map(|i| {
                let e: Vec<Rational> = (0..n).map(|j| rational::int((i == j) as i64)).collect();
                if z.is_empty() {
                    return e;
                }
                // least-squares coefficients of e on span(Z)
                let zt_e: Vec<Rational> = z.iter().map(|zj| zj[i].clone()).collect();
                let gram: Vec<Vec<Rational>> = z
                    .iter()
                    .map(|a| z.iter().map(|b| rational::dot(a, b)).collect())
                    .collect();
                let coef = rational::solve_columns(&gram, &zt_e).expect("independent equations");
                (0..n)
                    .map(|j| {
                        z.iter()
                            .zip(&coef)
                            .fold(e[j].clone(), |acc, (zk, ck)| acc - ck * &zk[j])
                    })
                    .collect()
            })
            .collect()
    }

    /// Projects a point onto `W` using the exact equations.
    fn snap(&self, y: &DVector<f64>) -> DVector<f64> {
        let t = self.equations.len();
        if t == 0 {
            return y.clone();
        }
        let n = self.ambient_dim();
        let z = DMatrix::from_fn(n, t, |i, j| self.equations[j][i].to_f64().unwrap());
        let rhs = DVector::from_fn(t, |j, _| self.rhs[j].to_f64().unwrap());
        let resid = z.transpose() * y - rhs;
        let gram = z.transpose() * &z;
        match gram.cholesky() {
            Some(ch) => y - z * ch.solve(&resid),
            None => y.clone(),
        }
    }
}

/// Canonical form of a rational lattice: the common denominator `D` and the
/// Hermite normal form of `D` times the generators.
pub fn canonical_lattice(generators: &[Vec<Rational>]) -> (BigInt, Vec<Vec<BigInt>>) {
    let den = rational::common_denominator(generators.iter().flatten());
    let scaled: Vec<Vec<BigInt>> = generators
        .iter()
        .map(|g| g.iter().map(|x| (x * rational::from_bigint(&den)).to_integer()).collect())
        .collect();
    (den, hnf::hermite_normal_form(&scaled))
}

/// Ellipsoid `{c + N p : p^T S p <= 1}` inside a hyperplane.
#[derive(Debug, Clone)]
pub struct SlicedEllipsoid {
    /// Center in the coordinates of the sliced ellipsoid.
    pub center: DVector<f64>,
    /// Orthonormal basis of the hyperplane direction (columns).
    pub frame: DMatrix<f64>,
    /// Upper triangular `L` with shape `S = L^T L`.
    pub factor: DMatrix<f64>,
    /// Residual squared radius.
    pub residual: f64,
}

impl SlicedEllipsoid {
    pub fn shape(&self) -> DMatrix<f64> {
        self.factor.transpose() * &self.factor
    }

    /// `ln det S`.
    pub fn log_det_shape(&self) -> f64 {
        2.0 * (0..self.factor.nrows()).map(|i| self.factor[(i, i)].abs().ln()).sum::<f64>()
    }
}

/// Orthonormal basis of `w^perp` in `R^d`, from Gram-Schmidt on the
/// coordinate vectors (skipping the one most aligned with `w`).
pub fn complement_frame(w: &DVector<f64>) -> DMatrix<f64> {
    let d = w.len();
    let wh = w.normalize();
    let skip = (0..d)
        .max_by(|&a, &b| wh[a].abs().total_cmp(&wh[b].abs()))
        .unwrap_or(0);
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(d.saturating_sub(1));
    for i in (0..d).filter(|&i| i != skip) {
        let mut e = DVector::zeros(d);
        e[i] = 1.0;
        for _ in 0..2 {
            e -= &wh * wh.dot(&e);
            for c in &cols {
                e -= c * c.dot(&e);
            }
        }
        cols.push(e.normalize());
    }
    if cols.is_empty() {
        DMatrix::zeros(d, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Slices `{y : (y - c)^T R^T R (y - c) <= 1}` with `{y : v^T y = t}`.
pub fn slice_factored(c: &DVector<f64>, r: &DMatrix<f64>, v: &DVector<f64>, t: f64) -> Result<SlicedEllipsoid> {
    let rv = r.tr_solve_upper_triangular(v).ok_or(Error::EmptySlice { residual: f64::NAN })?;
    let vav = rv.norm_squared();
    if !(vav > 0.0) {
        return Err(Error::EmptySlice { residual: f64::NAN });
    }
    let delta = t - v.dot(c);
    let residual = 1.0 - delta * delta / vav;
    if !(residual > 0.0) {
        return Err(Error::EmptySlice { residual });
    }
    let a_inv_v = r.solve_upper_triangular(&rv).ok_or(Error::EmptySlice { residual })?;
    let center = c + a_inv_v * (delta / vav);
    let frame = complement_frame(v);
    let k = frame.ncols();
    let factor = if k == 0 {
        DMatrix::zeros(0, 0)
    } else {
        let rn = (r * &frame) / residual.sqrt();
        let tri = rn.qr().r();
        // positive diagonal
        let mut tri = tri.rows(0, k).into_owned();
        for i in 0..k {
            if tri[(i, i)] < 0.0 {
                tri.row_mut(i).neg_mut();
            }
        }
        tri
    };
    Ok(SlicedEllipsoid { center, frame, factor, residual })
}

/// Slices the ellipsoid `{y : (y - c)^T A (y - c) <= 1}` with `{y : v^T y = t}`.
pub fn slice_ellipsoid(c: &DVector<f64>, a: &DMatrix<f64>, v: &DVector<f64>, t: f64) -> Result<SlicedEllipsoid> {
    let r = a
        .clone()
        .cholesky()
        .ok_or(Error::EmptySlice { residual: f64::NAN })?
        .l()
        .transpose();
    slice_factored(c, &r, v, t)
}

/// Box `{p : |L_i (p - w)| <= 1}` around a sliced ellipsoid, as a polytope.
pub fn restart_box(factor: &DMatrix<f64>, center: &DVector<f64>) -> Polytope {
    let d = factor.nrows();
    let mut a = DMatrix::zeros(2 * d, d);
    let mut b = DVector::zeros(2 * d);
    for i in 0..d {
        let row = factor.row(i);
        let at_c = row.dot(&center.transpose());
        a.row_mut(2 * i).copy_from(&row);
        a.row_mut(2 * i + 1).copy_from(&(-row));
        b[2 * i] = at_c - 1.0;
        b[2 * i + 1] = -at_c - 1.0;
    }
    Polytope::new(a, b, center.clone()).expect("box around its own center")
}

/// Offset of the reduction hyperplane: `P = {y : v^T y = t}` with
/// `t = (v - z)^T x_K + r` and `r = round_half_even(z^T x_K)`.
pub fn hyperplane_offset(v: &[Rational], z: &[BigInt], x_k: &DVector<f64>) -> (f64, BigInt) {
    let zx: f64 = z.iter().zip(x_k.iter()).map(|(a, b)| a.to_f64().unwrap() * b).sum();
    let r = BigInt::from(zx.round_ties_even() as i64);
    let vx: f64 = v.iter().zip(x_k.iter()).map(|(a, b)| rational::to_f64(a) * b).sum();
    (vx - zx + r.to_f64().unwrap(), r)
}

/// Scale of the outer ellipsoid `s E(x_K, H_K)` for `m` constraints in dimension `d`.
pub fn outer_scale(m: usize, d: usize) -> f64 {
    3.0 * (m as f64).powf(1.5) * d as f64
}

#[derive(Debug, Clone)]
pub struct Reduced {
    pub sub: SubspaceState,
    /// `None` once the dimension reaches zero.
    pub polytope: Option<Polytope>,
    pub center: Option<BarrierState>,
    pub lattice: LatticeState,
    /// `ln vol` of the restart box (0 in dimension 0).
    pub log_volume: f64,
    pub residual: f64,
    pub offset: f64,
    pub rounded: BigInt,
}

/// Restricts the search to `W ∩ P` for the lattice vector `v = Π(z)`.
/// `center` is the certified center of `k` in the reduced coordinates of `sub`.
pub fn reduce_dimension(
    sub: &SubspaceState,
    k: &Polytope,
    center: &BarrierState,
    lat: &LatticeState,
    v: &[Rational],
    z: &[BigInt],
) -> Result<Reduced> {
    reduce_dimension_bounded(sub, k, center, lat, v, z, None)
}

/// Like [`reduce_dimension`], additionally intersecting the restart box with
/// the ambient cube `[-radius, radius]^n` pulled back to `W` wherever the box
/// sticks out of it. Repeated restarts otherwise compound the outer scale.
pub fn reduce_dimension_bounded(
    sub: &SubspaceState,
    k: &Polytope,
    center: &BarrierState,
    lat: &LatticeState,
    v: &[Rational],
    z: &[BigInt],
    radius: Option<f64>,
) -> Result<Reduced> {
    let n = sub.ambient_dim();
    let d = sub.dim();
    if v.len() != n || z.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: v.len().min(z.len()) });
    }
    let x_k = sub.to_ambient(&center.x);
    let v_f = DVector::from_iterator(n, v.iter().map(rational::to_f64));
    let w = sub.frame.transpose() * &v_f;
    // plane in reduced coordinates: w^T u = w^T u_K + (r - z^T x_K)
    let zx: f64 = z.iter().zip(x_k.iter()).map(|(a, b)| a.to_f64().unwrap() * b).sum();
    let rounded = BigInt::from(zx.round_ties_even() as i64);
    let shift = rounded.to_f64().unwrap() - zx;
    let t_reduced = w.dot(&center.x) + shift;
    let (offset, _) = hyperplane_offset(v, z, &x_k);

    let s = outer_scale(k.constraints(), d);
    let r_outer = center.factor() / s;
    let slice = slice_factored(&center.x, &r_outer, &w, t_reduced)?;

    let mut equations = sub.equations.clone();
    equations.push(z.to_vec());
    let mut rhs = sub.rhs.clone();
    rhs.push(rounded.clone());
    let frame = &sub.frame * &slice.frame;
    let mut next = SubspaceState {
        x0: sub.to_ambient(&slice.center),
        frame,
        equations,
        rhs,
    };
    next.x0 = next.snap(&next.x0);
    let lattice = project_lattice(lat, v)?;

    if d == 1 {
        return Ok(Reduced {
            sub: next,
            polytope: None,
            center: None,
            lattice,
            log_volume: 0.0,
            residual: slice.residual,
            offset,
            rounded,
        });
    }
    let origin = DVector::zeros(d - 1);
    let mut poly = restart_box(&slice.factor, &origin);
    let clipped = match radius {
        Some(r) => clip_to_cube(&mut poly, &slice.factor, &next, r),
        None => 0,
    };
    let st = if clipped == 0 {
        evaluate_barrier(&poly, &origin)?
    } else {
        approx_volumetric_center(&poly, &origin, RESTART_CENTER_TOL)?.0
    };
    let log_volume = (d - 1) as f64 * 2f64.ln() - 0.5 * slice.log_det_shape();
    Ok(Reduced {
        sub: next,
        polytope: Some(poly),
        center: Some(st),
        lattice,
        log_volume,
        residual: slice.residual,
        offset,
        rounded,
    })
}

const RESTART_CENTER_TOL: f64 = 1e-10;

/// Adds the rows `-r <= (x0 + U p)_i <= r` that cut the box `{|L p| <= 1}`
/// and keep the origin strictly inside. Returns the number of rows added.
fn clip_to_cube(poly: &mut Polytope, factor: &DMatrix<f64>, sub: &SubspaceState, r: f64) -> usize {
    let margin = 1e-9 * (1.0 + r);
    let mut added = 0;
    for i in 0..sub.ambient_dim() {
        let a = sub.frame.row(i).transpose();
        if a.norm() <= 1e-12 {
            continue;
        }
        // max of a^T p over the box is the l1 norm of L^-T a
        let extent = match factor.transpose().lu().solve(&a) {
            Some(c) => c.lp_norm(1),
            None => continue,
        };
        let x0 = sub.x0[i];
        if x0 + extent > r && r - x0 > margin {
            poly.push_row(&-&a, x0 - r);
            added += 1;
        }
        if x0 - extent < -r && x0 + r > margin {
            poly.push_row(&a, -r - x0);
            added += 1;
        }
    }
    added
}

/// `true` when `y` lies in `W` up to `tol` in the floating frame.
pub fn frame_contains(sub: &SubspaceState, y: &DVector<f64>, tol: f64) -> bool {
    (sub.to_ambient(&sub.to_reduced(y)) - y).norm() <= tol * (1.0 + y.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rational::int;

    fn dv(x: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(x)
    }

    #[test]
    fn slice_unit_ball_through_center() {
        let s = slice_ellipsoid(&dv(&[0.0, 0.0]), &DMatrix::identity(2, 2), &dv(&[1.0, 0.0]), 0.0).unwrap();
        assert!(s.center.norm() < 1e-15);
        assert!((s.residual - 1.0).abs() < 1e-15);
        assert!((s.shape()[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((s.frame[(1, 0)].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn slice_unit_ball_off_center() {
        let s = slice_ellipsoid(&dv(&[0.0, 0.0]), &DMatrix::identity(2, 2), &dv(&[1.0, 0.0]), 0.6).unwrap();
        assert!((&s.center - dv(&[0.6, 0.0])).norm() < 1e-15);
        assert!((s.residual - 0.64).abs() < 1e-15);
        // half-width along y2 is 0.8
        assert!((1.0 / s.shape()[(0, 0)].sqrt() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn slice_misses() {
        let e = slice_ellipsoid(&dv(&[0.0, 0.0]), &DMatrix::identity(2, 2), &dv(&[1.0, 0.0]), 1.5);
        assert!(matches!(e, Err(Error::EmptySlice { .. })));
    }

    #[test]
    fn offset_examples() {
        let x = dv(&[0.3, 0.4]);
        let (t, r) = hyperplane_offset(&[int(0), int(1)], &[BigInt::from(0), BigInt::from(1)], &x);
        assert_eq!(r, BigInt::from(0));
        assert!(t.abs() < 1e-15);
        let half = Rational::new(BigInt::from(1), BigInt::from(2));
        let (t, r) = hyperplane_offset(&[half.clone(), -half], &[BigInt::from(1), BigInt::from(0)], &x);
        assert_eq!(r, BigInt::from(0));
        assert!((t + 0.35).abs() < 1e-15);
    }

    #[test]
    fn unit_restart_box_is_interval() {
        let p = restart_box(&DMatrix::identity(1, 1), &dv(&[0.25]));
        assert!(p.contains(&dv(&[-0.75])) && p.contains(&dv(&[1.25])));
        assert!(!p.contains(&dv(&[1.26])));
    }

    #[test]
    fn reduce_onto_axis() {
        let sub = SubspaceState::full(2);
        let k = Polytope::cube(2, 1.0);
        let st = evaluate_barrier(&k, &dv(&[0.3, 0.4])).unwrap();
        let lat = LatticeState::integer_lattice(2);
        let z = vec![BigInt::from(0), BigInt::from(1)];
        let out = reduce_dimension(&sub, &k, &st, &lat, &[int(0), int(1)], &z).unwrap();
        assert_eq!(out.sub.dim(), 1);
        assert_eq!(out.rounded, BigInt::from(0));
        assert!(out.sub.contains_integral(&[BigInt::from(7), BigInt::from(0)]));
        assert!(!out.sub.contains_integral(&[BigInt::from(7), BigInt::from(1)]));
        assert!(out.sub.x0[1].abs() < 1e-15);
        let (_, h1) = canonical_lattice(out.lattice.basis());
        let (_, h2) = canonical_lattice(&out.sub.projected_unit_vectors());
        assert_eq!(h1, h2);
        assert_eq!(out.polytope.as_ref().unwrap().constraints(), 2);
    }

    #[test]
    fn reduce_3d_keeps_integral_points() {
        let sub = SubspaceState::full(3);
        let k = Polytope::cube(3, 2.0);
        let st = evaluate_barrier(&k, &dv(&[0.1, -0.2, 0.05])).unwrap();
        let lat = LatticeState::integer_lattice(3);
        let z = vec![BigInt::from(1), BigInt::from(1), BigInt::from(0)];
        let v = [int(1), int(1), int(0)];
        let out = reduce_dimension(&sub, &k, &st, &lat, &v, &z).unwrap();
        assert_eq!(out.sub.dim(), 2);
        let poly = out.polytope.as_ref().unwrap();
        // (1, -1, 1) satisfies x1 + x2 = round(-0.1) = 0
        let y = dv(&[1.0, -1.0, 1.0]);
        assert!(frame_contains(&out.sub, &y, 1e-12));
        assert!(poly.contains(&out.sub.to_reduced(&y)));
        let (d1, h1) = canonical_lattice(out.lattice.basis());
        let (d2, h2) = canonical_lattice(&out.sub.projected_unit_vectors());
        assert_eq!((d1, h1), (d2, h2));
        let ortho = out.sub.frame.transpose() * &out.sub.frame;
        assert!((ortho - DMatrix::identity(2, 2)).norm() < 1e-12);
    }
}
