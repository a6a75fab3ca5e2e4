//! Log-barrier analytics over an explicit polytope `{x : Ax >= b}`.
//!
//! All quantities are computed from a thin QR factorization `S^-1 A = QR`
//! (`S` the diagonal of slacks). Leverage scores are squared row norms of
//! `Q`, `F = sum ln|R_ii|`, and every solve with `H = R^T R` goes through the
//! triangular factor, which keeps thin polytopes well conditioned.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Default Newton iteration cap.
pub const MAX_NEWTON_ITERS: usize = 500;
/// Below this decrement the full Newton step is taken without line search.
const FULL_STEP_DECREMENT: f64 = 1e-6;
/// Decrement at which a stalled Newton iteration is accepted as converged
/// (function values no longer resolve progress in double precision).
pub const STALL_DECREMENT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    a: DMatrix<f64>,
    b: DVector<f64>,
    interior: DVector<f64>,
}

impl Polytope {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, interior: DVector<f64>) -> Result<Self> {
        let (m, n) = a.shape();
        if b.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: b.len() });
        }
        if interior.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: interior.len() });
        }
        if m < n + 1 {
            return Err(Error::DegeneratePolytope(format!("{m} constraints in dimension {n}")));
        }
        let p = Self { a, b, interior };
        p.check_interior(&p.interior)?;
        Ok(p)
    }

    /// `B_inf(r) = {x : -r <= x_i <= r}`, rows ordered `x_1 >= -r, -x_1 >= -r, x_2 >= -r, ...`.
    pub fn cube(n: usize, r: f64) -> Self {
        let mut a = DMatrix::zeros(2 * n, n);
        for i in 0..n {
            a[(2 * i, i)] = 1.0;
            a[(2 * i + 1, i)] = -1.0;
        }
        Self {
            a,
            b: DVector::from_element(2 * n, -r),
            interior: DVector::zeros(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn constraints(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn interior(&self) -> &DVector<f64> {
        &self.interior
    }

    pub fn row(&self, i: usize) -> DVector<f64> {
        self.a.row(i).transpose()
    }

    pub fn slacks(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.a * x - &self.b
    }

    /// Closed membership `Ax >= b`.
    pub fn contains(&self, x: &DVector<f64>) -> bool {
        self.slacks(x).iter().all(|&s| s >= 0.0)
    }

    pub fn check_interior(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        match self.slacks(x).iter().position(|s| !(*s > 0.0)) {
            Some(index) => Err(Error::InteriorViolation { index, slack: self.slacks(x)[index] }),
            None => Ok(()),
        }
    }

    pub fn set_interior(&mut self, x: DVector<f64>) -> Result<()> {
        self.check_interior(&x)?;
        self.interior = x;
        Ok(())
    }

    /// Appends `a^T y >= beta`. The tracked interior point is not checked.
    pub fn push_row(&mut self, a: &DVector<f64>, beta: f64) {
        let m = self.constraints();
        let n = self.dim();
        let mut new_a = DMatrix::zeros(m + 1, n);
        new_a.rows_mut(0, m).copy_from(&self.a);
        new_a.row_mut(m).copy_from(&a.transpose());
        self.a = new_a;
        self.b = self.b.push(beta);
    }

    pub fn remove_row(&mut self, i: usize) {
        self.a = self.a.clone().remove_row(i);
        self.b = self.b.clone().remove_row(i);
    }
}

/// Barrier quantities at an interior point.
#[derive(Debug, Clone)]
pub struct BarrierState {
    pub x: DVector<f64>,
    pub slacks: DVector<f64>,
    /// `H = sum a_i a_i^T / s_i^2`.
    pub h: DMatrix<f64>,
    /// Volumetric value `F = ln det(H) / 2`.
    pub f: f64,
    pub sigma: DVector<f64>,
    pub grad: DVector<f64>,
    /// `Q = sum sigma_i a_i a_i^T / s_i^2`.
    pub q: DMatrix<f64>,
    /// `min_i sigma_i`, a lower bound on `mu(x)`.
    pub mu_lower: f64,
    ortho: DMatrix<f64>,
    r: DMatrix<f64>,
}

pub fn evaluate_barrier(k: &Polytope, x: &DVector<f64>) -> Result<BarrierState> {
    k.check_interior(x)?;
    let slacks = k.slacks(x);
    let (m, n) = k.a.shape();
    let y = DMatrix::from_fn(m, n, |i, j| k.a[(i, j)] / slacks[i]);
    let qr = y.clone().qr();
    let ortho = qr.q();
    let r = qr.r();
    let scale = (0..n).map(|i| r[(i, i)].abs()).fold(0.0f64, f64::max);
    if (0..n).any(|i| !(r[(i, i)].abs() > 1e-14 * scale)) {
        log::debug!("rank deficient: diag {:?} m {m} x {:?}", (0..n).map(|i| r[(i, i)]).collect::<Vec<_>>(), x.as_slice());
        return Err(Error::DegeneratePolytope("constraint matrix is rank deficient".into()));
    }
    let sigma = DVector::from_fn(m, |i, _| ortho.row(i).norm_squared());
    let f = (0..n).map(|i| r[(i, i)].abs().ln()).sum();
    let h = y.transpose() * &y;
    let grad = -(y.transpose() * &sigma);
    let weighted = DMatrix::from_fn(m, n, |i, j| y[(i, j)] * sigma[i]);
    let q = y.transpose() * weighted;
    let mu_lower = sigma.min();
    Ok(BarrierState {
        x: x.clone(),
        slacks,
        h,
        f,
        sigma,
        grad,
        q,
        mu_lower,
        ortho,
        r,
    })
}

impl BarrierState {
    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// `R^-T v`: coordinates in which `H` becomes the identity.
    pub fn whiten(&self, v: &DVector<f64>) -> DVector<f64> {
        self.r.tr_solve_upper_triangular(v).expect("nonsingular factor")
    }

    /// `R^-1 w`, the inverse map of [`Self::whiten`] applied to directions.
    pub fn unwhiten_direction(&self, w: &DVector<f64>) -> DVector<f64> {
        self.r.solve_upper_triangular(w).expect("nonsingular factor")
    }

    pub fn h_inv_mul(&self, v: &DVector<f64>) -> DVector<f64> {
        self.unwhiten_direction(&self.whiten(v))
    }

    /// `v^T H^-1 v`.
    pub fn h_inv_norm_sq(&self, v: &DVector<f64>) -> f64 {
        self.whiten(v).norm_squared()
    }

    /// Upper triangular factor with `H = R^T R`.
    pub fn factor(&self) -> &DMatrix<f64> {
        &self.r
    }

    /// `Q` in whitened coordinates: `Q_o^T diag(sigma) Q_o`.
    fn whitened_q(&self) -> DMatrix<f64> {
        let (m, n) = self.ortho.shape();
        let weighted = DMatrix::from_fn(m, n, |i, j| self.ortho[(i, j)] * self.sigma[i]);
        self.ortho.transpose() * weighted
    }

    /// Newton decrement `grad^T Q^-1 grad`.
    pub fn decrement(&self) -> f64 {
        let g = -(self.ortho.transpose() * &self.sigma);
        match self.whitened_q().cholesky() {
            Some(ch) => g.dot(&ch.solve(&g)),
            None => f64::INFINITY,
        }
    }

    /// `mu(x)`: smallest generalized eigenvalue of `(Q, H)`.
    pub fn mu_exact(&self) -> f64 {
        self.whitened_q().symmetric_eigen().eigenvalues.min()
    }

    /// Exact Hessian of `F` in whitened coordinates:
    /// `Q_o^T (3 Sigma - 2 P.P) Q_o` with `P = Q_o Q_o^T`.
    fn whitened_hessian(&self) -> DMatrix<f64> {
        let (m, n) = self.ortho.shape();
        // Q_o^T (P.P) Q_o = C C^T with C = sum_i q_i vec(q_i q_i^T)^T
        let mut c = DMatrix::<f64>::zeros(n, n * n);
        for i in 0..m {
            let qi = self.ortho.row(i);
            for a in 0..n {
                for b in 0..n {
                    let w = qi[a] * qi[b];
                    for r in 0..n {
                        c[(r, a * n + b)] += qi[r] * w;
                    }
                }
            }
        }
        self.whitened_q() * 3.0 - (&c * c.transpose()) * 2.0
    }

    /// Exact Hessian of `F` in ambient coordinates.
    pub fn hessian(&self) -> DMatrix<f64> {
        self.r.transpose() * self.whitened_hessian() * &self.r
    }

    /// Newton step for `F` in ambient coordinates, and its squared decrement
    /// under the exact Hessian.
    fn newton_step(&self) -> (DVector<f64>, f64) {
        let g = -(self.ortho.transpose() * &self.sigma);
        let hw = self.whitened_hessian();
        let dw = match hw.cholesky() {
            Some(ch) => ch.solve(&g),
            None => self.whitened_q().cholesky().expect("Q is positive definite").solve(&g),
        };
        let lam2 = g.dot(&dw);
        (self.unwhiten_direction(&(-dw)), lam2)
    }
}

/// Damped Newton iteration to a point with `grad^T Q^-1 grad <= tol`.
/// Returns the certified state and the number of Newton steps taken.
pub fn approx_volumetric_center(k: &Polytope, x_init: &DVector<f64>, tol: f64) -> Result<(BarrierState, usize)> {
    approx_volumetric_center_capped(k, x_init, tol, MAX_NEWTON_ITERS)
}

pub fn approx_volumetric_center_capped(
    k: &Polytope,
    x_init: &DVector<f64>,
    tol: f64,
    max_iters: usize,
) -> Result<(BarrierState, usize)> {
    let mut st = evaluate_barrier(k, x_init)?;
    let mut iters = 0;
    loop {
        let dec = st.decrement();
        if dec <= tol {
            return Ok((st, iters));
        }
        if iters >= max_iters {
            return Err(Error::NonConvergence { iterations: iters, decrement: dec });
        }
        iters += 1;
        let (dx, lam2) = st.newton_step();

        if lam2 <= FULL_STEP_DECREMENT {
            if let Ok(next) = evaluate_barrier(k, &(&st.x + &dx)) {
                if next.decrement() < dec {
                    st = next;
                    continue;
                }
            }
        }

        let mut t = 1.0;
        let mut accepted = None;
        // Fallback for when F is too flat to resolve the Armijo decrease.
        let mut by_decrement = None;
        while t > 1e-30 {
            let trial = &st.x + &dx * t;
            if trial == st.x {
                break;
            }
            if k.slacks(&trial).iter().all(|&s| s > 0.0) {
                if let Ok(next) = evaluate_barrier(k, &trial) {
                    if next.f <= st.f - 0.25 * t * lam2 {
                        accepted = Some(next);
                        break;
                    }
                    if by_decrement.is_none() && next.decrement() < 0.9 * dec {
                        by_decrement = Some(next);
                    }
                }
            }
            t *= 0.5;
        }
        let accepted = accepted.or(by_decrement);
        match accepted {
            Some(next) => st = next,
            None if dec <= STALL_DECREMENT => {
                log::debug!("newton stalled at decrement {dec:e}, accepting");
                return Ok((st, iters));
            }
            None => return Err(Error::NonConvergence { iterations: iters, decrement: dec }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(xs)
    }

    #[test]
    fn cube_center() {
        let k = Polytope::cube(2, 1.0);
        let st = evaluate_barrier(&k, &v(&[0.0, 0.0])).unwrap();
        assert!((&st.h - DMatrix::identity(2, 2) * 2.0).norm() < 1e-14);
        assert!((st.f - 2f64.ln()).abs() < 1e-14);
        for s in st.sigma.iter() {
            assert!((s - 0.5).abs() < 1e-14);
        }
        assert!(st.grad.norm() < 1e-14);
        assert!((&st.q - DMatrix::identity(2, 2)).norm() < 1e-14);
        assert!((st.mu_lower - 0.5).abs() < 1e-14);
    }

    #[test]
    fn cube_off_center() {
        let k = Polytope::cube(2, 1.0);
        let st = evaluate_barrier(&k, &v(&[0.5, 0.0])).unwrap();
        assert!((st.h[(0, 0)] - 40.0 / 9.0).abs() < 1e-12);
        assert!((st.h[(1, 1)] - 2.0).abs() < 1e-12);
        assert!(st.h[(0, 1)].abs() < 1e-14);
        assert!((st.f - 0.5 * (80.0f64 / 9.0).ln()).abs() < 1e-12);
        assert!((st.f - 1.09240).abs() < 1e-5);
        let expected = [0.1, 0.9, 0.5, 0.5];
        for (s, e) in st.sigma.iter().zip(expected) {
            assert!((s - e).abs() < 1e-12);
        }
        assert!((st.sigma.sum() - 2.0).abs() < 1e-12);
        assert!((st.grad[0] - 26.0 / 15.0).abs() < 1e-12);
        assert!(st.grad[1].abs() < 1e-14);
    }

    #[test]
    fn boundary_point_rejected() {
        let k = Polytope::cube(2, 1.0);
        match evaluate_barrier(&k, &v(&[1.0, 0.0])) {
            Err(Error::InteriorViolation { index, .. }) => assert_eq!(index, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn center_of_square() {
        let k = Polytope::cube(2, 1.0);
        let (st, _) = approx_volumetric_center(&k, &v(&[0.3, 0.2]), 1e-10).unwrap();
        assert!(st.x.norm() < 1e-5);
    }

    #[test]
    fn center_of_interval() {
        let a = DMatrix::from_row_slice(2, 1, &[1.0, -1.0]);
        let k = Polytope::new(a, v(&[0.0, -3.0]), v(&[0.4])).unwrap();
        let (st, _) = approx_volumetric_center(&k, &v(&[0.4]), 1e-12).unwrap();
        assert!((st.x[0] - 1.5).abs() < 1e-6);
    }

    #[test]
    fn center_with_redundant_row_matches_grid_search() {
        let a = DMatrix::from_row_slice(3, 1, &[1.0, -1.0, -1.0]);
        let k = Polytope::new(a, v(&[0.0, -1.0, -2.0]), v(&[0.5])).unwrap();
        let (st, _) = approx_volumetric_center(&k, &v(&[0.5]), 1e-14).unwrap();
        let f = |x: f64| 0.5 * (1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x)) + 1.0 / ((2.0 - x) * (2.0 - x))).ln();
        let mut best = (f64::INFINITY, 0.0);
        for i in 1..1_000_000 {
            let x = i as f64 * 1e-6;
            let val = f(x);
            if val < best.0 {
                best = (val, x);
            }
        }
        assert!((st.x[0] - best.1).abs() < 1e-4, "{} vs {}", st.x[0], best.1);
    }

    #[test]
    fn exact_hessian_matches_finite_differences() {
        let a = DMatrix::from_row_slice(5, 2, &[1.0, 0.2, -1.0, 0.5, 0.3, 1.0, -0.4, -1.0, 0.7, -0.7]);
        let b = v(&[-1.0, -2.0, -1.5, -1.0, -2.0]);
        let k = Polytope::new(a, b, v(&[0.1, -0.1])).unwrap();
        let x = v(&[0.1, -0.1]);
        let st = evaluate_barrier(&k, &x).unwrap();
        let h = 1e-5;
        for j in 0..2 {
            let mut e = DVector::zeros(2);
            e[j] = h;
            let gp = evaluate_barrier(&k, &(&x + &e)).unwrap().grad;
            let gm = evaluate_barrier(&k, &(&x - &e)).unwrap().grad;
            let col = (gp - gm) / (2.0 * h);
            let exact = st.hessian().column(j).into_owned();
            assert!((col - &exact).norm() < 1e-5 * exact.norm().max(1.0));
        }
    }

    #[test]
    fn row_editing() {
        let mut k = Polytope::cube(2, 1.0);
        k.push_row(&v(&[1.0, 0.0]), -1e6);
        assert_eq!(k.constraints(), 5);
        let st = evaluate_barrier(&k, &v(&[0.0, 0.0])).unwrap();
        assert!(st.sigma[4] < 1e-11);
        k.remove_row(4);
        assert_eq!(k, Polytope::cube(2, 1.0));
    }
}
