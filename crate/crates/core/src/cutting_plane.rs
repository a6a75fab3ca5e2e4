//! Volumetric-center cutting plane method: the add/drop step and the block
//! driver that re-centers after every step.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::barrier::{approx_volumetric_center, BarrierState, Polytope};
use crate::error::{Error, Result};
use crate::report::{StepKind, StepRecord};

/// Answer of a separation oracle at a query point `x`.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleAnswer {
    /// `x` is a minimizer.
    Yes,
    /// Every minimizer `x*` satisfies `a^T x* >= a^T x`.
    Halfspace(Vec<f64>),
}

pub trait SeparationOracle {
    fn dim(&self) -> usize;
    fn query(&mut self, x: &[f64]) -> Result<OracleAnswer>;
}

impl<T: SeparationOracle + ?Sized> SeparationOracle for &mut T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn query(&mut self, x: &[f64]) -> Result<OracleAnswer> {
        (**self).query(x)
    }
}

impl<T: SeparationOracle + ?Sized> SeparationOracle for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn query(&mut self, x: &[f64]) -> Result<OracleAnswer> {
        (**self).query(x)
    }
}

/// Where an added cut is placed relative to the queried center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// Through the center.
    Central,
    /// Shifted away from the center so the new row's leverage score there is `delta`.
    Strict { delta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CpmConfig {
    /// Drop threshold on leverage scores.
    pub eps: f64,
    pub placement: Placement,
    /// Lower limit on the Newton tolerance.
    pub newton_tol_floor: f64,
}

pub const DEFAULT_EPS: f64 = 0.01;
pub const STRICT_EPS: f64 = 1e-7;
pub const STRICT_DELTA: f64 = 1e-4;
pub const NEWTON_TOL_FLOOR: f64 = 1e-20;

impl Default for CpmConfig {
    fn default() -> Self {
        Self {
            eps: DEFAULT_EPS,
            placement: Placement::Central,
            newton_tol_floor: NEWTON_TOL_FLOOR,
        }
    }
}

impl CpmConfig {
    pub fn strict() -> Self {
        Self {
            eps: STRICT_EPS,
            placement: Placement::Strict { delta: STRICT_DELTA },
            newton_tol_floor: NEWTON_TOL_FLOOR,
        }
    }

    /// Centering tolerance for `m` constraints: `eps^4 / (8m)`, using
    /// `mu >= 1/(4m)` in place of the unknown `mu` at the true center.
    pub fn newton_tol(&self, m: usize) -> f64 {
        (self.eps.powi(4) / (8.0 * m as f64)).max(self.newton_tol_floor)
    }
}

/// Default block length `ceil(4 d ln max(m, 3))`.
pub fn default_block_length(d: usize, m: usize) -> usize {
    (4.0 * d as f64 * (m.max(3) as f64).ln()).ceil().max(1.0) as usize
}

#[derive(Debug, Clone, PartialEq)]
pub enum CutAction {
    Add { a: Vec<f64>, beta: f64, witness: Vec<f64> },
    Drop { index: usize, witness: Vec<f64> },
    Terminate { witness: Vec<f64> },
}

impl CutAction {
    pub fn kind(&self) -> StepKind {
        match self {
            CutAction::Add { .. } => StepKind::Add,
            CutAction::Drop { .. } => StepKind::Drop,
            CutAction::Terminate { .. } => StepKind::Terminate,
        }
    }
}

fn argmin(v: &DVector<f64>) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i] < v[best] {
            best = i;
        }
    }
    best
}

/// One add/drop step at a certified center. Re-centering is left to the caller;
/// the returned polytope tracks a strictly interior point.
pub fn cpm_step(
    k: &Polytope,
    center: &BarrierState,
    oracle: &mut dyn SeparationOracle,
    cfg: &CpmConfig,
) -> Result<(Polytope, CutAction)> {
    let d = k.dim();
    let witness: Vec<f64> = center.x.iter().copied().collect();
    let min_sigma = center.mu_lower;
    if min_sigma < cfg.eps && k.constraints() > d + 1 {
        let index = argmin(&center.sigma);
        let mut next = k.clone();
        next.remove_row(index);
        next.set_interior(center.x.clone())?;
        return Ok((next, CutAction::Drop { index, witness }));
    }

    let normal = match oracle.query(&witness)? {
        OracleAnswer::Yes => return Ok((k.clone(), CutAction::Terminate { witness })),
        OracleAnswer::Halfspace(a) => a,
    };
    if normal.len() != d {
        return Err(Error::OracleInconsistency(format!(
            "normal has dimension {}, expected {d}",
            normal.len()
        )));
    }
    if normal.iter().any(|v| !v.is_finite()) || normal.iter().all(|&v| v == 0.0) {
        return Err(Error::OracleInconsistency("zero or non-finite cut normal".into()));
    }
    let a = DVector::from_vec(normal.clone());
    let u = center.h_inv_norm_sq(&a);
    let at_x = a.dot(&center.x);
    let mut next = k.clone();
    let beta = match cfg.placement {
        Placement::Central => {
            next.push_row(&a, at_x);
            // half way to the Dikin boundary along H^-1 a stays inside the old polytope
            let inside = &center.x + center.h_inv_mul(&a) * (0.5 / u.sqrt());
            next.set_interior(inside)?;
            at_x
        }
        Placement::Strict { delta } => {
            // leverage of the new row at x is u / (s^2 + u); solve for s
            let offset = (u * (1.0 - delta) / delta).sqrt();
            let beta = at_x - offset;
            next.push_row(&a, beta);
            next.set_interior(center.x.clone())?;
            beta
        }
    };
    Ok((next, CutAction::Add { a: normal, beta, witness }))
}

/// What an observer sees after every step of a block.
pub struct StepView<'a> {
    pub polytope: &'a Polytope,
    pub center: Option<&'a BarrierState>,
    pub action: &'a CutAction,
    pub record: &'a StepRecord,
}

#[derive(Debug, Clone)]
pub struct CpmResult {
    pub polytope: Polytope,
    pub center: BarrierState,
    pub records: Vec<StepRecord>,
    /// Query point at which the oracle answered YES, if it did.
    pub terminated: Option<Vec<f64>>,
    pub so_calls: usize,
    pub newton_iters: usize,
}

/// Runs `t` steps of {certify center, add/drop}, starting from `x_init`.
pub fn cpm_block(
    oracle: &mut dyn SeparationOracle,
    k: &Polytope,
    x_init: &DVector<f64>,
    t: usize,
    cfg: &CpmConfig,
    mut observer: Option<&mut dyn FnMut(&StepView)>,
) -> Result<CpmResult> {
    let d = k.dim();
    let (mut center, mut newton_iters) = approx_volumetric_center(k, x_init, cfg.newton_tol(k.constraints()))?;
    let mut poly = k.clone();
    poly.set_interior(center.x.clone())?;
    let mut records = Vec::with_capacity(t);
    let mut so_calls = 0;
    for step in 0..t {
        let min_sigma = center.mu_lower;
        let (next, action) = cpm_step(&poly, &center, oracle, cfg)?;
        if !matches!(action, CutAction::Drop { .. }) {
            so_calls += 1;
        }
        let mut record = StepRecord {
            block: 0,
            step,
            dim: d,
            action: action.kind(),
            rho_before: center.f,
            rho_after: None,
            min_sigma,
            constraints: poly.constraints(),
            newton_iters: 0,
            sigma_sum_error: (center.sigma.sum() - d as f64).abs(),
        };
        if let CutAction::Terminate { witness } = &action {
            if let Some(obs) = observer.as_mut() {
                obs(&StepView { polytope: &poly, center: Some(&center), action: &action, record: &record });
            }
            records.push(record);
            let witness = witness.clone();
            return Ok(CpmResult {
                polytope: poly,
                center,
                records,
                terminated: Some(witness),
                so_calls,
                newton_iters,
            });
        }
        let (next_center, iters) = approx_volumetric_center(&next, next.interior(), cfg.newton_tol(next.constraints()))?;
        newton_iters += iters;
        record.rho_after = Some(next_center.f);
        record.newton_iters = iters;
        poly = next;
        poly.set_interior(next_center.x.clone())?;
        center = next_center;
        if let Some(obs) = observer.as_mut() {
            obs(&StepView { polytope: &poly, center: Some(&center), action: &action, record: &record });
        }
        records.push(record);
    }
    Ok(CpmResult {
        polytope: poly,
        center,
        records,
        terminated: None,
        so_calls,
        newton_iters,
    })
}
