//! The main loop: cutting plane blocks in the current affine subspace,
//! interleaved with dimension reductions whenever the lattice has a vector
//! that is short under the inverse barrier Hessian.

use std::str::FromStr;

use nalgebra::DVector;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::barrier::{evaluate_barrier, BarrierState, Polytope};
use crate::cutting_plane::{cpm_block, default_block_length, CpmConfig, OracleAnswer, SeparationOracle, StepView};
use crate::dimred::{outer_scale, reduce_dimension_bounded, SubspaceState};
use crate::error::{Error, Result};
use crate::lattice::{hnf, rational, shortest_vector_embedded, LatticeState, DEFAULT_GRAM_BITS};
use crate::report::{PhaseRecord, ReductionRecord, Transcript};

/// When a short lattice vector triggers a dimension reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThresholdPolicy {
    /// `1 / (20 s)` with `s = 3 m^1.5 d` the outer ellipsoid scale.
    #[serde(rename = "lemma31")]
    Guarded,
    /// `2^(-100 n log2 n)`.
    #[serde(rename = "paper1e")]
    Vanishing,
    /// `1 / (10 n)`.
    #[serde(rename = "tenN")]
    TenN,
}

impl FromStr for ThresholdPolicy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "lemma31" => Ok(Self::Guarded),
            "paper1e" => Ok(Self::Vanishing),
            "tenN" | "tenn" => Ok(Self::TenN),
            other => Err(format!("unknown threshold policy {other:?} (lemma31, paper1e, tenN)")),
        }
    }
}

impl ThresholdPolicy {
    /// Threshold on `||v||_{H^-1}` for ambient dimension `n` and a polytope
    /// with `m` rows in dimension `d`. Never exceeds `1 / (2s)`, beyond which
    /// the hyperplane could miss integral points of the outer ellipsoid.
    pub fn threshold(&self, n: usize, d: usize, m: usize) -> f64 {
        let s = outer_scale(m, d);
        let raw = match self {
            Self::Guarded => 1.0 / (20.0 * s),
            Self::Vanishing => {
                let nf = n as f64;
                2f64.powf(-100.0 * nf * nf.log2().max(1.0))
            }
            Self::TenN => 1.0 / (10.0 * n as f64),
        };
        raw.min(0.999 / (2.0 * s))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolverConfig {
    /// Minimizers are assumed to lie in `B_inf(radius)`.
    pub radius: i64,
    /// Steps per block; `None` uses `ceil(4 d ln max(m, 3))` per block.
    pub block_length: Option<usize>,
    pub cpm: CpmConfig,
    pub threshold_policy: ThresholdPolicy,
    pub gram_bits: u32,
    /// `None` uses [`default_max_blocks`].
    pub max_blocks: Option<usize>,
    /// Only used for instance generation by callers.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            radius: 1,
            block_length: None,
            cpm: CpmConfig::default(),
            threshold_policy: ThresholdPolicy::Guarded,
            gram_bits: DEFAULT_GRAM_BITS,
            max_blocks: None,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn with_radius(radius: i64) -> Self {
        Self { radius, ..Self::default() }
    }
}

/// `ceil(32 (n + ln(gamma n R) / ln n))` with `gamma = 2 * 2^((n-1)/2)`.
pub fn default_max_blocks(n: usize, radius: i64) -> usize {
    let nf = n.max(1) as f64;
    let gamma = 2.0 * 2f64.powf((nf - 1.0) / 2.0);
    let log_term = (gamma * nf * radius.max(1) as f64).ln() / nf.ln().max(2f64.ln());
    (32.0 * (nf + log_term)).ceil() as usize
}

#[derive(Debug, Clone)]
pub struct SolverState {
    pub n: usize,
    pub sub: SubspaceState,
    /// Current polytope in reduced coordinates; `None` in dimension 0.
    pub polytope: Option<Polytope>,
    pub center: Option<BarrierState>,
    pub lattice: LatticeState,
    pub transcript: Transcript,
    pub config: SolverConfig,
    pub result: Option<Vec<i64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepEvent {
    Block,
    Reduce,
    Done,
}

/// Hook for instrumented runs.
pub enum SolverEvent<'a> {
    CpmStep { sub: &'a SubspaceState, view: &'a StepView<'a> },
    Reduction { state: &'a SolverState },
}

pub type Observer<'r, 'o> = &'r mut (dyn FnMut(&SolverEvent) + 'o);

impl SolverState {
    /// `K = B_inf(R)`, `Λ = Z^n`, `W = R^n`.
    pub fn initial(n: usize, config: SolverConfig) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInstance("dimension must be positive".into()));
        }
        if config.radius < 1 {
            return Err(Error::InvalidInstance(format!("radius {} < 1", config.radius)));
        }
        let k = Polytope::cube(n, config.radius as f64);
        let center = evaluate_barrier(&k, &DVector::zeros(n))?;
        let mut transcript = Transcript::default();
        let log_volume = n as f64 * (2.0 * config.radius as f64).ln();
        transcript.phases.push(PhaseRecord { dim: n, log_volume, log_det_lattice: 0.0, phi: log_volume });
        Ok(Self {
            n,
            sub: SubspaceState::full(n),
            polytope: Some(k),
            center: Some(center),
            lattice: LatticeState::integer_lattice(n),
            transcript,
            config,
            result: None,
        })
    }

    pub fn from_parts(
        sub: SubspaceState,
        polytope: Polytope,
        center: BarrierState,
        lattice: LatticeState,
        config: SolverConfig,
    ) -> Result<Self> {
        let d = sub.dim();
        if polytope.dim() != d || lattice.rank() != d || center.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: polytope.dim() });
        }
        Ok(Self {
            n: sub.ambient_dim(),
            sub,
            polytope: Some(polytope),
            center: Some(center),
            lattice,
            transcript: Transcript::default(),
            config,
            result: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.sub.dim()
    }

    fn max_blocks(&self) -> usize {
        self.config
            .max_blocks
            .unwrap_or_else(|| default_max_blocks(self.n, self.config.radius))
    }
}

/// Restricts an ambient oracle to `W`, in reduced coordinates.
struct ReducedOracle<'a> {
    inner: &'a mut dyn SeparationOracle,
    sub: &'a SubspaceState,
    calls: usize,
}

/// A normal whose projection onto `W0` vanishes: the query point minimizes
/// the function restricted to `W`.
fn flat_on(sub: &SubspaceState, a: &[f64]) -> bool {
    let a = DVector::from_column_slice(a);
    (sub.frame.transpose() * &a).norm() <= 1e-9 * a.norm()
}

impl SeparationOracle for ReducedOracle<'_> {
    fn dim(&self) -> usize {
        self.sub.dim()
    }

    fn query(&mut self, u: &[f64]) -> Result<OracleAnswer> {
        let y = self.sub.to_ambient(&DVector::from_column_slice(u));
        self.calls += 1;
        match self.inner.query(y.as_slice())? {
            OracleAnswer::Yes => Ok(OracleAnswer::Yes),
            OracleAnswer::Halfspace(a) => {
                if a.len() != self.sub.ambient_dim() {
                    return Err(Error::OracleInconsistency(format!(
                        "normal has dimension {}, expected {}",
                        a.len(),
                        self.sub.ambient_dim()
                    )));
                }
                if a.iter().any(|v| !v.is_finite()) || a.iter().all(|&v| v == 0.0) {
                    return Err(Error::OracleInconsistency("zero or non-finite cut normal".into()));
                }
                if flat_on(self.sub, &a) {
                    return Ok(OracleAnswer::Yes);
                }
                let p = self.sub.frame.transpose() * DVector::from_vec(a);
                Ok(OracleAnswer::Halfspace(p.iter().copied().collect()))
            }
        }
    }
}

fn to_i64(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter()
        .map(|x| x.to_i64().ok_or_else(|| Error::TooLarge(format!("coordinate {x} exceeds i64"))))
        .collect()
}

/// Verifies a YES answer at `y`: the point (rounded) must be integral, lie
/// in `W`, and be confirmed by the oracle unless `y` itself was integral.
fn resolve_yes(
    oracle: &mut dyn SeparationOracle,
    sub: &SubspaceState,
    y: &DVector<f64>,
    transcript: &mut Transcript,
) -> Result<Vec<i64>> {
    let ambiguous = || Error::AmbiguousYes { point: y.iter().copied().collect(), transcript: None };
    if y.iter().any(|v| !v.is_finite() || v.abs() > 9.0e15) {
        return Err(ambiguous());
    }
    let rounded: Vec<f64> = y.iter().map(|v| v.round()).collect();
    let ints: Vec<BigInt> = rounded.iter().map(|&v| BigInt::from(v as i64)).collect();
    if !sub.contains_integral(&ints) {
        return Err(ambiguous());
    }
    if rounded.iter().zip(y.iter()).all(|(a, b)| a == b) {
        return to_i64(&ints);
    }
    transcript.so_calls += 1;
    match oracle.query(&rounded)? {
        OracleAnswer::Yes => to_i64(&ints),
        OracleAnswer::Halfspace(a) if a.len() == sub.ambient_dim() && flat_on(sub, &a) => to_i64(&ints),
        OracleAnswer::Halfspace(_) => Err(ambiguous()),
    }
}

/// One iteration of the main loop in dimension at least 2.
pub fn main_loop_step<'o>(
    state: &mut SolverState,
    oracle: &mut dyn SeparationOracle,
    mut observer: Option<Observer<'_, 'o>>,
) -> Result<StepEvent> {
    let d = state.dim();
    if d < 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: d });
    }
    let poly = state.polytope.as_ref().expect("polytope in dimension >= 2");
    let center = state.center.as_ref().expect("center in dimension >= 2");
    let frame_t = state.sub.frame.transpose();
    let embed = |b: &DVector<f64>| center.whiten(&(&frame_t * b));
    let sv = shortest_vector_embedded(&state.lattice, &embed, state.config.gram_bits)?;
    state.transcript.lll_calls += 1;
    let m = poly.constraints();
    let threshold = state.config.threshold_policy.threshold(state.n, d, m);
    log::trace!("dim {d}, m {m}: shortest |v| = {:.3e}, threshold {threshold:.3e}", sv.norm);

    if sv.norm <= threshold {
        let radius = Some(state.config.radius as f64);
        let red = reduce_dimension_bounded(&state.sub, poly, center, &sv.reduced, &sv.vector, &sv.preimage, radius)?;
        let log_det = red.lattice.log_determinant();
        state.transcript.dim_reductions += 1;
        state.transcript.reductions.push(ReductionRecord {
            dim_before: d,
            norm: sv.norm,
            gamma: sv.gamma,
            threshold,
            normal: sv.vector.iter().map(rational::format).collect(),
            offset: red.offset,
            preimage: sv.preimage.iter().map(|z| z.to_string()).collect(),
        });
        state.transcript.phases.push(PhaseRecord {
            dim: d - 1,
            log_volume: red.log_volume,
            log_det_lattice: log_det,
            phi: red.log_volume + log_det,
        });
        log::info!("reduced to dimension {} (|v| = {:.3e})", d - 1, sv.norm);
        state.sub = red.sub;
        state.polytope = red.polytope;
        state.center = red.center;
        state.lattice = red.lattice;
        if let Some(obs) = observer.as_mut() {
            obs(&SolverEvent::Reduction { state });
        }
        return Ok(StepEvent::Reduce);
    }
    state.lattice = sv.reduced;

    let t = state.config.block_length.unwrap_or_else(|| default_block_length(d, m));
    let block = state.transcript.blocks;
    let sub = &state.sub;
    let mut adapter = ReducedOracle { inner: &mut *oracle, sub, calls: 0 };
    let mut forward = |view: &StepView| {
        if let Some(obs) = observer.as_mut() {
            obs(&SolverEvent::CpmStep { sub, view });
        }
    };
    let res = cpm_block(&mut adapter, poly, poly.interior(), t, &state.config.cpm, Some(&mut forward))?;
    let calls = adapter.calls;
    state.transcript.so_calls += calls;
    state.transcript.blocks += 1;
    state.transcript.newton_iters += res.newton_iters;
    state
        .transcript
        .steps
        .extend(res.records.into_iter().map(|mut r| {
            r.block = block;
            r
        }));
    if let Some(w) = res.terminated {
        let y = state.sub.to_ambient(&DVector::from_vec(w));
        let point = resolve_yes(oracle, &state.sub, &y, &mut state.transcript)?;
        state.result = Some(point);
        state.polytope = Some(res.polytope);
        state.center = Some(res.center);
        return Ok(StepEvent::Done);
    }
    state.polytope = Some(res.polytope);
    state.center = Some(res.center);
    Ok(StepEvent::Block)
}

/// Finds the integral minimizer once `dim(W) <= 1`.
pub fn finish_low_dim(state: &mut SolverState, oracle: &mut dyn SeparationOracle) -> Result<Vec<i64>> {
    let d = state.dim();
    let n = state.n;
    let (y0, kernel) =
        hnf::integer_solutions(&state.sub.equations, &state.sub.rhs, n).ok_or(Error::InfeasibleSlab)?;
    match d {
        0 => to_i64(&y0),
        1 => {
            let g = kernel.first().ok_or(Error::InfeasibleSlab)?;
            let poly = state.polytope.clone().ok_or(Error::InfeasibleSlab)?;
            finish_on_line(state_parts(state), poly, &y0, g, oracle)
        }
        _ => Err(Error::DimensionMismatch { expected: 1, got: d }),
    }
}

fn state_parts(state: &mut SolverState) -> (&SubspaceState, &mut Transcript) {
    (&state.sub, &mut state.transcript)
}

fn finish_on_line(
    (sub, transcript): (&SubspaceState, &mut Transcript),
    poly: Polytope,
    y0: &[BigInt],
    g: &[BigInt],
    oracle: &mut dyn SeparationOracle,
) -> Result<Vec<i64>> {
    let n = sub.ambient_dim();
    let y0f = DVector::from_iterator(n, y0.iter().map(|v| v.to_f64().unwrap()));
    let gf = DVector::from_iterator(n, g.iter().map(|v| v.to_f64().unwrap()));
    // reduced coordinate along the line: u(k) = alpha + k beta
    let alpha = sub.to_reduced(&y0f)[0];
    let beta = (sub.frame.transpose() * &gf)[0];
    let (mut ulo, mut uhi) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..poly.constraints() {
        let a = poly.a()[(i, 0)];
        let b = poly.b()[i];
        if a > 0.0 {
            ulo = ulo.max(b / a);
        } else if a < 0.0 {
            uhi = uhi.min(b / a);
        }
    }
    let slack = 1e-9 * (1.0 + ulo.abs().max(uhi.abs()));
    let (ulo, uhi) = (ulo - slack, uhi + slack);
    let (klo, khi) = if beta > 0.0 {
        ((ulo - alpha) / beta, (uhi - alpha) / beta)
    } else {
        ((uhi - alpha) / beta, (ulo - alpha) / beta)
    };
    if !(klo.is_finite() && khi.is_finite()) {
        return Err(Error::InfeasibleSlab);
    }
    let (mut lo, mut hi) = (klo.ceil() as i64, khi.floor() as i64);
    if lo > hi {
        return Err(Error::InfeasibleSlab);
    }
    let point_at = |k: f64| -> Vec<f64> { (0..n).map(|i| y0f[i] + k * gf[i]).collect() };
    let to_point = |k: i64| -> Result<Vec<i64>> {
        let p: Vec<BigInt> = y0.iter().zip(g).map(|(a, b)| a + b * BigInt::from(k)).collect();
        to_i64(&p)
    };
    // sign of the directional derivative bound along the line at parameter k
    let mut probe = |k: f64, transcript: &mut Transcript| -> Result<Option<f64>> {
        transcript.so_calls += 1;
        match oracle.query(&point_at(k))? {
            OracleAnswer::Yes => Ok(None),
            OracleAnswer::Halfspace(a) => {
                if a.len() != n || a.iter().any(|v| !v.is_finite()) {
                    return Err(Error::OracleInconsistency("malformed normal in line search".into()));
                }
                let a = DVector::from_vec(a);
                let s = a.dot(&gf);
                if s.abs() <= 1e-12 * a.norm() * gf.norm() {
                    Ok(None)
                } else {
                    Ok(Some(s))
                }
            }
        }
    };
    while hi - lo >= 2 {
        let mid = lo + (hi - lo) / 2;
        match probe(mid as f64, transcript)? {
            None => return to_point(mid),
            Some(s) if s > 0.0 => lo = mid,
            Some(_) => hi = mid,
        }
    }
    if lo == hi {
        return to_point(lo);
    }
    // two candidates: probe strictly between them, approaching lo
    let mut t = 0.5;
    while t > 1e-12 {
        match probe(lo as f64 + t, transcript)? {
            Some(s) if s > 0.0 => return to_point(hi),
            Some(_) => return to_point(lo),
            None => t *= 0.5,
        }
    }
    to_point(lo)
}

/// Outcome of a solve.
#[derive(Debug, Clone)]
pub struct Solution {
    pub point: Vec<i64>,
    pub transcript: Transcript,
}

pub fn minimize(oracle: &mut dyn SeparationOracle, n: usize, config: SolverConfig) -> Result<Solution> {
    minimize_observed(oracle, n, config, None)
}

pub fn minimize_observed<'o>(
    oracle: &mut dyn SeparationOracle,
    n: usize,
    config: SolverConfig,
    observer: Option<Observer<'_, 'o>>,
) -> Result<Solution> {
    if oracle.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: oracle.dim() });
    }
    let mut state = SolverState::initial(n, config)?;
    match run_loop(&mut state, oracle, observer) {
        Err(Error::AmbiguousYes { point, transcript: None }) => {
            Err(Error::AmbiguousYes { point, transcript: Some(Box::new(state.transcript)) })
        }
        other => other,
    }
}

fn run_loop<'o>(
    state: &mut SolverState,
    oracle: &mut dyn SeparationOracle,
    mut observer: Option<Observer<'_, 'o>>,
) -> Result<Solution> {
    let max_blocks = state.max_blocks();
    loop {
        if let Some(point) = state.result.take() {
            return Ok(Solution { point, transcript: std::mem::take(&mut state.transcript) });
        }
        if state.dim() <= 1 {
            let point = finish_low_dim(state, oracle)?;
            return Ok(Solution { point, transcript: std::mem::take(&mut state.transcript) });
        }
        if state.transcript.blocks >= max_blocks {
            return Err(Error::NonTermination {
                blocks: state.transcript.blocks,
                transcript: Box::new(std::mem::take(&mut state.transcript)),
            });
        }
        main_loop_step(state, oracle, observer.as_deref_mut())?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{quadratic_separation, EvalOracle, LovaszOracle};

    #[test]
    fn quadratic_2d() {
        let mut o = quadratic_separation(vec![3, -2]);
        let sol = minimize(&mut o, 2, SolverConfig::with_radius(8)).unwrap();
        assert_eq!(sol.point, vec![3, -2]);
    }

    #[test]
    fn one_dimensional_finish() {
        let mut o = quadratic_separation(vec![-4]);
        let sol = minimize(&mut o, 1, SolverConfig::with_radius(5)).unwrap();
        assert_eq!(sol.point, vec![-4]);
        assert_eq!(sol.transcript.blocks, 0);
    }

    #[test]
    fn cut_function_2() {
        let eo = EvalOracle::from_table(2, vec![0, 1, 1, 0]).unwrap();
        let mut o = LovaszOracle::new(eo);
        let sol = minimize(&mut o, 2, SolverConfig::with_radius(1)).unwrap();
        let set: Vec<bool> = sol.point.iter().map(|&v| v == 1).collect();
        assert!(sol.point.iter().all(|&v| v == 0 || v == 1));
        assert_eq!(o.eo.eval_uncounted(&set).unwrap(), 0);
    }

    #[test]
    fn fresh_state_blocks() {
        let mut st = SolverState::initial(2, SolverConfig::with_radius(1)).unwrap();
        let mut o = quadratic_separation(vec![1, 1]);
        let ev = main_loop_step(&mut st, &mut o, None).unwrap();
        assert!(ev == StepEvent::Block || ev == StepEvent::Done);
        assert_eq!(st.transcript.lll_calls, 1);
    }

    #[test]
    fn line_search_on_axis() {
        // W = {y2 = 0}, K bounds t in [-3.2, 5.7]
        let sub = SubspaceState {
            x0: DVector::zeros(2),
            frame: nalgebra::DMatrix::from_column_slice(2, 1, &[1.0, 0.0]),
            equations: vec![vec![BigInt::from(0), BigInt::from(1)]],
            rhs: vec![BigInt::from(0)],
        };
        let a = nalgebra::DMatrix::from_column_slice(2, 1, &[1.0, -1.0]);
        let k = Polytope::new(a, DVector::from_vec(vec![-3.2, -5.7]), DVector::from_vec(vec![0.0])).unwrap();
        let center = evaluate_barrier(&k, &DVector::from_vec(vec![0.0])).unwrap();
        let lat = LatticeState::from_i64_rows(&[vec![1, 0]]).unwrap();
        let mut st = SolverState::from_parts(sub, k, center, lat, SolverConfig::default()).unwrap();
        let mut o = quadratic_separation(vec![2, 0]);
        assert_eq!(finish_low_dim(&mut st, &mut o).unwrap(), vec![2, 0]);
    }

    #[test]
    fn line_without_integers() {
        let sub = SubspaceState::full(1);
        let a = nalgebra::DMatrix::from_column_slice(2, 1, &[1.0, -1.0]);
        let k = Polytope::new(a, DVector::from_vec(vec![0.2, -0.8]), DVector::from_vec(vec![0.5])).unwrap();
        let center = evaluate_barrier(&k, &DVector::from_vec(vec![0.5])).unwrap();
        let mut st =
            SolverState::from_parts(sub, k, center, LatticeState::integer_lattice(1), SolverConfig::default()).unwrap();
        let mut o = quadratic_separation(vec![0]);
        assert!(matches!(finish_low_dim(&mut st, &mut o), Err(Error::InfeasibleSlab)));
    }

    #[test]
    fn threshold_policies() {
        let s = outer_scale(4, 2);
        assert!((ThresholdPolicy::Guarded.threshold(2, 2, 4) - 1.0 / (20.0 * s)).abs() < 1e-18);
        assert!(ThresholdPolicy::Vanishing.threshold(2, 2, 4) < 1e-50);
        assert!(ThresholdPolicy::TenN.threshold(2, 2, 4) <= 0.999 / (2.0 * s));
        assert!(1e-6 <= ThresholdPolicy::Guarded.threshold(2, 2, 4));
    }
}
