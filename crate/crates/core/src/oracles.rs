//! Separation oracles: submodular minimization through the Lovász
//! extension, a quadratic ground-truth oracle, and brute-force baselines.

use std::cell::Cell;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cutting_plane::{OracleAnswer, SeparationOracle};
use crate::error::{Error, Result};

type SetFn = Box<dyn Fn(&[bool]) -> f64>;

/// Evaluation oracle for a set function on `{0, .., n-1}`.
pub struct EvalOracle {
    n: usize,
    f: SetFn,
    calls: Cell<usize>,
    empty: Cell<Option<i64>>,
}

impl std::fmt::Debug for EvalOracle {
    fn fmt(&self, fmt: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fmt.debug_struct("EvalOracle")
            .field("n", &self.n)
            .field("calls", &self.calls.get())
            .finish()
    }
}

fn to_integer(v: f64) -> Result<i64> {
    if v.is_finite() && v.fract() == 0.0 && v.abs() < 9.0e15 {
        Ok(v as i64)
    } else {
        Err(Error::MalformedOracle(format!("non-integer value {v}")))
    }
}

impl EvalOracle {
    pub fn new(n: usize, f: impl Fn(&[bool]) -> f64 + 'static) -> Self {
        Self { n, f: Box::new(f), calls: Cell::new(0), empty: Cell::new(None) }
    }

    /// Values listed in subset-bitmask order (bit `i` set means `i` in S).
    pub fn from_table(n: usize, values: Vec<i64>) -> Result<Self> {
        if n > 24 || values.len() != 1usize << n {
            return Err(Error::InvalidInstance(format!(
                "table for n = {n} needs 2^n = {} values, got {}",
                1u64 << n.min(63),
                values.len()
            )));
        }
        Ok(Self::new(n, move |s| {
            let mask = s.iter().enumerate().fold(0usize, |m, (i, &b)| m | ((b as usize) << i));
            values[mask] as f64
        }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Evaluation calls made so far, excluding the cached `f(∅)`.
    pub fn calls(&self) -> usize {
        self.calls.get()
    }

    /// Counted evaluation.
    pub fn eval(&self, set: &[bool]) -> Result<i64> {
        self.calls.set(self.calls.get() + 1);
        to_integer((self.f)(set))
    }

    /// Evaluation outside the call budget (test baselines, reporting).
    pub fn eval_uncounted(&self, set: &[bool]) -> Result<i64> {
        to_integer((self.f)(set))
    }

    /// `f(∅)`, evaluated once and cached.
    pub fn empty_value(&self) -> Result<i64> {
        if let Some(v) = self.empty.get() {
            return Ok(v);
        }
        let v = self.eval_uncounted(&vec![false; self.n])?;
        self.empty.set(Some(v));
        Ok(v)
    }
}

/// Cut function of an undirected graph on vertices `0..n`.
pub fn make_graph_cut_oracle(n: usize, edges: &[(usize, usize, i64)]) -> Result<EvalOracle> {
    for &(u, v, w) in edges {
        if w < 0 {
            return Err(Error::InvalidInstance(format!("negative weight {w} on edge ({u}, {v})")));
        }
        if u >= n || v >= n {
            return Err(Error::InvalidInstance(format!("edge ({u}, {v}) outside 0..{n}")));
        }
    }
    let edges = edges.to_vec();
    Ok(EvalOracle::new(n, move |s| {
        edges.iter().filter(|&&(u, v, _)| s[u] != s[v]).map(|e| e.2).sum::<i64>() as f64
    }))
}

/// Random graph with each pair joined with probability 1/2, weights in `1..=max_weight`.
pub fn random_graph_edges(n: usize, max_weight: i64, seed: u64) -> Vec<(usize, usize, i64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(0.5) {
                edges.push((u, v, rng.gen_range(1..=max_weight)));
            }
        }
    }
    edges
}

/// Descending order of `x`, ties by ascending index.
fn greedy_order(x: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[b].total_cmp(&x[a]).then(a.cmp(&b)));
    order
}

/// Greedy subgradient of the Lovász extension at `x` (counted evaluations).
pub fn lovasz_subgradient(eo: &EvalOracle, x: &[f64]) -> Result<Vec<i64>> {
    let n = eo.n();
    let mut set = vec![false; n];
    let mut prev = eo.empty_value()?;
    let mut g = vec![0i64; n];
    for i in greedy_order(x) {
        set[i] = true;
        let val = eo.eval(&set)?;
        g[i] = val - prev;
        prev = val;
    }
    Ok(g)
}

/// Lovász extension value at `x` in `[0,1]^n` (uncounted evaluations).
pub fn lovasz_extension_value(eo: &EvalOracle, x: &[f64]) -> Result<f64> {
    let n = eo.n();
    let mut set = vec![false; n];
    let mut prev = eo.empty_value()?;
    let mut value = prev as f64;
    for i in greedy_order(x) {
        set[i] = true;
        let val = eo.eval_uncounted(&set)?;
        value += (val - prev) as f64 * x[i];
        prev = val;
    }
    Ok(value)
}

/// Separation for the Lovász extension: a box facet outside `[0,1]^n`,
/// otherwise the negated greedy subgradient through `x`.
pub fn lovasz_separation(eo: &EvalOracle, x: &[f64]) -> Result<OracleAnswer> {
    let n = eo.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    let mut worst: Option<(usize, f64)> = None;
    for (i, &xi) in x.iter().enumerate() {
        let viol = (-xi).max(xi - 1.0);
        if viol > 0.0 && worst.is_none_or(|(_, w)| viol > w) {
            worst = Some((i, viol));
        }
    }
    if let Some((i, _)) = worst {
        let mut a = vec![0.0; n];
        a[i] = if x[i] < 0.0 { 1.0 } else { -1.0 };
        return Ok(OracleAnswer::Halfspace(a));
    }
    let g = lovasz_subgradient(eo, x)?;
    if g.iter().all(|&v| v == 0) {
        return Ok(OracleAnswer::Yes);
    }
    Ok(OracleAnswer::Halfspace(g.iter().map(|&v| -(v as f64)).collect()))
}

/// [`lovasz_separation`] as a stateful oracle with call accounting.
#[derive(Debug)]
pub struct LovaszOracle {
    pub eo: EvalOracle,
    pub so_calls: usize,
    pub box_cuts: usize,
}

impl LovaszOracle {
    pub fn new(eo: EvalOracle) -> Self {
        Self { eo, so_calls: 0, box_cuts: 0 }
    }

    /// Separation calls answered inside the unit box (each costs `n` evaluations).
    pub fn in_box_calls(&self) -> usize {
        self.so_calls - self.box_cuts
    }
}

impl SeparationOracle for LovaszOracle {
    fn dim(&self) -> usize {
        self.eo.n()
    }

    fn query(&mut self, x: &[f64]) -> Result<OracleAnswer> {
        self.so_calls += 1;
        if x.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            self.box_cuts += 1;
        }
        lovasz_separation(&self.eo, x)
    }
}

/// Oracle for `f(x) = |x - target|^2`.
#[derive(Debug, Clone)]
pub struct QuadraticOracle {
    pub target: Vec<i64>,
    pub calls: usize,
}

impl QuadraticOracle {
    pub fn new(target: Vec<i64>) -> Self {
        Self { target, calls: 0 }
    }
}

impl SeparationOracle for QuadraticOracle {
    fn dim(&self) -> usize {
        self.target.len()
    }

    fn query(&mut self, x: &[f64]) -> Result<OracleAnswer> {
        self.calls += 1;
        if x.len() != self.target.len() {
            return Err(Error::DimensionMismatch { expected: self.target.len(), got: x.len() });
        }
        if x.iter().zip(&self.target).all(|(&a, &t)| a == t as f64) {
            return Ok(OracleAnswer::Yes);
        }
        Ok(OracleAnswer::Halfspace(
            x.iter().zip(&self.target).map(|(&a, &t)| t as f64 - a).collect(),
        ))
    }
}

pub fn quadratic_separation(target: Vec<i64>) -> QuadraticOracle {
    QuadraticOracle::new(target)
}

pub const BRUTE_FORCE_MAX_N: usize = 20;

/// Minimum value and all minimizing sets by full enumeration.
pub fn brute_force_sfm(eo: &EvalOracle) -> Result<(i64, Vec<Vec<bool>>)> {
    let n = eo.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::TooLarge(format!("{n} elements exceeds {BRUTE_FORCE_MAX_N}")));
    }
    let mut best = i64::MAX;
    let mut sets = Vec::new();
    for mask in 0u64..(1u64 << n) {
        let s: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        let v = eo.eval_uncounted(&s)?;
        if v < best {
            best = v;
            sets.clear();
        }
        if v == best {
            sets.push(s);
        }
    }
    Ok((best, sets))
}

/// A chain `S ⊆ T` and an element `i ∉ T`.
pub type Violation = (Vec<bool>, Vec<bool>, usize);

/// Checks `f(S + i) - f(S) >= f(T + i) - f(T)` on `trials` random chains
/// `S ⊆ T`, `i ∉ T`. Returns a violating `(S, T, i)` if one is found.
pub fn find_submodularity_violation(
    eo: &EvalOracle,
    trials: usize,
    seed: u64,
) -> Result<Option<Violation>> {
    let n = eo.n();
    if n == 0 {
        return Ok(None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let i = rng.gen_range(0..n);
        let t: Vec<bool> = (0..n).map(|j| j != i && rng.gen_bool(0.5)).collect();
        let s: Vec<bool> = t.iter().map(|&b| b && rng.gen_bool(0.5)).collect();
        let with = |set: &[bool]| {
            let mut v = set.to_vec();
            v[i] = true;
            v
        };
        let ds = eo.eval_uncounted(&with(&s))? - eo.eval_uncounted(&s)?;
        let dt = eo.eval_uncounted(&with(&t))? - eo.eval_uncounted(&t)?;
        if ds < dt {
            return Ok(Some((s, t, i)));
        }
    }
    Ok(None)
}

/// Best level set `{i : x_i >= theta}` of a point of `[0,1]^n`, using `n`
/// counted evaluations.
pub fn best_level_set(eo: &EvalOracle, x: &[f64]) -> Result<(Vec<bool>, i64)> {
    let n = eo.n();
    let mut set = vec![false; n];
    let mut best = (set.clone(), eo.empty_value()?);
    for i in greedy_order(x) {
        set[i] = true;
        let v = eo.eval(&set)?;
        if v < best.1 {
            best = (set.clone(), v);
        }
    }
    Ok(best)
}
