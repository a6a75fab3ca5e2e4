//! Property suites runnable outside the test harness (`intmin verify`).
//! Each check is randomized but seeded, and reports pass/fail with a short detail.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::barrier::{approx_volumetric_center, evaluate_barrier, Polytope};
use crate::cutting_plane::{cpm_block, default_block_length, CpmConfig, OracleAnswer, Placement, SeparationOracle};
use crate::dimred::{canonical_lattice, frame_contains, SubspaceState};
use crate::error::{Error, Result};
use crate::lattice::{
    brute_force_shortest, exhaustive_coefficient_bound, lll_reduce, rational, GramForm, LatticeState, Rational,
};
use crate::oracles::{
    brute_force_sfm, find_submodularity_violation, lovasz_extension_value, lovasz_subgradient,
    make_graph_cut_oracle, quadratic_separation, random_graph_edges, EvalOracle,
};
use crate::report::StepKind;
use crate::sfm::minimize_submodular;
use crate::solver::{minimize_observed, SolverConfig, SolverEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lll,
    Barrier,
    Cpm,
    Dimred,
    Sfm,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Lll, Suite::Barrier, Suite::Cpm, Suite::Dimred, Suite::Sfm];
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "lll" => Suite::Lll,
            "barrier" => Suite::Barrier,
            "cpm" => Suite::Cpm,
            "dimred" => Suite::Dimred,
            "sfm" => Suite::Sfm,
            _ => return Err(Error::InvalidInstance(format!("unknown suite {s:?}"))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Suite::Lll => "lll",
            Suite::Barrier => "barrier",
            Suite::Cpm => "cpm",
            Suite::Dimred => "dimred",
            Suite::Sfm => "sfm",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, failures: usize, detail: String) -> Self {
        Self { name: name.into(), passed: failures == 0, detail }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs one suite at its default size.
pub fn run_suite(suite: Suite, seed: u64) -> SuiteReport {
    let checks = match suite {
        Suite::Lll => lll_checks(100, seed),
        Suite::Barrier => barrier_checks(20, seed),
        Suite::Cpm => vec![
            strict_rho_accounting(50, seed),
            center_slack_stability(20, seed),
            minimizer_retention(&[2, 3, 4], 3, seed),
        ],
        Suite::Dimred => vec![projection_identity(&[2, 3, 4, 5], 3, seed)],
        Suite::Sfm => vec![
            subgradient_validity(200, seed),
            sfm_recovery(&[4, 6], 5, seed).0,
        ],
    };
    SuiteReport { suite, checks }
}

fn lift<T>(r: Result<T>, failures: &mut usize, notes: &mut Vec<String>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            *failures += 1;
            if notes.len() < 3 {
                notes.push(e.to_string());
            }
            None
        }
    }
}

fn join(mut head: String, notes: &[String]) -> String {
    if !notes.is_empty() {
        head.push_str("; ");
        head.push_str(&notes.join("; "));
    }
    head
}

// ---------------------------------------------------------------- lattice

/// A random full-rank integer lattice of rank `k <= n` in `Z^n` with entries in
/// `[-100, 100]`, and a random strictly diagonally dominant integer form.
pub fn random_lattice(rng: &mut impl Rng, k: usize, n: usize) -> (LatticeState, GramForm) {
    loop {
        let rows: Vec<Vec<i64>> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(-100..=100)).collect()).collect();
        if let Ok(lat) = LatticeState::from_i64_rows(&rows) {
            let mut form = vec![vec![0i64; n]; n];
            for i in 0..n {
                for j in 0..i {
                    let v = rng.gen_range(-5..=5);
                    form[i][j] = v;
                    form[j][i] = v;
                }
            }
            for (i, row) in form.iter_mut().enumerate() {
                row[i] = row.iter().map(|v| v.abs()).sum::<i64>() + rng.gen_range(1..=10);
            }
            return (lat, GramForm::from_i64(&form));
        }
    }
}

/// LLL factor against enumeration, lattice preservation, preimage consistency.
pub fn lll_checks(trials: usize, seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut factor_fail, mut same_fail, mut pre_fail, mut worst) = (0, 0, 0, 0.0f64);
    let mut notes = Vec::new();
    let mut done = 0;
    while done < trials {
        let k = rng.gen_range(1..=6);
        let n = k + rng.gen_range(0..=1);
        let (lat, form) = random_lattice(&mut rng, k, n);
        let Some((reduced, first)) = lift(lll_reduce(&lat, &form), &mut factor_fail, &mut notes) else {
            done += 1;
            continue;
        };
        // enumerate over the reduced basis, whose coefficient box is small
        let Some(bound) = exhaustive_coefficient_bound(&reduced, &form) else { continue };
        let lambda = match brute_force_shortest(&reduced, &form, bound) {
            Ok(v) => v,
            Err(Error::TooLarge(_)) => continue,
            Err(e) => {
                factor_fail += 1;
                notes.push(e.to_string());
                continue;
            }
        };
        done += 1;
        let limit = Rational::from_integer(BigInt::from(1u64 << (k - 1))) * &lambda;
        worst = worst.max(rational::to_f64(&first) / rational::to_f64(&lambda));
        if first > limit {
            factor_fail += 1;
        }
        if !reduced.same_lattice(&lat) {
            same_fail += 1;
        }
        let consistent = reduced
            .basis()
            .iter()
            .zip(reduced.preimages())
            .all(|(b, p)| b.iter().zip(p).all(|(x, y)| *x == rational::from_bigint(y)));
        if !consistent {
            pre_fail += 1;
        }
    }
    vec![
        Check::new(
            "lll_factor",
            factor_fail,
            join(format!("{trials} lattices, worst |b1|^2 / lambda1^2 = {worst:.3}"), &notes),
        ),
        Check::new("lll_same_lattice", same_fail, format!("{same_fail} changed lattices")),
        Check::new("lll_preimages", pre_fail, format!("{pre_fail} inconsistent preimages")),
    ]
}

// ---------------------------------------------------------------- barrier

/// A bounded polytope in dimension `n` around the origin: a box with random
/// half-widths cut by random half-spaces that keep the origin inside, with at
/// most 12 rows in total.
pub fn random_polytope(rng: &mut impl Rng, n: usize) -> Polytope {
    let mut k = Polytope::cube(n, 1.0);
    let mut a = k.a().clone();
    for i in 0..n {
        let w: f64 = rng.gen_range(0.3..3.0);
        for r in [2 * i, 2 * i + 1] {
            a[(r, i)] /= w;
        }
    }
    k = Polytope::new(a, k.b().clone(), DVector::zeros(n)).expect("scaled box");
    let extra = (2 * n).min(12usize.saturating_sub(2 * n));
    for _ in 0..rng.gen_range(0..=extra) {
        let dir = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        if dir.norm() < 1e-3 {
            continue;
        }
        let off: f64 = rng.gen_range(0.1..1.0);
        k.push_row(&(dir.normalize()), -off);
    }
    k
}

/// A random point with every slack at least a tenth of its value at the origin.
pub fn random_interior_point(rng: &mut impl Rng, k: &Polytope) -> DVector<f64> {
    let n = k.dim();
    let base = k.slacks(&DVector::zeros(n));
    loop {
        let x = DVector::from_fn(n, |_, _| rng.gen_range(-3.0..3.0));
        if k.slacks(&x).iter().zip(base.iter()).all(|(s, b)| *s >= 0.1 * b) {
            return x;
        }
    }
}

fn fd_gradient(k: &Polytope, x: &DVector<f64>, h: f64) -> Result<DVector<f64>> {
    let n = x.len();
    let mut g = DVector::zeros(n);
    for i in 0..n {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += h;
        xm[i] -= h;
        g[i] = (evaluate_barrier(k, &xp)?.f - evaluate_barrier(k, &xm)?.f) / (2.0 * h);
    }
    Ok(g)
}

/// Central differences of the analytic gradient.
pub fn fd_hessian(k: &Polytope, x: &DVector<f64>, h: f64) -> Result<DMatrix<f64>> {
    let n = x.len();
    let mut hess = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += h;
        xm[i] -= h;
        let d = (evaluate_barrier(k, &xp)?.grad - evaluate_barrier(k, &xm)?.grad) / (2.0 * h);
        hess.set_column(i, &d);
    }
    Ok((&hess + hess.transpose()) * 0.5)
}

fn min_eig(m: &DMatrix<f64>) -> f64 {
    ((m + m.transpose()) * 0.5).symmetric_eigen().eigenvalues.min()
}

/// Leverage identity, gradient and Hessian surrogates, `mu` bounds and Dikin
/// containment on `trials` random polytopes with `n <= 4`, `m <= 12`, at the
/// volumetric center and 10 random interior points of each.
pub fn barrier_checks(trials: usize, seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sigma_fail, mut grad_fail, mut hess_fail, mut mu_fail, mut dikin_fail) = (0, 0, 0, 0, 0);
    let (mut worst_sigma, mut worst_grad, mut samples, mut points) = (0.0f64, 0.0f64, 0usize, 0usize);
    let mut notes = Vec::new();
    for _ in 0..trials {
        let n = rng.gen_range(1..=4);
        let k = random_polytope(&mut rng, n);
        let m = k.constraints();
        let Some((center, _)) = lift(approx_volumetric_center(&k, &DVector::zeros(n), 1e-12), &mut sigma_fail, &mut notes)
        else {
            continue;
        };
        let mut states = vec![center.clone()];
        for _ in 0..10 {
            let x = random_interior_point(&mut rng, &k);
            let Some(st) = lift(evaluate_barrier(&k, &x), &mut grad_fail, &mut notes) else { continue };
            let Some(g_fd) = lift(fd_gradient(&k, &x, 1e-6), &mut grad_fail, &mut notes) else { continue };
            let rel = (&g_fd - &st.grad).norm() / st.grad.norm().max(1e-8);
            worst_grad = worst_grad.max(rel);
            if rel > 1e-5 {
                grad_fail += 1;
            }
            states.push(st);
        }

        for s in &states {
            points += 1;
            let err = (s.sigma.sum() - n as f64).abs();
            worst_sigma = worst_sigma.max(err);
            if err > 1e-9 {
                sigma_fail += 1;
            }
            let Some(h_fd) = lift(fd_hessian(&k, &s.x, 1e-5), &mut hess_fail, &mut notes) else { continue };
            let tol = 1e-3 * s.q.norm();
            if min_eig(&(&h_fd - &s.q)) < -tol || min_eig(&(&s.q * 5.0 - &h_fd)) < -tol {
                hess_fail += 1;
            }
            let mu = s.mu_exact();
            if mu < 1.0 / (4.0 * m as f64) - 1e-8 || mu > 1.0 + 1e-8 || mu < s.mu_lower - 1e-8 {
                mu_fail += 1;
            }
        }

        // uniform samples of the Dikin ellipsoid y = x + R^-1 u, |u| <= 1
        for s in [&center, &states[states.len() - 1]] {
            let mut taken = 0;
            while taken < 1000 {
                let u = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
                if u.norm() > 1.0 {
                    continue;
                }
                taken += 1;
                samples += 1;
                let y = &s.x + s.unwhiten_direction(&u);
                if k.slacks(&y).iter().any(|v| *v < 0.0) {
                    dikin_fail += 1;
                }
            }
        }
    }
    vec![
        Check::new(
            "leverage_identity",
            sigma_fail,
            join(format!("{points} points, worst |sum sigma - n| = {worst_sigma:.2e}"), &notes),
        ),
        Check::new("gradient_fd", grad_fail, format!("worst relative error {worst_grad:.2e}")),
        Check::new("hessian_sandwich", hess_fail, format!("{hess_fail} violations of Q <= hess <= 5Q")),
        Check::new("mu_bounds", mu_fail, format!("{mu_fail} violations")),
        Check::new("dikin_containment", dikin_fail, format!("{samples} samples, {dikin_fail} outside")),
    ]
}

// ---------------------------------------------------------------- cutting planes

fn random_target(rng: &mut impl Rng, n: usize, bound: i64) -> Vec<i64> {
    (0..n).map(|_| rng.gen_range(-bound..=bound)).collect()
}

/// Strict-mode `rho` accounting over `blocks` consecutive cutting plane
/// blocks (dimensions 2 to 4, quadratic oracles). Checks ADD gains, DROP
/// losses and the per-block growth `rho^T >= rho^0 + T eps / 2`.
pub fn strict_rho_accounting(blocks: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = CpmConfig::strict();
    let Placement::Strict { delta } = cfg.placement else { unreachable!() };
    let eps = cfg.eps;
    let add_gain = (delta * eps).sqrt() / 5.0;
    let (mut adds, mut drops, mut fails, mut worst_add) = (0usize, 0usize, 0usize, f64::INFINITY);
    let mut notes = Vec::new();
    let per_dim = blocks.div_ceil(3);
    let mut seen = 0;
    for n in 2..=4 {
        // a non-integral target keeps the oracle from ever answering YES
        let target: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0) + 0.37).collect();
        let mut oracle = FnOracle(n, move |x: &[f64]| {
            OracleAnswer::Halfspace(target.iter().zip(x).map(|(t, v)| t - v).collect())
        });
        let mut k = Polytope::cube(n, 16.0);
        let mut x = DVector::zeros(n);
        for _ in 0..per_dim.min(blocks - seen) {
            let t = default_block_length(n, k.constraints());
            let Some(res) = lift(cpm_block(&mut oracle, &k, &x, t, &cfg, None), &mut fails, &mut notes) else {
                break;
            };
            seen += 1;
            for s in &res.records {
                let Some(after) = s.rho_after else { continue };
                match s.action {
                    StepKind::Add => {
                        adds += 1;
                        worst_add = worst_add.min(after - s.rho_before);
                        if after - s.rho_before < add_gain {
                            fails += 1;
                        }
                    }
                    StepKind::Drop => {
                        drops += 1;
                        if s.rho_before - after > 5.0 * eps {
                            fails += 1;
                        }
                    }
                    StepKind::Terminate => {}
                }
            }
            if let (Some(first), Some(last)) = (res.records.first(), res.records.last()) {
                let growth = last.rho_after.unwrap_or(last.rho_before) - first.rho_before;
                if growth < 0.5 * res.records.len() as f64 * eps {
                    fails += 1;
                }
            }
            x = res.center.x.clone();
            k = res.polytope;
        }
    }
    Check::new(
        "strict_rho_accounting",
        fails,
        join(
            format!("{seen} blocks, {adds} adds (smallest gain {worst_add:.2e} vs {add_gain:.2e}), {drops} drops"),
            &notes,
        ),
    )
}

/// Two certified centers of the same polytope, the second started halfway out
/// in the Dikin ellipsoid of the first, have slack ratios within
/// `1 +- 5 sqrt(eps)`. Polytopes come from default blocks on quadratic oracles.
pub fn center_slack_stability(trials: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = CpmConfig::default();
    let band = 5.0 * cfg.eps.sqrt();
    let (mut fails, mut worst) = (0usize, 0.0f64);
    let mut notes = Vec::new();
    for _ in 0..trials {
        let n = rng.gen_range(2..=4);
        let target: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0) + 0.37).collect();
        let mut oracle = FnOracle(n, move |x: &[f64]| {
            OracleAnswer::Halfspace(target.iter().zip(x).map(|(t, v)| t - v).collect())
        });
        let k = Polytope::cube(n, 16.0);
        let t = rng.gen_range(1..=default_block_length(n, k.constraints()));
        let Some(res) = lift(cpm_block(&mut oracle, &k, &DVector::zeros(n), t, &cfg, None), &mut fails, &mut notes)
        else {
            continue;
        };
        let k = res.polytope;
        let first = &res.center;
        let u = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let start = &first.x + first.unwhiten_direction(&(u.normalize() * 0.5));
        let tol = cfg.newton_tol(k.constraints());
        let Some((second, _)) = lift(approx_volumetric_center(&k, &start, tol), &mut fails, &mut notes) else {
            continue;
        };
        let (s1, s2) = (k.slacks(&first.x), k.slacks(&second.x));
        let dev = s1.iter().zip(s2.iter()).map(|(a, b)| (a / b - 1.0).abs()).fold(0.0, f64::max);
        worst = worst.max(dev);
        if dev > band {
            fails += 1;
        }
    }
    Check::new(
        "center_slack_stability",
        fails,
        join(format!("{trials} polytopes, worst |ratio - 1| = {worst:.2e} vs {band:.2e}"), &notes),
    )
}

/// Separation oracle from a closure, for checks that need a custom oracle.
struct FnOracle<F>(usize, F);

impl<F: FnMut(&[f64]) -> OracleAnswer> SeparationOracle for FnOracle<F> {
    fn dim(&self) -> usize {
        self.0
    }
    fn query(&mut self, x: &[f64]) -> Result<OracleAnswer> {
        Ok((self.1)(x))
    }
}

fn within(k: &Polytope, u: &DVector<f64>, tol: f64) -> bool {
    k.slacks(u).iter().zip(k.b().iter()).all(|(s, b)| *s >= -tol * (1.0 + b.abs()))
}

/// Membership of `x*` in the current polytope (reduced coordinates) and in `W`.
fn retains(sub: &SubspaceState, k: Option<&Polytope>, target: &[i64]) -> bool {
    let ints: Vec<BigInt> = target.iter().map(|&v| BigInt::from(v)).collect();
    if !sub.contains_integral(&ints) {
        return false;
    }
    let y = DVector::from_iterator(target.len(), target.iter().map(|&v| v as f64));
    if !frame_contains(sub, &y, 1e-9) {
        return false;
    }
    // exact sign check until the first reduction introduces a floating frame
    let tol = if sub.equations.is_empty() { 0.0 } else { 1e-9 };
    k.is_none_or(|k| within(k, &sub.to_reduced(&y), tol))
}

/// Known minimizer stays in `K` after every step and in `W ∩ K` after every reduction.
pub fn minimizer_retention(sizes: &[usize], per_size: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut steps, mut reductions, mut fails) = (0usize, 0usize, 0usize);
    let mut notes = Vec::new();
    for &n in sizes {
        for _ in 0..per_size {
            let target = random_target(&mut rng, n, 100);
            let mut oracle = quadratic_separation(target.clone());
            let mut observe = |ev: &SolverEvent| match ev {
                SolverEvent::CpmStep { sub, view } => {
                    steps += 1;
                    if !retains(sub, Some(view.polytope), &target) {
                        fails += 1;
                    }
                }
                SolverEvent::Reduction { state } => {
                    reductions += 1;
                    if !retains(&state.sub, state.polytope.as_ref(), &target) {
                        fails += 1;
                    }
                }
            };
            let res = minimize_observed(&mut oracle, n, SolverConfig::with_radius(128), Some(&mut observe));
            match res {
                Ok(sol) if sol.point == target => {}
                Ok(sol) => {
                    fails += 1;
                    notes.push(format!("wrong point {:?}", sol.point));
                }
                Err(e) => {
                    fails += 1;
                    notes.push(e.to_string());
                }
            }
        }
    }
    Check::new(
        "minimizer_retention",
        fails,
        join(format!("{steps} steps, {reductions} reductions"), &notes),
    )
}

// ---------------------------------------------------------------- dimension reduction

/// `Π_{W0}(Z^n)` recomputed from the subspace equations, as a canonical lattice.
pub fn direct_projection(sub: &SubspaceState) -> (BigInt, Vec<Vec<BigInt>>) {
    canonical_lattice(&sub.projected_unit_vectors())
}

/// Maintained lattice equals the direct projection at every reduction.
pub fn projection_identity(sizes: &[usize], per_size: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut reductions, mut fails) = (0usize, 0usize);
    let mut notes = Vec::new();
    let mut check = |state: &crate::solver::SolverState| {
        reductions += 1;
        if state.lattice.rank() == 0 {
            return state.sub.dim() == 0;
        }
        canonical_lattice(state.lattice.basis()) == direct_projection(&state.sub)
    };
    for &n in sizes {
        for i in 0..per_size {
            let mut observe = |ev: &SolverEvent| {
                if let SolverEvent::Reduction { state } = ev {
                    if !check(state) {
                        fails += 1;
                    }
                }
            };
            let res = if i % 2 == 0 {
                let mut oracle = quadratic_separation(random_target(&mut rng, n, 100));
                minimize_observed(&mut oracle, n, SolverConfig::with_radius(128), Some(&mut observe)).map(|_| ())
            } else {
                let edges = random_graph_edges(n, 10, rng.gen());
                let eo = make_graph_cut_oracle(n, &edges).expect("valid edges");
                let mut oracle = crate::oracles::LovaszOracle::new(eo);
                minimize_observed(&mut oracle, n, SolverConfig::with_radius(1), Some(&mut observe)).map(|_| ())
            };
            if let Err(e) = res {
                fails += 1;
                notes.push(e.to_string());
            }
        }
    }
    Check::new("projection_identity", fails, join(format!("{reductions} reductions"), &notes))
}

// ---------------------------------------------------------------- submodular

/// A random submodular function on `n` elements: a graph cut plus a modular term.
pub fn random_submodular(rng: &mut impl Rng, n: usize) -> EvalOracle {
    let edges = random_graph_edges(n, 10, rng.gen());
    let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(-8..=8)).collect();
    let cut = make_graph_cut_oracle(n, &edges).expect("valid edges");
    EvalOracle::new(n, move |s| {
        let modular: i64 = s.iter().zip(&weights).filter(|(b, _)| **b).map(|(_, w)| w).sum();
        (cut.eval_uncounted(s).expect("integral cut") + modular) as f64
    })
}

/// `f_L(y) >= f_L(x) + g^T (y - x)` on random submodular functions.
pub fn subgradient_validity(trials: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fails = 0;
    let mut notes = Vec::new();
    for _ in 0..trials {
        let n = rng.gen_range(1..=8);
        let eo = random_submodular(&mut rng, n);
        if let Ok(Some(v)) = find_submodularity_violation(&eo, 50, rng.gen()) {
            fails += 1;
            notes.push(format!("not submodular at {v:?}"));
            continue;
        }
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=1.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=1.0)).collect();
        let r = (|| -> Result<bool> {
            let g = lovasz_subgradient(&eo, &x)?;
            let fx = lovasz_extension_value(&eo, &x)?;
            let fy = lovasz_extension_value(&eo, &y)?;
            let lin: f64 = g.iter().zip(y.iter().zip(&x)).map(|(gi, (yi, xi))| *gi as f64 * (yi - xi)).sum();
            Ok(fy >= fx + lin - 1e-9)
        })();
        match r {
            Ok(true) => {}
            Ok(false) => fails += 1,
            Err(e) => {
                fails += 1;
                notes.push(e.to_string());
            }
        }
    }
    Check::new("subgradient_validity", fails, join(format!("{trials} triples"), &notes))
}

/// Per-run numbers from an SFM recovery sweep.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SfmSweep {
    pub runs: usize,
    pub exact: usize,
    pub rounded: usize,
    pub accounting_failures: usize,
    /// `(n, so_calls)` per run.
    pub calls: Vec<(usize, usize)>,
}

/// Exact recovery on random graph cuts against enumeration, with EO accounting.
pub fn sfm_recovery(sizes: &[usize], per_size: usize, seed: u64) -> (Check, SfmSweep) {
    let mut sweep = SfmSweep::default();
    let mut notes = Vec::new();
    for &n in sizes {
        for i in 0..per_size {
            let edges = random_graph_edges(n, 10, seed.wrapping_mul(1000).wrapping_add(i as u64));
            let eo = make_graph_cut_oracle(n, &edges).expect("valid edges");
            let best = brute_force_sfm(&eo).expect("small ground set").0;
            let eo = make_graph_cut_oracle(n, &edges).expect("valid edges");
            sweep.runs += 1;
            match minimize_submodular(eo, SolverConfig::default()) {
                Ok(sol) => {
                    if sol.value == best {
                        sweep.exact += 1;
                    } else {
                        notes.push(format!("n={n} run {i}: value {} vs {best}", sol.value));
                    }
                    sweep.rounded += sol.rounded as usize;
                    let level_set = if sol.rounded { n } else { 0 };
                    if sol.eo_calls != n * sol.in_box_calls + level_set
                        || sol.in_box_calls + sol.box_cuts != sol.transcript.so_calls
                    {
                        sweep.accounting_failures += 1;
                    }
                    sweep.calls.push((n, sol.transcript.so_calls));
                }
                Err(e) => notes.push(format!("n={n} run {i}: {e}")),
            }
        }
    }
    let fails = sweep.runs - sweep.exact + sweep.accounting_failures;
    let head = format!(
        "{}/{} exact, {} level-set roundings, {} accounting mismatches",
        sweep.exact, sweep.runs, sweep.rounded, sweep.accounting_failures
    );
    notes.truncate(3);
    (Check::new("sfm_recovery", fails, join(head, &notes)), sweep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn random_polytope_contains_origin() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=4 {
            let k = random_polytope(&mut rng, n);
            assert!(k.slacks(&DVector::zeros(n)).iter().all(|&s| s > 0.0));
            let x = random_interior_point(&mut rng, &k);
            assert!(k.contains(&x));
        }
    }
}
