//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Set `ACCEPTANCE_SEED` to vary the seed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use intmin::bench::{run_family, Family};
use intmin::oracles::{brute_force_sfm, make_graph_cut_oracle, quadratic_separation, random_graph_edges};
use intmin::report::Transcript;
use intmin::sfm::minimize_submodular;
use intmin::solver::{default_max_blocks, minimize_observed, SolverConfig, SolverEvent};
use intmin::verify::{
    barrier_checks, lll_checks, minimizer_retention, projection_identity, strict_rho_accounting, Check,
};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Line {
    id: usize,
    name: &'static str,
    passed: bool,
    detail: String,
}

/// Everything the later criteria read back from the recovery runs.
#[derive(Default)]
struct Runs {
    worst_sigma: f64,
    centers: usize,
    over_budget: usize,
    eo_mismatch: usize,
    sfm_runs: usize,
}

impl Runs {
    fn absorb(&mut self, t: &Transcript, n: usize, radius: i64) {
        for s in &t.steps {
            self.centers += 1;
            self.worst_sigma = self.worst_sigma.max(s.sigma_sum_error);
        }
        if t.blocks > default_max_blocks(n, radius) {
            self.over_budget += 1;
        }
    }
}

fn all(checks: &[Check]) -> (bool, String) {
    let passed = checks.iter().all(|c| c.passed);
    let detail = checks.iter().map(|c| format!("{}: {}", c.name, c.detail)).collect::<Vec<_>>().join("; ");
    (passed, detail)
}

fn pick(checks: &[Check], names: &[&str]) -> Vec<Check> {
    checks.iter().filter(|c| names.contains(&c.name.as_str())).cloned().collect()
}

fn sfm_recovery(seed: u64, runs: &mut Runs) -> Line {
    let t0 = Instant::now();
    let (mut total, mut exact) = (0, 0);
    let mut notes = Vec::new();
    for n in [4usize, 6, 8, 10] {
        for i in 0..20u64 {
            let edges = random_graph_edges(n, 10, seed.wrapping_mul(7919).wrapping_add(i).wrapping_add((n as u64) << 32));
            let best = brute_force_sfm(&make_graph_cut_oracle(n, &edges).unwrap()).unwrap().0;
            total += 1;
            match minimize_submodular(make_graph_cut_oracle(n, &edges).unwrap(), SolverConfig::default()) {
                Ok(sol) => {
                    runs.absorb(&sol.transcript, n, 1);
                    runs.sfm_runs += 1;
                    let rounding = if sol.rounded { n } else { 0 };
                    if sol.eo_calls != n * sol.in_box_calls + rounding
                        || sol.in_box_calls + sol.box_cuts != sol.transcript.so_calls
                    {
                        runs.eo_mismatch += 1;
                    }
                    if sol.value == best {
                        exact += 1;
                    } else {
                        notes.push(format!("n={n} #{i}: {} vs {best}", sol.value));
                    }
                }
                Err(e) => notes.push(format!("n={n} #{i}: {e}")),
            }
        }
    }
    let elapsed = t0.elapsed();
    notes.truncate(3);
    Line {
        id: 1,
        name: "exact SFM recovery",
        passed: exact == total && elapsed < Duration::from_secs(600),
        detail: format!("{exact}/{total} exact in {:.1}s {}", elapsed.as_secs_f64(), notes.join("; ")),
    }
}

fn quadratic_recovery(seed: u64, runs: &mut Runs) -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut total, mut exact) = (0, 0);
    let mut notes = Vec::new();
    for n in 2usize..=8 {
        for _ in 0..50 {
            let target: Vec<i64> = (0..n).map(|_| rng.gen_range(-100..=100)).collect();
            let mut oracle = quadratic_separation(target.clone());
            total += 1;
            match minimize_observed(&mut oracle, n, SolverConfig::with_radius(128), None) {
                Ok(sol) => {
                    runs.absorb(&sol.transcript, n, 128);
                    if sol.point == target {
                        exact += 1;
                    } else {
                        notes.push(format!("{target:?} -> {:?}", sol.point));
                    }
                }
                Err(e) => notes.push(format!("{target:?}: {e}")),
            }
        }
    }
    notes.truncate(3);
    Line {
        id: 2,
        name: "exact integer-quadratic recovery",
        passed: exact == total,
        detail: format!("{exact}/{total} exact {}", notes.join("; ")),
    }
}

/// 1000 uniform samples of the Dikin ellipsoid at every certified center of
/// a few observed solves, with an exact sign check.
fn dikin_along_runs(seed: u64) -> (usize, usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xd1c1);
    let (mut centers, mut samples, mut outside) = (0usize, 0usize, 0usize);
    for n in 2usize..=4 {
        for _ in 0..3 {
            let target: Vec<i64> = (0..n).map(|_| rng.gen_range(-100..=100)).collect();
            let mut oracle = quadratic_separation(target);
            let mut sample_rng = ChaCha8Rng::seed_from_u64(rng.gen());
            let mut observe = |ev: &SolverEvent| {
                let SolverEvent::CpmStep { view, .. } = ev else { return };
                let Some(center) = view.center else { return };
                centers += 1;
                let d = center.x.len();
                let mut taken = 0;
                while taken < 1000 {
                    let u = DVector::from_fn(d, |_, _| sample_rng.gen_range(-1.0..1.0));
                    if u.norm() > 1.0 {
                        continue;
                    }
                    taken += 1;
                    samples += 1;
                    let y = &center.x + center.unwhiten_direction(&u);
                    if view.polytope.slacks(&y).iter().any(|s| *s < 0.0) {
                        outside += 1;
                    }
                }
            };
            let _ = minimize_observed(&mut oracle, n, SolverConfig::with_radius(128), Some(&mut observe));
        }
    }
    (centers, samples, outside)
}

fn main() -> ExitCode {
    let seed: u64 = std::env::var("ACCEPTANCE_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(2024);
    let mut runs = Runs::default();
    let mut lines = Vec::new();

    lines.push(sfm_recovery(seed, &mut runs));
    lines.push(quadratic_recovery(seed, &mut runs));

    let lll = lll_checks(100, seed);
    let (passed, detail) = all(&pick(&lll, &["lll_factor", "lll_same_lattice"]));
    lines.push(Line { id: 3, name: "LLL factor", passed, detail });

    let quad = run_family(Family::Quad, &(3..=10).collect::<Vec<_>>(), 5, &SolverConfig::with_radius(16));
    let barrier = barrier_checks(20, seed);
    let (sigma_ok, sigma_detail) = all(&pick(&barrier, &["leverage_identity"]));
    lines.push(Line {
        id: 4,
        name: "leverage-score identity",
        passed: runs.worst_sigma <= 1e-9 && sigma_ok,
        detail: format!(
            "{} certified centers in solver runs, worst |sum sigma - n| = {:.2e}; {sigma_detail}",
            runs.centers, runs.worst_sigma
        ),
    });

    let (passed, detail) = all(&pick(&barrier, &["gradient_fd", "hessian_sandwich"]));
    lines.push(Line { id: 5, name: "gradient/Hessian surrogates", passed, detail });
    let (passed, detail) = all(&pick(&barrier, &["mu_bounds"]));
    lines.push(Line { id: 6, name: "mu bounds", passed, detail });

    let (dikin_ok, dikin_detail) = all(&pick(&barrier, &["dikin_containment"]));
    let (centers, samples, outside) = dikin_along_runs(seed);
    lines.push(Line {
        id: 7,
        name: "Dikin containment",
        passed: dikin_ok && outside == 0,
        detail: format!("{dikin_detail}; {centers} solver centers, {samples} samples, {outside} outside"),
    });

    let strict = strict_rho_accounting(50, seed);
    lines.push(Line { id: 8, name: "strict-mode rho accounting", passed: strict.passed, detail: strict.detail });

    let retention = minimizer_retention(&[2, 3, 4, 5, 6], 4, seed);
    lines.push(Line { id: 9, name: "minimizer retention", passed: retention.passed, detail: retention.detail });

    for r in &quad.runs {
        if r.blocks > default_max_blocks(r.n, 16) {
            runs.over_budget += 1;
        }
    }
    let scaling_ok = quad.all_correct() && quad.loglog_slope <= 2.6 && runs.eo_mismatch == 0 && runs.over_budget == 0;
    let means: Vec<String> = quad.sizes.iter().map(|s| format!("{}:{:.0}", s.n, s.mean_so_calls)).collect();
    lines.push(Line {
        id: 10,
        name: "oracle-call scaling",
        passed: scaling_ok,
        detail: format!(
            "slope {:.3} (<= 2.6), C = {:.3}, mean SO calls {}; EO accounting mismatches {}/{} SFM runs; {} runs over maxBlocks",
            quad.loglog_slope,
            quad.call_constant,
            means.join(" "),
            runs.eo_mismatch,
            runs.sfm_runs,
            runs.over_budget
        ),
    });

    let proj = projection_identity(&[2, 3, 4, 5], 6, seed);
    lines.push(Line { id: 11, name: "lattice-projection identity", passed: proj.passed, detail: proj.detail });

    let mut ok = true;
    for l in &lines {
        ok &= l.passed;
        println!("{} criterion {:>2} {}: {}", if l.passed { "PASS" } else { "FAIL" }, l.id, l.name, l.detail.trim_end());
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
