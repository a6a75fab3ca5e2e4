use intmin::cutting_plane::OracleAnswer;
use intmin::oracles::{
    brute_force_sfm, find_submodularity_violation, lovasz_extension_value, lovasz_separation, lovasz_subgradient,
    make_graph_cut_oracle, random_graph_edges, EvalOracle,
};
use intmin::sfm::minimize_submodular;
use intmin::solver::SolverConfig;
use intmin::verify::random_submodular;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn unit_point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, n)
}

fn triple() -> impl Strategy<Value = (u64, Vec<f64>, Vec<f64>)> {
    (2usize..=7).prop_flat_map(|n| (any::<u64>(), unit_point(n), unit_point(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lovasz_subgradient_is_valid((seed, x, y) in triple()) {
        let eo = random_submodular(&mut ChaCha8Rng::seed_from_u64(seed), x.len());
        let g = lovasz_subgradient(&eo, &x).unwrap();
        let fx = lovasz_extension_value(&eo, &x).unwrap();
        let fy = lovasz_extension_value(&eo, &y).unwrap();
        let lin: f64 = g.iter().zip(y.iter().zip(&x)).map(|(gi, (yi, xi))| *gi as f64 * (yi - xi)).sum();
        prop_assert!(fy >= fx + lin - 1e-9, "f_L(y) = {} < {}", fy, fx + lin);
    }

    #[test]
    fn separation_costs_n_evaluations((seed, x, _) in triple()) {
        let eo = random_submodular(&mut ChaCha8Rng::seed_from_u64(seed), x.len());
        eo.empty_value().unwrap();
        let before = eo.calls();
        lovasz_separation(&eo, &x).unwrap();
        prop_assert_eq!(eo.calls() - before, x.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn random_functions_pass_the_checker(n in 1usize..=8, seed in any::<u64>()) {
        let eo = random_submodular(&mut ChaCha8Rng::seed_from_u64(seed), n);
        prop_assert!(find_submodularity_violation(&eo, 500, seed).unwrap().is_none());
    }

    #[test]
    fn sfm_matches_enumeration(n in 2usize..=7, seed in any::<u64>()) {
        let edges = random_graph_edges(n, 10, seed);
        let eo = make_graph_cut_oracle(n, &edges).unwrap();
        let (best, _) = brute_force_sfm(&eo).unwrap();
        let sol = minimize_submodular(make_graph_cut_oracle(n, &edges).unwrap(), SolverConfig::default()).unwrap();
        prop_assert_eq!(sol.value, best);
        prop_assert_eq!(eo.eval_uncounted(&sol.set).unwrap(), best);
        let rounding = if sol.rounded { n } else { 0 };
        prop_assert_eq!(sol.eo_calls, n * sol.in_box_calls + rounding);
    }
}

#[test]
fn checker_flags_supermodular_function() {
    // f(S) = |S|^2 has increasing marginals
    let eo = EvalOracle::new(4, |s: &[bool]| (s.iter().filter(|&&b| b).count() as f64).powi(2));
    assert!(find_submodularity_violation(&eo, 200, 1).unwrap().is_some());
}

#[test]
fn box_cuts_point_back_inside() {
    let eo = EvalOracle::from_table(2, vec![0, 1, 1, 0]).unwrap();
    let before = eo.calls();
    let ans = lovasz_separation(&eo, &[1.5, 0.5]).unwrap();
    assert_eq!(ans, OracleAnswer::Halfspace(vec![-1.0, 0.0]));
    assert_eq!(eo.calls(), before);
}
