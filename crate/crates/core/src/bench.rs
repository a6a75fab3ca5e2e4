//! Scaling sweeps over the two instance families and the call-count fit.

use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracles::{brute_force_sfm, make_graph_cut_oracle, quadratic_separation, random_graph_edges};
use crate::sfm::minimize_submodular;
use crate::solver::{minimize, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    #[serde(rename = "quad")]
    Quad,
    #[serde(rename = "sfm-cut")]
    SfmCut,
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quad" => Ok(Family::Quad),
            "sfm-cut" => Ok(Family::SfmCut),
            _ => Err(Error::InvalidInstance(format!("unknown family {s:?}"))),
        }
    }
}

/// Parses `a..b` (inclusive), a comma list, or a single size.
pub fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidInstance(format!("bad size list {s:?}"));
    let sizes: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        (a..=b).collect()
    } else {
        s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?
    };
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(bad());
    }
    Ok(sizes)
}

/// One solve in a sweep.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchRun {
    pub n: usize,
    pub seed: u64,
    pub correct: bool,
    pub so_calls: usize,
    pub eo_calls: usize,
    pub blocks: usize,
    pub dim_reductions: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub millis: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SizeSummary {
    pub n: usize,
    pub runs: usize,
    pub correct: usize,
    pub mean_so_calls: f64,
    pub mean_eo_calls: f64,
    pub mean_blocks: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchReport {
    pub family: Family,
    pub radius: i64,
    pub sizes: Vec<SizeSummary>,
    /// Least-squares slope of `ln(mean SO calls)` against `ln n`.
    pub loglog_slope: f64,
    /// Smallest `C` with `SO calls <= C n^2 ln n` on every run (sizes `n >= 2`).
    pub call_constant: f64,
    pub runs: Vec<BenchRun>,
}

impl BenchReport {
    pub fn all_correct(&self) -> bool {
        self.runs.iter().all(|r| r.correct)
    }
}

/// Target of the quadratic family for `(n, seed)`: uniform in `[-R/2, R/2]^n`.
pub fn quad_target(n: usize, seed: u64, radius: i64) -> Vec<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((n as u64) << 32));
    let half = (radius / 2).max(1);
    (0..n).map(|_| rng.gen_range(-half..=half)).collect()
}

/// Edge seed of the graph-cut family for `(n, seed)`.
pub fn cut_seed(n: usize, seed: u64) -> u64 {
    seed ^ ((n as u64) << 32)
}

fn run_one(family: Family, n: usize, seed: u64, config: &SolverConfig) -> BenchRun {
    let t0 = Instant::now();
    let mut run = BenchRun {
        n,
        seed,
        correct: false,
        so_calls: 0,
        eo_calls: 0,
        blocks: 0,
        dim_reductions: 0,
        error: None,
        millis: 0.0,
    };
    let outcome = match family {
        Family::Quad => {
            let target = quad_target(n, seed, config.radius);
            let mut oracle = quadratic_separation(target.clone());
            minimize(&mut oracle, n, config.clone()).map(|sol| (sol.point == target, 0, sol.transcript))
        }
        Family::SfmCut => {
            let edges = random_graph_edges(n, 10, cut_seed(n, seed));
            let best = make_graph_cut_oracle(n, &edges).and_then(|eo| brute_force_sfm(&eo)).map(|b| b.0);
            make_graph_cut_oracle(n, &edges)
                .and_then(|eo| minimize_submodular(eo, config.clone()))
                .map(|sol| (best.as_ref().ok() == Some(&sol.value), sol.eo_calls, sol.transcript))
        }
    };
    match outcome {
        Ok((correct, eo_calls, t)) => {
            run.correct = correct;
            run.eo_calls = eo_calls;
            run.so_calls = t.so_calls;
            run.blocks = t.blocks;
            run.dim_reductions = t.dim_reductions;
        }
        Err(e) => run.error = Some(e.to_string()),
    }
    run.millis = t0.elapsed().as_secs_f64() * 1e3;
    run
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Runs `seeds` instances per size.
pub fn run_family(family: Family, sizes: &[usize], seeds: u64, config: &SolverConfig) -> BenchReport {
    let mut config = config.clone();
    if family == Family::SfmCut {
        config.radius = 1;
    }
    let mut runs = Vec::new();
    let mut summaries = Vec::new();
    for &n in sizes {
        let batch: Vec<BenchRun> = (0..seeds).map(|s| run_one(family, n, s, &config)).collect();
        let k = batch.len().max(1) as f64;
        summaries.push(SizeSummary {
            n,
            runs: batch.len(),
            correct: batch.iter().filter(|r| r.correct).count(),
            mean_so_calls: batch.iter().map(|r| r.so_calls as f64).sum::<f64>() / k,
            mean_eo_calls: batch.iter().map(|r| r.eo_calls as f64).sum::<f64>() / k,
            mean_blocks: batch.iter().map(|r| r.blocks as f64).sum::<f64>() / k,
        });
        log::info!("{family:?} n = {n}: {} of {} correct", summaries.last().unwrap().correct, batch.len());
        runs.extend(batch);
    }
    let points: Vec<(f64, f64)> = summaries
        .iter()
        .filter(|s| s.mean_so_calls > 0.0)
        .map(|s| (s.n as f64, s.mean_so_calls))
        .collect();
    let loglog_slope = if points.len() >= 2 { loglog_slope(&points) } else { f64::NAN };
    let call_constant = runs
        .iter()
        .filter(|r| r.n >= 2)
        .map(|r| r.so_calls as f64 / ((r.n * r.n) as f64 * (r.n as f64).ln()))
        .fold(0.0, f64::max);
    BenchReport { family, radius: config.radius, sizes: summaries, loglog_slope, call_constant, runs }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(parse_sizes("3..6").unwrap(), vec![3, 4, 5, 6]);
        assert_eq!(parse_sizes("3..=4").unwrap(), vec![3, 4]);
        assert_eq!(parse_sizes("2,5").unwrap(), vec![2, 5]);
        assert_eq!(parse_sizes("7").unwrap(), vec![7]);
        assert!(parse_sizes("0..2").is_err());
        assert!(parse_sizes("x").is_err());
        assert!(parse_sizes("5..3").is_err());
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (2..8).map(|n| (n as f64, 3.0 * (n as f64).powi(2))).collect();
        assert!((loglog_slope(&pts) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn tiny_sweeps() {
        let q = run_family(Family::Quad, &[2, 3], 2, &SolverConfig::with_radius(16));
        assert!(q.all_correct());
        let s = run_family(Family::SfmCut, &[3], 2, &SolverConfig::default());
        assert!(s.all_correct());
        assert!(s.runs.iter().all(|r| r.eo_calls > 0));
    }
}
