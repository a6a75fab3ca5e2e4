//! Submodular minimization through the Lovász extension.

use crate::error::{Error, Result};
use crate::oracles::{best_level_set, EvalOracle, LovaszOracle};
use crate::report::Transcript;
use crate::solver::{minimize, SolverConfig};

#[derive(Debug, Clone)]
pub struct SfmSolution {
    pub set: Vec<bool>,
    pub value: i64,
    pub transcript: Transcript,
    /// Counted evaluation-oracle calls, level-set rounding included.
    pub eo_calls: usize,
    /// Separation calls answered by the greedy subgradient (the rest are box cuts).
    pub in_box_calls: usize,
    pub box_cuts: usize,
    /// The solver stopped at a fractional minimizer of the extension and the
    /// set was read off its best level set.
    pub rounded: bool,
}

/// Minimizes `f` over subsets with the solver on `[-1, 1]^n`, radius forced to 1.
///
/// A YES at a fractional point means the extension is minimized there
/// (over `W`, which holds every integral minimizer), so its best level
/// set is an exact minimizer.
pub fn minimize_submodular(eo: EvalOracle, mut config: SolverConfig) -> Result<SfmSolution> {
    let n = eo.n();
    config.radius = 1;
    let mut oracle = LovaszOracle::new(eo);
    let (set, transcript, rounded) = match minimize(&mut oracle, n, config) {
        Ok(sol) => {
            if sol.point.iter().any(|&v| v != 0 && v != 1) {
                return Err(Error::OracleInconsistency(format!("non-binary minimizer {:?}", sol.point)));
            }
            (sol.point.iter().map(|&v| v == 1).collect(), sol.transcript, false)
        }
        Err(Error::AmbiguousYes { point, transcript }) => {
            let clamped: Vec<f64> = point.iter().map(|v| v.clamp(0.0, 1.0)).collect();
            let (set, _) = best_level_set(&oracle.eo, &clamped)?;
            log::info!("fractional YES, rounded through the best level set");
            (set, transcript.map(|t| *t).unwrap_or_default(), true)
        }
        Err(e) => return Err(e),
    };
    let value = oracle.eo.eval_uncounted(&set)?;
    Ok(SfmSolution {
        set,
        value,
        transcript,
        eo_calls: oracle.eo.calls(),
        in_box_calls: oracle.in_box_calls(),
        box_cuts: oracle.box_cuts,
        rounded,
    })
}
