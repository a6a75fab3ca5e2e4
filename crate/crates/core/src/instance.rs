//! Instance files and a uniform solve entry point.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracles::{make_graph_cut_oracle, quadratic_separation, EvalOracle};
use crate::report::Transcript;
use crate::sfm::minimize_submodular;
use crate::solver::{minimize, SolverConfig};

/// Largest ground set accepted for set-function instances.
pub const MAX_SET_SIZE: usize = 20;

/// Instance JSON, tagged by `"type"`. Graph vertices are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Instance {
    GraphCut { n: usize, edges: Vec<(usize, usize, i64)> },
    /// `values[mask]` is `f(S)` with element `i` at bit `i`.
    Table { n: usize, values: Vec<i64> },
    /// `f(x) = ||x - target||^2`, optionally with the box radius to search.
    Quadratic {
        target: Vec<i64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<i64>,
    },
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Self> {
        let inst: Instance = serde_json::from_str(text).map_err(|e| Error::InvalidInstance(e.to_string()))?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInstance(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInstance(m));
        match self {
            Instance::GraphCut { n, edges } => {
                if *n == 0 || *n > MAX_SET_SIZE {
                    return bad(format!("n = {n} outside 1..={MAX_SET_SIZE}"));
                }
                make_graph_cut_oracle(*n, edges).map(|_| ())
            }
            Instance::Table { n, values } => {
                if *n == 0 || *n > MAX_SET_SIZE {
                    return bad(format!("n = {n} outside 1..={MAX_SET_SIZE}"));
                }
                EvalOracle::from_table(*n, values.clone()).map(|_| ())
            }
            Instance::Quadratic { target, radius } => {
                if target.is_empty() {
                    return bad("empty target".into());
                }
                if radius.is_some_and(|r| r < 1) {
                    return bad(format!("radius {radius:?} < 1"));
                }
                Ok(())
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Instance::GraphCut { n, .. } | Instance::Table { n, .. } => *n,
            Instance::Quadratic { target, .. } => target.len(),
        }
    }

    pub fn is_set_function(&self) -> bool {
        !matches!(self, Instance::Quadratic { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Instance::GraphCut { .. } => "graph_cut",
            Instance::Table { .. } => "table",
            Instance::Quadratic { .. } => "quadratic",
        }
    }

    /// Radius stored in the instance, if any (set functions always use 1).
    pub fn radius(&self) -> Option<i64> {
        match self {
            Instance::Quadratic { radius, .. } => *radius,
            _ => Some(1),
        }
    }

    pub fn eval_oracle(&self) -> Result<Option<EvalOracle>> {
        match self {
            Instance::GraphCut { n, edges } => make_graph_cut_oracle(*n, edges).map(Some),
            Instance::Table { n, values } => EvalOracle::from_table(*n, values.clone()).map(Some),
            Instance::Quadratic { .. } => Ok(None),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub minimizer: Vec<i64>,
    pub objective_value: i64,
    pub eo_calls: usize,
    pub transcript: Transcript,
}

/// Solves an instance. Set functions always run with radius 1.
pub fn solve(inst: &Instance, config: &SolverConfig) -> Result<Outcome> {
    if let Some(eo) = inst.eval_oracle()? {
        let sol = minimize_submodular(eo, config.clone())?;
        return Ok(Outcome {
            minimizer: sol.set.iter().map(|&b| b as i64).collect(),
            objective_value: sol.value,
            eo_calls: sol.eo_calls,
            transcript: sol.transcript,
        });
    }
    let Instance::Quadratic { target, .. } = inst else { unreachable!() };
    let mut oracle = quadratic_separation(target.clone());
    let sol = minimize(&mut oracle, target.len(), config.clone())?;
    let value = sol
        .point
        .iter()
        .zip(target)
        .map(|(x, t)| (*x as i128 - *t as i128).pow(2))
        .sum::<i128>();
    Ok(Outcome {
        minimizer: sol.point,
        objective_value: i64::try_from(value).map_err(|_| Error::TooLarge("objective value".into()))?,
        eo_calls: 0,
        transcript: sol.transcript,
    })
}
