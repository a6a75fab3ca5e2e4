//! Run transcripts and the versioned JSON run report.

use serde::{Deserialize, Serialize};

pub const REPORT_SCHEMA: &str = "v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Add,
    Drop,
    Terminate,
}

/// One cutting plane step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StepRecord {
    pub block: usize,
    pub step: usize,
    pub dim: usize,
    pub action: StepKind,
    /// Volumetric value at the certified center before the step.
    pub rho_before: f64,
    /// Volumetric value at the re-certified center after the step, when re-centered.
    pub rho_after: Option<f64>,
    pub min_sigma: f64,
    pub constraints: usize,
    pub newton_iters: usize,
    pub sigma_sum_error: f64,
}

/// Potential at a (re)start: `ln vol(K) + ln det(lattice)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PhaseRecord {
    pub dim: usize,
    pub log_volume: f64,
    pub log_det_lattice: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReductionRecord {
    pub dim_before: usize,
    /// `||v||` under the inverse barrier Hessian.
    pub norm: f64,
    pub gamma: f64,
    pub threshold: f64,
    /// Hyperplane normal and offset, exact (`"num/den"`).
    pub normal: Vec<String>,
    pub offset: f64,
    pub preimage: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Transcript {
    pub so_calls: usize,
    pub blocks: usize,
    pub dim_reductions: usize,
    pub newton_iters: usize,
    pub lll_calls: usize,
    pub steps: Vec<StepRecord>,
    pub phases: Vec<PhaseRecord>,
    pub reductions: Vec<ReductionRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Counts {
    pub so_calls: usize,
    pub eo_calls: usize,
    pub blocks: usize,
    pub dim_reductions: usize,
    pub newton_iters: usize,
    pub lll_calls: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Potentials {
    pub phi: Vec<f64>,
    pub rho: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub schema: String,
    pub instance: String,
    pub status: String,
    pub minimizer: Vec<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective_value: Option<i64>,
    pub counts: Counts,
    pub potentials: Potentials,
    /// Milliseconds.
    #[serde(rename = "wallTime")]
    pub wall_time_ms: f64,
    pub config: serde_json::Value,
}

impl RunReport {
    pub fn from_transcript(
        instance: &str,
        minimizer: Vec<i64>,
        objective_value: Option<i64>,
        eo_calls: usize,
        transcript: &Transcript,
        wall_time_ms: f64,
        config: serde_json::Value,
    ) -> Self {
        Self {
            schema: REPORT_SCHEMA.into(),
            instance: instance.into(),
            status: "ok".into(),
            minimizer,
            objective_value,
            counts: Counts {
                so_calls: transcript.so_calls,
                eo_calls,
                blocks: transcript.blocks,
                dim_reductions: transcript.dim_reductions,
                newton_iters: transcript.newton_iters,
                lll_calls: transcript.lll_calls,
            },
            potentials: Potentials {
                phi: transcript.phases.iter().map(|p| p.phi).collect(),
                rho: transcript.steps.iter().map(|s| s.rho_before).collect(),
            },
            wall_time_ms,
            config,
        }
    }

    /// The report as JSON with the wall-clock field removed, for comparisons.
    pub fn without_wall_time(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("wallTime");
        }
        v
    }
}
