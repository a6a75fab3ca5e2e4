//! Library-level equivalent of `intmin solve`: parse instance JSON, solve,
//! and print the versioned run report.
//!
//! cargo run --example instance_report

use intmin::cutting_plane::CpmConfig;
use intmin::instance::{solve, Instance};
use intmin::report::RunReport;
use intmin::solver::{SolverConfig, ThresholdPolicy};

fn main() -> intmin::Result<()> {
    let texts = [
        r#"{"type":"graph_cut","n":4,"edges":[[0,1,3],[1,2,1],[2,3,4],[3,0,2]]}"#,
        r#"{"type":"table","n":3,"values":[0,2,-1,1,3,4,2,2]}"#,
        r#"{"type":"quadratic","target":[3,-2],"radius":8}"#,
    ];
    for text in texts {
        let inst = Instance::from_json(text)?;
        let config = SolverConfig {
            threshold_policy: ThresholdPolicy::Guarded,
            cpm: CpmConfig::default(),
            ..SolverConfig::with_radius(inst.radius().unwrap_or(1))
        };
        let out = solve(&inst, &config)?;
        let report = RunReport::from_transcript(
            inst.kind(),
            out.minimizer,
            Some(out.objective_value),
            out.eo_calls,
            &out.transcript,
            0.0,
            serde_json::to_value(&config)?,
        );
        println!("{}", serde_json::to_string(&report.without_wall_time())?);
    }
    Ok(())
}
