//! Exact integer minimizer of `||x - target||^2` from separation answers only,
//! with the run report the CLI would write.
//!
//! cargo run --example quadratic_minimize

use intmin::oracles::quadratic_separation;
use intmin::report::RunReport;
use intmin::solver::{minimize, SolverConfig};

fn main() -> intmin::Result<()> {
    let target = vec![41, -17, 88, 3, -60];
    let config = SolverConfig::with_radius(128);
    let mut oracle = quadratic_separation(target.clone());
    let sol = minimize(&mut oracle, target.len(), config.clone())?;
    assert_eq!(sol.point, target);
    let report = RunReport::from_transcript(
        "example",
        sol.point,
        Some(0),
        0,
        &sol.transcript,
        0.0,
        serde_json::to_value(&config)?,
    );
    println!("{}", serde_json::to_string_pretty(&report.counts)?);
    println!("potential at each restart: {:.3?}", report.potentials.phi);
    Ok(())
}
