//! One block of the volumetric cutting plane method against a quadratic
//! oracle, printing each add/drop step and the potential `rho`.
//!
//! cargo run --example cutting_plane_block

use intmin::barrier::Polytope;
use intmin::cutting_plane::{cpm_block, default_block_length, CpmConfig};
use intmin::oracles::quadratic_separation;
use nalgebra::DVector;

fn main() -> intmin::Result<()> {
    let k = Polytope::cube(2, 8.0);
    let mut oracle = quadratic_separation(vec![3, -2]);
    let t = default_block_length(2, k.constraints());
    let res = cpm_block(&mut oracle, &k, &DVector::zeros(2), t, &CpmConfig::default(), None)?;
    println!("{:>4} {:>9} {:>11} {:>11} {:>5}", "step", "action", "rho", "min sigma", "m");
    for r in &res.records {
        println!(
            "{:>4} {:>9} {:>11.5} {:>11.5} {:>5}",
            r.step,
            format!("{:?}", r.action),
            r.rho_before,
            r.min_sigma,
            r.constraints
        );
    }
    println!("center now {:.4?}, {} oracle calls", res.center.x.as_slice(), res.so_calls);
    if let Some(w) = res.terminated {
        println!("oracle answered YES at {w:?}");
    }
    Ok(())
}
