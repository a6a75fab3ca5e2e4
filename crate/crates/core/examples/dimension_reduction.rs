//! Watch the solver collapse onto lattice hyperplanes: every time the lattice
//! has a vector that is short under the inverse barrier Hessian, the search
//! continues in one dimension less.
//!
//! cargo run --example dimension_reduction

use intmin::lattice::rational;
use intmin::oracles::quadratic_separation;
use intmin::solver::{minimize_observed, SolverConfig, SolverEvent};

fn main() -> intmin::Result<()> {
    let target = vec![7, -3, 12, 0];
    let mut oracle = quadratic_separation(target.clone());
    let mut on_event = |ev: &SolverEvent| {
        if let SolverEvent::Reduction { state } = ev {
            let z = state.sub.equations.last().expect("one equation per reduction");
            let r = state.sub.rhs.last().unwrap();
            println!(
                "now in dimension {}: added {:?} . y = {r}, lattice det^2 = {}",
                state.dim(),
                z.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                rational::format(&state.lattice.determinant_squared()),
            );
        }
    };
    let sol = minimize_observed(&mut oracle, 4, SolverConfig::with_radius(16), Some(&mut on_event))?;
    println!("minimizer {:?} (target {target:?})", sol.point);
    for r in &sol.transcript.reductions {
        println!("  reduced at |v| = {:.3e} < threshold {:.3e}, gamma {:.2}", r.norm, r.threshold, r.gamma);
    }
    Ok(())
}
