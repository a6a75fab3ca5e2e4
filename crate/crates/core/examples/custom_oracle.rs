//! Plugging in your own separation oracle: a weighted L1 distance plus a
//! coupling term, minimized over the integers.
//!
//! cargo run --example custom_oracle

use intmin::cutting_plane::{OracleAnswer, SeparationOracle};
use intmin::solver::{minimize, SolverConfig};

/// `f(x) = sum_i w_i |x_i - t_i| + |x_0 + x_1 - t_0 - t_1|`, minimized only at `t`.
struct WeightedL1 {
    target: Vec<f64>,
    weights: Vec<f64>,
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl SeparationOracle for WeightedL1 {
    fn dim(&self) -> usize {
        self.target.len()
    }

    fn query(&mut self, x: &[f64]) -> intmin::Result<OracleAnswer> {
        if x.iter().zip(&self.target).all(|(a, b)| a == b) {
            return Ok(OracleAnswer::Yes);
        }
        // a subgradient g; minimizers lie in {y : -g . (y - x) >= 0}
        let mut g: Vec<f64> = x.iter().zip(&self.target).zip(&self.weights).map(|((a, t), w)| w * sign(a - t)).collect();
        let c = sign(x[0] + x[1] - self.target[0] - self.target[1]);
        g[0] += c;
        g[1] += c;
        if g.iter().all(|&v| v == 0.0) {
            // x minimizes f but is not the target: cannot happen for integral t
            return Ok(OracleAnswer::Yes);
        }
        Ok(OracleAnswer::Halfspace(g.iter().map(|v| -v).collect()))
    }
}

fn main() -> intmin::Result<()> {
    let mut oracle = WeightedL1 { target: vec![5.0, -9.0, 2.0], weights: vec![1.0, 2.5, 0.5] };
    let sol = minimize(&mut oracle, 3, SolverConfig::with_radius(32))?;
    println!("minimizer {:?} after {} oracle calls", sol.point, sol.transcript.so_calls);
    Ok(())
}
