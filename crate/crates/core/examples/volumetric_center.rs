//! Center a triangle-with-a-box polytope under the volumetric barrier and
//! print leverage scores, mu and a Dikin ellipsoid containment check.
//!
//! cargo run --example volumetric_center

use intmin::barrier::{approx_volumetric_center, Polytope};
use nalgebra::{DMatrix, DVector};

fn main() -> intmin::Result<()> {
    // x >= -1, y >= -1, -x - y >= -1, plus the box |x|, |y| <= 2
    let a = DMatrix::from_row_slice(6, 2, &[1.0, 0.0, 0.0, 1.0, -1.0, -1.0, -1.0, 0.0, 0.0, -1.0, 1.0, 0.0]);
    let b = DVector::from_row_slice(&[-1.0, -1.0, -1.0, -2.0, -2.0, -2.0]);
    let k = Polytope::new(a, b, DVector::zeros(2))?;

    let (center, iters) = approx_volumetric_center(&k, &DVector::from_row_slice(&[0.5, -0.5]), 1e-14)?;
    println!("center {:.6?} after {iters} Newton steps", center.x.as_slice());
    println!("F = {:.6}, decrement {:.2e}", center.f, center.decrement());
    println!("leverage scores {:.4?} (sum {:.12})", center.sigma.as_slice(), center.sigma.sum());
    println!("mu = {:.4}, min sigma = {:.4}, 1/(4m) = {:.4}", center.mu_exact(), center.mu_lower, 1.0 / 24.0);

    // boundary of the Dikin ellipsoid: x + R^-1 u with |u| = 1
    let worst = (0..360)
        .map(|deg| {
            let t = (deg as f64).to_radians();
            let y = &center.x + center.unwhiten_direction(&DVector::from_row_slice(&[t.cos(), t.sin()]));
            k.slacks(&y).min()
        })
        .fold(f64::INFINITY, f64::min);
    println!("smallest slack on the Dikin boundary: {worst:.4} (nonnegative)");
    Ok(())
}
