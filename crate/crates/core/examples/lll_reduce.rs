//! LLL-reduce a skewed lattice under a non-Euclidean form and compare the
//! first vector with the true shortest vector found by enumeration.
//!
//! cargo run --example lll_reduce

use intmin::lattice::{brute_force_shortest, exhaustive_coefficient_bound, lll_reduce, rational, GramForm, LatticeState};

fn main() -> intmin::Result<()> {
    let lattice = LatticeState::from_i64_rows(&[vec![1, 1, 1], vec![-1, 0, 2], vec![3, 5, 6]])?;
    let form = GramForm::from_i64(&[vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 2]]);

    let (reduced, first) = lll_reduce(&lattice, &form)?;
    println!("reduced basis:");
    for b in reduced.basis() {
        println!("  {:?}", b.iter().map(rational::format).collect::<Vec<_>>());
    }
    let bound = exhaustive_coefficient_bound(&reduced, &form).expect("nonsingular form");
    let lambda = brute_force_shortest(&reduced, &form, bound)?;
    println!("|b1|^2 = {}, lambda1^2 = {}", rational::format(&first), rational::format(&lambda));
    println!("ratio {:.3} (guaranteed <= 2^(k-1) = 4)", rational::to_f64(&first) / rational::to_f64(&lambda));
    println!("same lattice: {}", reduced.same_lattice(&lattice));
    Ok(())
}
