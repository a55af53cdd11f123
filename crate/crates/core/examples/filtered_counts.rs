//! Monomial counts for filtered graded algebras and the non-density threshold
//! they give, under both weight conventions.

use std::error::Error;

use chabauty_core::exactnum::BoundValue;
use chabauty_core::filtered::{self, FilteredShape, WeightConvention};
use chabauty_core::liedims;

pub fn run() -> Result<(), Box<dyn Error>> {
    let shape = FilteredShape::new(vec![2, 1, 2], vec![2, 2, 3])?;
    for conv in [WeightConvention::Weighted, WeightConvention::Unweighted] {
        let table: Vec<String> = filtered::dj_table(&shape.d, 6, conv).iter().map(|x| x.to_string()).collect();
        println!("{conv:?}: D_0..D_6 = {}", table.join(", "));
        println!("  J = {}", filtered::j_exact(&shape, conv));
        match filtered::nondensity_threshold(&shape, conv) {
            Ok(t) => println!("  non-density threshold {t}"),
            Err(e) => println!("  {e}"),
        }
    }

    let r = BoundValue::from_int(10, 40);
    let alpha = liedims::alpha_plus(2, 40);
    let beta = liedims::alpha_plus(2, 40);
    for n in 1..=5 {
        match filtered::j_upper(&r, &alpha, &beta, n) {
            Ok(u) => println!("J upper bound, r = 10, n = {n}: {u}"),
            Err(e) => println!("n = {n}: {e}"),
        }
    }

    let s = filtered::simplification_59(100, 40)?;
    println!("r = 100: 2 r^(n+4) = {}, simplified = {}, holds {}", s.two_r_power, s.simplified, s.holds);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
