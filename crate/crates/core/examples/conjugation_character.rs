//! Characters of complex conjugation on the graded pieces in genus g, and the
//! dimensions of the fixed parts.

use std::error::Error;

use chabauty_core::liedims::{self, FilipRhs};

pub fn run() -> Result<(), Box<dyn Error>> {
    for g in 2..=3 {
        let ch = liedims::filip_chi(g, 8)?;
        let dims = liedims::graded_dims(liedims::CurveType::ProjectiveGenus(g), 8)?;
        println!("genus {g}");
        println!("  {:>2} {:>8} {:>8} {:>8}", "n", "e_n", "chi_n", "dim V_n");
        for n in 1..=8 {
            println!("  {n:>2} {:>8} {:>8} {:>8}", dims.get(n), ch.chi_c[n - 1], ch.v_fixed[n - 1]);
        }
    }

    // the literal zero right-hand side breaks integrality
    let bad = liedims::filip_nonintegral_levels(2, 10, FilipRhs::Zero)?;
    println!("zero right-hand side: non-integral fixed dimensions at n = {bad:?}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
