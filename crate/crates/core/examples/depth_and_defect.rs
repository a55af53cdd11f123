//! How deep into the unipotent tower one has to go before the dimension count
//! beats the rank, exactly and by the closed-form bounds.

use std::error::Error;

use chabauty_core::liedims::{self, CurveType};

pub fn run() -> Result<(), Box<dyn Error>> {
    let prof = liedims::defect_profile(CurveType::ProjectiveGenus(2), 5, 6, 30)?;
    println!("genus 2, rank 5");
    for n in 0..prof.depth {
        println!(
            "  n = {}: e = {}, d <= {}, level defect {}, cumulative {}",
            n + 1,
            prof.e[n],
            prof.d[n],
            prof.level_defect[n],
            prof.defect[n]
        );
    }

    println!("punctured line: rank, exact least depth, closed-form bound, applied depth");
    for r in [4u64, 10, 16, 40, 100, 1000] {
        let m = liedims::min_depth(CurveType::PuncturedLine, r, 40)?;
        let (_, applied) = liedims::applied_depth(r, 40)?;
        println!("  {r:>5} {:>3} {:>3} {:>3}", m.exact_min, m.paper_bound, applied);
    }

    for g in 2..=4 {
        let m = liedims::min_depth(CurveType::ProjectiveGenus(g), 50, 40)?;
        println!("genus {g}, rank 50: exact {}, bound {} (threshold {})", m.exact_min, m.paper_bound, m.threshold);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
