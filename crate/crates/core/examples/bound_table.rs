//! Effective bounds on the size of a family: the rational rows for one
//! parameter choice, and the transcendental ones.

use std::error::Error;

use chabauty_core::bounds::{self, FamilyParams, TwistVariant};
use chabauty_core::exactnum::int;

pub fn run() -> Result<(), Box<dyn Error>> {
    let params = FamilyParams::new(6, 3, 2, 1);
    println!("g = 6, s = 3, r = 2, d = 1");
    for rep in bounds::rational_table(&params) {
        println!("  {:<22} N > {:<12} min N {:<8} valid {}", rep.name, rep.threshold.to_string(), rep.min_n, rep.valid);
    }

    for g in [4, 5, 10] {
        let rep = bounds::mg_bound(g, g - 3)?;
        println!("moduli of genus {g}: min N {}", rep.min_n);
    }

    let sunit = bounds::sunit_bound(6, 50)?;
    println!("S-units, s = 6: threshold {} (min N {})", sunit.threshold, sunit.min_n);
    let twist = bounds::twist_bound(2, 30, &int(1), TwistVariant::Statement, 50)?;
    println!("twists, g = 2, r = 30: {:.4e}", twist.threshold.approx_f64());
    for rep in bounds::classical_rows(1, Some(23), Some(2), 30)? {
        println!("  {:<22} {:.4e} valid {}", rep.name, rep.threshold.approx_f64(), rep.valid);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
