//! Rigorous enclosures of transcendental constants and the strict ceilings
//! that turn them into integer bounds.

use std::error::Error;

use chabauty_core::exactnum::{self, BoundValue};

pub fn run() -> Result<(), Box<dyn Error>> {
    let e = BoundValue::e(40);
    println!("e        in {e}");
    println!("log 2    in {}", BoundValue::ln2(40));
    let x = BoundValue::from_int(10, 40);
    println!("10^(1/3) in {}", x.pow(&BoundValue::from_rational(&exactnum::rat(1, 3), 40))?);

    // least integer strictly above e^3
    let (v, n) = exactnum::resolve_strict_ceiling(20, |d| Ok(BoundValue::e(d).powi(3)))?;
    println!("e^3 in {v}, least integer above: {n}");

    let t = exactnum::loglog_threshold(&BoundValue::from_int(4, 40), &BoundValue::from_int(1000, 40))?;
    println!("4^m / m > 1000 for m > {t}");
    println!("mu(30) = {}, divisors(28) = {:?}", exactnum::mobius(30)?, exactnum::divisors(28)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
