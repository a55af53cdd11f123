//! Integrals of closed one-forms inside a residue disk, checked against the
//! p-adic logarithm.

use std::error::Error;

use chabauty_core::padic::{self, parse_poly, OneForm, PadicScalar, RationalRing};
use chabauty_core::transport;

pub fn run() -> Result<(), Box<dyn Error>> {
    let t = vec!["t".to_string()];
    let cap = 16;
    let p = 5;
    // dt / (1 + t) as a truncated geometric series
    let geometric: Vec<String> = (0..=cap).map(|k| format!("{}*t^{k}", if k % 2 == 0 { 1 } else { -1 })).collect();
    let form = OneForm::new(vec![parse_poly(RationalRing, &t, cap, &geometric.join(" + "))?], None)?;
    let x0 = transport::padic_point(&[0], p, 8)?;
    for x in [5, 10, 15, 20] {
        let xp = transport::padic_point(&[x], p, 8)?;
        let v = transport::coleman_disk_integral(std::slice::from_ref(&form), &x0, &xp)?;
        let log = padic::padic_log(&PadicScalar::from_i64(1 + x, p, 8)?)?;
        println!("int_0^{x} dt/(1+t) = {}  log({}) = {log}", v[0], 1 + x);
    }

    let xy = vec!["x".to_string(), "y".to_string()];
    let f = parse_poly(RationalRing, &xy, 6, "x*y + 1/2*x^2 - y^3")?;
    let w = OneForm::exact(&f)?;
    let back = padic::antiderivative(&w)?;
    println!("d({f}) integrates back to {back}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
