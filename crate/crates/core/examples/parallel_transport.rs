//! Horizontal sections of a flat unipotent connection on a polydisc, computed
//! two ways, and their values at p-adic points.

use std::error::Error;

use chabauty_core::transport::{self, ConnectionForm, SeriesMatrix};
use serde_json::json;

pub fn run() -> Result<(), Box<dyn Error>> {
    let fam = transport::demo_family(6);
    println!("flat: {}", transport::flatness_check(&fam)?.flat);
    let res = transport::parallel_transport(&fam, None)?;
    println!("H[1][0] = {}", res.h.get(1, 0));
    println!("dH - Lambda H: {:?}", transport::horizontality_residual(&fam, &res.h)?);
    let xs = transport::axis_transport(&fam, &[0, 1], None)?;
    let sx = transport::axis_transport(&fam, &[1, 0], None)?;
    println!("axis routes agree: {}", xs == res.h && sx == res.h);

    let betti = transport::betti_square_check(&fam, None)?;
    println!("fibre then base agrees with the leaf: {}", betti.consistent);

    let t = vec!["t".to_string()];
    let a = SeriesMatrix::from_json(&json!([["0", "0", "0"], ["1", "0", "0"], ["t", "1 + t", "0"]]), &t, 12)?;
    let conn = ConnectionForm::new(vec![a], Vec::new())?;
    let res = transport::parallel_transport(&conn, None)?;
    let x1 = transport::padic_point(&[35], 7, 8)?;
    let x2 = transport::padic_point(&[14], 7, 8)?;
    let g = transport::transport_evaluate(&res, &x1, &x2)?;
    println!("transport from 35 to 14 over Z_7:");
    for i in 0..3 {
        let row: Vec<String> = (0..3).map(|j| g.get(i, j).to_string()).collect();
        println!("  [{}]", row.join(", "));
    }
    let bad = SeriesMatrix::from_json(&json!([["0", "0"], ["1 + s", "0"]]), &["x".to_string(), "s".to_string()], 4)?;
    let other = SeriesMatrix::from_json(&json!([["0", "0"], ["x^2", "0"]]), &["x".to_string(), "s".to_string()], 4)?;
    let non_flat = ConnectionForm::new(vec![bad, other], Vec::new())?;
    println!("non-flat input: {}", transport::parallel_transport(&non_flat, None).unwrap_err());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
