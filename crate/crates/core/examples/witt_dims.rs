//! Graded dimensions of the lower central series quotients, for the punctured
//! line and for surface groups, next to the analytic envelopes.

use std::error::Error;

use chabauty_core::liedims::{self, CurveType};

pub fn run() -> Result<(), Box<dyn Error>> {
    for curve in [CurveType::PuncturedLine, CurveType::ProjectiveGenus(2), CurveType::ProjectiveGenus(3)] {
        let dims = liedims::graded_dims(curve, 10)?;
        let shown: Vec<String> = dims.e.iter().map(|x| x.to_string()).collect();
        println!("{curve:?}: e_1..e_10 = {}", shown.join(", "));
    }

    // sum_{k | n} k e_k equals the n-th power sum
    let curve = CurveType::ProjectiveGenus(2);
    let dims = liedims::graded_dims(curve, 12)?;
    let a = liedims::power_sums(curve, 12)?;
    let n = 12;
    let lhs: num_bigint::BigInt = (1..=n).filter(|k| n % k == 0).map(|k| dims.get(k) * k).sum();
    println!("genus 2, n = 12: sum k e_k = {lhs}, power sum = {}", a[n]);

    let (lo, hi) = liedims::dim_envelope(curve, 30, 30)?;
    let e30 = liedims::graded_dims(curve, 30)?.get(30).clone();
    println!("genus 2, e_30 = {e30}");
    println!("  envelope [{}, {}]", lo.lower_decimal(), hi.upper_decimal());
    println!("  alpha_+ = {}", liedims::alpha_plus(2, 30));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
