//! Fixed absolute precision p-adic numbers: arithmetic, the logarithm, and
//! ranks of matrices known only modulo p^N.

use std::error::Error;

use chabauty_core::padic::{self, ArithOp, PadicMatrix, PadicScalar};

pub fn run() -> Result<(), Box<dyn Error>> {
    let (p, n) = (5, 6);
    let a = PadicScalar::from_i64(2, p, n)?;
    let b = PadicScalar::from_i64(75, p, n)?;
    for op in [ArithOp::Add, ArithOp::Sub, ArithOp::Mul] {
        println!("{op:?}(2, 75) = {}", padic::padic_arith(op, &a, &b)?);
    }
    println!("1/2 = {}", a.inv()?);
    // dividing by p^2 costs two digits
    println!("75 / 25 = {}", b.div(&PadicScalar::from_i64(25, p, n)?)?);

    let six = PadicScalar::from_i64(6, p, n)?;
    let l6 = padic::padic_log(&six)?;
    let l36 = padic::padic_log(&six.mul(&six)?)?;
    println!("log 6 = {l6}, log 36 - 2 log 6 = {}", l36.sub(&l6.add(&l6)?)?);

    let m = PadicMatrix::from_int_rows(&[vec![1, 0], vec![0, 5i64.pow(4)]], p, n)?;
    for tol in [0, 1, 2, 3] {
        let r = m.rank_at_precision(tol)?;
        println!("diag(1, 5^4), tolerance {tol}: rank {} certified {}", r.rank, r.certified);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}
