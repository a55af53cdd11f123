//! Truncated `p`-adic arithmetic, truncated power series and precision-aware
//! linear algebra.

mod matrix;
mod scalar;
pub mod series;

pub use matrix::{PadicMatrix, RankReport};
pub use scalar::{mod_inverse, p_power, padic_log, val_int, val_rat, PadicScalar};
pub use series::{
    antiderivative, parse_poly, Monomial, OneForm, PadicRing, RationalRing, Ring, TruncSeries,
};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("not a unit: {0}")]
    NotUnit(String),
    #[error("result is not p-integral: {0}")]
    NonIntegral(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("form is not closed: {0}")]
    Integrability(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, PadicError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Inv,
    Div,
}

impl std::str::FromStr for ArithOp {
    type Err = PadicError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "add" => ArithOp::Add,
            "sub" => ArithOp::Sub,
            "mul" => ArithOp::Mul,
            "inv" => ArithOp::Inv,
            "div" => ArithOp::Div,
            other => return Err(PadicError::Parse(format!("unknown operation `{other}`"))),
        })
    }
}

/// Apply one arithmetic operation; `inv` ignores `b`.
pub fn padic_arith(op: ArithOp, a: &PadicScalar, b: &PadicScalar) -> Result<PadicScalar> {
    match op {
        ArithOp::Add => a.add(b),
        ArithOp::Sub => a.sub(b),
        ArithOp::Mul => a.mul(b),
        ArithOp::Inv => a.inv(),
        ArithOp::Div => a.div(b),
    }
}

/// Parse a JSON scalar: a display string `u*p^v+O(p^N)`, an integer, or a rational string.
pub fn parse_scalar(v: &Value, p: u64, n: u32) -> Result<PadicScalar> {
    match v {
        Value::Number(x) => {
            let x = x
                .as_i64()
                .ok_or_else(|| PadicError::Parse(format!("not an integer: {x}")))?;
            PadicScalar::from_i64(x, p, n)
        }
        Value::String(s) if s.contains("O(") => s.parse(),
        Value::String(s) => PadicScalar::from_rational(&parse_rational(s)?, p, n),
        other => Err(PadicError::Parse(format!("cannot read scalar from {other}"))),
    }
}

/// Parse `a` or `a/b`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || PadicError::Parse(format!("cannot parse rational `{s}`"));
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b == BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(a, b))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}
