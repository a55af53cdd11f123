//! Dimension counts for moduli of framed filtered subspaces.
//!
//! A shape `(d_1..d_n; e_1..e_n)` describes a filtered affine space with `d_k`
//! coordinates in degree `-k` mapping into one with `e_k` coordinates in degree
//! `-k`. A filtration-preserving map is determined by polynomials whose degree
//! is bounded by the target degree, and the number of such coefficients is `J`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactnum::{self, BoundValue, ExactError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FilteredError {
    #[error("invalid shape: {0}")]
    Shape(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("ambiguous case: r and 2e*alpha cannot be separated at {digits} digits")]
    AmbiguousCase { digits: u32 },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

pub type Result<T> = std::result::Result<T, FilteredError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredShape {
    pub d: Vec<u64>,
    pub e: Vec<u64>,
}

impl FilteredShape {
    pub fn new(d: Vec<u64>, e: Vec<u64>) -> Result<Self> {
        if d.len() != e.len() {
            return Err(FilteredError::Shape(format!(
                "d has length {} but e has length {}",
                d.len(),
                e.len()
            )));
        }
        if d.is_empty() {
            return Err(FilteredError::Shape("n must be positive".into()));
        }
        Ok(FilteredShape { d, e })
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }
}

/// How monomials are graded when counting `D_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightConvention {
    /// A variable of degree `k` has weight `k`.
    #[default]
    Weighted,
    /// Every variable has weight 1.
    Unweighted,
}

impl std::str::FromStr for WeightConvention {
    type Err = FilteredError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "weighted" => Ok(WeightConvention::Weighted),
            "unweighted" => Ok(WeightConvention::Unweighted),
            other => Err(FilteredError::Domain(format!("unknown convention `{other}`"))),
        }
    }
}

/// `D_0..=D_max` for the given variable counts.
///
/// Weighted counts are the coefficients of `prod_k (1 - x^k)^{-d_k}`, built up one
/// degree at a time; each factor contributes `binom(d_k + m - 1, m)` at `x^{km}`.
pub fn dj_table(d: &[u64], max: usize, conv: WeightConvention) -> Vec<BigInt> {
    let mut table = vec![BigInt::zero(); max + 1];
    table[0] = BigInt::one();
    for (idx, &dk) in d.iter().enumerate() {
        if dk == 0 {
            continue;
        }
        let weight = match conv {
            WeightConvention::Weighted => idx + 1,
            WeightConvention::Unweighted => 1,
        };
        let mut next = vec![BigInt::zero(); max + 1];
        for (j, base) in table.iter().enumerate() {
            if base.is_zero() {
                continue;
            }
            let mut m = 0u64;
            while j + weight * m as usize <= max {
                let c = exactnum::binomial(dk + m - 1, m);
                next[j + weight * m as usize] += base * c;
                m += 1;
            }
        }
        table = next;
    }
    table
}

pub fn count_dj(shape: &FilteredShape, j: usize, conv: WeightConvention) -> BigInt {
    dj_table(&shape.d, j, conv).swap_remove(j)
}

pub fn j_exact(shape: &FilteredShape, conv: WeightConvention) -> BigInt {
    let n = shape.n();
    let table = dj_table(&shape.d, n, conv);
    let mut cumulative = BigInt::zero();
    let mut total = BigInt::zero();
    for i in 1..=n {
        if i == 1 {
            cumulative += &table[0];
        }
        cumulative += &table[i];
        total += BigInt::from(shape.e[i - 1]) * &cumulative;
    }
    total
}

/// Least `N` with `N > J / sum(e_i - d_i)`.
pub fn nondensity_threshold(shape: &FilteredShape, conv: WeightConvention) -> Result<BigInt> {
    let excess: i128 = shape
        .e
        .iter()
        .zip(&shape.d)
        .map(|(&e, &d)| e as i128 - d as i128)
        .sum();
    if excess <= 0 {
        return Err(FilteredError::Infeasible(format!(
            "sum of e_i - d_i is {excess}, must be positive"
        )));
    }
    let q = BigRational::new(j_exact(shape, conv), BigInt::from(excess));
    Ok(exactnum::strict_ceiling(&q))
}

/// Closed-form upper bound for `J` when `d_1 = r`, `d_i <= alpha^i` and `e_i <= beta^i / i`.
pub fn j_upper(r: &BoundValue, alpha: &BoundValue, beta: &BoundValue, n: u32) -> Result<BoundValue> {
    let digits = r.digits().max(alpha.digits()).max(beta.digits());
    let one = BoundValue::from_int(1, digits);
    if !beta.certainly_gt(&one) || !alpha.certainly_gt(&one) {
        return Err(FilteredError::Domain("alpha and beta must exceed 1".into()));
    }
    if !r.certainly_gt(&BoundValue::from_int(0, digits)) {
        return Err(FilteredError::Domain("r must be positive".into()));
    }
    let c = BoundValue::e(digits).mul(alpha).scale(&exactnum::int(2));
    let bn1 = beta.powi(n + 1);
    let bm1 = beta.sub(&one);
    if r.certainly_gt(&c) {
        let rc = r.sub(&c);
        let first = bn1
            .mul(&r.powi(n + 2))
            .div(&rc.mul(&bm1).mul(&r.sub(&one)))?;
        let second = c
            .powi(n + 2)
            .mul(&bn1)
            .div(&bm1.mul(&rc).mul(&c.mul(beta).sub(&one)))?;
        Ok(first.add(&second))
    } else if r.certainly_lt(&c) {
        let cr = c.sub(r);
        let first = bn1
            .mul(&c.powi(n + 2))
            .div(&cr.mul(&bm1).mul(&c.sub(&one)))?;
        let second = bn1
            .mul(&r.powi(n + 2))
            .div(&bm1.mul(&cr).mul(&beta.mul(r).sub(&one)))?;
        Ok(first.add(&second))
    } else {
        Err(FilteredError::AmbiguousCase { digits })
    }
}

/// The depth-`n` estimate `(2r)^{n+2}` at the real depth used for the unit equation,
/// against its simplified form `59 r^{(log r + log log r)/log 2 + 5} log r`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplificationCheck {
    pub r: u64,
    pub depth: BoundValue,
    pub two_r_power: BoundValue,
    pub simplified: BoundValue,
    /// `two_r_power / simplified`, equal to `16 e 2^{1/log r} / 59`.
    pub ratio: BoundValue,
    pub holds: bool,
}

pub fn simplification_59(r: u64, digits: u32) -> Result<SimplificationCheck> {
    if r < 3 {
        return Err(FilteredError::Domain(
            "need r >= 3 so that log log r is defined and positive".into(),
        ));
    }
    let rb = BoundValue::from_int(r as i64, digits);
    let lr = rb.ln()?;
    let llr = lr.ln()?;
    let l2 = BoundValue::ln2(digits);
    let two = BoundValue::from_int(2, digits);
    let depth = two.add(&lr.add(&llr).add(&l2.div(&lr)?).div(&l2)?);
    let two_r_power = rb.scale(&exactnum::int(2)).pow(&depth.add(&two))?;
    let exponent = lr.add(&llr).div(&l2)?.add(&BoundValue::from_int(5, digits));
    let simplified = rb
        .pow(&exponent)?
        .mul(&lr)
        .scale(&exactnum::int(59));
    let ratio = two_r_power.div(&simplified)?;
    let holds = two_r_power.certainly_lt(&simplified);
    Ok(SimplificationCheck {
        r,
        depth,
        two_r_power,
        simplified,
        ratio,
        holds,
    })
}

/// Brute-force count of monomials of bounded (weighted) degree, used as a cross-check.
pub fn monomial_count(d: &[u64], max_degree: usize, conv: WeightConvention) -> BigInt {
    let weights: Vec<usize> = d
        .iter()
        .enumerate()
        .flat_map(|(k, &dk)| {
            let w = match conv {
                WeightConvention::Weighted => k + 1,
                WeightConvention::Unweighted => 1,
            };
            std::iter::repeat_n(w, dk as usize)
        })
        .collect();
    fn walk(weights: &[usize], budget: usize) -> u64 {
        match weights.split_first() {
            None => 1,
            Some((&w, rest)) => {
                let mut total = 0;
                let mut used = 0;
                while used <= budget {
                    total += walk(rest, budget - used);
                    used += w;
                }
                total
            }
        }
    }
    BigInt::from(walk(&weights, max_degree))
}
