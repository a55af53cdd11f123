//! Graded dimensions of unipotent fundamental groups and the depth thresholds
//! they imply.
//!
//! For the thrice-punctured line the graded pieces of the free Lie algebra on
//! two generators satisfy `sum_{k|n} k e_k = 2^n`; for a projective curve of
//! genus `g` the right-hand side is `a_n = alpha_+^n + alpha_-^n`, an integer
//! sequence with `a_0 = 2, a_1 = 2g, a_m = 2g a_{m-1} - a_{m-2}`. Both are
//! inverted exactly with the Möbius function.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::exactnum::{self, BoundValue, ExactError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieDimsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("internal consistency error: {0}")]
    Consistency(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

pub type Result<T> = std::result::Result<T, LieDimsError>;

/// Which fundamental group the graded dimensions refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveType {
    /// The projective line minus three points (free group on two generators).
    PuncturedLine,
    /// A smooth projective curve of genus `g >= 2`.
    ProjectiveGenus(u32),
}

impl CurveType {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CurveType::PuncturedLine => Ok(()),
            CurveType::ProjectiveGenus(g) if g >= 2 => Ok(()),
            CurveType::ProjectiveGenus(g) => Err(LieDimsError::Domain(format!(
                "genus must be at least 2, got {g}"
            ))),
        }
    }

    pub fn label(&self) -> String {
        match self {
            CurveType::PuncturedLine => "p1".into(),
            CurveType::ProjectiveGenus(g) => format!("genus:{g}"),
        }
    }
}

impl std::str::FromStr for CurveType {
    type Err = LieDimsError;

    fn from_str(s: &str) -> Result<Self> {
        let c = match s.trim() {
            "p1" | "P1" => CurveType::PuncturedLine,
            other => {
                let g = other
                    .strip_prefix("genus:")
                    .and_then(|g| g.parse::<u32>().ok())
                    .ok_or_else(|| {
                        LieDimsError::Domain(format!(
                            "curve spec must be `p1` or `genus:<g>`, got `{other}`"
                        ))
                    })?;
                CurveType::ProjectiveGenus(g)
            }
        };
        c.validate()?;
        Ok(c)
    }
}

/// Power sums `a_0..=a_n`: `2^m` for the punctured line, `alpha_+^m + alpha_-^m` in genus `g`.
pub fn power_sums(curve: CurveType, n: usize) -> Result<Vec<BigInt>> {
    curve.validate()?;
    let mut a = Vec::with_capacity(n + 1);
    match curve {
        CurveType::PuncturedLine => {
            let mut x = BigInt::one();
            for _ in 0..=n {
                a.push(x.clone());
                x <<= 1;
            }
        }
        CurveType::ProjectiveGenus(g) => {
            let two_g = BigInt::from(2 * g as u64);
            a.push(BigInt::from(2));
            if n >= 1 {
                a.push(two_g.clone());
            }
            for m in 2..=n {
                let next = &two_g * &a[m - 1] - &a[m - 2];
                a.push(next);
            }
        }
    }
    Ok(a)
}

/// Graded dimensions `e_1..e_N` of the central-series quotients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedDims {
    pub curve: CurveType,
    pub depth: usize,
    pub e: Vec<BigInt>,
}

impl GradedDims {
    /// `e_n` for `1 <= n <= depth`.
    pub fn get(&self, n: usize) -> &BigInt {
        &self.e[n - 1]
    }
}

pub fn graded_dims(curve: CurveType, depth: usize) -> Result<GradedDims> {
    if depth == 0 {
        return Err(LieDimsError::Domain("depth must be positive".into()));
    }
    let a = power_sums(curve, depth)?;
    let mut e = Vec::with_capacity(depth);
    for n in 1..=depth {
        let mut acc = BigInt::zero();
        for d in exactnum::divisors(n as u64)? {
            let mu = exactnum::mobius(d)?;
            if mu != 0 {
                acc += BigInt::from(mu) * &a[n / d as usize];
            }
        }
        let (q, r) = acc.div_rem(&BigInt::from(n));
        if !r.is_zero() {
            return Err(LieDimsError::Consistency(format!(
                "Möbius sum at n = {n} is not divisible by n"
            )));
        }
        e.push(q);
    }
    Ok(GradedDims { curve, depth, e })
}

pub fn alpha_plus(g: u32, digits: u32) -> BoundValue {
    let g = BoundValue::from_int(g as i64, digits);
    let s = g
        .mul(&g)
        .sub(&BoundValue::from_int(1, digits))
        .sqrt()
        .expect("g^2 - 1 >= 0");
    g.add(&s)
}

pub fn alpha_minus(g: u32, digits: u32) -> BoundValue {
    let gb = BoundValue::from_int(g as i64, digits);
    // alpha_- = 1 / alpha_+ avoids cancellation
    BoundValue::from_int(1, digits)
        .div(&alpha_plus(g, digits))
        .unwrap_or(gb)
}

fn real_pow(base: &BoundValue, exponent: &BigRational, digits: u32) -> BoundValue {
    if exponent.is_integer() && !exponent.is_negative() {
        return base.powi(exponent.to_integer().to_u32().expect("small exponent"));
    }
    base.pow(&BoundValue::from_rational(exponent, digits))
        .expect("positive base")
}

/// Analytic envelope `lower <= e_n <= upper`.
pub fn dim_envelope(curve: CurveType, n: usize, digits: u32) -> Result<(BoundValue, BoundValue)> {
    curve.validate()?;
    if n == 0 {
        return Err(LieDimsError::Domain("n must be positive".into()));
    }
    let nb = BoundValue::from_int(n as i64, digits);
    let sqrt_n = nb.sqrt()?;
    let half_n = BigRational::new(BigInt::from(n), BigInt::from(2));
    match curve {
        CurveType::PuncturedLine => {
            let two = BoundValue::from_int(2, digits);
            let upper = two.powi(n as u32).div(&nb)?;
            let tail = real_pow(&two, &(&half_n + BigRational::one()), digits).div(&sqrt_n)?;
            Ok((upper.sub(&tail), upper))
        }
        CurveType::ProjectiveGenus(g) => {
            if n < 2 {
                return Err(LieDimsError::Domain(
                    "the genus envelope needs n >= 2".into(),
                ));
            }
            let ap = alpha_plus(g, digits);
            let am = alpha_minus(g, digits);
            let upper = ap.powi(n as u32).div(&nb)?;
            let sum_n = ap.powi(n as u32).add(&am.powi(n as u32));
            let half = real_pow(&ap, &half_n, digits).add(&real_pow(&am, &half_n, digits));
            let lower = sum_n
                .div(&nb)?
                .sub(&half.scale(&exactnum::int(2)).div(&sqrt_n)?);
            Ok((lower, upper))
        }
    }
}

/// Right-hand side of the conjugation-character recursion at even `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FilipRhs {
    /// `(i^n + (-i)^n) / n`, the closed form evaluated at a traceless `c`.
    #[default]
    ClosedForm,
    /// The literal zero right-hand side, kept for comparison only.
    Zero,
}

/// Characters `chi_n(c)` of complex conjugation on the graded pieces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugationChar {
    pub g: u32,
    pub depth: usize,
    pub chi_c: Vec<BigRational>,
    pub v_fixed: Vec<BigInt>,
}

/// Raw recursion output: `chi_n(c)` and `(e_n + chi_n(c))/2` as rationals.
pub fn filip_chi_raw(
    g: u32,
    depth: usize,
    rhs: FilipRhs,
) -> Result<(Vec<BigRational>, Vec<BigRational>)> {
    let dims = graded_dims(CurveType::ProjectiveGenus(g), depth)?;
    let mut chi: Vec<BigRational> = Vec::with_capacity(depth);
    for n in 1..=depth {
        let target = if n % 2 == 1 {
            BigRational::zero()
        } else {
            match rhs {
                FilipRhs::ClosedForm => {
                    let sign = if (n / 2) % 2 == 0 { 2 } else { -2 };
                    BigRational::new(BigInt::from(sign), BigInt::from(n))
                }
                FilipRhs::Zero => BigRational::zero(),
            }
        };
        // sum_{k | n} (1/k) chi^{(k)}_{n/k}(c) = target, solve for the k = 1 term
        let mut rest = BigRational::zero();
        for k in exactnum::divisors(n as u64)?.into_iter().skip(1) {
            let k = k as usize;
            let j = n / k;
            let value = if k.is_multiple_of(2) {
                BigRational::from_integer(dims.get(j).clone())
            } else {
                chi[j - 1].clone()
            };
            rest += value / BigRational::from_integer(BigInt::from(k));
        }
        chi.push(target - rest);
    }
    let fixed = chi
        .iter()
        .zip(&dims.e)
        .map(|(c, e)| (BigRational::from_integer(e.clone()) + c) / exactnum::int(2))
        .collect();
    Ok((chi, fixed))
}

/// Levels `n` at which `dim V_n^c` fails to be an integer for the given right-hand side.
pub fn filip_nonintegral_levels(g: u32, depth: usize, rhs: FilipRhs) -> Result<Vec<usize>> {
    let (_, fixed) = filip_chi_raw(g, depth, rhs)?;
    Ok(fixed
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_integer())
        .map(|(i, _)| i + 1)
        .collect())
}

pub fn filip_chi(g: u32, depth: usize) -> Result<ConjugationChar> {
    filip_chi_with(g, depth, FilipRhs::ClosedForm)
}

pub fn filip_chi_with(g: u32, depth: usize, rhs: FilipRhs) -> Result<ConjugationChar> {
    let dims = graded_dims(CurveType::ProjectiveGenus(g), depth)?;
    let (chi, fixed) = filip_chi_raw(g, depth, rhs)?;
    let mut v_fixed = Vec::with_capacity(depth);
    for (i, v) in fixed.iter().enumerate() {
        if !v.is_integer() {
            return Err(LieDimsError::Consistency(format!(
                "dim V_{}^c = {v} is not an integer",
                i + 1
            )));
        }
        let v = v.to_integer();
        if v.is_negative() || &v > dims.get(i + 1) {
            return Err(LieDimsError::Consistency(format!(
                "dim V_{}^c = {v} outside [0, e_{}]",
                i + 1,
                i + 1
            )));
        }
        v_fixed.push(v);
    }
    Ok(ConjugationChar {
        g,
        depth,
        chi_c: chi,
        v_fixed,
    })
}

/// `alpha_+^{n/2+1} + alpha_-^{n/2+1}`, the envelope for `|chi_n(c)|` at even `n`.
pub fn chi_envelope(g: u32, n: usize, digits: u32) -> BoundValue {
    let m = (n / 2 + 1) as u32;
    alpha_plus(g, digits)
        .powi(m)
        .add(&alpha_minus(g, digits).powi(m))
}

/// Cumulative dimension defects `sum_{i<=n} (e_i - d_i)`.
///
/// For the punctured line the values are exact. For a projective curve the
/// global dimensions `d_n` are not computable, so `level_defect` holds the
/// certified lower bound `dim V_n^c` (level 1 is exact: `2g - r`), `d` holds the
/// matching upper bounds for `d_n`, and `analytic` holds the closed-form
/// envelope lower bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectProfile {
    pub curve: CurveType,
    pub rank: u64,
    pub depth: usize,
    pub e: Vec<BigInt>,
    pub d: Vec<BigInt>,
    pub level_defect: Vec<BigInt>,
    pub defect: Vec<BigInt>,
    pub exact: bool,
    pub analytic: Option<Vec<BoundValue>>,
    pub analytic_cumulative: Option<Vec<BoundValue>>,
}

pub fn defect_profile(curve: CurveType, rank: u64, depth: usize, digits: u32) -> Result<DefectProfile> {
    let dims = graded_dims(curve, depth)?;
    let r = BigInt::from(rank);
    let mut d = Vec::with_capacity(depth);
    let mut level = Vec::with_capacity(depth);
    match curve {
        CurveType::PuncturedLine => {
            for n in 1..=depth {
                let dn = if n == 1 {
                    r.clone()
                } else if n % 2 == 1 {
                    dims.get(n).clone()
                } else {
                    BigInt::zero()
                };
                level.push(dims.get(n) - &dn);
                d.push(dn);
            }
        }
        CurveType::ProjectiveGenus(g) => {
            let fixed = filip_chi(g, depth)?;
            for n in 1..=depth {
                let lb = if n == 1 {
                    dims.get(1) - &r
                } else {
                    fixed.v_fixed[n - 1].clone()
                };
                d.push(dims.get(n) - &lb);
                level.push(lb);
            }
        }
    }
    let mut defect = Vec::with_capacity(depth);
    let mut acc = BigInt::zero();
    for l in &level {
        acc += l;
        defect.push(acc.clone());
    }
    let (analytic, analytic_cumulative) = match curve {
        CurveType::PuncturedLine => (None, None),
        CurveType::ProjectiveGenus(g) => {
            let levels = (1..=depth)
                .map(|n| genus_level_lower_bound(g, rank, n, digits))
                .collect::<Result<Vec<_>>>()?;
            let mut cum = Vec::with_capacity(depth);
            let mut acc = BoundValue::from_int(0, digits);
            for l in &levels {
                acc = acc.add(l);
                cum.push(acc.clone());
            }
            (Some(levels), Some(cum))
        }
    };
    Ok(DefectProfile {
        curve,
        rank,
        depth,
        e: dims.e,
        d,
        level_defect: level,
        defect,
        exact: matches!(curve, CurveType::PuncturedLine),
        analytic,
        analytic_cumulative,
    })
}

/// Closed-form lower bound for `e_n - d_n` in genus `g` (exact `2g - r` at `n = 1`).
pub fn genus_level_lower_bound(g: u32, rank: u64, n: usize, digits: u32) -> Result<BoundValue> {
    if n == 1 {
        return Ok(BoundValue::from_rational(
            &exactnum::int(2 * g as i64 - rank as i64),
            digits,
        ));
    }
    let ap = alpha_plus(g, digits);
    let am = alpha_minus(g, digits);
    let nb = BoundValue::from_int(n as i64, digits);
    let half_n = BigRational::new(BigInt::from(n), BigInt::from(2));
    let main = ap
        .powi(n as u32)
        .add(&am.powi(n as u32))
        .div(&nb.scale(&exactnum::int(2)))?;
    let chi_part = real_pow(&ap, &(&half_n + BigRational::one()), digits)
        .add(&real_pow(&am, &(&half_n + BigRational::one()), digits))
        .scale(&exactnum::rat(1, 2));
    let tail = real_pow(&ap, &half_n, digits)
        .add(&real_pow(&am, &half_n, digits))
        .div(&nb.sqrt()?)?;
    Ok(main.sub(&chi_part).sub(&tail))
}

/// Least depth guaranteeing a positive dimension defect, and the closed-form bound for it.
#[derive(Debug, Clone, PartialEq)]
pub struct MinDepth {
    pub exact_min: usize,
    pub paper_bound: usize,
    pub threshold: BoundValue,
}

/// Closed-form depth threshold: `1 + (log r + log(log r + log 2))/log 2` for the
/// punctured line, `(log r + log 2 + log(log r + log 2))/log alpha_+` in genus `g`.
pub fn depth_threshold(curve: CurveType, rank: u64, digits: u32) -> Result<BoundValue> {
    let r = BoundValue::from_int(rank as i64, digits);
    let lr = r.ln()?;
    let l2 = BoundValue::ln2(digits);
    let inner = lr.add(&l2).ln()?;
    match curve {
        CurveType::PuncturedLine => Ok(BoundValue::from_int(1, digits).add(&lr.add(&inner).div(&l2)?)),
        CurveType::ProjectiveGenus(g) => {
            let la = alpha_plus(g, digits).ln()?;
            Ok(lr.add(&l2).add(&inner).div(&la)?)
        }
    }
}

pub fn min_depth(curve: CurveType, rank: u64, digits: u32) -> Result<MinDepth> {
    curve.validate()?;
    match curve {
        CurveType::PuncturedLine => {
            if rank == 0 || rank % 2 == 1 {
                return Err(LieDimsError::Domain(format!(
                    "rank must be 2s with s >= 1, got {rank}"
                )));
            }
        }
        CurveType::ProjectiveGenus(_) => {
            if rank == 0 {
                return Err(LieDimsError::Domain("rank must be at least 1".into()));
            }
        }
    }
    let exact_min = exact_min_depth(curve, rank)?;
    let (threshold, n) = exactnum::resolve_strict_ceiling(digits, |d| {
        depth_threshold(curve, rank, d).map_err(|e| match e {
            LieDimsError::Exact(x) => x,
            other => ExactError::Domain(other.to_string()),
        })
    })?;
    let paper_bound = n
        .to_usize()
        .ok_or_else(|| LieDimsError::Domain("threshold out of range".into()))?
        .max(1);
    Ok(MinDepth {
        exact_min,
        paper_bound,
        threshold,
    })
}

/// Depth at which the unit-equation count is evaluated for the punctured line,
/// `2 + (log r + log log r + log 2/log r)/log 2`, with the least integer above it.
///
/// This sits one step past the strict threshold of [`min_depth`]. The threshold
/// alone can land on an odd depth where the defect has not yet turned positive
/// (the defect only moves at even levels), e.g. `r = 16` needs depth 8 while the
/// threshold is about 6.79.
pub fn applied_depth(rank: u64, digits: u32) -> Result<(BoundValue, usize)> {
    if rank < 3 {
        return Err(LieDimsError::Domain(format!("need r >= 3 for log log r > 0, got {rank}")));
    }
    let value = |d: u32| -> std::result::Result<BoundValue, ExactError> {
        let r = BoundValue::from_int(rank as i64, d);
        let lr = r.ln()?;
        let l2 = BoundValue::ln2(d);
        let t = lr.add(&lr.ln()?).add(&l2.div(&lr)?).div(&l2)?;
        Ok(BoundValue::from_int(2, d).add(&t))
    };
    let (v, n) = exactnum::resolve_strict_ceiling(digits, value)?;
    let n = n
        .to_usize()
        .ok_or_else(|| LieDimsError::Domain("depth out of range".into()))?;
    Ok((v, n))
}

fn exact_min_depth(curve: CurveType, rank: u64) -> Result<usize> {
    let r = BigInt::from(rank);
    match curve {
        CurveType::PuncturedLine => {
            // defect(n) = 2 - r + sum_{2i <= n} e_{2i}
            let mut depth = 8;
            loop {
                let dims = graded_dims(curve, depth)?;
                let mut acc = BigInt::from(2) - &r;
                for n in 1..=depth {
                    if n % 2 == 0 {
                        acc += dims.get(n);
                    }
                    if acc.is_positive() {
                        return Ok(n);
                    }
                }
                depth *= 2;
            }
        }
        CurveType::ProjectiveGenus(_) => {
            // alpha_+^n / n > 2r  <=>  a_n > 2rn, because a_n is an integer and 0 < alpha_-^n < 1
            let mut depth = 8;
            loop {
                let a = power_sums(curve, depth)?;
                for (n, an) in a.iter().enumerate().skip(1) {
                    if an > &(BigInt::from(2 * n as u64) * &r) {
                        return Ok(n);
                    }
                }
                depth *= 2;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::int;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn punctured_line_dims() {
        let d = graded_dims(CurveType::PuncturedLine, 6).unwrap();
        assert_eq!(d.e, ints(&[2, 1, 2, 3, 6, 9]));
    }

    #[test]
    fn genus_two_dims() {
        let d = graded_dims(CurveType::ProjectiveGenus(2), 4).unwrap();
        assert_eq!(d.e, ints(&[4, 5, 16, 45]));
        assert_eq!(
            power_sums(CurveType::ProjectiveGenus(2), 4).unwrap(),
            ints(&[2, 4, 14, 52, 194])
        );
        for g in 2..8 {
            let d = graded_dims(CurveType::ProjectiveGenus(g), 1).unwrap();
            assert_eq!(d.e[0], BigInt::from(2 * g));
        }
    }

    #[test]
    fn bad_inputs() {
        assert!(graded_dims(CurveType::ProjectiveGenus(1), 3).is_err());
        assert!(graded_dims(CurveType::PuncturedLine, 0).is_err());
        assert!("genus:1".parse::<CurveType>().is_err());
        assert!("torus".parse::<CurveType>().is_err());
        assert_eq!(
            "genus:3".parse::<CurveType>().unwrap(),
            CurveType::ProjectiveGenus(3)
        );
    }

    #[test]
    fn envelope_examples() {
        let (lo, hi) = dim_envelope(CurveType::PuncturedLine, 6, 50).unwrap();
        assert!((lo.midpoint_f64() - (64.0 / 6.0 - 16.0 / 6f64.sqrt())).abs() < 1e-12);
        assert!(hi.contains(&exactnum::rat(32, 3)));
        assert!(lo.upper() < &int(9) && hi.lower() > &int(9));
        let (_, hi) = dim_envelope(CurveType::ProjectiveGenus(2), 4, 50).unwrap();
        assert!((hi.midpoint_f64() - (97.0 + 56.0 * 3f64.sqrt()) / 4.0).abs() < 1e-9);
        let (_, hi) = dim_envelope(CurveType::PuncturedLine, 1, 50).unwrap();
        assert!(hi.contains(&int(2)));
        assert!(dim_envelope(CurveType::ProjectiveGenus(2), 1, 50).is_err());
    }

    #[test]
    fn filip_spot_values() {
        let c = filip_chi(2, 4).unwrap();
        assert_eq!(c.chi_c[1], int(-3));
        assert_eq!(c.v_fixed[1], BigInt::from(1));
        assert_eq!(c.chi_c[2], int(0));
        assert_eq!(c.v_fixed[2], BigInt::from(8));
        assert_eq!(c.chi_c[3], int(-3));
        assert_eq!(c.v_fixed[3], BigInt::from(21));
        assert_eq!(c.chi_c[0], int(0));
    }

    #[test]
    fn zero_rhs_is_not_integral() {
        let bad = filip_nonintegral_levels(2, 4, FilipRhs::Zero).unwrap();
        assert!(bad.contains(&2));
        assert!(filip_chi_with(2, 4, FilipRhs::Zero).is_err());
        assert!(filip_nonintegral_levels(2, 20, FilipRhs::ClosedForm)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn defect_examples() {
        let p = defect_profile(CurveType::PuncturedLine, 12, 6, 50).unwrap();
        assert_eq!(p.defect[5], BigInt::from(3));
        assert_eq!(p.defect[4], BigInt::from(-6));
        let p = defect_profile(CurveType::PuncturedLine, 0, 1, 50).unwrap();
        assert_eq!(p.defect, ints(&[2]));
        let p = defect_profile(CurveType::ProjectiveGenus(2), 30, 5, 50).unwrap();
        assert_eq!(p.level_defect[1], BigInt::from(1));
        assert_eq!(p.level_defect[3], BigInt::from(21));
        assert_eq!(p.level_defect[0], BigInt::from(-26));
        assert!(!p.exact);
        assert_eq!(p.analytic.as_ref().unwrap().len(), 5);
    }

    #[test]
    fn min_depth_examples() {
        let m = min_depth(CurveType::PuncturedLine, 12, 50).unwrap();
        assert_eq!((m.exact_min, m.paper_bound), (6, 7));
        let m = min_depth(CurveType::ProjectiveGenus(2), 30, 50).unwrap();
        assert_eq!((m.exact_min, m.paper_bound), (5, 5));
        let m = min_depth(CurveType::PuncturedLine, 2, 50).unwrap();
        assert_eq!(m.exact_min, 2);
        assert!(min_depth(CurveType::PuncturedLine, 3, 50).is_err());
        assert!(min_depth(CurveType::PuncturedLine, 0, 50).is_err());
        let m = min_depth(CurveType::PuncturedLine, 16, 50).unwrap();
        assert_eq!((m.exact_min, m.paper_bound), (8, 7));
        assert_eq!(applied_depth(16, 50).unwrap().1, 8);
    }
}
