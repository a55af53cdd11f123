//! Explicit non-density and finiteness thresholds.
//!
//! Every statement of the form "not Zariski dense whenever `n > T`" becomes a
//! [`BoundReport`] carrying `T` (exact when rational, an enclosure otherwise)
//! and the least admissible `n`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::exactnum::{self, int, BoundValue, ExactError};
use crate::liedims;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("outside validity window: {0}")]
    Validity(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("internal consistency error: {0}")]
    Consistency(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

pub type Result<T> = std::result::Result<T, BoundsError>;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FamilyParams {
    pub g: i64,
    pub s: i64,
    pub r: i64,
    pub d: i64,
    pub d0: i64,
    pub gonality: Option<i64>,
    pub cv_product: Option<BigRational>,
}

impl FamilyParams {
    pub fn new(g: i64, s: i64, r: i64, d: i64) -> Self {
        FamilyParams {
            g,
            s,
            r,
            d,
            ..Default::default()
        }
    }

    fn check_nonnegative(&self) -> Result<()> {
        if self.g < 2 {
            return Err(BoundsError::Domain(format!("genus must be >= 2, got {}", self.g)));
        }
        for (name, v) in [("s", self.s), ("r", self.r), ("d", self.d), ("d0", self.d0)] {
            if v < 0 {
                return Err(BoundsError::Domain(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Threshold {
    Exact(BigRational),
    Enclosure(BoundValue),
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Exact(q) => write!(f, "{q}"),
            Threshold::Enclosure(b) => write!(f, "{b}"),
        }
    }
}

impl Threshold {
    pub fn approx_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        match self {
            Threshold::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Threshold::Enclosure(b) => b.midpoint_f64(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub name: String,
    pub anchor: String,
    pub threshold: Threshold,
    pub min_n: BigInt,
    pub valid: bool,
    pub notes: String,
}

impl BoundReport {
    fn exact(name: &str, anchor: &str, t: BigRational, valid: bool, notes: impl Into<String>) -> Self {
        let min_n = exactnum::strict_ceiling(&t).max(BigInt::one());
        BoundReport {
            name: name.into(),
            anchor: anchor.into(),
            threshold: Threshold::Exact(t),
            min_n,
            valid,
            notes: notes.into(),
        }
    }
}

fn q(n: i64, d: i64) -> BigRational {
    exactnum::rat(n, d)
}

/// `(s + (r - d)(g - r)) / (g - r - 1)` for smooth families.
pub fn thm1_smooth(p: &FamilyParams) -> Result<BoundReport> {
    p.check_nonnegative()?;
    let FamilyParams { g, s, r, d, .. } = *p;
    if r > g - 2 {
        return Err(BoundsError::Validity(format!("need r <= g - 2, got r = {r}, g = {g}")));
    }
    let t = q(s + (r - d) * (g - r), g - r - 1);
    Ok(BoundReport::exact("thm1_smooth", "smooth family", t, true, ""))
}

/// Stable families, theorem-statement form with `(r + 1)`.
pub fn thm1_stable(p: &FamilyParams) -> Result<BoundReport> {
    p.check_nonnegative()?;
    let FamilyParams { g, s, r, .. } = *p;
    if r > g - 3 {
        return Err(BoundsError::Validity(format!("need r <= g - 3, got r = {r}, g = {g}")));
    }
    let edge = q((r + 1) * (g - 1 - r) + s, g - r - 2);
    let vertex = q((r + 1) * (g - r) + s, g - r - 1);
    let t = edge * int(3 * g) + vertex * int(2 * g);
    Ok(BoundReport::exact("thm1_stable", "stable family", t, true, ""))
}

/// The stable-family bound over the moduli of genus `g` curves (`s = 3g - 3`).
pub fn mg_bound(g: i64, r: i64) -> Result<BoundReport> {
    let mut rep = thm1_stable(&FamilyParams::new(g, 3 * g - 3, r, 0))?;
    rep.name = "mg_bound".into();
    rep.anchor = "moduli of curves".into();
    if r == g - 3 {
        let identity = int(21 * g * g - 30 * g);
        match &rep.threshold {
            Threshold::Exact(t) if *t == identity => {
                rep.notes = format!("equals 21g^2 - 30g = {identity}");
                rep.anchor = "Mg identity".into();
            }
            other => {
                return Err(BoundsError::Consistency(format!(
                    "threshold {other} differs from 21g^2 - 30g = {identity}"
                )))
            }
        }
    }
    Ok(rep)
}

/// Zilber-Pink type threshold `(gr + s)/(g - 1)`.
pub fn stoll_zp(g: i64, s: i64, r: i64) -> Result<BoundReport> {
    if g < 2 {
        return Err(BoundsError::Validity(format!("need g >= 2, got {g}")));
    }
    if s < 0 || r < 0 {
        return Err(BoundsError::Domain("s and r must be non-negative".into()));
    }
    Ok(BoundReport::exact("stoll_zp", "Zilber-Pink comparison", q(g * r + s, g - 1), true, ""))
}

/// True iff `r > g(n - min(n, g))` and `dimV <= r/n - r(ng - r)/(ng^2)`.
pub fn padic_zp_check(g: i64, n: i64, r: i64, dim_v: i64) -> Result<bool> {
    if n <= 0 {
        return Err(BoundsError::Domain("n must be positive".into()));
    }
    if g < 1 || r < 0 || dim_v < 0 {
        return Err(BoundsError::Domain("need g >= 1 and r, dimV >= 0".into()));
    }
    if r <= g * (n - n.min(g)) {
        return Ok(false);
    }
    let bound = q(r, n) - q(r * (n * g - r), n * g * g);
    Ok(int(dim_v) <= bound)
}

fn enclosure_report(
    name: &str,
    anchor: &str,
    digits: u32,
    valid: bool,
    notes: String,
    eval: impl Fn(u32) -> Result<BoundValue>,
) -> Result<BoundReport> {
    let (value, n) = exactnum::resolve_strict_ceiling(digits, |d| {
        eval(d).map_err(|e| match e {
            BoundsError::Exact(x) => x,
            other => ExactError::Domain(other.to_string()),
        })
    })?;
    Ok(BoundReport {
        name: name.into(),
        anchor: anchor.into(),
        threshold: Threshold::Enclosure(value),
        min_n: n.max(BigInt::one()),
        valid,
        notes,
    })
}

/// `59 (2s)^{(log 2s + log log 2s)/log 2 + 5} log 2s`, valid for `s > 5`.
pub fn sunit_bound(s: i64, digits: u32) -> Result<BoundReport> {
    if s < 1 {
        return Err(BoundsError::Domain(format!("need s >= 1, got {s}")));
    }
    let valid = s > 5;
    let notes = if valid { String::new() } else { "stated only for s > 5".into() };
    enclosure_report("sunit_bound", "unit equation", digits, valid, notes, |dg| {
        let x = BoundValue::from_int(2 * s, dg);
        let lx = x.ln()?;
        let exponent = lx
            .add(&lx.ln()?)
            .div(&BoundValue::ln2(dg))?
            .add(&BoundValue::from_int(5, dg));
        Ok(x.pow(&exponent)?.mul(&lx).scale(&int(59)))
    })
}

/// Exponent offset in the twist bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TwistVariant {
    /// `r^{(...)/log alpha_+ + 4}` as in the theorem statement.
    #[default]
    Statement,
    /// The expanded display, whose exponent is larger by 4.
    Expanded,
}

/// `3 prod c_v r^{(log r + log log r + log 2)/log alpha_+ + k} log r alpha_+^3`.
pub fn twist_bound(
    g: i64,
    r: i64,
    cv_product: &BigRational,
    variant: TwistVariant,
    digits: u32,
) -> Result<BoundReport> {
    if g < 2 {
        return Err(BoundsError::Domain(format!("need g >= 2, got {g}")));
    }
    if r < 3 {
        return Err(BoundsError::Domain(format!("need r >= 3 for log log r > 0, got {r}")));
    }
    if !cv_product.is_positive() {
        return Err(BoundsError::Domain("product of c_v must be positive".into()));
    }
    let valid = r > 11 * g;
    let offset = match variant {
        TwistVariant::Statement => 4,
        TwistVariant::Expanded => 8,
    };
    let name = match variant {
        TwistVariant::Statement => "twist_bound",
        TwistVariant::Expanded => "twist_bound_expanded",
    };
    let notes = if valid { String::new() } else { format!("stated only for r > 11g = {}", 11 * g) };
    enclosure_report(name, "twists", digits, valid, notes, |dg| {
        let rb = BoundValue::from_int(r, dg);
        let lr = rb.ln()?;
        let ap = liedims::alpha_plus(g as u32, dg);
        let exponent = lr
            .add(&lr.ln()?)
            .add(&BoundValue::ln2(dg))
            .div(&ap.ln()?)?
            .add(&BoundValue::from_int(offset, dg));
        Ok(rb
            .pow(&exponent)?
            .mul(&lr)
            .mul(&ap.powi(3))
            .scale(&(cv_product * int(3))))
    })
}

/// Comparison constants from the literature.
///
/// `s` feeds the S-unit rows (Evertse, and the EST envelope when `s >= 2`), `r`
/// the Silverman factor, and `g` the KRZB row with the moduli-of-curves row and
/// their ratio when `g >= 3`.
pub fn classical_rows(s: i64, r: Option<i64>, g: Option<i64>, digits: u32) -> Result<Vec<BoundReport>> {
    if s < 0 {
        return Err(BoundsError::Domain("s must be non-negative".into()));
    }
    let mut rows = Vec::new();
    let evertse = BigInt::from(3) * BigInt::from(7).pow((2 * s + 3) as u32);
    rows.push(BoundReport::exact(
        "evertse",
        "Evertse",
        BigRational::from_integer(evertse),
        true,
        "#X(S) < 3*7^(2s+3)",
    ));
    let r = r.unwrap_or(s);
    if r >= 0 {
        rows.push(BoundReport::exact(
            "silverman",
            "Silverman",
            BigRational::from_integer(BigInt::from(7).pow(r as u32)),
            true,
            "factor 7^r, multiplied by a curve constant",
        ));
    }
    if s >= 2 {
        rows.push(enclosure_report(
            "est_lower",
            "EST",
            digits,
            true,
            "lower-bound envelope, constant unnormalized (c = 1, eps = 1)".into(),
            |dg| {
                let sb = BoundValue::from_int(s, dg);
                Ok(sb.div(&sb.ln()?)?.sqrt()?.scale(&int(3)).exp())
            },
        )?);
    }
    if let Some(g) = g {
        if g < 2 {
            return Err(BoundsError::Domain(format!("need g >= 2, got {g}")));
        }
        let krzb = int(84 * g * g - 98 * g + 28);
        rows.push(BoundReport::exact("krzb", "KRZB", krzb.clone(), true, "#C(Q) < 84g^2 - 98g + 28"));
        if g >= 3 {
            let mg = mg_bound(g, g - 3)?;
            let Threshold::Exact(t) = &mg.threshold else {
                unreachable!("rational threshold")
            };
            let ratio = &krzb / t;
            rows.push(mg.clone());
            rows.push(BoundReport::exact(
                "krzb_over_mg",
                "KRZB / Mg identity",
                ratio,
                true,
                "ratio of thresholds, not itself a bound",
            ));
        }
    }
    Ok(rows)
}

/// Which number of edges and vertices multiply the local thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assembly {
    /// `3g` edges and `2g` vertices.
    Slack,
    /// The stable-graph caps `3g - 3` and `2g - 2`.
    Tight,
}

/// `(max vertices, max edges)` of a stable graph of genus `g`.
pub fn stable_graph_caps(g: i64) -> Result<(i64, i64)> {
    if g < 2 {
        return Err(BoundsError::Domain(format!("need g >= 2, got {g}")));
    }
    Ok((2 * g - 2, 3 * g - 3))
}

/// Per-vertex, per-edge and assembled thresholds for bad reduction, `(r - d + 1)` form.
pub fn bad_reduction_rows(g: i64, s: i64, r: i64, d: i64) -> Result<Vec<BoundReport>> {
    FamilyParams::new(g, s, r, d).check_nonnegative()?;
    if g - r - 2 <= 0 {
        return Err(BoundsError::Validity(format!(
            "need g - r - 2 > 0, got g = {g}, r = {r}"
        )));
    }
    let vertex = q((r - d + 1) * (g - r) + s, g - r - 1);
    let edge = q((r - d + 1) * (g - 1 - r) + s, g - r - 2);
    let (cap_v, cap_e) = stable_graph_caps(g)?;
    let mut rows = vec![
        BoundReport::exact("bad_reduction_vertex", "vertex disc", vertex.clone(), true, ""),
        BoundReport::exact("bad_reduction_edge", "edge annulus", edge.clone(), true, ""),
    ];
    for (assembly, name, ne, nv) in [
        (Assembly::Slack, "bad_reduction_assembly", 3 * g, 2 * g),
        (Assembly::Tight, "bad_reduction_assembly_tight", cap_e, cap_v),
    ] {
        let t = &edge * int(ne) + &vertex * int(nv);
        let notes = match assembly {
            Assembly::Slack => format!("edge * {ne} + vertex * {nv}"),
            Assembly::Tight => format!("edge * {ne} + vertex * {nv} (stable-graph caps)"),
        };
        rows.push(BoundReport::exact(name, "stable graph assembly", t, true, notes));
    }
    Ok(rows)
}

/// `(gamma >= (r - d)(g - r)/(g - r - 1), (r - d)(g - r)/(g - r - 1))`.
pub fn gonality_check(g: i64, r: i64, d: i64, gamma: i64) -> Result<(bool, BigRational)> {
    if g - r - 1 <= 0 {
        return Err(BoundsError::Validity(format!(
            "need g - r - 1 > 0, got g = {g}, r = {r}"
        )));
    }
    if r < d.min(g - 1) {
        return Err(BoundsError::Domain(format!(
            "need r >= min(d, g - 1), got r = {r}, d = {d}"
        )));
    }
    let bound = q((r - d) * (g - r), g - r - 1);
    Ok((int(gamma) >= bound, bound))
}

/// Codimension `(n + d0 - r)(g - r)` of the rank-`r` degeneracy locus.
pub fn degeneracy_codim(g: i64, n: i64, d0: i64, r: i64) -> Result<BigInt> {
    if r < 0 || r > (n + d0).min(g) {
        return Err(BoundsError::Domain(format!(
            "need 0 <= r <= min(n + d0, g), got r = {r}"
        )));
    }
    Ok(BigInt::from(n + d0 - r) * BigInt::from(g - r))
}

/// Every rational row for a parameter set, skipping those outside their window.
pub fn rational_table(p: &FamilyParams) -> Vec<BoundReport> {
    let mut rows = Vec::new();
    rows.extend(thm1_smooth(p).ok());
    rows.extend(thm1_stable(p).ok());
    rows.extend(stoll_zp(p.g, p.s, p.r).ok());
    rows.extend(bad_reduction_rows(p.g, p.s, p.r, p.d).unwrap_or_default());
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(rep: &BoundReport) -> BigRational {
        match &rep.threshold {
            Threshold::Exact(q) => q.clone(),
            Threshold::Enclosure(_) => panic!("expected exact threshold"),
        }
    }

    #[test]
    fn smooth_examples() {
        let r = thm1_smooth(&FamilyParams::new(2, 1, 0, 0)).unwrap();
        assert_eq!((exact(&r), r.min_n.clone()), (int(1), BigInt::from(2)));
        let r = thm1_smooth(&FamilyParams::new(3, 0, 0, 0)).unwrap();
        assert_eq!((exact(&r), r.min_n.clone()), (int(0), BigInt::from(1)));
        let r = thm1_smooth(&FamilyParams::new(5, 2, 3, 1)).unwrap();
        assert_eq!((exact(&r), r.min_n.clone()), (int(6), BigInt::from(7)));
        assert!(matches!(
            thm1_smooth(&FamilyParams::new(4, 0, 3, 0)),
            Err(BoundsError::Validity(_))
        ));
    }

    #[test]
    fn stable_examples() {
        let r = thm1_stable(&FamilyParams::new(4, 1, 0, 0)).unwrap();
        assert_eq!(exact(&r), q(112, 3));
        assert_eq!(r.min_n, BigInt::from(38));
        let r = thm1_stable(&FamilyParams::new(3, 0, 0, 0)).unwrap();
        assert_eq!((exact(&r), r.min_n.clone()), (int(27), BigInt::from(28)));
        assert!(thm1_stable(&FamilyParams::new(4, 0, 2, 0)).is_err());
    }

    #[test]
    fn mg_examples() {
        let r = mg_bound(4, 1).unwrap();
        assert_eq!((exact(&r), r.min_n.clone()), (int(216), BigInt::from(217)));
        assert_eq!(exact(&mg_bound(10, 7).unwrap()), int(1800));
        let r = mg_bound(4, 0).unwrap();
        assert!(r.notes.is_empty());
        let direct = thm1_stable(&FamilyParams::new(4, 9, 1, 0)).unwrap();
        assert_eq!(exact(&direct), int(216));
    }

    #[test]
    fn stoll_and_padic_zp() {
        let r = stoll_zp(2, 1, 1).unwrap();
        assert_eq!((exact(&r), r.min_n.clone()), (int(3), BigInt::from(4)));
        assert_eq!(stoll_zp(2, 0, 0).unwrap().min_n, BigInt::from(1));
        assert_eq!(exact(&stoll_zp(5, 2, 3).unwrap()), q(17, 4));
        assert!(stoll_zp(1, 0, 0).is_err());
        assert!(padic_zp_check(2, 2, 3, 1).unwrap());
        assert!(!padic_zp_check(2, 2, 3, 2).unwrap());
        assert!(!padic_zp_check(2, 1, 0, 0).unwrap());
        assert!(padic_zp_check(2, 0, 1, 0).is_err());
    }

    #[test]
    fn sunit_examples() {
        let r6 = sunit_bound(6, 50).unwrap();
        let v = r6.threshold.approx_f64();
        assert!((v / 7.06e12 - 1.0).abs() < 0.01, "{v}");
        assert!(r6.valid);
        assert!(!sunit_bound(5, 50).unwrap().valid);
        let r7 = sunit_bound(7, 50).unwrap();
        assert!(r7.threshold.approx_f64() > v);
        assert!(r7.min_n > r6.min_n);
    }

    #[test]
    fn twist_examples() {
        let one = int(1);
        let r = twist_bound(2, 23, &one, TwistVariant::Statement, 50).unwrap();
        assert!(r.valid && r.threshold.approx_f64().is_finite());
        assert!(!twist_bound(2, 22, &one, TwistVariant::Statement, 50).unwrap().valid);
        let a = twist_bound(2, 30, &one, TwistVariant::Statement, 50).unwrap();
        let b = twist_bound(2, 30, &one, TwistVariant::Expanded, 50).unwrap();
        let ratio = b.threshold.approx_f64() / a.threshold.approx_f64();
        assert!((ratio - 30f64.powi(4)).abs() / 30f64.powi(4) < 1e-9);
    }

    #[test]
    fn classical_examples() {
        let rows = classical_rows(1, None, Some(4), 50).unwrap();
        let get = |n: &str| rows.iter().find(|r| r.name == n).unwrap();
        assert_eq!(exact(get("evertse")), int(50421));
        assert_eq!(exact(get("krzb")), int(980));
        assert_eq!(exact(get("mg_bound")), int(216));
        assert_eq!(exact(get("krzb_over_mg")), q(980, 216));
        let rows = classical_rows(10, None, None, 50).unwrap();
        let est = rows.iter().find(|r| r.name == "est_lower").unwrap();
        let expect = (3.0 * (10.0 / 10f64.ln()).sqrt()).exp();
        assert!((est.threshold.approx_f64() / expect - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bad_reduction_examples() {
        let rows = bad_reduction_rows(4, 1, 0, 0).unwrap();
        assert_eq!(exact(&rows[0]), q(5, 3));
        assert_eq!(exact(&rows[1]), int(2));
        assert_eq!(exact(&rows[2]), q(112, 3));
        assert_eq!(exact(&rows[3]), int(2 * 9) + q(5, 3) * int(6));
        assert_eq!(stable_graph_caps(2).unwrap(), (2, 3));
        assert!(bad_reduction_rows(4, 1, 2, 0).is_err());
    }

    #[test]
    fn gonality_and_codim() {
        assert_eq!(gonality_check(4, 2, 0, 4).unwrap(), (true, int(4)));
        assert_eq!(gonality_check(4, 2, 0, 3).unwrap(), (false, int(4)));
        assert_eq!(gonality_check(5, 1, 1, 1).unwrap(), (true, int(0)));
        assert!(gonality_check(4, 3, 0, 1).is_err());
        assert_eq!(degeneracy_codim(2, 3, 0, 1).unwrap(), BigInt::from(2));
        assert_eq!(degeneracy_codim(5, 6, 0, 5).unwrap(), BigInt::from(0));
        assert_eq!(degeneracy_codim(3, 2, 1, 0).unwrap(), BigInt::from(9));
        assert!(degeneracy_codim(3, 1, 0, 2).is_err());
    }
}
