//! Generic rank of a Lie-algebra-valued form restricted to a parametrized
//! subvariety, the kernel of the restriction, and the split between a constant
//! kernel (the form descends to a subalgebra) and a non-constant one (a rational
//! first integral cuts the subvariety down).
//!
//! Everything happens in truncated series, so constancy means "constant up to
//! the truncation order" and every verdict says so.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::padic::{PadicError, RationalRing, TruncSeries};
use crate::transport::{parse_entry, ConnectionForm, TransportError};

pub type QSeries = TruncSeries<RationalRing>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AxsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("degenerate chart: {0}")]
    DegenerateChart(String),
    #[error(transparent)]
    Series(#[from] PadicError),
    #[error(transparent)]
    Transport(#[from] TransportError),
}

pub type Result<T> = std::result::Result<T, AxsError>;

fn zero_series(vars: &[String], cap: u32) -> QSeries {
    QSeries::zero(RationalRing, vars.to_vec(), cap, false)
}

fn const_series(vars: &[String], cap: u32, c: BigRational) -> QSeries {
    QSeries::constant(RationalRing, vars.to_vec(), cap, c)
}

fn read_names(v: &Value, key: &str) -> Result<Vec<String>> {
    v[key]
        .as_array()
        .ok_or_else(|| AxsError::Shape(format!("missing `{key}`")))?
        .iter()
        .map(|x| {
            x.as_str()
                .map(String::from)
                .ok_or_else(|| AxsError::Shape(format!("`{key}` must hold strings")))
        })
        .collect()
}

fn read_cap(v: &Value, default: u32) -> u32 {
    v["cap"].as_u64().map_or(default, |c| c as u32)
}

/// A `g`-valued one-form on an ambient polydisc: `rows[a][k]` is the `dz_k`
/// coefficient of the `a`-th coordinate in a fixed basis `v_1..v_n` of `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct GForm {
    vars: Vec<String>,
    cap: u32,
    rows: Vec<Vec<QSeries>>,
}

impl GForm {
    pub fn new(vars: Vec<String>, cap: u32, rows: Vec<Vec<QSeries>>) -> Result<Self> {
        if vars.is_empty() {
            return Err(AxsError::Shape("ambient chart needs at least one coordinate".into()));
        }
        for r in &rows {
            if r.len() != vars.len() {
                return Err(AxsError::Shape(format!(
                    "row has {} entries for {} coordinates",
                    r.len(),
                    vars.len()
                )));
            }
            if r.iter().any(|e| e.nvars() != vars.len()) {
                return Err(AxsError::Shape("entry in the wrong variables".into()));
            }
        }
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(|e| e.truncate(cap)).collect())
            .collect();
        Ok(GForm { vars, cap, rows })
    }

    /// Coordinates of a unipotent connection in the basis `E_ij`, `i > j`, of strictly lower-triangular matrices.
    pub fn from_connection(conn: &ConnectionForm) -> Result<Self> {
        if !conn.singular().is_empty() {
            return Err(AxsError::Domain("connection must be holomorphic on the chart".into()));
        }
        let d = conn.dim();
        let mut rows = Vec::new();
        for i in 0..d {
            for j in 0..i {
                rows.push((0..conn.vars().len()).map(|k| conn.component(k).get(i, j).clone()).collect());
            }
        }
        Self::new(conn.vars().to_vec(), conn.cap(), rows)
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn rows(&self) -> &[Vec<QSeries>] {
        &self.rows
    }

    pub fn truncate(&self, cap: u32) -> Self {
        GForm {
            vars: self.vars.clone(),
            cap: cap.min(self.cap),
            rows: self.rows.iter().map(|r| r.iter().map(|e| e.truncate(cap)).collect()).collect(),
        }
    }

    /// Keep the coordinates with the given indices.
    pub fn restrict_rows(&self, idx: &[usize]) -> Self {
        GForm {
            vars: self.vars.clone(),
            cap: self.cap,
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "vars": self.vars,
            "cap": self.cap,
            "rows": self.rows.iter().map(|r| r.iter().map(|e| e.to_poly_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value, default_cap: u32) -> Result<Self> {
        let vars = read_names(v, "vars")?;
        let cap = read_cap(v, default_cap);
        let rows = v["rows"]
            .as_array()
            .ok_or_else(|| AxsError::Shape("missing `rows`".into()))?
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| AxsError::Shape("row must be an array".into()))?
                    .iter()
                    .map(|e| Ok(parse_entry(e, &vars, cap)?))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(vars, cap, rows)
    }
}

/// `params -> ambient`, sending the origin of the parameters to the origin of the ambient chart.
#[derive(Debug, Clone, PartialEq)]
pub struct SubvarietyChart {
    params: Vec<String>,
    cap: u32,
    maps: Vec<QSeries>,
}

impl SubvarietyChart {
    pub fn new(params: Vec<String>, cap: u32, maps: Vec<QSeries>) -> Result<Self> {
        if maps.is_empty() {
            return Err(AxsError::Shape("chart needs at least one ambient coordinate".into()));
        }
        for (k, m) in maps.iter().enumerate() {
            if m.nvars() != params.len() {
                return Err(AxsError::Shape(format!("map {k} is not a series in the parameters")));
            }
            if !m.constant_term().is_zero() {
                return Err(AxsError::Domain(format!(
                    "map {k} has constant term {}; centre the ambient chart at the basepoint",
                    m.constant_term()
                )));
            }
        }
        let maps = maps.into_iter().map(|m| m.truncate(cap)).collect();
        Ok(SubvarietyChart { params, cap, maps })
    }

    pub fn identity(vars: &[String], cap: u32) -> Self {
        let maps = (0..vars.len())
            .map(|i| QSeries::var(RationalRing, vars.to_vec(), cap, i))
            .collect();
        SubvarietyChart {
            params: vars.to_vec(),
            cap,
            maps,
        }
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn maps(&self) -> &[QSeries] {
        &self.maps
    }

    /// Solve `g = 0` for the first parameter occurring linearly in `g` and substitute.
    ///
    /// Returns the restricted chart and the index of the eliminated parameter, or
    /// `None` when `g` has no linear term.
    pub fn restrict(&self, g: &QSeries) -> Result<Option<(Self, usize)>> {
        if !g.constant_term().is_zero() {
            return Err(AxsError::Domain("constraint does not vanish at the basepoint".into()));
        }
        let w = self.params.len();
        let Some((k, c)) = (0..w).find_map(|k| {
            let mut e = vec![0; w];
            e[k] = 1;
            let c = g.coeff(&e);
            (!c.is_zero()).then_some((k, c))
        }) else {
            return Ok(None);
        };
        let new_params: Vec<String> = self
            .params
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, v)| v.clone())
            .collect();
        let cap = g.cap().min(self.cap);
        let subs_for = |h: &QSeries| -> Vec<QSeries> {
            let mut next = 0;
            (0..w)
                .map(|i| {
                    if i == k {
                        h.clone()
                    } else {
                        let v = QSeries::var(RationalRing, new_params.clone(), cap, next);
                        next += 1;
                        v
                    }
                })
                .collect()
        };
        let cinv = BigRational::one() / c;
        let mut h = zero_series(&new_params, cap);
        for _ in 0..=cap {
            let r = g.compose(&subs_for(&h))?;
            if r.is_zero() {
                break;
            }
            h = h.sub(&r.scale(&cinv))?;
        }
        let subs = subs_for(&h);
        let maps = self
            .maps
            .iter()
            .map(|m| m.compose(&subs))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Some((Self::new(new_params, cap, maps)?, k)))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "params": self.params,
            "cap": self.cap,
            "maps": self.maps.iter().map(|m| m.to_poly_string()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value, default_cap: u32) -> Result<Self> {
        let params = read_names(v, "params")?;
        let cap = read_cap(v, default_cap);
        let maps = v["maps"]
            .as_array()
            .ok_or_else(|| AxsError::Shape("missing `maps`".into()))?
            .iter()
            .map(|e| Ok(parse_entry(e, &params, cap)?))
            .collect::<Result<Vec<_>>>()?;
        Self::new(params, cap, maps)
    }
}

/// `m[a][b]` is the `d(param_b)` coefficient of the `a`-th coordinate of the pulled-back form.
#[derive(Debug, Clone, PartialEq)]
pub struct PulledBackForm {
    params: Vec<String>,
    cap: u32,
    m: Vec<Vec<QSeries>>,
}

impl PulledBackForm {
    pub fn from_rows(params: Vec<String>, cap: u32, m: Vec<Vec<QSeries>>) -> Result<Self> {
        for r in &m {
            if r.len() != params.len() || r.iter().any(|e| e.nvars() != params.len()) {
                return Err(AxsError::Shape("rows must have one series per parameter".into()));
            }
        }
        let m = m.into_iter().map(|r| r.into_iter().map(|e| e.truncate(cap)).collect()).collect();
        Ok(PulledBackForm { params, cap, m })
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn rows(&self) -> usize {
        self.m.len()
    }

    pub fn cols(&self) -> usize {
        self.params.len()
    }

    pub fn get(&self, a: usize, b: usize) -> &QSeries {
        &self.m[a][b]
    }

    pub fn matrix(&self) -> &[Vec<QSeries>] {
        &self.m
    }

    /// `P M` for a constant `P`.
    pub fn left_mul(&self, p: &[Vec<BigRational>]) -> Result<Self> {
        let rows = p
            .iter()
            .map(|prow| {
                (0..self.cols())
                    .map(|b| {
                        let mut acc = zero_series(&self.params, self.cap);
                        for (a, c) in prow.iter().enumerate() {
                            if !c.is_zero() {
                                acc = acc.add(&self.m[a][b].scale(c))?;
                            }
                        }
                        Ok(acc)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(self.params.clone(), self.cap, rows)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "params": self.params,
            "cap": self.cap,
            "M": self.m.iter().map(|r| r.iter().map(|e| e.to_poly_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

/// Pull `omega` back along `chart`; the result is known one degree below the common cap.
pub fn pull_back(omega: &GForm, chart: &SubvarietyChart) -> Result<PulledBackForm> {
    if omega.vars.len() != chart.maps.len() {
        return Err(AxsError::Shape(format!(
            "form lives on {} coordinates, chart maps into {}",
            omega.vars.len(),
            chart.maps.len()
        )));
    }
    if omega.cap != chart.cap {
        return Err(AxsError::Domain(format!(
            "cap mismatch: form {} vs chart {}",
            omega.cap, chart.cap
        )));
    }
    let cap = chart.cap.saturating_sub(1);
    let w = chart.params.len();
    let jac = chart
        .maps
        .iter()
        .map(|m| (0..w).map(|b| m.diff(b)).collect::<std::result::Result<Vec<_>, _>>())
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut rows = Vec::with_capacity(omega.dim());
    for row in &omega.rows {
        let pulled = row
            .iter()
            .map(|e| e.compose(&chart.maps))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let mut out = Vec::with_capacity(w);
        for b in 0..w {
            let mut acc = zero_series(&chart.params, cap);
            for (k, pk) in pulled.iter().enumerate() {
                if pk.is_zero() || jac[k][b].is_zero() {
                    continue;
                }
                acc = acc.add(&pk.truncate(cap).mul(&jac[k][b])?)?;
            }
            out.push(acc);
        }
        rows.push(out);
    }
    PulledBackForm::from_rows(chart.params.clone(), cap, rows)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Determinant by cofactor expansion along the first row.
pub fn determinant(m: &[Vec<QSeries>], vars: &[String], cap: u32) -> Result<QSeries> {
    let n = m.len();
    if n == 0 {
        return Ok(const_series(vars, cap, BigRational::one()));
    }
    if n == 1 {
        return Ok(m[0][0].truncate(cap));
    }
    let mut acc = zero_series(vars, cap);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let sub: Vec<Vec<QSeries>> = m[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, e)| e.clone()).collect())
            .collect();
        let term = m[0][j].mul(&determinant(&sub, vars, cap)?)?;
        acc = if j % 2 == 0 { acc.add(&term)? } else { acc.sub(&term)? };
    }
    Ok(acc)
}

fn submatrix(m: &[Vec<QSeries>], rows: &[usize], cols: &[usize]) -> Vec<Vec<QSeries>> {
    rows.iter()
        .map(|&i| cols.iter().map(|&j| m[i][j].clone()).collect())
        .collect()
}

fn lowest_term(s: &QSeries) -> Option<(Vec<u32>, BigRational)> {
    s.terms()
        .min_by_key(|(m, _)| (m.degree(), m.t.clone()))
        .map(|(m, c)| (m.t.clone(), c.clone()))
}

/// A nonzero minor witnessing the rank.
#[derive(Debug, Clone, PartialEq)]
pub struct RankCertificate {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    /// Lowest total degree present in the minor.
    pub order: u32,
    pub lowest_exponent: Vec<u32>,
    pub lowest_coeff: BigRational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenericRank {
    pub rank: usize,
    pub certificate: Option<RankCertificate>,
    pub cap: u32,
}

/// Largest `r` with an `r x r` minor that is nonzero at the truncation order.
///
/// Among the nonzero minors of that size the one of least order is returned,
/// which is also the pivot block used by [`kernel_analysis`].
pub fn generic_rank(pb: &PulledBackForm) -> Result<GenericRank> {
    let (n, w) = (pb.rows(), pb.cols());
    for r in (1..=n.min(w)).rev() {
        let mut best: Option<RankCertificate> = None;
        for rows in combinations(n, r) {
            for cols in combinations(w, r) {
                let d = determinant(&submatrix(&pb.m, &rows, &cols), &pb.params, pb.cap)?;
                let Some((e, c)) = lowest_term(&d) else { continue };
                let order = e.iter().sum();
                if best.as_ref().is_none_or(|b| order < b.order) {
                    best = Some(RankCertificate {
                        rows: rows.clone(),
                        cols: cols.clone(),
                        order,
                        lowest_exponent: e,
                        lowest_coeff: c,
                    });
                }
            }
        }
        if best.is_some() {
            return Ok(GenericRank {
                rank: r,
                certificate: best,
                cap: pb.cap,
            });
        }
    }
    Ok(GenericRank {
        rank: 0,
        certificate: None,
        cap: pb.cap,
    })
}

/// `1 / u` for `u` with nonzero constant term.
pub fn inverse_unit(u: &QSeries) -> Result<QSeries> {
    let c = u.constant_term();
    if c.is_zero() {
        return Err(AxsError::Domain("series is not a unit".into()));
    }
    let cinv = BigRational::one() / &c;
    let one = const_series(u.vars(), u.cap(), BigRational::one());
    let v = one.sub(&u.scale(&cinv))?;
    let mut acc = one.clone();
    let mut power = one;
    for _ in 0..u.cap() {
        power = power.mul(&v)?;
        if power.is_zero() {
            break;
        }
        acc = acc.add(&power)?;
    }
    Ok(acc.scale(&cinv))
}

/// Divide by `x^e` when every term allows it; the cap drops by `|e|`.
fn div_monomial(s: &QSeries, e: &[u32], cap: u32) -> Option<QSeries> {
    let k: u32 = e.iter().sum();
    let mut terms = Vec::new();
    for (m, c) in s.terms() {
        if m.degree() > cap {
            continue;
        }
        if m.t.iter().zip(e).any(|(a, b)| a < b) {
            return None;
        }
        terms.push((m.t.iter().zip(e).map(|(a, b)| a - b).collect(), c.clone()));
    }
    QSeries::from_rational_terms(RationalRing, s.vars().to_vec(), cap - k, &terms).ok()
}

/// A kernel coefficient `f_ij`, either a series or a genuine fraction.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelCoeff {
    Series(QSeries),
    Fraction { num: QSeries, den: QSeries },
}

impl KernelCoeff {
    /// `num / den`, simplified to a series when `den` is a unit times a monomial dividing `num`.
    pub fn divide(num: &QSeries, den: &QSeries) -> Result<Self> {
        let Some(order) = den.order() else {
            return Err(AxsError::DegenerateChart("zero pivot block".into()));
        };
        let cap = num.cap().min(den.cap());
        if order >= cap {
            return Err(AxsError::DegenerateChart(format!(
                "pivot determinant has order {order}, nothing left below the cap {cap}"
            )));
        }
        if order == 0 {
            return Ok(KernelCoeff::Series(num.truncate(cap).mul(&inverse_unit(&den.truncate(cap))?)?));
        }
        let low = den.homogeneous(order);
        if low.terms().count() == 1 {
            let (e, _) = lowest_term(&low).expect("nonzero");
            if let (Some(n), Some(d)) = (div_monomial(num, &e, cap), div_monomial(den, &e, cap)) {
                return Ok(KernelCoeff::Series(n.mul(&inverse_unit(&d)?)?));
            }
        }
        Ok(KernelCoeff::Fraction {
            num: num.truncate(cap),
            den: den.truncate(cap),
        })
    }

    pub fn cap(&self) -> u32 {
        match self {
            KernelCoeff::Series(s) => s.cap(),
            KernelCoeff::Fraction { num, den } => num.cap().min(den.cap()),
        }
    }

    /// All first partials vanish below the cap.
    pub fn is_constant(&self) -> Result<bool> {
        match self {
            KernelCoeff::Series(s) => {
                for b in 0..s.nvars() {
                    if !s.diff(b)?.is_zero() {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            KernelCoeff::Fraction { num, den } => {
                let cap = self.cap().saturating_sub(1);
                for b in 0..num.nvars() {
                    let w = num.diff(b)?.mul(&den.truncate(cap))?.sub(&num.truncate(cap).mul(&den.diff(b)?)?)?;
                    if !w.is_zero() {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// Value of a constant coefficient.
    pub fn constant_value(&self) -> BigRational {
        match self {
            KernelCoeff::Series(s) => s.constant_term(),
            KernelCoeff::Fraction { num, den } => {
                let (e, d) = lowest_term(den).expect("nonzero denominator");
                num.coeff(&e) / d
            }
        }
    }

    pub fn is_regular(&self) -> bool {
        matches!(self, KernelCoeff::Series(_))
    }

    /// `D(f)` for the derivation `sum_b u_b d/dparam_b`; for a fraction, the numerator of `D(f)`.
    pub fn apply_derivation(&self, u: &[QSeries]) -> Result<QSeries> {
        let d = |s: &QSeries| -> Result<QSeries> {
            let cap = s.cap().saturating_sub(1);
            let mut acc = zero_series(s.vars(), cap);
            for (b, ub) in u.iter().enumerate() {
                acc = acc.add(&ub.truncate(cap).mul(&s.diff(b)?)?)?;
            }
            Ok(acc)
        };
        match self {
            KernelCoeff::Series(s) => d(s),
            KernelCoeff::Fraction { num, den } => {
                let cap = self.cap().saturating_sub(1);
                Ok(d(num)?.mul(&den.truncate(cap))?.sub(&num.truncate(cap).mul(&d(den)?)?)?)
            }
        }
    }

    pub fn to_poly_string(&self) -> String {
        match self {
            KernelCoeff::Series(s) => s.to_poly_string(),
            KernelCoeff::Fraction { num, den } => {
                format!("({}) / ({})", num.to_poly_string(), den.to_poly_string())
            }
        }
    }
}

/// `v*_row + sum_j f_j v*_{pivot_j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelCovector {
    pub row: usize,
    pub coeffs: Vec<(usize, KernelCoeff)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// Every kernel coefficient is constant to the truncation order; the form
    /// takes values in the subalgebra spanned by `basis` (rows are vectors in `v_1..v_n`).
    SubalgebraDescent { basis: Vec<Vec<BigRational>>, order: u32 },
    /// A non-constant coefficient `f`, and a function vanishing on the leaf through the basepoint.
    FirstIntegral {
        f: KernelCoeff,
        vanishing_fn: QSeries,
        covector: usize,
        pivot: usize,
    },
}

impl Verdict {
    pub fn label(&self) -> String {
        match self {
            Verdict::SubalgebraDescent { basis, .. } => format!("SubalgebraDescent(dim {})", basis.len()),
            Verdict::FirstIntegral { vanishing_fn, .. } => {
                format!("FirstIntegral({})", vanishing_fn.to_poly_string())
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Verdict::SubalgebraDescent { basis, order } => json!({
                "kind": "SubalgebraDescent",
                "basis": basis.iter().map(|r| r.iter().map(|q| q.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "certificate": format!("kernel coefficients constant to order {order}"),
            }),
            Verdict::FirstIntegral { f, vanishing_fn, covector, pivot } => json!({
                "kind": "FirstIntegral",
                "f": f.to_poly_string(),
                "regular": f.is_regular(),
                "vanishing_fn": vanishing_fn.to_poly_string(),
                "source": [covector, pivot],
                "certificate": format!("non-constant below degree {}", f.cap()),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelAnalysis {
    pub rank: GenericRank,
    pub pivot_rows: Vec<usize>,
    pub pivot_cols: Vec<usize>,
    pub kernel_basis: Vec<KernelCovector>,
    pub verdict: Verdict,
}

impl KernelAnalysis {
    pub fn to_json(&self) -> Value {
        json!({
            "rank": self.rank.rank,
            "order": self.rank.cap,
            "pivot_rows": self.pivot_rows,
            "pivot_cols": self.pivot_cols,
            "kernel": self.kernel_basis.iter().map(|k| json!({
                "row": k.row,
                "coeffs": k.coeffs.iter().map(|(j, f)| json!([j, f.to_poly_string()])).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "verdict": self.verdict.to_json(),
        })
    }
}

/// Scale so that the lowest term has coefficient one.
fn normalize(s: &QSeries) -> QSeries {
    match lowest_term(s) {
        Some((_, c)) => s.scale(&(BigRational::one() / c)),
        None => s.clone(),
    }
}

fn replace_row(b: &[Vec<QSeries>], j: usize, row: &[QSeries]) -> Vec<Vec<QSeries>> {
    let mut out = b.to_vec();
    out[j] = row.to_vec();
    out
}

/// Left kernel of `M` over the fraction field, in the form `v*_i + sum_j f_ij v*_{R_j}`,
/// and the resulting verdict.
pub fn kernel_analysis(pb: &PulledBackForm) -> Result<KernelAnalysis> {
    let rank = generic_rank(pb)?;
    let n = pb.rows();
    let (pivot_rows, pivot_cols) = match &rank.certificate {
        Some(c) => (c.rows.clone(), c.cols.clone()),
        None => (Vec::new(), Vec::new()),
    };
    let block = submatrix(&pb.m, &pivot_rows, &pivot_cols);
    let den = determinant(&block, &pb.params, pb.cap)?;
    let mut kernel_basis = Vec::new();
    for i in (0..n).filter(|i| !pivot_rows.contains(i)) {
        let target: Vec<QSeries> = pivot_cols.iter().map(|&c| pb.m[i][c].clone()).collect();
        let coeffs = (0..pivot_rows.len())
            .map(|j| {
                let num = determinant(&replace_row(&block, j, &target), &pb.params, pb.cap)?.neg();
                Ok((pivot_rows[j], KernelCoeff::divide(&num, &den)?))
            })
            .collect::<Result<Vec<_>>>()?;
        kernel_basis.push(KernelCovector { row: i, coeffs });
    }
    let mut first_integral = None;
    'search: for (ci, k) in kernel_basis.iter().enumerate() {
        for (pj, (_, f)) in k.coeffs.iter().enumerate() {
            if !f.is_constant()? {
                first_integral = Some((ci, pj, f.clone()));
                break 'search;
            }
        }
    }
    let verdict = match first_integral {
        Some((covector, pivot, f)) => {
            let raw = match &f {
                KernelCoeff::Series(s) => {
                    let c = const_series(s.vars(), s.cap(), s.constant_term());
                    s.sub(&c)?
                }
                KernelCoeff::Fraction { num, den } => num.mul(den)?,
            };
            Verdict::FirstIntegral {
                f,
                vanishing_fn: normalize(&raw),
                covector,
                pivot,
            }
        }
        None => {
            // h_j = v_{R_j} - sum_i c_ij v_i
            let basis = pivot_rows
                .iter()
                .enumerate()
                .map(|(j, &r)| {
                    let mut v = vec![BigRational::zero(); n];
                    v[r] = BigRational::one();
                    for k in &kernel_basis {
                        v[k.row] = -k.coeffs[j].1.constant_value();
                    }
                    v
                })
                .collect();
            Verdict::SubalgebraDescent { basis, order: pb.cap }
        }
    };
    Ok(KernelAnalysis {
        rank,
        pivot_rows,
        pivot_cols,
        kernel_basis,
        verdict,
    })
}

/// Derivations `sum_b u_b d/dparam_b` killed by `M`, cleared of denominators.
pub fn kernel_derivations(pb: &PulledBackForm, ka: &KernelAnalysis) -> Result<Vec<Vec<QSeries>>> {
    let w = pb.cols();
    let block = submatrix(&pb.m, &ka.pivot_rows, &ka.pivot_cols);
    let den = determinant(&block, &pb.params, pb.cap)?;
    let mut out = Vec::new();
    for k in (0..w).filter(|k| !ka.pivot_cols.contains(k)) {
        let mut u = vec![zero_series(&pb.params, pb.cap); w];
        u[k] = den.clone();
        for (j, &c) in ka.pivot_cols.iter().enumerate() {
            let mut b = block.clone();
            for (row, &r) in b.iter_mut().zip(&ka.pivot_rows) {
                row[j] = pb.m[r][k].neg();
            }
            u[c] = determinant(&b, &pb.params, pb.cap)?;
        }
        out.push(u);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Round {
    pub params: usize,
    pub dim: usize,
    pub rank: usize,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocusReport {
    pub vanishing: Vec<QSeries>,
    pub rounds: Vec<Round>,
    pub complete: bool,
    pub notes: Vec<String>,
    pub chart: SubvarietyChart,
    pub form: GForm,
}

impl LocusReport {
    pub fn to_json(&self) -> Value {
        json!({
            "vanishing": self.vanishing.iter().map(|g| g.to_poly_string()).collect::<Vec<_>>(),
            "rounds": self.rounds.iter().map(|r| json!({
                "params": r.params, "dim": r.dim, "rank": r.rank, "verdict": r.verdict,
            })).collect::<Vec<_>>(),
            "complete": self.complete,
            "notes": self.notes,
            "chart": self.chart.to_json(),
        })
    }
}

pub const NOT_EXPLOITABLE: &str = "hypothesis dim V < dim W + dim G not exploitable";

/// Alternate kernel analysis with restriction: first integrals cut the chart down,
/// constant kernels shrink the form to the subalgebra, until the rank saturates.
pub fn effective_locus(omega: &GForm, chart: &SubvarietyChart, max_iter: usize) -> Result<LocusReport> {
    if max_iter == 0 {
        return Err(AxsError::Domain("max_iter must be at least 1".into()));
    }
    let mut form = omega.clone();
    let mut chart = chart.clone();
    let mut vanishing = Vec::new();
    let mut rounds = Vec::new();
    let mut notes = Vec::new();
    let mut complete = false;
    for _ in 0..max_iter {
        if chart.params.is_empty() {
            notes.push("chart reduced to a point".into());
            complete = true;
            break;
        }
        if form.dim() == 0 {
            notes.push("form has no coordinates left".into());
            complete = true;
            break;
        }
        form = form.truncate(chart.cap);
        let pb = pull_back(&form, &chart)?;
        let ka = kernel_analysis(&pb)?;
        rounds.push(Round {
            params: chart.params.len(),
            dim: form.dim(),
            rank: ka.rank.rank,
            verdict: ka.verdict.label(),
        });
        if ka.rank.rank == form.dim() {
            notes.push(if vanishing.is_empty() && rounds.len() == 1 {
                NOT_EXPLOITABLE.to_string()
            } else {
                "rank saturated".to_string()
            });
            complete = true;
            break;
        }
        match &ka.verdict {
            Verdict::FirstIntegral { vanishing_fn, .. } => {
                vanishing.push(vanishing_fn.clone());
                match chart.restrict(vanishing_fn)? {
                    Some((c, _)) => chart = c,
                    None => {
                        notes.push(format!(
                            "constraint {} has no linear term; chart not restricted",
                            vanishing_fn.to_poly_string()
                        ));
                        break;
                    }
                }
            }
            Verdict::SubalgebraDescent { .. } => {
                form = form.restrict_rows(&ka.pivot_rows);
            }
        }
    }
    if !complete && notes.is_empty() {
        notes.push("iteration budget exhausted".into());
    }
    notes.push(format!("verdicts certified to order {} only", chart.cap));
    Ok(LocusReport {
        vanishing,
        rounds,
        complete,
        notes,
        chart,
        form,
    })
}

/// Built-in inputs: `parabola`, `disk`, `constant`, `full-rank`.
pub fn demo(name: &str, cap: u32) -> Option<(GForm, SubvarietyChart)> {
    let z = vec!["z1".to_string(), "z2".to_string()];
    let t = vec!["t1".to_string(), "t2".to_string()];
    let form = |vars: &[String], rows: Value| GForm::from_json(&json!({"vars": vars, "cap": cap, "rows": rows}), cap).ok();
    match name {
        "parabola" => Some((
            form(&z, json!([["1", "0"], ["0", "1"]]))?,
            SubvarietyChart::from_json(&json!({"params": ["t1"], "cap": cap, "maps": ["t1", "t1^2"]}), cap).ok()?,
        )),
        "disk" => Some((form(&t, json!([["1", "0"], ["t1", "0"]]))?, SubvarietyChart::identity(&t, cap))),
        "constant" => Some((form(&z, json!([["1", "0"], ["3", "0"]]))?, SubvarietyChart::identity(&z, cap))),
        "full-rank" => Some((form(&z, json!([["1", "0"], ["0", "1"]]))?, SubvarietyChart::identity(&z, cap))),
        _ => None,
    }
}

pub const DEMOS: [&str; 4] = ["parabola", "disk", "constant", "full-rank"];

/// Reads `{"form" | "connection", "chart"?, "max_iter"?}`; a missing chart means the identity chart.
pub fn parse_input(v: &Value, default_cap: u32) -> Result<(GForm, SubvarietyChart, usize)> {
    let form = if v.get("form").is_some() {
        GForm::from_json(&v["form"], default_cap)?
    } else if v.get("connection").is_some() {
        GForm::from_connection(&ConnectionForm::from_json(&v["connection"])?)?
    } else {
        return Err(AxsError::Shape("input needs `form` or `connection`".into()));
    };
    let chart = match v.get("chart") {
        Some(c) => SubvarietyChart::from_json(c, form.cap)?,
        None => SubvarietyChart::identity(&form.vars, form.cap),
    };
    let max_iter = v["max_iter"].as_u64().map_or(4, |m| m as usize);
    Ok((form, chart, max_iter))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use crate::padic::parse_poly;

    fn big(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn s(vars: &[&str], cap: u32, text: &str) -> QSeries {
        let v: Vec<String> = vars.iter().map(|x| x.to_string()).collect();
        parse_poly(RationalRing, &v, cap, text).unwrap()
    }

    #[test]
    fn pull_back_examples() {
        let (f, c) = demo("disk", 8).unwrap();
        let m = pull_back(&f, &c).unwrap();
        assert_eq!(m.get(0, 0).to_poly_string(), "1");
        assert_eq!(m.get(1, 0).to_poly_string(), "t1");
        assert!(m.get(0, 1).is_zero() && m.get(1, 1).is_zero());

        let (f, c) = demo("parabola", 8).unwrap();
        let m = pull_back(&f, &c).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 1));
        assert_eq!(m.get(1, 0).to_poly_string(), "2*t1");

        let constant = SubvarietyChart::new(vec!["u".into()], 8, vec![s(&["u"], 8, "0"), s(&["u"], 8, "0")]).unwrap();
        let m = pull_back(&f, &constant).unwrap();
        assert!(m.matrix().iter().flatten().all(|e| e.is_zero()));

        let short = f.truncate(5);
        assert!(matches!(pull_back(&short, &c), Err(AxsError::Domain(_))));
    }

    #[test]
    fn rank_examples() {
        let (f, c) = demo("disk", 8).unwrap();
        let r = generic_rank(&pull_back(&f, &c).unwrap()).unwrap();
        assert_eq!(r.rank, 1);
        let cert = r.certificate.unwrap();
        assert_eq!((cert.rows, cert.cols), (vec![0], vec![0]));
        let (f, c) = demo("full-rank", 8).unwrap();
        assert_eq!(generic_rank(&pull_back(&f, &c).unwrap()).unwrap().rank, 2);
        let z = PulledBackForm::from_rows(vec!["t".into()], 4, vec![vec![s(&["t"], 4, "0")]]).unwrap();
        assert_eq!(generic_rank(&z).unwrap().rank, 0);
    }

    #[test]
    fn kernel_examples() {
        let (f, c) = demo("parabola", 16).unwrap();
        let ka = kernel_analysis(&pull_back(&f, &c).unwrap()).unwrap();
        assert_eq!(ka.kernel_basis.len(), 1);
        assert_eq!(ka.kernel_basis[0].coeffs[0].1.to_poly_string(), "-2*t1");
        assert_eq!(ka.verdict.label(), "FirstIntegral(t1)");

        let (f, c) = demo("disk", 16).unwrap();
        let pb = pull_back(&f, &c).unwrap();
        let ka = kernel_analysis(&pb).unwrap();
        assert_eq!(ka.kernel_basis[0].coeffs[0].1.to_poly_string(), "-t1");
        let Verdict::FirstIntegral { f: fi, .. } = &ka.verdict else { panic!() };
        for u in kernel_derivations(&pb, &ka).unwrap() {
            assert!(fi.apply_derivation(&u).unwrap().is_zero());
        }

        let (f, c) = demo("constant", 16).unwrap();
        let ka = kernel_analysis(&pull_back(&f, &c).unwrap()).unwrap();
        match ka.verdict {
            Verdict::SubalgebraDescent { basis, .. } => assert_eq!(basis, vec![vec![big(1), big(3)]]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fraction_coefficients() {
        // M = [[t^2], [t + t^2]]: pivot t^2 is not a unit; f = -(1 + t)/t
        let pb = PulledBackForm::from_rows(
            vec!["t".into()],
            8,
            vec![vec![s(&["t"], 8, "t^2")], vec![s(&["t"], 8, "t + t^2")]],
        )
        .unwrap();
        let ka = kernel_analysis(&pb).unwrap();
        assert_eq!(ka.pivot_rows, vec![1]);
        assert_eq!(ka.kernel_basis[0].coeffs[0].1.to_poly_string(), "-t + t^2 - t^3 + t^4 - t^5 + t^6 - t^7");
        // both entries of order two: f is a fraction
        let pb = PulledBackForm::from_rows(
            vec!["x".into(), "y".into()],
            6,
            vec![
                vec![s(&["x", "y"], 6, "x^2 + y^2"), s(&["x", "y"], 6, "0")],
                vec![s(&["x", "y"], 6, "x*y"), s(&["x", "y"], 6, "0")],
            ],
        )
        .unwrap();
        let ka = kernel_analysis(&pb).unwrap();
        let f = &ka.kernel_basis[0].coeffs[0].1;
        assert!(!f.is_regular());
        let Verdict::FirstIntegral { vanishing_fn, .. } = &ka.verdict else { panic!() };
        assert!(vanishing_fn.constant_term().is_zero());
    }

    #[test]
    fn locus_examples() {
        let (f, c) = demo("parabola", 16).unwrap();
        let r = effective_locus(&f, &c, 4).unwrap();
        assert_eq!(r.vanishing.len(), 1);
        assert_eq!(r.vanishing[0].to_poly_string(), "t1");
        assert!(r.complete);

        let (f, c) = demo("constant", 16).unwrap();
        let r = effective_locus(&f, &c, 4).unwrap();
        assert!(r.vanishing.is_empty());
        assert!(r.rounds[0].verdict.starts_with("SubalgebraDescent"));

        let (f, c) = demo("full-rank", 16).unwrap();
        let r = effective_locus(&f, &c, 4).unwrap();
        assert!(r.vanishing.is_empty());
        assert!(r.notes.iter().any(|n| n == NOT_EXPLOITABLE));
        assert!(effective_locus(&f, &c, 0).is_err());
    }

    #[test]
    fn restrict_solves_implicitly() {
        let c = SubvarietyChart::identity(&["x".to_string(), "y".to_string()], 6);
        let g = s(&["x", "y"], 6, "x - y^2 + x*y");
        let (r, k) = c.restrict(&g).unwrap().unwrap();
        assert_eq!(k, 0);
        let back = g.compose(r.maps()).unwrap();
        assert!(back.is_zero());
    }
}
