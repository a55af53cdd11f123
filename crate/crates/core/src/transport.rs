//! Flat connections `d - Lambda` on a polydisc, their horizontal sections, and
//! evaluation of transport and Coleman integrals at `p`-adic points.
//!
//! Series are exact over `Q`; a transport matrix `H` with `dH = Lambda H` and
//! `H(0) = 1` is solved degree by degree and only evaluated `p`-adically at the
//! end, with a precision bound that accounts for the truncation tail.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::exactnum::{self, QMatrix};
use crate::padic::{
    self, antiderivative, parse_poly, OneForm, PadicError, PadicMatrix, PadicScalar, RationalRing,
    TruncSeries,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransportError {
    #[error("connection is not flat: {0}")]
    Integrability(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("the two routes disagree: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

pub type Result<T> = std::result::Result<T, TransportError>;

pub type QSeries = TruncSeries<RationalRing>;

/// A matrix of exact truncated series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<QSeries>,
}

impl SeriesMatrix {
    pub fn zero(rows: usize, cols: usize, vars: &[String], cap: u32) -> Self {
        let z = QSeries::zero(RationalRing, vars.to_vec(), cap, false);
        SeriesMatrix {
            rows,
            cols,
            entries: vec![z; rows * cols],
        }
    }

    pub fn identity(dim: usize, vars: &[String], cap: u32) -> Self {
        let mut m = Self::zero(dim, dim, vars, cap);
        for i in 0..dim {
            m.set(i, i, QSeries::constant(RationalRing, vars.to_vec(), cap, BigRational::one()));
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<QSeries>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if r == 0 || c == 0 || rows.iter().any(|x| x.len() != c) {
            return Err(TransportError::Shape("matrix rows must be non-empty and equal length".into()));
        }
        let first = &rows[0][0];
        for e in rows.iter().flatten() {
            if e.nvars() != first.nvars() {
                return Err(TransportError::Shape("entries in different variables".into()));
            }
        }
        Ok(SeriesMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Constant matrix.
    pub fn from_qmatrix(m: &QMatrix, vars: &[String], cap: u32) -> Result<Self> {
        Self::from_rows(
            m.iter()
                .map(|r| {
                    r.iter()
                        .map(|q| QSeries::constant(RationalRing, vars.to_vec(), cap, q.clone()))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &QSeries {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: QSeries) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn vars(&self) -> &[String] {
        self.entries[0].vars()
    }

    pub fn cap(&self) -> u32 {
        self.entries.iter().map(|e| e.cap()).min().unwrap_or(0)
    }

    fn map(&self, f: impl Fn(&QSeries) -> std::result::Result<QSeries, PadicError>) -> Result<Self> {
        Ok(SeriesMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect::<std::result::Result<_, _>>()?,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(SeriesMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.add(b))
                .collect::<std::result::Result<_, _>>()?,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|e| Ok(e.neg())).expect("infallible")
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        self.map(|e| Ok(e.scale(k))).expect("infallible")
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(TransportError::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(TransportError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let cap = self.cap().min(other.cap());
        let logs = self.entries.iter().chain(&other.entries).any(|e| e.logs_enabled());
        let mut zero = QSeries::zero(RationalRing, self.vars().to_vec(), cap, false);
        if logs {
            zero = zero.with_logs();
        }
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = zero.clone();
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(b)?)?;
                }
                entries.push(acc);
            }
        }
        Ok(SeriesMatrix {
            rows: self.rows,
            cols: other.cols,
            entries,
        })
    }

    pub fn diff(&self, i: usize) -> Result<Self> {
        self.map(|e| e.diff(i))
    }

    pub fn euler(&self, i: usize) -> Result<Self> {
        self.map(|e| e.euler(i))
    }

    pub fn shift(&self, i: usize) -> Self {
        self.map(|e| Ok(e.shift(i))).expect("infallible")
    }

    pub fn integrate(&self, i: usize) -> Result<Self> {
        self.map(|e| e.integrate(i))
    }

    pub fn truncate(&self, cap: u32) -> Self {
        self.map(|e| Ok(e.truncate(cap))).expect("infallible")
    }

    pub fn homogeneous(&self, d: u32) -> Self {
        self.map(|e| Ok(e.homogeneous(d))).expect("infallible")
    }

    pub fn restrict_zero(&self, idx: &[usize]) -> Self {
        self.map(|e| Ok(e.restrict_zero(idx))).expect("infallible")
    }

    pub fn with_logs(&self) -> Self {
        self.map(|e| Ok(e.with_logs())).expect("infallible")
    }

    pub fn strip_logs(&self) -> Self {
        self.map(|e| Ok(e.strip_logs())).expect("infallible")
    }

    pub fn compose(&self, subs: &[QSeries]) -> Result<Self> {
        self.map(|e| e.compose(subs))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.entries.iter().filter_map(|e| e.max_degree()).max()
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.entries.iter().filter_map(|e| e.order()).min()
    }

    /// Every entry on or above the diagonal vanishes.
    pub fn is_strictly_lower(&self) -> bool {
        (0..self.rows).all(|i| (i..self.cols).all(|j| self.get(i, j).is_zero()))
    }

    /// Sub-block `rows r0.., cols c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        let mut entries = Vec::new();
        for i in r0..r1 {
            for j in c0..c1 {
                entries.push(self.get(i, j).clone());
            }
        }
        SeriesMatrix {
            rows: r1 - r0,
            cols: c1 - c0,
            entries,
        }
    }

    /// `(I + M)^{-1} = sum (-M)^k` for `M` nilpotent or of positive order.
    pub fn inverse_unipotent(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(TransportError::Shape("inverse of a non-square matrix".into()));
        }
        let id = Self::identity(self.rows, self.vars(), self.cap());
        let m = self.sub(&id)?;
        let nilpotent = m.is_strictly_lower();
        let positive_order = m.entries.iter().all(|e| e.constant_term().is_zero());
        if !nilpotent && !positive_order {
            return Err(TransportError::Domain("matrix is not unipotent".into()));
        }
        let neg = m.neg();
        let mut acc = id.clone();
        let mut power = id;
        for _ in 0..(self.rows as u32 + self.cap() + 1) {
            power = power.mul(&neg)?;
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power)?;
        }
        Ok(acc)
    }

    /// Evaluate at a `p`-adic point; `depth` bounds the number of integrations behind each coefficient.
    pub fn evaluate(&self, point: &[PadicScalar], depth: u32) -> Result<PadicMatrix> {
        let rows = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| eval_series(self.get(i, j), point, depth))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PadicMatrix::from_rows(rows)?)
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = (0..self.rows)
            .map(|i| Value::Array((0..self.cols).map(|j| self.get(i, j).to_json()).collect()))
            .collect();
        Value::Array(rows)
    }

    /// Entries may be full series records or polynomial strings such as `"1 + s"`.
    pub fn from_json(v: &Value, vars: &[String], cap: u32) -> Result<Self> {
        let rows = v
            .as_array()
            .ok_or_else(|| TransportError::Shape("matrix must be an array of rows".into()))?;
        let rows = rows
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| TransportError::Shape("row must be an array".into()))?
                    .iter()
                    .map(|e| parse_entry(e, vars, cap))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows)
    }
}

/// A series given as a record, a polynomial string or a bare number.
pub fn parse_entry(e: &Value, vars: &[String], cap: u32) -> Result<QSeries> {
    match e {
        Value::String(s) => Ok(parse_poly(RationalRing, vars, cap, s)?),
        Value::Number(_) => Ok(parse_poly(RationalRing, vars, cap, &e.to_string())?),
        Value::Object(_) => Ok(QSeries::from_json(RationalRing, e)?),
        other => Err(TransportError::Shape(format!("cannot read series from {other}"))),
    }
}

/// A logarithmic pole `N dt_i / t_i` with constant residue.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularResidue {
    pub var: usize,
    pub n: QMatrix,
}

/// `Lambda = sum_k A_k dt_k + sum_i N_i dt_i / t_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionForm {
    dim: usize,
    vars: Vec<String>,
    cap: u32,
    components: Vec<SeriesMatrix>,
    singular: Vec<SingularResidue>,
}

impl ConnectionForm {
    pub fn new(components: Vec<SeriesMatrix>, singular: Vec<SingularResidue>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| TransportError::Shape("no components".into()))?;
        let dim = first.rows;
        let vars = first.vars().to_vec();
        if components.len() != vars.len() {
            return Err(TransportError::Shape(format!(
                "{} components for {} variables",
                components.len(),
                vars.len()
            )));
        }
        for a in &components {
            if a.rows != dim || a.cols != dim || a.vars().len() != vars.len() {
                return Err(TransportError::Shape("components must be square of equal size".into()));
            }
        }
        for s in &singular {
            if s.var >= vars.len() {
                return Err(TransportError::Shape(format!("no variable with index {}", s.var)));
            }
            if s.n.len() != dim || s.n.iter().any(|r| r.len() != dim) {
                return Err(TransportError::Shape("residue matrix has wrong size".into()));
            }
        }
        let cap = components.iter().map(|a| a.cap()).min().unwrap();
        Ok(ConnectionForm {
            dim,
            vars,
            cap,
            components,
            singular,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn component(&self, k: usize) -> &SeriesMatrix {
        &self.components[k]
    }

    pub fn singular(&self) -> &[SingularResidue] {
        &self.singular
    }

    /// The zero connection.
    pub fn trivial(dim: usize, vars: &[String], cap: u32) -> Self {
        let z = SeriesMatrix::zero(dim, dim, vars, cap);
        Self::new(vec![z; vars.len()], Vec::new()).expect("well-formed")
    }

    /// `d - [[0, 0], [omega, 0]]`, whose transport integrates `omega`.
    pub fn two_step(omega: &OneForm<RationalRing>) -> Result<Self> {
        let vars = omega.dt[0].vars().to_vec();
        let cap = omega.cap();
        let components = omega
            .dt
            .iter()
            .map(|w| {
                let mut a = SeriesMatrix::zero(2, 2, &vars, cap);
                a.set(1, 0, w.truncate(cap));
                a
            })
            .collect();
        let singular = omega
            .dlog
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| SingularResidue {
                var: i,
                n: vec![
                    vec![BigRational::zero(), BigRational::zero()],
                    vec![c.clone(), BigRational::zero()],
                ],
            })
            .collect();
        Self::new(components, singular)
    }

    /// `Lambda = dG G^{-1}` for a unipotent gauge `G` with `G(0) = 1`; always flat.
    pub fn from_gauge(g: &SeriesMatrix) -> Result<Self> {
        let ginv = g.inverse_unipotent()?;
        let cap = g.cap().saturating_sub(1);
        let components = (0..g.vars().len())
            .map(|k| g.diff(k)?.mul(&ginv.truncate(cap)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(components, Vec::new())
    }

    /// Every component strictly lower triangular.
    pub fn is_unipotent(&self) -> bool {
        self.components.iter().all(|a| a.is_strictly_lower())
    }

    /// Common denominator of every coefficient of every component.
    pub fn denominator(&self) -> BigInt {
        let mut l = BigInt::one();
        for a in &self.components {
            for e in &a.entries {
                for (_, c) in e.terms() {
                    l = l.lcm(c.denom());
                }
            }
        }
        l
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim,
            "vars": self.vars,
            "cap": self.cap,
            "components": self.components.iter().map(|a| a.to_json()).collect::<Vec<_>>(),
            "singular": self.singular.iter().map(|s| json!({
                "var": s.var,
                "N": s.n.iter().map(|r| r.iter().map(|q| q.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| TransportError::Shape(m.to_string());
        let vars: Vec<String> = v["vars"]
            .as_array()
            .ok_or_else(|| bad("missing `vars`"))?
            .iter()
            .map(|x| x.as_str().map(String::from).ok_or_else(|| bad("variable names must be strings")))
            .collect::<Result<_>>()?;
        let cap = v["cap"].as_u64().ok_or_else(|| bad("missing `cap`"))? as u32;
        let components = v["components"]
            .as_array()
            .ok_or_else(|| bad("missing `components`"))?
            .iter()
            .map(|a| SeriesMatrix::from_json(a, &vars, cap))
            .collect::<Result<Vec<_>>>()?;
        let mut singular = Vec::new();
        if let Some(list) = v["singular"].as_array() {
            for s in list {
                let var = match &s["var"] {
                    Value::String(name) => vars
                        .iter()
                        .position(|v| v == name)
                        .ok_or_else(|| bad("unknown singular variable"))?,
                    other => other.as_u64().ok_or_else(|| bad("bad singular variable"))? as usize,
                };
                singular.push(SingularResidue {
                    var,
                    n: parse_qmatrix(&s["N"])?,
                });
            }
        }
        Self::new(components, singular)
    }
}

pub fn parse_qmatrix(v: &Value) -> Result<QMatrix> {
    let bad = || TransportError::Shape(format!("cannot read rational matrix from {v}"));
    v.as_array()
        .ok_or_else(bad)?
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|x| match x {
                    Value::String(s) => Ok(padic::parse_rational(s)?),
                    Value::Number(n) => Ok(BigRational::from_integer(
                        n.as_i64().ok_or_else(bad)?.into(),
                    )),
                    _ => Err(bad()),
                })
                .collect()
        })
        .collect()
}

/// Flatness residuals `d_k A_l - d_l A_k - [A_k, A_l]` for `k < l`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatnessReport {
    pub flat: bool,
    /// `(k, l, max nonzero degree)` for every failing pair.
    pub residuals: Vec<(usize, usize, u32)>,
    pub max_residual_degree: Option<u32>,
    /// Residue matrices that fail to be nilpotent or to commute.
    pub residue_problems: Vec<String>,
}

pub fn flatness_check(conn: &ConnectionForm) -> Result<FlatnessReport> {
    let m = conn.vars.len();
    let mut residuals = Vec::new();
    for k in 0..m {
        for l in (k + 1)..m {
            let ak = &conn.components[k];
            let al = &conn.components[l];
            let cap = conn.cap.saturating_sub(1);
            let lhs = al.diff(k)?.sub(&ak.diff(l)?)?;
            let comm = ak.mul(al)?.sub(&al.mul(ak)?)?.truncate(cap);
            let r = lhs.sub(&comm)?;
            if let Some(d) = r.max_degree() {
                residuals.push((k, l, d));
            }
        }
    }
    let residue_problems = residue_problems(&conn.singular, conn.dim);
    let max_residual_degree = residuals.iter().map(|r| r.2).max();
    Ok(FlatnessReport {
        flat: residuals.is_empty() && residue_problems.is_empty(),
        residuals,
        max_residual_degree,
        residue_problems,
    })
}

fn is_nilpotent(n: &QMatrix) -> bool {
    let mut p = n.clone();
    for _ in 1..n.len() {
        p = exactnum::qmat_mul(&p, n);
    }
    exactnum::qmat_is_zero(&p)
}

fn residue_problems(singular: &[SingularResidue], _dim: usize) -> Vec<String> {
    let mut out = Vec::new();
    for s in singular {
        if !is_nilpotent(&s.n) {
            out.push(format!("residue at variable {} is not nilpotent", s.var));
        }
    }
    for (i, a) in singular.iter().enumerate() {
        for b in &singular[i + 1..] {
            let ab = exactnum::qmat_mul(&a.n, &b.n);
            let ba = exactnum::qmat_mul(&b.n, &a.n);
            if ab != ba {
                out.push(format!("residues at variables {} and {} do not commute", a.var, b.var));
            }
        }
    }
    out
}

/// Horizontal section `H` with `dH = Lambda H`, `H(0) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportResult {
    pub h: SeriesMatrix,
    pub order: u32,
    pub basepoint: Vec<BigRational>,
    pub unipotent: bool,
    pub denominator: BigInt,
}

impl TransportResult {
    pub fn to_json(&self) -> Value {
        json!({
            "order": self.order,
            "basepoint": self.basepoint.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
            "H": self.h.to_json(),
        })
    }
}

/// Solve `dH = Lambda H` through the Euler recursion
/// `d H_d = sum_k t_k (A_k H)_{d-1}`, which is the unique solution when `Lambda` is flat.
pub fn parallel_transport(conn: &ConnectionForm, order: Option<u32>) -> Result<TransportResult> {
    if !conn.singular.is_empty() {
        return Err(TransportError::Domain(
            "connection has logarithmic poles; use log_singular_transport".into(),
        ));
    }
    let report = flatness_check(conn)?;
    if !report.flat {
        return Err(TransportError::Integrability(format!(
            "residual of degree {:?} in components {:?}",
            report.max_residual_degree, report.residuals
        )));
    }
    let order = order.unwrap_or(conn.cap);
    if order > conn.cap {
        return Err(TransportError::Domain(format!(
            "order {order} exceeds the connection cap {}",
            conn.cap
        )));
    }
    let h = picard(conn, order)?;
    Ok(TransportResult {
        h,
        order,
        basepoint: vec![BigRational::zero(); conn.vars.len()],
        unipotent: conn.is_unipotent(),
        denominator: conn.denominator(),
    })
}

fn picard(conn: &ConnectionForm, order: u32) -> Result<SeriesMatrix> {
    let comps: Vec<SeriesMatrix> = conn.components.iter().map(|a| a.truncate(order)).collect();
    let mut h = SeriesMatrix::identity(conn.dim, &conn.vars, order);
    for d in 1..=order {
        let mut acc = SeriesMatrix::zero(conn.dim, conn.dim, &conn.vars, order);
        for (k, a) in comps.iter().enumerate() {
            let ah = a.mul(&h)?.homogeneous(d - 1);
            acc = acc.add(&ah.shift(k))?;
        }
        h = h.add(&acc.scale(&BigRational::new(BigInt::one(), BigInt::from(d))))?;
    }
    Ok(h)
}

/// `dH - Lambda H` at the truncation order; `None` when it vanishes.
pub fn horizontality_residual(conn: &ConnectionForm, h: &SeriesMatrix) -> Result<Option<u32>> {
    let cap = h.cap().min(conn.cap).saturating_sub(1);
    let mut worst = None;
    for (k, a) in conn.components.iter().enumerate() {
        let r = h.diff(k)?.sub(&a.mul(h)?.truncate(cap))?;
        worst = worst.max(r.max_degree());
    }
    Ok(worst)
}

/// Solve `d_j G = B G`, `G = 1` on `t_j = 0`, by Picard iteration in `t_j` alone.
fn axis_solve(b: &SeriesMatrix, j: usize, dim: usize, cap: u32) -> Result<SeriesMatrix> {
    let id = SeriesMatrix::identity(dim, b.vars(), cap);
    let mut g = id.clone();
    for _ in 0..=cap {
        let next = id.add(&b.mul(&g)?.integrate(j)?)?;
        if next == g {
            break;
        }
        g = next;
    }
    Ok(g)
}

/// Transport along coordinate axes in the given order: from the origin move in
/// `t_{order[0]}`, then `t_{order[1]}`, and so on.
pub fn axis_transport(conn: &ConnectionForm, order_of_vars: &[usize], cap: Option<u32>) -> Result<SeriesMatrix> {
    let m = conn.vars.len();
    let mut seen = order_of_vars.to_vec();
    seen.sort_unstable();
    if seen != (0..m).collect::<Vec<_>>() {
        return Err(TransportError::Domain("order must be a permutation of the variables".into()));
    }
    let cap = cap.unwrap_or(conn.cap).min(conn.cap);
    let mut h = SeriesMatrix::identity(conn.dim, &conn.vars, cap);
    for (step, &j) in order_of_vars.iter().enumerate() {
        let later = &order_of_vars[step + 1..];
        let b = conn.components[j].truncate(cap).restrict_zero(later);
        let g = axis_solve(&b, j, conn.dim, cap)?;
        h = g.mul(&h)?;
    }
    Ok(h)
}

fn check_disk_point(point: &[PadicScalar], nvars: usize) -> Result<(u64, u32, u32)> {
    if point.len() != nvars {
        return Err(TransportError::Shape(format!(
            "point has {} coordinates, expected {nvars}",
            point.len()
        )));
    }
    let p = point.first().map(|x| x.p()).ok_or_else(|| TransportError::Shape("empty point".into()))?;
    let mut prec = u32::MAX;
    let mut vmin = u32::MAX;
    for x in point {
        if x.p() != p {
            return Err(TransportError::Domain("coordinates over different primes".into()));
        }
        if x.valuation() == Some(0) {
            return Err(TransportError::Domain(format!(
                "coordinate {x} is outside the residue disk (valuation 0)"
            )));
        }
        prec = prec.min(x.precision());
        vmin = vmin.min(x.valuation_or_precision());
    }
    Ok((p, prec, vmin))
}

/// `floor(log_p(k))`.
fn ilog(p: u64, mut k: u64) -> u32 {
    let mut v = 0;
    while k >= p {
        k /= p;
        v += 1;
    }
    v
}

/// Evaluate a truncated series at a disk point.
///
/// The result is known modulo `p^P` with `P` the least of: the input precision;
/// `N + v(c_a) + (|a| - 1) v_min` for every retained term (error from the input
/// coordinates); and the smallest `d v_min - depth * floor(log_p d)` over
/// unretained degrees `d > cap` (tail of a series whose degree-`d` coefficients
/// are `p`-integral up to `depth` divisions by integers at most `d`).
pub fn eval_series(f: &QSeries, point: &[PadicScalar], depth: u32) -> Result<PadicScalar> {
    let (p, prec, vmin) = check_disk_point(point, f.nvars())?;
    if f.has_logs() {
        return Err(TransportError::Domain("cannot evaluate log symbols".into()));
    }
    let lifts: Vec<BigRational> = point
        .iter()
        .map(|x| BigRational::from_integer(x.value().clone()))
        .collect();
    let mut precision = prec as i64;
    let mut sum = BigRational::zero();
    for (m, c) in f.terms() {
        let deg = m.degree() as i64;
        if deg >= 1 {
            let vc = padic::val_rat(c, p);
            precision = precision.min(prec as i64 + vc + (deg - 1) * vmin as i64);
        }
        let mut t = c.clone();
        for (x, &e) in lifts.iter().zip(&m.t) {
            for _ in 0..e {
                t *= x;
            }
        }
        sum += t;
    }
    // tail: degrees above the cap
    let cap = f.cap() as u64;
    let v = vmin.max(1) as i64;
    let k = depth as i64;
    let mut best = i64::MAX;
    let mut d = cap + 1;
    loop {
        let val = d as i64 * v - k * ilog(p, d) as i64;
        best = best.min(val);
        if d as i64 * v - k * (ilog(p, d) as i64 + 1) >= best || d > cap + 10_000 {
            break;
        }
        d += 1;
    }
    precision = precision.min(best);
    if precision <= 0 {
        return Err(TransportError::Padic(PadicError::PrecisionExhausted(format!(
            "no digits left (cap {cap}, depth {depth})"
        ))));
    }
    if !sum.is_zero() && padic::val_rat(&sum, p) < 0 {
        return Err(TransportError::Padic(PadicError::NonIntegral(format!(
            "value {sum} is not {p}-integral"
        ))));
    }
    Ok(PadicScalar::from_rational(&sum, p, precision as u32)?)
}

fn check_evaluable(res: &TransportResult, p: u64) -> Result<u32> {
    if !res.unipotent {
        return Err(TransportError::Domain(
            "evaluation needs a unipotent (strictly lower-triangular) connection".into(),
        ));
    }
    if res.denominator.is_multiple_of(&BigInt::from(p)) {
        return Err(TransportError::Domain(format!(
            "connection coefficients are not {p}-integral"
        )));
    }
    Ok(res.h.rows().saturating_sub(1) as u32)
}

/// `G(x1, x2) = H(x2) H(x1)^{-1}`, the transport from the fibre at `x1` to the fibre at `x2`.
pub fn transport_evaluate(res: &TransportResult, x1: &[PadicScalar], x2: &[PadicScalar]) -> Result<PadicMatrix> {
    let (p, _, _) = check_disk_point(x2, res.h.vars().len())?;
    check_disk_point(x1, res.h.vars().len())?;
    let depth = check_evaluable(res, p)?;
    let h2 = res.h.evaluate(x2, depth)?;
    let h1 = res.h.evaluate(x1, depth)?;
    Ok(h2.mul(&h1.inverse()?)?)
}

/// Integrals of closed forms between two points of one residue disk.
///
/// Each integral is computed twice, as the bottom-left entry of the transport of
/// `d - [[0,0],[omega,0]]` and as `F(x2) - F(x1)` for an antiderivative `F`; a
/// disagreement is an error.
pub fn coleman_disk_integral(
    forms: &[OneForm<RationalRing>],
    x1: &[PadicScalar],
    x2: &[PadicScalar],
) -> Result<Vec<PadicScalar>> {
    let mut out = Vec::with_capacity(forms.len());
    for (idx, omega) in forms.iter().enumerate() {
        if omega.has_residues() {
            return Err(TransportError::Domain(
                "forms with dt/t terms are not integrable inside the disk".into(),
            ));
        }
        let conn = ConnectionForm::two_step(omega)?;
        let res = parallel_transport(&conn, None)?;
        let g = transport_evaluate(&res, x1, x2)?;
        let via_transport = g.get(1, 0).clone();
        let f = antiderivative(omega)?;
        let via_primitive = eval_series(&f, x2, 1)?.sub(&eval_series(&f, x1, 1)?)?;
        if !via_transport.eq_mod(&via_primitive) {
            return Err(TransportError::Mismatch(format!(
                "form {idx}: transport gives {via_transport}, antiderivative gives {via_primitive}"
            )));
        }
        let n = via_transport.precision().min(via_primitive.precision());
        out.push(via_transport.truncate(n));
    }
    Ok(out)
}

/// Outcome of comparing the leaf transport with fibrewise integration followed by base transport.
#[derive(Debug, Clone, PartialEq)]
pub struct BettiReport {
    pub consistent: bool,
    /// Largest degree of `H - H_fibre H_base`, if nonzero.
    pub residual_degree: Option<u32>,
    /// Bottom-left block of the leaf transport `H(x, s)`.
    pub leaf_block: SeriesMatrix,
    /// Bottom-left block of the fibrewise transport from `(0, s)` to `(x, s)`.
    pub fibre_block: SeriesMatrix,
    pub base: SeriesMatrix,
}

/// Check that transport on the total space factors as base transport followed by
/// fibrewise transport; variable 0 is the fibre coordinate, the rest are base coordinates.
pub fn betti_square_check(family: &ConnectionForm, order: Option<u32>) -> Result<BettiReport> {
    if family.vars.len() < 2 {
        return Err(TransportError::Domain("need a fibre variable and at least one base variable".into()));
    }
    if family.dim < 2 {
        return Err(TransportError::Domain("need a trivial top block and a nonzero fibre block".into()));
    }
    if !family.is_unipotent() {
        return Err(TransportError::Domain(
            "family must be strictly lower triangular with a trivial first row".into(),
        ));
    }
    let res = parallel_transport(family, order)?;
    let cap = res.order;
    let fibre = axis_solve(&family.components[0].truncate(cap), 0, family.dim, cap)?;
    let base = res.h.restrict_zero(&[0]);
    let composite = fibre.mul(&base)?;
    let diff = res.h.sub(&composite)?;
    let residual_degree = diff.max_degree();
    let d = family.dim;
    Ok(BettiReport {
        consistent: residual_degree.is_none(),
        residual_degree,
        leaf_block: res.h.block(1, d, 0, 1),
        fibre_block: fibre.block(1, d, 0, 1),
        base,
    })
}

/// `exp(sum_i N_i L_i) G`, expanded as a finite sum since the `N_i` are commuting nilpotents.
pub fn log_singular_transport(residues: &[SingularResidue], g: &SeriesMatrix) -> Result<SeriesMatrix> {
    let dim = g.rows();
    for s in residues {
        if s.n.len() != dim {
            return Err(TransportError::Shape("residue matrix has wrong size".into()));
        }
    }
    let problems = residue_problems(residues, dim);
    if !problems.is_empty() {
        return Err(TransportError::Domain(problems.join("; ")));
    }
    if residues.iter().all(|s| exactnum::qmat_is_zero(&s.n)) {
        return Ok(g.clone());
    }
    let vars = g.vars().to_vec();
    let cap = g.cap();
    let mut x = SeriesMatrix::zero(dim, dim, &vars, cap).with_logs();
    for s in residues {
        let l = QSeries::log_symbol(RationalRing, vars.clone(), cap, s.var);
        let nl = SeriesMatrix::from_qmatrix(&s.n, &vars, cap)?.with_logs();
        let scaled = nl.map(|e| e.mul(&l))?;
        x = x.add(&scaled)?;
    }
    let mut acc = SeriesMatrix::identity(dim, &vars, cap).with_logs();
    let mut power = acc.clone();
    for k in 1..=dim {
        power = power.mul(&x)?.scale(&BigRational::new(BigInt::one(), BigInt::from(k)));
        if power.is_zero() {
            break;
        }
        acc = acc.add(&power)?;
    }
    acc.mul(&g.with_logs())
}

/// Residue of the fibre coordinate's pole and the induced quotient.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidueReport {
    /// Bottom-left block of `N_0`, one entry per fibre coordinate.
    pub functional: Vec<BigRational>,
    /// Rows span the covectors killing the residue; projecting by them is the Stoll quotient.
    pub stoll_projection: QMatrix,
    /// The residue column lies in the kernel of every other `N_i`.
    pub horizontal: bool,
}

/// Read the residue functional off a connection in the normal form `d - N_0 du/u - sum N_i dt_i/t_i`.
pub fn residue_functional(conn: &ConnectionForm, u: usize) -> Result<ResidueReport> {
    if conn.components.iter().any(|a| !a.is_zero()) {
        return Err(TransportError::Domain(
            "not in normal form: regular components must vanish".into(),
        ));
    }
    let problems = residue_problems(&conn.singular, conn.dim);
    if !problems.is_empty() {
        return Err(TransportError::Domain(problems.join("; ")));
    }
    if conn.dim < 2 {
        return Err(TransportError::Domain("need a trivial top block and a fibre block".into()));
    }
    let zero_n = vec![vec![BigRational::zero(); conn.dim]; conn.dim];
    let n0 = conn
        .singular
        .iter()
        .find(|s| s.var == u)
        .map(|s| s.n.clone())
        .unwrap_or(zero_n);
    if n0[0].iter().any(|x| !x.is_zero()) {
        return Err(TransportError::Domain("first row of N_0 must vanish".into()));
    }
    let functional: Vec<BigRational> = n0[1..].iter().map(|r| r[0].clone()).collect();
    let n = functional.len();
    let stoll_projection = if functional.iter().all(|x| x.is_zero()) {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
            .collect()
    } else {
        exactnum::nullspace(&vec![functional.clone()], n)
    };
    let column: Vec<Vec<BigRational>> = n0.iter().map(|r| vec![r[0].clone()]).collect();
    let horizontal = conn
        .singular
        .iter()
        .filter(|s| s.var != u)
        .all(|s| exactnum::qmat_is_zero(&exactnum::qmat_mul(&s.n, &column)));
    Ok(ResidueReport {
        functional,
        stoll_projection,
        horizontal,
    })
}

/// A built-in flat family over `(x, s)`: `A = [[0,0],[1+s,0]] dx`, `B = [[0,0],[x,0]] ds`.
pub fn demo_family(cap: u32) -> ConnectionForm {
    let vars = vec!["x".to_string(), "s".to_string()];
    let a = SeriesMatrix::from_json(&json!([["0", "0"], ["1 + s", "0"]]), &vars, cap).expect("valid");
    let b = SeriesMatrix::from_json(&json!([["0", "0"], ["x", "0"]]), &vars, cap).expect("valid");
    ConnectionForm::new(vec![a, b], Vec::new()).expect("valid")
}

pub fn padic_point(coords: &[i64], p: u64, n: u32) -> Result<Vec<PadicScalar>> {
    Ok(coords
        .iter()
        .map(|&c| PadicScalar::from_i64(c, p, n))
        .collect::<std::result::Result<Vec<_>, _>>()?)
}
