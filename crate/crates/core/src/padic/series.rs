//! Multivariate power series truncated at a total degree cap, optionally with
//! formal logarithm symbols `L_i` satisfying `dL_i = dt_i / t_i`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::scalar::PadicScalar;
use super::{parse_rational, parse_scalar, PadicError, Result};

/// Coefficient ring of a series.
pub trait Ring: Clone + PartialEq + fmt::Debug {
    type Elem: Clone + PartialEq + fmt::Debug + fmt::Display;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_rational(&self, q: &BigRational) -> Result<Self::Elem>;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn div_int(&self, a: &Self::Elem, k: i64) -> Result<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn parse(&self, v: &Value) -> Result<Self::Elem>;
    fn to_json(&self) -> Value;
}

/// Exact rational coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RationalRing;

impl Ring for RationalRing {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_rational(&self, q: &BigRational) -> Result<BigRational> {
        Ok(q.clone())
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn div_int(&self, a: &BigRational, k: i64) -> Result<BigRational> {
        if k == 0 {
            return Err(PadicError::Domain("division by zero".into()));
        }
        Ok(a / BigRational::from_integer(BigInt::from(k)))
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn parse(&self, v: &Value) -> Result<BigRational> {
        match v {
            Value::Number(x) => x
                .as_i64()
                .map(|x| BigRational::from_integer(BigInt::from(x)))
                .ok_or_else(|| PadicError::Parse(format!("not an integer: {x}"))),
            Value::String(s) => parse_rational(s),
            other => Err(PadicError::Parse(format!("cannot read rational from {other}"))),
        }
    }
    fn to_json(&self) -> Value {
        json!("Q")
    }
}

/// Coefficients in `Z/p^N` with precision tracking.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadicRing {
    pub p: u64,
    pub n: u32,
}

impl Ring for PadicRing {
    type Elem = PadicScalar;

    fn zero(&self) -> PadicScalar {
        PadicScalar::zero(self.p, self.n)
    }
    fn one(&self) -> PadicScalar {
        PadicScalar::one(self.p, self.n)
    }
    fn from_rational(&self, q: &BigRational) -> Result<PadicScalar> {
        PadicScalar::from_rational(q, self.p, self.n)
    }
    fn add(&self, a: &PadicScalar, b: &PadicScalar) -> PadicScalar {
        a.add(b).expect("same prime")
    }
    fn sub(&self, a: &PadicScalar, b: &PadicScalar) -> PadicScalar {
        a.sub(b).expect("same prime")
    }
    fn mul(&self, a: &PadicScalar, b: &PadicScalar) -> PadicScalar {
        a.mul(b).expect("same prime")
    }
    fn neg(&self, a: &PadicScalar) -> PadicScalar {
        a.neg()
    }
    fn div_int(&self, a: &PadicScalar, k: i64) -> Result<PadicScalar> {
        a.div_int(k)
    }
    fn is_zero(&self, a: &PadicScalar) -> bool {
        a.is_zero()
    }
    fn parse(&self, v: &Value) -> Result<PadicScalar> {
        parse_scalar(v, self.p, self.n)
    }
    fn to_json(&self) -> Value {
        json!({ "p": self.p, "N": self.n })
    }
}

/// Exponents of `t_1..t_m` and of `L_1..L_m` (empty when logs are disabled).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub t: Vec<u32>,
    pub l: Vec<u32>,
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.t.iter().sum()
    }

    pub fn log_degree(&self) -> u32 {
        self.l.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncSeries<R: Ring> {
    ring: R,
    vars: Vec<String>,
    cap: u32,
    logs: bool,
    terms: BTreeMap<Monomial, R::Elem>,
}

fn default_vars(m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("t{i}")).collect()
}

impl<R: Ring> TruncSeries<R> {
    pub fn zero(ring: R, vars: Vec<String>, cap: u32, logs: bool) -> Self {
        TruncSeries {
            ring,
            vars,
            cap,
            logs,
            terms: BTreeMap::new(),
        }
    }

    /// Zero series in `m` variables named `t1..tm`.
    pub fn zero_in(ring: R, m: usize, cap: u32) -> Self {
        Self::zero(ring, default_vars(m), cap, false)
    }

    pub fn constant(ring: R, vars: Vec<String>, cap: u32, c: R::Elem) -> Self {
        let mut s = Self::zero(ring, vars, cap, false);
        let m = s.mono(vec![0; s.nvars()], None);
        s.insert(m, c);
        s
    }

    /// The coordinate `t_i`.
    pub fn var(ring: R, vars: Vec<String>, cap: u32, i: usize) -> Self {
        let mut s = Self::zero(ring, vars, cap, false);
        let mut e = vec![0; s.nvars()];
        e[i] = 1;
        let m = s.mono(e, None);
        let one = s.ring.one();
        s.insert(m, one);
        s
    }

    /// Build from `(t-exponents, coefficient)` pairs, dropping degrees above the cap.
    pub fn from_terms(
        ring: R,
        vars: Vec<String>,
        cap: u32,
        terms: impl IntoIterator<Item = (Vec<u32>, R::Elem)>,
    ) -> Result<Self> {
        let mut s = Self::zero(ring, vars, cap, false);
        for (e, c) in terms {
            if e.len() != s.nvars() {
                return Err(PadicError::Shape(format!(
                    "exponent {e:?} has wrong length for {} variables",
                    s.nvars()
                )));
            }
            let m = s.mono(e, None);
            s.add_term(m, c);
        }
        Ok(s)
    }

    /// Rational-coefficient convenience constructor.
    pub fn from_rational_terms(
        ring: R,
        vars: Vec<String>,
        cap: u32,
        terms: &[(Vec<u32>, BigRational)],
    ) -> Result<Self> {
        let conv = terms
            .iter()
            .map(|(e, q)| Ok((e.clone(), ring.from_rational(q)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(ring, vars, cap, conv)
    }

    /// The formal symbol `L_i`; enables logs.
    pub fn log_symbol(ring: R, vars: Vec<String>, cap: u32, i: usize) -> Self {
        let mut s = Self::zero(ring, vars, cap, true);
        let mut l = vec![0; s.nvars()];
        l[i] = 1;
        let m = s.mono(vec![0; s.nvars()], Some(l));
        let one = s.ring.one();
        s.insert(m, one);
        s
    }

    fn mono(&self, t: Vec<u32>, l: Option<Vec<u32>>) -> Monomial {
        let l = if self.logs {
            l.unwrap_or_else(|| vec![0; self.nvars()])
        } else {
            Vec::new()
        };
        Monomial { t, l }
    }

    fn insert(&mut self, m: Monomial, c: R::Elem) {
        if m.degree() <= self.cap && !self.ring.is_zero(&c) {
            self.terms.insert(m, c);
        }
    }

    fn add_term(&mut self, m: Monomial, c: R::Elem) {
        if m.degree() > self.cap {
            return;
        }
        let next = match self.terms.get(&m) {
            Some(old) => self.ring.add(old, &c),
            None => c,
        };
        if self.ring.is_zero(&next) {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, next);
        }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn logs_enabled(&self) -> bool {
        self.logs
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &R::Elem)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of a pure `t`-monomial.
    pub fn coeff(&self, t: &[u32]) -> R::Elem {
        let m = self.mono(t.to_vec(), None);
        self.terms.get(&m).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn coeff_mono(&self, m: &Monomial) -> R::Elem {
        self.terms.get(m).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn constant_term(&self) -> R::Elem {
        self.coeff(&vec![0; self.nvars()])
    }

    /// Least total degree carrying a nonzero coefficient.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).min()
    }

    pub fn has_logs(&self) -> bool {
        self.terms.keys().any(|m| m.log_degree() > 0)
    }

    /// Same series viewed with log symbols enabled.
    pub fn with_logs(&self) -> Self {
        if self.logs {
            return self.clone();
        }
        let mut s = Self::zero(self.ring.clone(), self.vars.clone(), self.cap, true);
        for (m, c) in &self.terms {
            let mm = s.mono(m.t.clone(), None);
            s.insert(mm, c.clone());
        }
        s
    }

    /// Drop every term containing a log symbol.
    pub fn strip_logs(&self) -> Self {
        let mut s = Self::zero(self.ring.clone(), self.vars.clone(), self.cap, false);
        for (m, c) in &self.terms {
            if m.log_degree() == 0 {
                let mm = s.mono(m.t.clone(), None);
                s.insert(mm, c.clone());
            }
        }
        s
    }

    /// Lower the cap.
    pub fn truncate(&self, cap: u32) -> Self {
        let mut s = self.clone();
        s.cap = cap.min(self.cap);
        s.terms.retain(|m, _| m.degree() <= s.cap);
        s
    }

    /// Terms of total degree exactly `d`.
    pub fn homogeneous(&self, d: u32) -> Self {
        let mut s = self.clone();
        s.terms.retain(|m, _| m.degree() == d);
        s
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(PadicError::Domain("series over different rings".into()));
        }
        if self.vars.len() != other.vars.len() {
            return Err(PadicError::Domain(format!(
                "series in {} and {} variables",
                self.vars.len(),
                other.vars.len()
            )));
        }
        Ok(())
    }

    /// Bring two series to a common shape: the smaller cap, logs if either has them.
    fn align(&self, other: &Self) -> Result<(Self, Self)> {
        self.compatible(other)?;
        let cap = self.cap.min(other.cap);
        let (mut a, mut b) = (self.truncate(cap), other.truncate(cap));
        if a.logs || b.logs {
            a = a.with_logs();
            b = b.with_logs();
        }
        Ok((a, b))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let (mut a, b) = self.align(other)?;
        for (m, c) in b.terms {
            a.add_term(m, c);
        }
        Ok(a)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut s = self.clone();
        for c in s.terms.values_mut() {
            *c = self.ring.neg(c);
        }
        s
    }

    pub fn scale(&self, k: &R::Elem) -> Self {
        let mut s = Self::zero(self.ring.clone(), self.vars.clone(), self.cap, self.logs);
        for (m, c) in &self.terms {
            s.insert(m.clone(), self.ring.mul(c, k));
        }
        s
    }

    /// Truncated product; terms above the cap are dropped.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.align(other)?;
        let mut s = Self::zero(a.ring.clone(), a.vars.clone(), a.cap, a.logs);
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                if ma.degree() + mb.degree() > a.cap {
                    continue;
                }
                let t = ma.t.iter().zip(&mb.t).map(|(x, y)| x + y).collect();
                let l = ma.l.iter().zip(&mb.l).map(|(x, y)| x + y).collect();
                s.add_term(Monomial { t, l }, a.ring.mul(ca, cb));
            }
        }
        Ok(s)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = Self::constant(self.ring.clone(), self.vars.clone(), self.cap, self.ring.one());
        if self.logs {
            acc = acc.with_logs();
        }
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// `d/dt_i`; the cap drops by one since degree-`cap` terms of the input are unknown beyond it.
    pub fn diff(&self, i: usize) -> Result<Self> {
        if i >= self.nvars() {
            return Err(PadicError::Domain(format!("no variable with index {i}")));
        }
        if self.terms.keys().any(|m| m.l.get(i).copied().unwrap_or(0) > 0) {
            return Err(PadicError::Domain(format!(
                "d/d{} of a series containing L_{} leaves the ring; use euler()",
                self.vars[i],
                i + 1
            )));
        }
        let cap = self.cap.saturating_sub(1);
        let mut s = Self::zero(self.ring.clone(), self.vars.clone(), cap, self.logs);
        for (m, c) in &self.terms {
            if m.t[i] == 0 {
                continue;
            }
            let mut mm = m.clone();
            mm.t[i] -= 1;
            let k = self.ring.from_rational(&BigRational::from_integer(m.t[i].into()))?;
            s.insert(mm, self.ring.mul(c, &k));
        }
        Ok(s)
    }

    /// `t_i d/dt_i`, which also acts on `L_i` by `L_i -> 1`.
    pub fn euler(&self, i: usize) -> Result<Self> {
        let mut s = Self::zero(self.ring.clone(), self.vars.clone(), self.cap, self.logs);
        for (m, c) in &self.terms {
            if m.t[i] > 0 {
                let k = self.ring.from_rational(&BigRational::from_integer(m.t[i].into()))?;
                s.add_term(m.clone(), self.ring.mul(c, &k));
            }
            if self.logs && m.l[i] > 0 {
                let mut mm = m.clone();
                mm.l[i] -= 1;
                let k = self.ring.from_rational(&BigRational::from_integer(m.l[i].into()))?;
                s.add_term(mm, self.ring.mul(c, &k));
            }
        }
        Ok(s)
    }

    /// `int_0^{t_i} f dt_i`, truncated at the cap.
    pub fn integrate(&self, i: usize) -> Result<Self> {
        if self.has_logs() {
            return Err(PadicError::Domain("cannot integrate log symbols termwise".into()));
        }
        let mut s = Self::zero(self.ring.clone(), self.vars.clone(), self.cap, self.logs);
        for (m, c) in &self.terms {
            let mut mm = m.clone();
            mm.t[i] += 1;
            if mm.degree() > self.cap {
                continue;
            }
            s.add_term(mm, self.ring.div_int(c, m.t[i] as i64 + 1)?);
        }
        Ok(s)
    }

    /// Set `t_i = 0` for every listed index.
    pub fn restrict_zero(&self, idx: &[usize]) -> Self {
        let mut s = self.clone();
        s.terms.retain(|m, _| idx.iter().all(|&i| m.t[i] == 0 && m.l.get(i).copied().unwrap_or(0) == 0));
        s
    }

    /// Largest total degree carrying a nonzero coefficient.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    /// Multiply by `t_i`.
    pub fn shift(&self, i: usize) -> Self {
        let mut s = Self::zero(self.ring.clone(), self.vars.clone(), self.cap, self.logs);
        for (m, c) in &self.terms {
            let mut mm = m.clone();
            mm.t[i] += 1;
            s.insert(mm, c.clone());
        }
        s
    }

    /// Substitute `t_i -> subs[i]`; every substitute must have zero constant term.
    ///
    /// The result is known to `min(cap, subs cap)` since a term of `self` of degree
    /// above its cap only contributes in degree above that cap.
    pub fn compose(&self, subs: &[TruncSeries<R>]) -> Result<Self> {
        if subs.len() != self.nvars() {
            return Err(PadicError::Shape(format!(
                "{} substitutes for {} variables",
                subs.len(),
                self.nvars()
            )));
        }
        if self.has_logs() {
            return Err(PadicError::Domain("cannot substitute into log symbols".into()));
        }
        let first = subs
            .first()
            .ok_or_else(|| PadicError::Shape("no substitutes".into()))?;
        for s in subs {
            s.compatible_vars(first)?;
            if s.ring != self.ring {
                return Err(PadicError::Domain("series over different rings".into()));
            }
            if !s.ring.is_zero(&s.constant_term()) {
                return Err(PadicError::Domain(
                    "substitutes must have zero constant term".into(),
                ));
            }
            if s.has_logs() {
                return Err(PadicError::Domain("substitutes must be log-free".into()));
            }
        }
        let cap = self.cap.min(first.cap);
        let subs: Vec<_> = subs.iter().map(|s| s.truncate(cap).strip_logs()).collect();
        let vars = first.vars.clone();
        let one = Self::constant(self.ring.clone(), vars.clone(), cap, self.ring.one());
        let mut powers: Vec<Vec<Self>> = subs.iter().map(|_| vec![one.clone()]).collect();
        let mut out = Self::zero(self.ring.clone(), vars, cap, false);
        for (m, c) in &self.terms {
            if m.degree() > cap {
                continue;
            }
            let mut term = one.scale(c);
            for (i, &e) in m.t.iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(&subs[i])?;
                    powers[i].push(next);
                }
                term = term.mul(&powers[i][e as usize])?;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    fn compatible_vars(&self, other: &Self) -> Result<()> {
        if self.vars.len() != other.vars.len() || self.cap != other.cap {
            return Err(PadicError::Shape(format!(
                "mismatched series shapes: {} vars cap {} vs {} vars cap {}",
                self.vars.len(),
                self.cap,
                other.vars.len(),
                other.cap
            )));
        }
        Ok(())
    }

    /// Evaluate the truncated polynomial at a point; log symbols are rejected.
    pub fn eval_poly(&self, point: &[R::Elem]) -> Result<R::Elem> {
        if point.len() != self.nvars() {
            return Err(PadicError::Shape("point has wrong dimension".into()));
        }
        if self.has_logs() {
            return Err(PadicError::Domain("cannot evaluate log symbols".into()));
        }
        let mut acc = self.ring.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.t) {
                for _ in 0..e {
                    t = self.ring.mul(&t, x);
                }
            }
            acc = self.ring.add(&acc, &t);
        }
        Ok(acc)
    }

    /// Map coefficients into another ring.
    pub fn map_ring<S: Ring>(&self, ring: S, f: impl Fn(&R::Elem) -> Result<S::Elem>) -> Result<TruncSeries<S>> {
        let mut s = TruncSeries::zero(ring, self.vars.clone(), self.cap, self.logs);
        for (m, c) in &self.terms {
            s.insert(m.clone(), f(c)?);
        }
        Ok(s)
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(m, c)| {
                if self.logs {
                    json!({ "t": m.t, "l": m.l, "c": c.to_string() })
                } else {
                    json!({ "t": m.t, "c": c.to_string() })
                }
            })
            .collect();
        json!({
            "ring": self.ring.to_json(),
            "vars": self.vars,
            "cap": self.cap,
            "logs": self.logs,
            "terms": terms,
        })
    }

    pub fn from_json(ring: R, v: &Value) -> Result<Self> {
        let bad = |m: &str| PadicError::Parse(m.to_string());
        let vars: Vec<String> = v["vars"]
            .as_array()
            .ok_or_else(|| bad("missing `vars`"))?
            .iter()
            .map(|x| x.as_str().map(String::from).ok_or_else(|| bad("variable names must be strings")))
            .collect::<Result<_>>()?;
        let cap = v["cap"].as_u64().ok_or_else(|| bad("missing `cap`"))? as u32;
        let logs = v["logs"].as_bool().unwrap_or(false);
        let mut s = Self::zero(ring, vars, cap, logs);
        for term in v["terms"].as_array().ok_or_else(|| bad("missing `terms`"))? {
            let exps = |key: &str| -> Result<Vec<u32>> {
                term[key]
                    .as_array()
                    .ok_or_else(|| bad("exponents must be arrays"))?
                    .iter()
                    .map(|x| x.as_u64().map(|x| x as u32).ok_or_else(|| bad("bad exponent")))
                    .collect()
            };
            let t = exps("t")?;
            if t.len() != s.nvars() {
                return Err(bad("exponent length does not match vars"));
            }
            let l = if logs && !term["l"].is_null() { Some(exps("l")?) } else { None };
            let c = s.ring.parse(&term["c"])?;
            let m = s.mono(t, l);
            s.add_term(m, c);
        }
        Ok(s)
    }
}

/// Parse a polynomial such as `1 + s`, `x^2 - 3/2*x*s` in the given variables.
pub fn parse_poly<R: Ring>(ring: R, vars: &[String], cap: u32, text: &str) -> Result<TruncSeries<R>> {
    let bad = |m: &str| PadicError::Parse(format!("{m} in `{text}`"));
    let src: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if src.is_empty() {
        return Err(bad("empty polynomial"));
    }
    let mut terms: Vec<(bool, &str)> = Vec::new();
    let mut start = 0;
    let mut negative = false;
    let bytes = src.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if (b == b'+' || b == b'-') && i > start && bytes[i - 1] != b'^' && bytes[i - 1] != b'*' {
            terms.push((negative, &src[start..i]));
            negative = b == b'-';
            start = i + 1;
        } else if (b == b'+' || b == b'-') && i == start {
            negative ^= b == b'-';
            start = i + 1;
        }
    }
    terms.push((negative, &src[start..]));
    let mut out = Vec::new();
    for (neg, term) in terms {
        if term.is_empty() {
            return Err(bad("empty term"));
        }
        let mut coeff = BigRational::one();
        let mut exps = vec![0u32; vars.len()];
        for factor in term.split('*') {
            let (base, exp) = match factor.split_once('^') {
                Some((b, e)) => (b, e.parse::<u32>().map_err(|_| bad("bad exponent"))?),
                None => (factor, 1),
            };
            if let Some(i) = vars.iter().position(|v| v == base) {
                exps[i] += exp;
            } else {
                let q = parse_rational(base).map_err(|_| bad(&format!("unknown factor `{base}`")))?;
                for _ in 0..exp {
                    coeff *= &q;
                }
            }
        }
        if neg {
            coeff = -coeff;
        }
        out.push((exps, coeff));
    }
    TruncSeries::from_rational_terms(ring, vars.to_vec(), cap, &out)
}

impl<R: Ring> TruncSeries<R> {
    /// Terms in the syntax read by [`parse_poly`], without the error term; `"0"` for zero.
    pub fn to_poly_string(&self) -> String {
        let mut out = String::new();
        for (m, c) in &self.terms {
            let mut c = c.to_string();
            let neg = c.starts_with('-');
            if neg {
                c.remove(0);
            }
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors = Vec::new();
            for (name, &e) in self.vars.iter().zip(&m.t) {
                match e {
                    0 => {}
                    1 => factors.push(name.clone()),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            for (i, &e) in m.l.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("L{}", i + 1)),
                    _ => factors.push(format!("L{}^{e}", i + 1)),
                }
            }
            if factors.is_empty() {
                out.push_str(&c);
            } else {
                if c != "1" {
                    out.push_str(&c);
                    out.push('*');
                }
                out.push_str(&factors.join("*"));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl<R: Ring> fmt::Display for TruncSeries<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 + O(deg {})", self.cap + 1);
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (name, &e) in self.vars.iter().zip(&m.t) {
                match e {
                    0 => {}
                    1 => write!(f, "*{name}")?,
                    _ => write!(f, "*{name}^{e}")?,
                }
            }
            for (i, &e) in m.l.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*L{}", i + 1)?,
                    _ => write!(f, "*L{}^{e}", i + 1)?,
                }
            }
        }
        write!(f, " + O(deg {})", self.cap + 1)
    }
}

/// `sum_i w_i dt_i + sum_i c_i dt_i / t_i` with constant residues `c_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneForm<R: Ring> {
    pub dt: Vec<TruncSeries<R>>,
    pub dlog: Vec<R::Elem>,
}

impl<R: Ring> OneForm<R> {
    pub fn new(dt: Vec<TruncSeries<R>>, dlog: Option<Vec<R::Elem>>) -> Result<Self> {
        let first = dt.first().ok_or_else(|| PadicError::Shape("empty form".into()))?;
        let m = first.nvars();
        if dt.len() != m {
            return Err(PadicError::Shape(format!(
                "{} components for {m} variables",
                dt.len()
            )));
        }
        for w in &dt {
            if w.nvars() != m || w.ring != first.ring {
                return Err(PadicError::Shape("components disagree on variables or ring".into()));
            }
            if w.has_logs() {
                return Err(PadicError::Domain("form components must be log-free".into()));
            }
        }
        let ring = first.ring.clone();
        let dlog = dlog.unwrap_or_else(|| vec![ring.zero(); m]);
        if dlog.len() != m {
            return Err(PadicError::Shape("residue vector has wrong length".into()));
        }
        Ok(OneForm { dt, dlog })
    }

    pub fn nvars(&self) -> usize {
        self.dt.len()
    }

    pub fn cap(&self) -> u32 {
        self.dt.iter().map(|w| w.cap).min().unwrap_or(0)
    }

    pub fn has_residues(&self) -> bool {
        let ring = &self.dt[0].ring;
        self.dlog.iter().any(|c| !ring.is_zero(c))
    }

    /// First `(i, j, degree)` where `d_j w_i != d_i w_j`, if any.
    pub fn closedness_defect(&self) -> Result<Option<(usize, usize, u32)>> {
        let m = self.nvars();
        for i in 0..m {
            for j in (i + 1)..m {
                let diff = self.dt[i].diff(j)?.sub(&self.dt[j].diff(i)?)?;
                if let Some(d) = diff.order() {
                    return Ok(Some((i, j, d)));
                }
            }
        }
        Ok(None)
    }

    /// Exterior derivative of a function that is log-free apart from constant multiples of `L_i`.
    pub fn exact(f: &TruncSeries<R>) -> Result<Self> {
        let ring = f.ring.clone();
        let m = f.nvars();
        let mut dlog = vec![ring.zero(); m];
        let mut regular = TruncSeries::zero(ring.clone(), f.vars.clone(), f.cap, false);
        for (mono, c) in &f.terms {
            match mono.log_degree() {
                0 => {
                    let mm = regular.mono(mono.t.clone(), None);
                    regular.insert(mm, c.clone());
                }
                1 if mono.degree() == 0 => {
                    let i = mono.l.iter().position(|&e| e == 1).unwrap();
                    dlog[i] = ring.add(&dlog[i], c);
                }
                _ => {
                    return Err(PadicError::Domain(
                        "only constant multiples of L_i have a form derivative here".into(),
                    ))
                }
            }
        }
        let dt = (0..m).map(|i| regular.diff(i)).collect::<Result<Vec<_>>>()?;
        OneForm::new(dt, Some(dlog))
    }
}

/// `F` with `dF = omega`, `F(0) = 0` and `dt/t` terms integrated to log symbols.
///
/// Uses the radial homotopy `F(t) = int_0^1 sum_i t_i w_i(st) ds`, so a degree-`k`
/// monomial of `w_i` contributes `t_i * monomial / (k + 1)`.
pub fn antiderivative<R: Ring>(form: &OneForm<R>) -> Result<TruncSeries<R>> {
    if let Some((i, j, d)) = form.closedness_defect()? {
        return Err(PadicError::Integrability(format!(
            "d{} w{} - d{} w{} has a nonzero term of degree {d}",
            form.dt[i].vars[j],
            i + 1,
            form.dt[j].vars[i],
            j + 1
        )));
    }
    let first = &form.dt[0];
    let ring = first.ring.clone();
    let cap = form.cap();
    let logs = form.has_residues();
    let mut out = TruncSeries::zero(ring.clone(), first.vars.clone(), cap, logs);
    for (i, w) in form.dt.iter().enumerate() {
        for (m, c) in &w.terms {
            let mut t = m.t.clone();
            t[i] += 1;
            let mono = out.mono(t, None);
            if mono.degree() > cap {
                continue;
            }
            let c = ring.div_int(c, m.degree() as i64 + 1)?;
            out.add_term(mono, c);
        }
    }
    for (i, c) in form.dlog.iter().enumerate() {
        if ring.is_zero(c) {
            continue;
        }
        let mut l = vec![0; first.nvars()];
        l[i] = 1;
        let mono = out.mono(vec![0; first.nvars()], Some(l));
        out.add_term(mono, c.clone());
    }
    Ok(out)
}
