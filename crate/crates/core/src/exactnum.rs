//! Exact integer/rational helpers and outward-rounded real enclosures.
//!
//! Everything combinatorial in the crate is computed with [`BigInt`] and
//! [`BigRational`]. Transcendental quantities (logarithms, real powers,
//! square roots) are carried as [`BoundValue`] enclosures whose endpoints are
//! dyadic rationals rounded away from the true value after every operation.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Canonical exact scalar: a reduced fraction with positive denominator.
pub type ExactScalar = BigRational;

/// Default number of decimal digits carried by enclosures.
pub const DEFAULT_DIGITS: u32 = 50;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("enclosure {enclosure} too wide to resolve an integer ceiling at {digits} digits")]
    Precision { enclosure: String, digits: u32 },
}

pub type Result<T> = std::result::Result<T, ExactError>;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Least integer strictly greater than `q`.
pub fn strict_ceiling(q: &BigRational) -> BigInt {
    q.floor().to_integer() + 1
}

/// Trial-division factorisation as `(prime, exponent)` pairs in ascending order.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while p.saturating_mul(p) <= m {
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == vec![(n, 1)]
}

/// The Möbius function.
pub fn mobius(n: u64) -> Result<i8> {
    if n == 0 {
        return Err(ExactError::Domain("mobius(0) is undefined".into()));
    }
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        return Ok(0);
    }
    Ok(if f.len().is_multiple_of(2) { 1 } else { -1 })
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(ExactError::Domain("divisors(0) is undefined".into()));
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Ok(small)
}

/// `binom(n, k)` for non-negative `n`, exact.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn bits_for_digits(digits: u32) -> u64 {
    // log2(10) < 3.3220
    (digits as u64 * 33220).div_ceil(10000) + 8
}

fn pow2(k: u64) -> BigInt {
    BigInt::one() << k
}

/// Round `q` to `bits` significant bits, towards +inf when `up`, else towards -inf.
fn round_dyadic(q: &BigRational, bits: u64, up: bool) -> BigRational {
    if q.is_zero() {
        return q.clone();
    }
    let n = q.numer();
    let d = q.denom();
    let e = n.bits() as i64 - d.bits() as i64;
    let k = bits as i64 - e;
    let div = |a: BigInt, b: BigInt| -> BigInt {
        if up {
            a.div_ceil(&b)
        } else {
            a.div_floor(&b)
        }
    };
    if k >= 0 {
        let m = div(n << (k as u64), d.clone());
        BigRational::new(m, pow2(k as u64))
    } else {
        let m = div(n.clone(), d << ((-k) as u64));
        BigRational::from_integer(m << ((-k) as u64))
    }
}

/// A two-sided real enclosure `lower <= x <= upper` with outward rounding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundValue {
    lower: BigRational,
    upper: BigRational,
    digits: u32,
}

impl BoundValue {
    pub fn new(lower: BigRational, upper: BigRational, digits: u32) -> Result<Self> {
        if lower > upper {
            return Err(ExactError::Domain(format!(
                "empty enclosure [{lower}, {upper}]"
            )));
        }
        Ok(Self::rounded(lower, upper, digits))
    }

    fn rounded(lower: BigRational, upper: BigRational, digits: u32) -> Self {
        let bits = bits_for_digits(digits);
        BoundValue {
            lower: round_dyadic(&lower, bits, false),
            upper: round_dyadic(&upper, bits, true),
            digits,
        }
    }

    /// Enclosure of an exact rational (a point unless `q` needs rounding).
    pub fn from_rational(q: &BigRational, digits: u32) -> Self {
        Self::rounded(q.clone(), q.clone(), digits)
    }

    pub fn from_int(n: i64, digits: u32) -> Self {
        Self::from_rational(&int(n), digits)
    }

    pub fn lower(&self) -> &BigRational {
        &self.lower
    }

    pub fn upper(&self) -> &BigRational {
        &self.upper
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn width(&self) -> BigRational {
        &self.upper - &self.lower
    }

    /// Width divided by the smaller endpoint magnitude; `None` if the enclosure straddles 0.
    pub fn relative_width(&self) -> Option<BigRational> {
        let m = self.lower.abs().min(self.upper.abs());
        if m.is_zero() || self.lower.is_negative() != self.upper.is_negative() {
            return None;
        }
        Some(self.width() / m)
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        &self.lower <= q && q <= &self.upper
    }

    pub fn midpoint_f64(&self) -> f64 {
        ((&self.lower + &self.upper) / int(2)).to_f64().unwrap_or(f64::NAN)
    }

    /// Certainly `self < other` (disjoint enclosures).
    pub fn certainly_lt(&self, other: &BoundValue) -> bool {
        self.upper < other.lower
    }

    pub fn certainly_gt(&self, other: &BoundValue) -> bool {
        self.lower > other.upper
    }

    pub fn certainly_le(&self, other: &BoundValue) -> bool {
        self.upper <= other.lower
    }

    /// Least integer strictly above every point of the enclosure, if that
    /// integer is the same for both endpoints.
    pub fn strict_ceiling(&self) -> Result<BigInt> {
        let lo = strict_ceiling(&self.lower);
        let hi = strict_ceiling(&self.upper);
        if lo == hi {
            Ok(hi)
        } else {
            Err(ExactError::Precision {
                enclosure: self.to_string(),
                digits: self.digits,
            })
        }
    }

    /// Conservative strict ceiling: least integer above the upper endpoint.
    pub fn strict_ceiling_upper(&self) -> BigInt {
        strict_ceiling(&self.upper)
    }

    fn work(&self, other: &BoundValue) -> u32 {
        self.digits.max(other.digits)
    }

    pub fn add(&self, other: &BoundValue) -> BoundValue {
        Self::rounded(
            &self.lower + &other.lower,
            &self.upper + &other.upper,
            self.work(other),
        )
    }

    pub fn sub(&self, other: &BoundValue) -> BoundValue {
        Self::rounded(
            &self.lower - &other.upper,
            &self.upper - &other.lower,
            self.work(other),
        )
    }

    pub fn neg(&self) -> BoundValue {
        BoundValue {
            lower: -self.upper.clone(),
            upper: -self.lower.clone(),
            digits: self.digits,
        }
    }

    pub fn mul(&self, other: &BoundValue) -> BoundValue {
        let c = [
            &self.lower * &other.lower,
            &self.lower * &other.upper,
            &self.upper * &other.lower,
            &self.upper * &other.upper,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Self::rounded(lo, hi, self.work(other))
    }

    pub fn div(&self, other: &BoundValue) -> Result<BoundValue> {
        if other.lower <= BigRational::zero() && other.upper >= BigRational::zero() {
            return Err(ExactError::Domain(format!(
                "division by an enclosure containing zero: {other}"
            )));
        }
        let inv = BoundValue {
            lower: other.upper.recip(),
            upper: other.lower.recip(),
            digits: other.digits,
        };
        let inv = Self::rounded(inv.lower, inv.upper, other.digits);
        Ok(self.mul(&inv))
    }

    pub fn scale(&self, q: &BigRational) -> BoundValue {
        self.mul(&BoundValue::from_rational(q, self.digits))
    }

    pub fn powi(&self, n: u32) -> BoundValue {
        let mut acc = BoundValue::from_int(1, self.digits);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        if n.is_multiple_of(2) && self.lower.is_negative() && self.upper.is_positive() {
            acc.lower = BigRational::zero();
        }
        acc
    }

    pub fn sqrt(&self) -> Result<BoundValue> {
        if self.lower.is_negative() {
            return Err(ExactError::Domain(format!("sqrt of {self}")));
        }
        let bits = bits_for_digits(self.digits) + 8;
        let (lo, _) = sqrt_point(&self.lower, bits);
        let (_, hi) = sqrt_point(&self.upper, bits);
        Ok(Self::rounded(lo, hi, self.digits))
    }

    pub fn ln(&self) -> Result<BoundValue> {
        if !self.lower.is_positive() {
            return Err(ExactError::Domain(format!("log of {self}")));
        }
        let bits = bits_for_digits(self.digits) + 16;
        let (lo, _) = ln_point(&self.lower, bits);
        let (_, hi) = ln_point(&self.upper, bits);
        Ok(Self::rounded(lo, hi, self.digits))
    }

    pub fn exp(&self) -> BoundValue {
        let bits = bits_for_digits(self.digits) + 16;
        let (lo, _) = exp_point(&self.lower, bits);
        let (_, hi) = exp_point(&self.upper, bits);
        Self::rounded(lo, hi, self.digits)
    }

    /// `self^exponent` for a positive base.
    pub fn pow(&self, exponent: &BoundValue) -> Result<BoundValue> {
        Ok(exponent.mul(&self.ln()?).exp())
    }

    /// Same value carried at a different digit count.
    pub fn with_digits(&self, digits: u32) -> BoundValue {
        Self::rounded(self.lower.clone(), self.upper.clone(), digits)
    }

    pub fn e(digits: u32) -> BoundValue {
        BoundValue::from_int(1, digits).exp()
    }

    pub fn ln2(digits: u32) -> BoundValue {
        BoundValue::from_int(2, digits)
            .ln()
            .expect("log 2 is defined")
    }

    /// Decimal rendering of the lower endpoint, rounded down.
    pub fn lower_decimal(&self) -> String {
        format_directed(&self.lower, self.digits.min(40) as usize, false)
    }

    pub fn upper_decimal(&self) -> String {
        format_directed(&self.upper, self.digits.min(40) as usize, true)
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{},{}]@{}",
            self.lower_decimal(),
            self.upper_decimal(),
            self.digits
        )
    }
}

/// Run `compute` at `digits`; if its strict ceiling is ambiguous, retry once
/// with doubled digits.
pub fn resolve_strict_ceiling<F>(digits: u32, compute: F) -> Result<(BoundValue, BigInt)>
where
    F: Fn(u32) -> Result<BoundValue>,
{
    let first = compute(digits)?;
    if let Ok(n) = first.strict_ceiling() {
        return Ok((first, n));
    }
    let second = compute(digits * 2)?;
    let n = second.strict_ceiling()?;
    Ok((second, n))
}

fn sqrt_point(q: &BigRational, bits: u64) -> (BigRational, BigRational) {
    if q.is_zero() {
        return (q.clone(), q.clone());
    }
    // sqrt(q) = sqrt(q * 4^k) / 2^k
    let e = (q.numer().bits() as i64 - q.denom().bits() as i64).max(0) as u64;
    let k = bits + e / 2 + 2;
    let scaled = q * BigRational::from_integer(pow2(2 * k));
    let fl = scaled.floor().to_integer();
    let ce = scaled.ceil().to_integer();
    let lo = fl.sqrt();
    let mut hi = ce.sqrt();
    if &hi * &hi < ce {
        hi += 1;
    }
    let den = pow2(k);
    (
        BigRational::new(lo, den.clone()),
        BigRational::new(hi, den),
    )
}

/// Enclosure of `2 * atanh(z)` for rational `0 <= z <= 1/3`, in fixed point with
/// `prec` fractional bits. Returns (numerator_lo, numerator_hi) over 2^prec.
fn atanh2_fixed(z: &BigRational, prec: u64) -> (BigInt, BigInt) {
    let one = pow2(prec);
    let zf = (z * BigRational::from_integer(one.clone())).floor().to_integer();
    let z2 = (&zf * &zf) >> prec;
    let mut power = zf.clone();
    let mut sum = BigInt::zero();
    let mut j: u64 = 0;
    loop {
        let term = &power / BigInt::from(2 * j + 1);
        if term.is_zero() {
            break;
        }
        sum += term;
        power = (&power * &z2) >> prec;
        j += 1;
    }
    // each truncation costs < 1 ulp and errors contract by z^2 <= 1/9;
    // the omitted tail is below one ulp once a term rounds to zero.
    let slack = BigInt::from(8 * (j + 2));
    let lo = (&sum - &slack) * 2;
    let hi = (&sum + &slack) * 2;
    (lo, hi)
}

fn ln2_fixed(prec: u64) -> (BigInt, BigInt) {
    atanh2_fixed(&rat(1, 3), prec)
}

fn ln_point(q: &BigRational, bits: u64) -> (BigRational, BigRational) {
    debug_assert!(q.is_positive());
    if q.is_one() {
        return (BigRational::zero(), BigRational::zero());
    }
    // q = 2^k * m with 1 <= m < 2
    let mut k = q.numer().bits() as i64 - q.denom().bits() as i64;
    let two = int(2);
    let scale = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(pow2(k as u64))
        } else {
            BigRational::new(BigInt::one(), pow2((-k) as u64))
        }
    };
    let mut m = q / scale(k);
    while m >= two {
        k += 1;
        m = q / scale(k);
    }
    while m < BigRational::one() {
        k -= 1;
        m = q / scale(k);
    }
    let guard = 64 + (k.unsigned_abs().max(1).ilog2() as u64) + 1;
    let prec = bits + guard;
    // ln m = 2 atanh((m-1)/(m+1)); z in [0, 1/3)
    let z = (&m - BigRational::one()) / (&m + BigRational::one());
    let (mlo, mhi) = if z.is_zero() {
        (BigInt::zero(), BigInt::zero())
    } else {
        atanh2_fixed(&z, prec)
    };
    let (l2lo, l2hi) = ln2_fixed(prec);
    let kb = BigInt::from(k);
    let (klo, khi) = if k >= 0 {
        (&kb * &l2lo, &kb * &l2hi)
    } else {
        (&kb * &l2hi, &kb * &l2lo)
    };
    let den = pow2(prec);
    (
        BigRational::new(klo + mlo, den.clone()),
        BigRational::new(khi + mhi, den),
    )
}

/// exp(y) for 0 <= y <= 1/2 in fixed point: (lo, hi) numerators over 2^prec.
fn exp_small_fixed(y: &BigRational, prec: u64) -> (BigInt, BigInt) {
    let one = pow2(prec);
    let yf = (y * BigRational::from_integer(one.clone())).floor().to_integer();
    let mut term = one.clone();
    let mut sum = one.clone();
    let mut j: u64 = 1;
    loop {
        term = (&term * &yf) >> prec;
        term /= BigInt::from(j);
        if term.is_zero() {
            break;
        }
        sum += &term;
        j += 1;
    }
    // floor(y) loses < 1 ulp of y, which moves exp(y) by < 2 ulps; each term
    // truncation < 2 ulps; tail after a zero term below 2 ulps.
    let slack = BigInt::from(4 * (j + 2));
    (&sum - &slack, &sum + &slack)
}

fn exp_point(q: &BigRational, bits: u64) -> (BigRational, BigRational) {
    if q.is_zero() {
        return (BigRational::one(), BigRational::one());
    }
    let neg = q.is_negative();
    let a = q.abs();
    // halve until a / 2^s <= 1/2
    let mut s: u64 = 0;
    let half = rat(1, 2);
    while &a / BigRational::from_integer(pow2(s)) > half {
        s += 1;
    }
    let y = &a / BigRational::from_integer(pow2(s));
    let prec = bits + 64 + 2 * s;
    let (lo, hi) = exp_small_fixed(&y, prec);
    let den = pow2(prec);
    let mut lo = round_dyadic(&BigRational::new(lo, den.clone()), prec, false);
    let mut hi = round_dyadic(&BigRational::new(hi, den), prec, true);
    for _ in 0..s {
        lo = round_dyadic(&(&lo * &lo), prec, false);
        hi = round_dyadic(&(&hi * &hi), prec, true);
    }
    if neg {
        (hi.recip(), lo.recip())
    } else {
        (lo, hi)
    }
}

fn pow10(k: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), k as usize)
}

/// Decimal string of `q` with `sig` significant digits, rounded up or down.
pub fn format_directed(q: &BigRational, sig: usize, up: bool) -> String {
    if q.is_zero() {
        return "0".into();
    }
    let sig = sig.max(1);
    let negative = q.is_negative();
    let a = q.abs();
    // magnitude is rounded in the direction that moves q the requested way
    let mag_up = up != negative;
    // decimal exponent: 10^e <= a < 10^(e+1)
    let approx = ((a.numer().bits() as f64 - a.denom().bits() as f64) * std::f64::consts::LOG10_2)
        .floor() as i64;
    let mut e = approx - 1;
    let ten_pow = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(pow10(k as u32))
        } else {
            BigRational::new(BigInt::one(), pow10((-k) as u32))
        }
    };
    while ten_pow(e + 1) <= a {
        e += 1;
    }
    while ten_pow(e) > a {
        e -= 1;
    }
    let shift = sig as i64 - 1 - e;
    let scaled = &a * ten_pow(shift);
    let mut mant = if mag_up {
        scaled.ceil().to_integer()
    } else {
        scaled.floor().to_integer()
    };
    if mant >= pow10(sig as u32) {
        mant /= BigInt::from(10);
        e += 1;
    }
    let digits = mant.to_str_radix(10);
    let body = if (-5..21).contains(&e) {
        if e >= 0 {
            let e = e as usize;
            if digits.len() > e + 1 {
                format!("{}.{}", &digits[..e + 1], &digits[e + 1..])
            } else {
                format!("{}{}", digits, "0".repeat(e + 1 - digits.len()))
            }
        } else {
            format!("0.{}{}", "0".repeat((-e - 1) as usize), digits)
        }
    } else {
        let (h, t) = digits.split_at(1);
        if t.is_empty() {
            format!("{h}e{e}")
        } else {
            format!("{h}.{t}e{e}")
        }
    };
    let body = trim_fraction(&body);
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

fn trim_fraction(s: &str) -> String {
    let (m, e) = match s.find('e') {
        Some(i) => (&s[..i], &s[i..]),
        None => (s, ""),
    };
    let m = if m.contains('.') {
        m.trim_end_matches('0').trim_end_matches('.')
    } else {
        m
    };
    format!("{m}{e}")
}

/// Threshold `(log y + log log y) / log x` above which `x^m / m > y`.
///
/// Requires `x > 1`, `y > e` and `log x > 1 + log log y / log y`; each condition is
/// decided on enclosures, so a borderline input is rejected rather than guessed.
pub fn loglog_threshold(x: &BoundValue, y: &BoundValue) -> Result<BoundValue> {
    let digits = x.digits().max(y.digits());
    let one = BoundValue::from_int(1, digits);
    if !x.certainly_gt(&one) {
        return Err(ExactError::Domain(format!("x > 1 fails for x = {x}")));
    }
    let e = BoundValue::e(digits);
    if !y.certainly_gt(&e) {
        return Err(ExactError::Domain(format!("y > e fails for y = {y}")));
    }
    let lx = x.ln()?;
    let ly = y.ln()?;
    let lly = ly.ln()?;
    let rhs = one.add(&lly.div(&ly)?);
    if !lx.certainly_gt(&rhs) {
        return Err(ExactError::Domain(format!(
            "log(x) > 1 + log log(y)/log(y) fails: log x = {lx}, rhs = {rhs}"
        )));
    }
    ly.add(&lly).div(&lx)
}

/// A dense matrix of rationals, row-major.
pub type QMatrix = Vec<Vec<BigRational>>;

/// Reduced row echelon form and pivot columns.
pub fn rref(m: &QMatrix) -> (QMatrix, Vec<usize>) {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(m: &QMatrix) -> usize {
    rref(m).1.len()
}

/// Basis of `{v : m v = 0}`.
pub fn nullspace(m: &QMatrix, cols: usize) -> Vec<Vec<BigRational>> {
    let (a, pivots) = rref(m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[row][f].clone();
            }
            v
        })
        .collect()
}

pub fn transpose(m: &QMatrix) -> QMatrix {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn qmat_mul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn qmat_is_zero(a: &QMatrix) -> bool {
    a.iter().flatten().all(|x| x.is_zero())
}
