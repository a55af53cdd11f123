use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{PadicError, Result};

/// An element of `Z_p` known modulo `p^N` (absolute precision `N`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PadicScalar {
    p: u64,
    n: u32,
    value: BigInt,
}

pub fn p_power(p: u64, k: u32) -> BigInt {
    BigInt::from(p).pow(k)
}

/// `p`-adic valuation of a nonzero integer.
pub fn val_int(x: &BigInt, p: u64) -> u32 {
    debug_assert!(!x.is_zero());
    let pb = BigInt::from(p);
    let mut x = x.clone();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}

/// `p`-adic valuation of a nonzero rational.
pub fn val_rat(q: &BigRational, p: u64) -> i64 {
    val_int(q.numer(), p) as i64 - val_int(q.denom(), p) as i64
}

fn check_prime(p: u64) -> Result<()> {
    if crate::exactnum::is_prime(p) {
        Ok(())
    } else {
        Err(PadicError::Domain(format!("{p} is not prime")))
    }
}

impl PadicScalar {
    pub fn from_int(x: &BigInt, p: u64, n: u32) -> Result<Self> {
        check_prime(p)?;
        if n == 0 {
            return Err(PadicError::Domain("precision must be positive".into()));
        }
        let value = x.mod_floor(&p_power(p, n));
        Ok(PadicScalar { p, n, value })
    }

    pub fn from_i64(x: i64, p: u64, n: u32) -> Result<Self> {
        Self::from_int(&BigInt::from(x), p, n)
    }

    /// Image of a `p`-integral rational.
    pub fn from_rational(q: &BigRational, p: u64, n: u32) -> Result<Self> {
        check_prime(p)?;
        if q.denom().is_multiple_of(&BigInt::from(p)) {
            return Err(PadicError::NonIntegral(format!("{q} is not {p}-integral")));
        }
        let modulus = p_power(p, n);
        let inv = mod_inverse(q.denom(), &modulus).expect("denominator is a unit");
        Self::from_int(&(q.numer() * inv), p, n)
    }

    pub fn zero(p: u64, n: u32) -> Self {
        PadicScalar { p, n, value: BigInt::zero() }
    }

    pub fn one(p: u64, n: u32) -> Self {
        PadicScalar { p, n, value: BigInt::one() }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.n
    }

    /// Canonical representative in `[0, p^N)`.
    pub fn value(&self) -> &BigInt {
        &self.value
    }

    /// Representative in `(-p^N/2, p^N/2]`, convenient for display and lifting.
    pub fn symmetric_value(&self) -> BigInt {
        let m = p_power(self.p, self.n);
        if &self.value * 2 > m {
            &self.value - m
        } else {
            self.value.clone()
        }
    }

    /// Exact valuation, or `None` if the element is zero to precision `N`.
    pub fn valuation(&self) -> Option<u32> {
        if self.value.is_zero() {
            None
        } else {
            Some(val_int(&self.value, self.p))
        }
    }

    /// Valuation with zero-to-precision read as `N`.
    pub fn valuation_or_precision(&self) -> u32 {
        self.valuation().unwrap_or(self.n)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    fn check_p(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(PadicError::Domain(format!(
                "mixed primes {} and {}",
                self.p, other.p
            )));
        }
        Ok(())
    }

    fn at(&self, n: u32, value: BigInt) -> Self {
        let value = value.mod_floor(&p_power(self.p, n));
        PadicScalar { p: self.p, n, value }
    }

    /// Reduce to a lower precision.
    pub fn truncate(&self, n: u32) -> Self {
        self.at(n.min(self.n), self.value.clone())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_p(other)?;
        Ok(self.at(self.n.min(other.n), &self.value + &other.value))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_p(other)?;
        Ok(self.at(self.n.min(other.n), &self.value - &other.value))
    }

    pub fn neg(&self) -> Self {
        self.at(self.n, -&self.value)
    }

    /// Product, known to `min(N_a + v_b, N_b + v_a)` but reported at `min(N_a, N_b)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_p(other)?;
        Ok(self.at(self.n.min(other.n), &self.value * &other.value))
    }

    pub fn pow(&self, k: u32) -> Self {
        let m = p_power(self.p, self.n);
        self.at(self.n, self.value.modpow(&BigInt::from(k), &m))
    }

    pub fn inv(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(PadicError::NotUnit(self.to_string()));
        }
        let m = p_power(self.p, self.n);
        let inv = mod_inverse(&self.value, &m).expect("unit");
        Ok(self.at(self.n, inv))
    }

    /// `self / other` with `other = p^v u`; the result is known to `min(N_a, N_b) - v`.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_p(other)?;
        let v = other
            .valuation()
            .ok_or_else(|| PadicError::PrecisionExhausted("division by zero to precision".into()))?;
        let n = self.n.min(other.n);
        if v >= n {
            return Err(PadicError::PrecisionExhausted(format!(
                "dividing by p^{v} leaves no digits at precision {n}"
            )));
        }
        let out_n = n - v;
        let pv = p_power(self.p, v);
        if !self.value.is_multiple_of(&pv) {
            return Err(PadicError::NonIntegral(format!(
                "{self} is not divisible by {}^{v}",
                self.p
            )));
        }
        let a = &self.value / &pv;
        let u = &other.value / &pv;
        let m = p_power(self.p, out_n);
        let uinv = mod_inverse(&u.mod_floor(&m), &m).expect("unit part");
        Ok(self.at(out_n, a * uinv))
    }

    /// Divide by an integer, losing `v_p(k)` digits.
    pub fn div_int(&self, k: i64) -> Result<Self> {
        if k == 0 {
            return Err(PadicError::PrecisionExhausted("division by zero".into()));
        }
        let kv = val_int(&BigInt::from(k), self.p);
        self.div(&PadicScalar::from_i64(k, self.p, self.n + kv)?)
    }

    /// Agreement modulo `p^min(N_a, N_b)`.
    pub fn eq_mod(&self, other: &Self) -> bool {
        self.p == other.p
            && self
                .sub(other)
                .map(|d| d.is_zero())
                .unwrap_or(false)
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::from_integer(self.symmetric_value())
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.valuation() {
            None => write!(f, "O({}^{})", self.p, self.n),
            Some(v) => {
                let unit = &self.value / p_power(self.p, v);
                write!(f, "{unit}*{}^{v}+O({}^{})", self.p, self.p, self.n)
            }
        }
    }
}

impl FromStr for PadicScalar {
    type Err = PadicError;

    /// Parses the display form `u*p^v+O(p^N)` or `O(p^N)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || PadicError::Parse(format!("cannot parse p-adic scalar `{s}`"));
        let s = s.replace(' ', "");
        let (head, tail) = match s.rfind("O(") {
            Some(i) => (&s[..i], &s[i..]),
            None => return Err(bad()),
        };
        let inner = tail
            .strip_prefix("O(")
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (p, n) = inner.split_once('^').ok_or_else(bad)?;
        let p: u64 = p.parse().map_err(|_| bad())?;
        let n: u32 = n.parse().map_err(|_| bad())?;
        let head = head.strip_suffix('+').unwrap_or(head);
        if head.is_empty() {
            return PadicScalar::from_int(&BigInt::zero(), p, n);
        }
        let (unit, pv) = head.split_once('*').ok_or_else(bad)?;
        let unit: BigInt = unit.parse().map_err(|_| bad())?;
        let (p2, v) = pv.split_once('^').ok_or_else(bad)?;
        if p2.parse::<u64>().map_err(|_| bad())? != p {
            return Err(bad());
        }
        let v: u32 = v.parse().map_err(|_| bad())?;
        PadicScalar::from_int(&(unit * p_power(p, v)), p, n)
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// `log(u) = sum_{k>=1} (-1)^{k+1} (u-1)^k / k` for a 1-unit `u`.
///
/// Terms are computed on an integer lift at working precision `N + max v_p(k)`, so
/// the division by `k` does not cost digits; the result is known to `N`.
pub fn padic_log(u: &PadicScalar) -> Result<PadicScalar> {
    let p = u.p;
    let n = u.n;
    let x = u.sub(&PadicScalar::one(p, n))?;
    if !x.is_zero() && x.valuation() == Some(0) {
        return Err(PadicError::Domain(format!("{u} is not congruent to 1 mod {p}")));
    }
    if x.is_zero() {
        return Ok(PadicScalar::zero(p, n));
    }
    let vx = x.valuation().expect("nonzero");
    // k*vx - v_p(k) is non-decreasing in k, so stop once the next term vanishes mod p^N
    let mut last = 0u64;
    while ((last + 1) * vx as u64) < n as u64 + ilog(p, last + 1) as u64 {
        last += 1;
    }
    let guard = ilog(p, last);
    let w = n + guard;
    let mw = p_power(p, w);
    let xw = x.value.clone();
    let mut term = BigInt::one();
    let mut acc = BigInt::zero();
    for k in 1..=last {
        term = (&term * &xw).mod_floor(&mw);
        let kv = val_int(&BigInt::from(k), p);
        let pk = p_power(p, kv);
        let ku = BigInt::from(k) / &pk;
        // term is divisible by p^{k vx} >= p^{kv}
        let reduced = &term / &pk;
        let mr = p_power(p, w - kv);
        let t = reduced * mod_inverse(&ku, &mr).expect("unit");
        if k % 2 == 1 {
            acc += t;
        } else {
            acc -= t;
        }
    }
    PadicScalar::from_int(&acc, p, n)
}

/// `floor(log_p(k))` for `k >= 1`.
fn ilog(p: u64, k: u64) -> u32 {
    let mut v = 0;
    let mut x = k;
    while x >= p {
        x /= p;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: i64, n: u32) -> PadicScalar {
        PadicScalar::from_i64(x, 5, n).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let a = s(2, 3).add(&s(3, 3)).unwrap();
        assert_eq!(a.value(), &BigInt::from(5));
        assert_eq!(a.valuation(), Some(1));
        assert_eq!(s(2, 3).inv().unwrap().value(), &BigInt::from(63));
        let q = s(25, 3).div(&s(5, 3)).unwrap();
        assert_eq!((q.value().clone(), q.precision()), (BigInt::from(5), 2));
        assert!(matches!(s(1, 3).div(&s(5, 3)), Err(PadicError::NonIntegral(_))));
        assert!(matches!(s(0, 3).div(&s(125, 3)), Err(PadicError::PrecisionExhausted(_))));
        assert!(s(5, 3).inv().is_err());
        assert!(PadicScalar::from_i64(1, 6, 3).is_err());
    }

    #[test]
    fn rational_embedding() {
        let half = PadicScalar::from_rational(&crate::exactnum::rat(1, 2), 5, 3).unwrap();
        assert_eq!(half.value(), &BigInt::from(63));
        assert!(PadicScalar::from_rational(&crate::exactnum::rat(1, 5), 5, 3).is_err());
        assert_eq!(s(124, 3).symmetric_value(), BigInt::from(-1));
    }

    #[test]
    fn display_round_trip() {
        for x in [0, 1, 5, 75, 124, 250] {
            let a = s(x, 4);
            let b: PadicScalar = a.to_string().parse().unwrap();
            assert_eq!(a, b);
        }
        assert_eq!(s(75, 4).to_string(), "3*5^2+O(5^4)");
        assert_eq!(s(0, 4).to_string(), "O(5^4)");
    }

    #[test]
    fn log_examples() {
        assert!(padic_log(&s(1, 3)).unwrap().is_zero());
        assert_eq!(padic_log(&s(6, 3)).unwrap().value(), &BigInt::from(55));
        let u = s(6, 3);
        let lhs = padic_log(&u.mul(&u).unwrap()).unwrap();
        let rhs = padic_log(&u).unwrap().add(&padic_log(&u).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        assert!(padic_log(&s(2, 3)).is_err());
        let l = padic_log(&s(26, 8)).unwrap();
        assert_eq!(l.precision(), 8);
    }

    #[test]
    fn log_p_two() {
        let u = PadicScalar::from_i64(5, 2, 10).unwrap();
        let v = PadicScalar::from_i64(9, 2, 10).unwrap();
        let lhs = padic_log(&u.mul(&v).unwrap()).unwrap();
        let rhs = padic_log(&u).unwrap().add(&padic_log(&v).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }
}
