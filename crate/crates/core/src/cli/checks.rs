//! The identity and oracle sweeps behind `paper-check`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{self, FamilyParams, Threshold};
use crate::exactnum::{self, BoundValue};
use crate::filtered::{self, FilteredError, FilteredShape, WeightConvention};
use crate::liedims::{self, CurveType};
use crate::padic::{self, OneForm, PadicScalar, RationalRing, TruncSeries};
use crate::transport;

use super::output::{Record, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
    /// The check ran and the stated inequality does not hold; the exceptions
    /// are listed in the detail and do not count as a failure.
    KnownDeviation,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
            Status::KnownDeviation => "known-deviation",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub anchor: &'static str,
    pub status: Status,
    pub detail: String,
}

impl CheckResult {
    pub fn record(&self) -> Record {
        Record::new()
            .with("check", self.name)
            .with("anchor", self.anchor)
            .with("status", self.status.as_str())
            .with("detail", &self.detail)
    }
}

/// Test hooks that corrupt one constant so the suite can be seen to fail.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tamper {
    pub mg_offset: i64,
}

fn outcome(name: &'static str, anchor: &'static str, r: Result<String, String>) -> CheckResult {
    match r {
        Ok(detail) => CheckResult {
            name,
            anchor,
            status: Status::Pass,
            detail,
        },
        Err(detail) => CheckResult {
            name,
            anchor,
            status: Status::Fail,
            detail,
        },
    }
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

pub fn mg_identity(tamper: Tamper) -> Result<String, String> {
    for g in 4..=50i64 {
        let rep = bounds::thm1_stable(&FamilyParams::new(g, 3 * g - 3, g - 3, 0)).map_err(|e| e.to_string())?;
        let expect = exactnum::int(21 * g * g - 30 * g + tamper.mg_offset);
        ensure!(
            rep.threshold == Threshold::Exact(expect.clone()),
            "g = {g}: threshold {} but 21g^2 - 30g = {expect}",
            rep.threshold
        );
    }
    Ok("g in [4, 50]".into())
}

pub fn krzb_row() -> Result<String, String> {
    let rows = bounds::classical_rows(1, None, Some(4), 50).map_err(|e| e.to_string())?;
    let row = rows.iter().find(|r| r.name == "krzb").ok_or("no krzb row")?;
    ensure!(
        row.threshold == Threshold::Exact(exactnum::int(980)),
        "krzb row gives {}",
        row.threshold
    );
    Ok("84g^2 - 98g + 28 = 980 at g = 4".into())
}

pub fn witt_round_trip(digits: u32) -> Result<String, String> {
    let dims = liedims::graded_dims(CurveType::PuncturedLine, 64).map_err(|e| e.to_string())?;
    for n in 1..=64usize {
        let mut s = BigInt::zero();
        for k in exactnum::divisors(n as u64).map_err(|e| e.to_string())? {
            s += BigInt::from(k) * dims.get(k as usize);
        }
        ensure!(s == BigInt::one() << n, "sum k e_k at n = {n} is {s}");
    }
    for n in (2..=64usize).step_by(7) {
        let (lo, hi) = liedims::dim_envelope(CurveType::PuncturedLine, n, digits).map_err(|e| e.to_string())?;
        let e = BigRational::from_integer(dims.get(n).clone());
        ensure!(lo.lower() <= &e && &e <= hi.upper(), "envelope misses e_{n}");
    }
    Ok("n <= 64".into())
}

/// `prod_{n <= depth} (1 - t^n)^{e_n}` modulo `t^{depth+1}`.
pub fn labute_product(e: &[BigInt], depth: usize) -> Vec<BigInt> {
    let mut poly = vec![BigInt::zero(); depth + 1];
    poly[0] = BigInt::one();
    for n in 1..=depth {
        let en = &e[n - 1];
        // (1 - t^n)^{e_n} = sum_k binom(e_n, k) (-t^n)^k
        let mut factor = vec![BigInt::zero(); depth + 1];
        let mut binom = BigInt::one();
        let mut k = 0usize;
        while k * n <= depth {
            factor[k * n] = if k.is_multiple_of(2) { binom.clone() } else { -binom.clone() };
            binom = binom * (en - BigInt::from(k)) / BigInt::from(k + 1);
            k += 1;
        }
        let mut next = vec![BigInt::zero(); depth + 1];
        for (i, a) in poly.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in factor.iter().enumerate().take(depth + 1 - i) {
                if !b.is_zero() {
                    next[i + j] += a * b;
                }
            }
        }
        poly = next;
    }
    poly
}

pub fn labute_round_trip() -> Result<String, String> {
    for g in [2u32, 3, 5] {
        let dims = liedims::graded_dims(CurveType::ProjectiveGenus(g), 30).map_err(|e| e.to_string())?;
        let poly = labute_product(&dims.e, 30);
        let mut expect = vec![BigInt::zero(); 31];
        expect[0] = BigInt::one();
        expect[1] = BigInt::from(-2 * g as i64);
        expect[2] = BigInt::one();
        ensure!(poly == expect, "product differs from 1 - {}t + t^2 at g = {g}", 2 * g);
    }
    Ok("g in {2, 3, 5}, mod t^31".into())
}

pub fn filip_suite(digits: u32) -> Result<String, String> {
    for g in 2..=5u32 {
        let ch = liedims::filip_chi(g, 40).map_err(|e| e.to_string())?;
        for n in (2..=40usize).step_by(2) {
            let chi = ch.chi_c[n - 1].abs();
            let env = liedims::chi_envelope(g, n, digits);
            ensure!(&chi <= env.lower(), "|chi_{n}(c)| = {chi} exceeds the envelope at g = {g}");
        }
    }
    let ch = liedims::filip_chi(2, 4).map_err(|e| e.to_string())?;
    ensure!(ch.chi_c[1] == exactnum::int(-3), "chi_2(c) = {} at g = 2", ch.chi_c[1]);
    ensure!(ch.v_fixed[3] == BigInt::from(21), "dim V_4^c = {} at g = 2", ch.v_fixed[3]);
    Ok("g <= 5, even n <= 40".into())
}

/// Ranks `r = 2s`, `s` in `[6, 200]`, where the exact punctured-line depth exceeds
/// the strict closed-form threshold: `(r, exact_min, paper_bound)`.
pub fn lemma_depth_exceptions(digits: u32) -> Result<Vec<(u64, usize, usize)>, String> {
    let mut out = Vec::new();
    for s in 6..=200u64 {
        let m = liedims::min_depth(CurveType::PuncturedLine, 2 * s, digits).map_err(|e| e.to_string())?;
        if m.exact_min > m.paper_bound {
            out.push((2 * s, m.exact_min, m.paper_bound));
        }
    }
    Ok(out)
}

/// Punctured-line threshold against the exact depth. Off-by-one misses at odd
/// thresholds are reported as a known deviation; anything else fails.
pub fn lemma_depth_dominance(digits: u32) -> CheckResult {
    let (name, anchor) = ("lemma_depth_dominance", "is finite whenever");
    let run = || -> Result<Vec<(u64, usize, usize)>, String> {
        let m = liedims::min_depth(CurveType::PuncturedLine, 12, digits).map_err(|e| e.to_string())?;
        ensure!((m.exact_min, m.paper_bound) == (6, 7), "r = 12 gives {:?}", (m.exact_min, m.paper_bound));
        let ex = lemma_depth_exceptions(digits)?;
        for &(r, e, b) in &ex {
            ensure!(e == b + 1 && e % 2 == 0, "r = {r}: {e} > {b}");
        }
        Ok(ex)
    };
    match run() {
        Ok(ex) if ex.is_empty() => outcome(name, anchor, Ok("s in [6, 200]".into())),
        Ok(ex) => {
            let ranks: Vec<String> = ex.iter().map(|(r, ..)| r.to_string()).collect();
            CheckResult {
                name,
                anchor,
                status: Status::KnownDeviation,
                detail: format!(
                    "exact depth exceeds the bound by one at {} ranks r = {}",
                    ex.len(),
                    ranks.join(" ")
                ),
            }
        }
        Err(e) => outcome(name, anchor, Err(e)),
    }
}

/// The depth used in the unit-equation count, and the genus 2 threshold, both dominate.
pub fn depth_dominance(digits: u32) -> Result<String, String> {
    for s in 6..=200u64 {
        let m = liedims::min_depth(CurveType::PuncturedLine, 2 * s, digits).map_err(|e| e.to_string())?;
        let (_, n) = liedims::applied_depth(2 * s, digits).map_err(|e| e.to_string())?;
        ensure!(m.exact_min <= n, "r = {}: {} > {n}", 2 * s, m.exact_min);
    }
    for r in 23..=500u64 {
        let m = liedims::min_depth(CurveType::ProjectiveGenus(2), r, digits).map_err(|e| e.to_string())?;
        ensure!(m.exact_min <= m.paper_bound, "g = 2, r = {r}: {} > {}", m.exact_min, m.paper_bound);
    }
    let m = liedims::min_depth(CurveType::ProjectiveGenus(2), 30, digits).map_err(|e| e.to_string())?;
    ensure!((m.exact_min, m.paper_bound) == (5, 5), "g = 2, r = 30 gives {:?}", (m.exact_min, m.paper_bound));
    Ok("applied depth, s in [6, 200]; g = 2, r in [23, 500]".into())
}

/// Count monomials of weighted degree `<= i` by listing exponent vectors.
fn enumerate_monomials(d: &[u64], max: usize) -> u64 {
    let vars: Vec<usize> = d
        .iter()
        .enumerate()
        .flat_map(|(k, &dk)| std::iter::repeat_n(k + 1, dk as usize))
        .collect();
    let mut count = 0;
    let mut exps = vec![0usize; vars.len()];
    loop {
        let deg: usize = exps.iter().zip(&vars).map(|(a, w)| a * w).sum();
        if deg <= max {
            count += 1;
        }
        // odometer over exponents bounded by max / weight
        let mut i = 0;
        loop {
            if i == vars.len() {
                return count;
            }
            if exps[i] < max / vars[i] {
                exps[i] += 1;
                break;
            }
            exps[i] = 0;
            i += 1;
        }
    }
}

/// `J` computed from enumerated monomials.
pub fn j_brute_force(d: &[u64], e: &[u64]) -> BigInt {
    (1..=d.len())
        .map(|i| BigInt::from(e[i - 1]) * BigInt::from(enumerate_monomials(d, i)))
        .sum()
}

/// Every shape with `n <= max_n` and entries in `0..=max_entry`.
pub fn j_oracle_grid(max_n: usize, max_entry: u64) -> Result<String, String> {
    let mut checked = 0u64;
    for n in 1..=max_n {
        let size = (max_entry + 1).pow(n as u32);
        for dcode in 0..size {
            let d: Vec<u64> = (0..n).map(|i| dcode / (max_entry + 1).pow(i as u32) % (max_entry + 1)).collect();
            for ecode in 0..size {
                let e: Vec<u64> = (0..n).map(|i| ecode / (max_entry + 1).pow(i as u32) % (max_entry + 1)).collect();
                let shape = FilteredShape::new(d.clone(), e.clone()).map_err(|x| x.to_string())?;
                let fast = filtered::j_exact(&shape, WeightConvention::Weighted);
                let slow = j_brute_force(&d, &e);
                ensure!(fast == slow, "d = {d:?}, e = {e:?}: {fast} vs {slow}");
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} shapes"))
}

/// A random shape with `d_1 = r`, `d_i <= alpha^i` and `e_i <= beta^i / i`.
pub fn random_hypothesis_shape(
    rng: &mut impl Rng,
    r: u64,
    alpha: &BoundValue,
    beta: &BoundValue,
    n: usize,
) -> FilteredShape {
    let floor = |b: &BoundValue, i: usize| -> u64 {
        (b.powi(i as u32).lower() / exactnum::int(i as i64)).floor().to_integer().to_u64().unwrap()
    };
    let mut d = vec![r];
    for i in 2..=n {
        let cap = (alpha.powi(i as u32).lower().floor().to_integer()).to_u64().unwrap();
        d.push(rng.gen_range(0..=cap));
    }
    let e = (1..=n).map(|i| rng.gen_range(0..=floor(beta, i))).collect();
    FilteredShape::new(d, e).expect("consistent lengths")
}

pub fn jestimate_domination(seed: u64, count: usize, digits: u32) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let choices = [
        BoundValue::from_int(2, digits),
        liedims::alpha_plus(2, digits),
        liedims::alpha_plus(3, digits),
    ];
    for k in 0..count {
        let r = rng.gen_range(2..=30u64);
        let alpha = &choices[rng.gen_range(0..3)];
        let beta = &choices[rng.gen_range(0..3)];
        let n = rng.gen_range(1..=6usize);
        let shape = random_hypothesis_shape(&mut rng, r, alpha, beta, n);
        let j = BigRational::from_integer(filtered::j_exact(&shape, WeightConvention::Weighted));
        let rb = BoundValue::from_int(r as i64, digits);
        let upper = match filtered::j_upper(&rb, alpha, beta, n as u32) {
            Err(FilteredError::AmbiguousCase { .. }) => {
                let d2 = digits * 2;
                filtered::j_upper(&rb.with_digits(d2), &alpha.with_digits(d2), &beta.with_digits(d2), n as u32)
            }
            other => other,
        }
        .map_err(|e| format!("sample {k}: {e}"))?;
        ensure!(upper.lower() >= &j, "sample {k}: J = {j} above J_upper {upper} for {shape:?}");
    }
    Ok(format!("{count} random shapes, seed {seed}"))
}

fn t_series(cap: u32, text: &str) -> TruncSeries<RationalRing> {
    padic::parse_poly(RationalRing, &["t".to_string()], cap, text).expect("valid polynomial")
}

pub fn transport_residuals(cfg: &RunConfig) -> Result<String, String> {
    let cap = cfg.cap.min(12);
    let fam = transport::demo_family(cap);
    let res = transport::parallel_transport(&fam, None).map_err(|e| e.to_string())?;
    let resid = transport::horizontality_residual(&fam, &res.h).map_err(|e| e.to_string())?;
    ensure!(resid.is_none(), "dH - Lambda H has degree {resid:?}");
    let b = transport::betti_square_check(&fam, None).map_err(|e| e.to_string())?;
    ensure!(b.consistent, "Betti square residual of degree {:?}", b.residual_degree);
    // dt / (1 + t) between 0 and p
    let geometric: Vec<String> = (0..=cap).map(|k| format!("{}*t^{k}", if k % 2 == 0 { 1 } else { -1 })).collect();
    let form = OneForm::new(vec![t_series(cap, &geometric.join(" + "))], None).map_err(|e| e.to_string())?;
    let zero = transport::padic_point(&[0], cfg.p, cfg.n).map_err(|e| e.to_string())?;
    let pt = transport::padic_point(&[cfg.p as i64], cfg.p, cfg.n).map_err(|e| e.to_string())?;
    let v = transport::coleman_disk_integral(&[form], &zero, &pt).map_err(|e| e.to_string())?;
    let log = padic::padic_log(&PadicScalar::from_i64(1 + cfg.p as i64, cfg.p, cfg.n).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    ensure!(v[0].eq_mod(&log), "disk integral {} vs log(1 + p) = {log}", v[0]);
    Ok(format!("cap {cap}; integral of dt/(1+t) = {}", v[0]))
}

/// `int_{phi(x1)}^{phi(x2)} omega = int_{x1}^{x2} phi^* omega` for `phi(t) = t + t^2`.
pub fn functoriality(cfg: &RunConfig, count: usize) -> Result<String, String> {
    let cap = cfg.cap.min(12);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let phi = t_series(cap, "t + t^2");
    let dphi = phi.diff(0).map_err(|e| e.to_string())?;
    let pt = |x: i64| transport::padic_point(&[x], cfg.p, cfg.n).map_err(|e| e.to_string());
    let p = cfg.p as i64;
    for k in 0..count {
        let coeffs: Vec<i64> = (0..5).map(|_| rng.gen_range(-9..=9)).collect();
        let text: Vec<String> = coeffs.iter().enumerate().map(|(i, c)| format!("{c}*t^{i}")).collect();
        let w = t_series(cap, &text.join(" + "));
        let pulled = w
            .compose(std::slice::from_ref(&phi))
            .and_then(|x| x.truncate(cap - 1).mul(&dphi))
            .map_err(|e| e.to_string())?;
        let f1 = OneForm::new(vec![w], None).map_err(|e| e.to_string())?;
        let f2 = OneForm::new(vec![pulled], None).map_err(|e| e.to_string())?;
        let lhs = transport::coleman_disk_integral(&[f1], &pt(0)?, &pt(p + p * p)?).map_err(|e| e.to_string())?;
        let rhs = transport::coleman_disk_integral(&[f2], &pt(0)?, &pt(p)?).map_err(|e| e.to_string())?;
        ensure!(lhs[0].eq_mod(&rhs[0]), "form {k} ({}): {} vs {}", text.join(" + "), lhs[0], rhs[0]);
    }
    Ok(format!("{count} random forms, phi(t) = t + t^2"))
}

pub fn run_all(cfg: &RunConfig, tamper: Tamper) -> Vec<CheckResult> {
    let digits = cfg.digits;
    let mut out = vec![
        outcome("mg_identity", "Cor Mg", mg_identity(tamper)),
        outcome("krzb_row", "KRZB comparison", krzb_row()),
        outcome("witt_round_trip", "Witt formula", witt_round_trip(digits)),
        outcome("labute_round_trip", "Labute product", labute_round_trip()),
        outcome("filip_suite", "conjugation character", filip_suite(digits)),
        outcome("depth_dominance", "defect depth", depth_dominance(digits)),
        lemma_depth_dominance(digits),
    ];
    if cfg.convention == "weighted" {
        out.push(outcome("j_oracle_grid", "filtered count", j_oracle_grid(3, 3)));
    } else {
        out.push(CheckResult {
            name: "j_oracle_grid",
            anchor: "filtered count",
            status: Status::Skip,
            detail: "oracle enumerates weighted degrees; skipped under the unweighted convention".into(),
        });
    }
    out.push(outcome(
        "jestimate_domination",
        "J estimate",
        jestimate_domination(cfg.seed, 200, digits),
    ));
    out.push(outcome("transport_residuals", "horizontal section", transport_residuals(cfg)));
    out.push(outcome("functoriality", "functoriality", functoriality(cfg, 20)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_matches_hand_values() {
        assert_eq!(j_brute_force(&[1, 1], &[1, 1]), BigInt::from(6));
        assert_eq!(j_brute_force(&[1, 0], &[2, 1]), BigInt::from(7));
    }

    #[test]
    fn tamper_fails_mg() {
        assert!(mg_identity(Tamper::default()).is_ok());
        assert!(mg_identity(Tamper { mg_offset: 1 }).is_err());
    }
}
