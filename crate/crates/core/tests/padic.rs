use chabauty_core::exactnum::{self, rat};
use chabauty_core::padic::{
    self, antiderivative, parse_poly, ArithOp, OneForm, PadicError, PadicMatrix, PadicRing, PadicScalar, RationalRing,
    TruncSeries,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn s(x: i64, p: u64, n: u32) -> PadicScalar {
    PadicScalar::from_i64(x, p, n).unwrap()
}

#[test]
fn arithmetic_examples() {
    let sum = padic::padic_arith(ArithOp::Add, &s(2, 5, 3), &s(3, 5, 3)).unwrap();
    assert_eq!(sum.value(), &BigInt::from(5));
    assert_eq!(sum.valuation(), Some(1));
    let inv = padic::padic_arith(ArithOp::Inv, &s(2, 5, 3), &s(0, 5, 3)).unwrap();
    assert_eq!(inv.value(), &BigInt::from(63));
    let q = padic::padic_arith(ArithOp::Div, &s(25, 5, 3), &s(5, 5, 3)).unwrap();
    assert_eq!(q.precision(), 2);
    assert_eq!(q.value(), &BigInt::from(5));
    assert!(padic::padic_arith(ArithOp::Inv, &s(5, 5, 3), &s(0, 5, 3)).is_err());
}

#[test]
fn log_examples() {
    assert!(padic::padic_log(&s(1, 5, 3)).unwrap().is_zero());
    let l6 = padic::padic_log(&s(6, 5, 3)).unwrap();
    assert_eq!(l6.value() % BigInt::from(125), BigInt::from(55));
    let l36 = padic::padic_log(&s(36, 5, 3)).unwrap();
    assert!(l36.eq_mod(&l6.add(&l6).unwrap()));
    assert!(matches!(padic::padic_log(&s(2, 5, 3)), Err(PadicError::Domain(_))));
}

#[test]
fn series_examples() {
    let t = vec!["t".to_string()];
    let f = parse_poly(RationalRing, &t, 2, "1 + t").unwrap();
    let g = parse_poly(RationalRing, &t, 2, "1 - t").unwrap();
    assert_eq!(f.mul(&g).unwrap(), parse_poly(RationalRing, &t, 2, "1 - t^2").unwrap());
    let h = parse_poly(RationalRing, &t, 2, "1 + t + t^2").unwrap();
    assert_eq!(h.mul(&h).unwrap(), parse_poly(RationalRing, &t, 2, "1 + 2*t + 3*t^2").unwrap());
    let sq = parse_poly(RationalRing, &t, 3, "t^2").unwrap();
    assert!(same(&sq.diff(0).unwrap(), &parse_poly(RationalRing, &t, 3, "2*t").unwrap(), 3));
}

#[test]
fn antiderivative_examples() {
    let xs = vec!["x".to_string(), "s".to_string()];
    let w = OneForm::new(
        vec![
            parse_poly(RationalRing, &xs, 4, "1 + s").unwrap(),
            parse_poly(RationalRing, &xs, 4, "x").unwrap(),
        ],
        None,
    )
    .unwrap();
    assert_eq!(antiderivative(&w).unwrap(), parse_poly(RationalRing, &xs, 4, "x + x*s").unwrap());

    let t = vec!["t".to_string()];
    let zero = TruncSeries::zero(RationalRing, t.clone(), 4, false);
    let w = OneForm::new(vec![zero], Some(vec![rat(3, 2)])).unwrap();
    let want = TruncSeries::log_symbol(RationalRing, t, 4, 0).scale(&rat(3, 2));
    assert_eq!(antiderivative(&w).unwrap(), want);

    let bad = OneForm::new(
        vec![
            parse_poly(RationalRing, &xs, 4, "s").unwrap(),
            parse_poly(RationalRing, &xs, 4, "0").unwrap(),
        ],
        None,
    )
    .unwrap();
    assert!(matches!(antiderivative(&bad), Err(PadicError::Integrability(_))));
}

#[test]
fn rank_examples() {
    let id = PadicMatrix::identity(3, 5, 8).unwrap();
    let r = id.rank_at_precision(0).unwrap();
    assert_eq!((r.rank, r.certified), (3, true));
    let v = [3i64, -7, 10];
    let rows = vec![v.to_vec(), v.iter().map(|x| 2 * x).collect()];
    let r = PadicMatrix::from_int_rows(&rows, 5, 8).unwrap().rank_at_precision(0).unwrap();
    assert_eq!((r.rank, r.certified), (1, true));
    assert!(id.rank_at_precision(8).is_err());
}

/// Equal coefficients in degrees `<= k`, whatever the caps.
fn same(a: &TruncSeries<RationalRing>, b: &TruncSeries<RationalRing>, k: u32) -> bool {
    let a = a.truncate(k);
    let b = b.truncate(k);
    a.terms().eq(b.terms())
}

fn unit_or_any(p: u64) -> impl Strategy<Value = i64> {
    (-(p as i64).pow(6)..(p as i64).pow(6)).prop_map(|x| x)
}

fn scalar(p: u64, n: u32) -> impl Strategy<Value = PadicScalar> {
    unit_or_any(p).prop_map(move |x| PadicScalar::from_i64(x, p, n).unwrap())
}

fn one_unit(p: u64, n: u32) -> impl Strategy<Value = PadicScalar> {
    (-(p as i64).pow(5)..(p as i64).pow(5)).prop_map(move |k| PadicScalar::from_i64(1 + p as i64 * k, p, n).unwrap())
}

fn poly2(cap: u32) -> impl Strategy<Value = TruncSeries<RationalRing>> {
    let xs = vec!["x".to_string(), "y".to_string()];
    prop::collection::vec(((0u32..=4, 0u32..=4), -9i64..=9, 1i64..=4), 1..8).prop_map(move |terms| {
        let t: Vec<(Vec<u32>, BigRational)> = terms
            .into_iter()
            .filter(|((a, b), _, _)| a + b > 0 && a + b <= cap)
            .map(|((a, b), n, d)| (vec![a, b], rat(n, d)))
            .collect();
        TruncSeries::from_rational_terms(RationalRing, xs.clone(), cap, &t).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ring_laws_p5(a in scalar(5, 8), b in scalar(5, 8), c in scalar(5, 8)) {
        prop_assert!(a.add(&b).unwrap().add(&c).unwrap().eq_mod(&a.add(&b.add(&c).unwrap()).unwrap()));
        prop_assert!(a.mul(&b).unwrap().mul(&c).unwrap().eq_mod(&a.mul(&b.mul(&c).unwrap()).unwrap()));
        let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
        let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert!(lhs.eq_mod(&rhs));
        prop_assert!(a.add(&b).unwrap().eq_mod(&b.add(&a).unwrap()));
    }

    #[test]
    fn ring_laws_p7(a in scalar(7, 8), b in scalar(7, 8), c in scalar(7, 8)) {
        let lhs = a.add(&b).unwrap().mul(&c).unwrap();
        let rhs = a.mul(&c).unwrap().add(&b.mul(&c).unwrap()).unwrap();
        prop_assert!(lhs.eq_mod(&rhs));
        if b.is_unit() {
            prop_assert!(a.div(&b).unwrap().mul(&b).unwrap().eq_mod(&a));
        }
    }

    #[test]
    fn log_is_a_homomorphism(p in prop::sample::select(vec![5u64, 7]), seed in any::<(i64, i64)>()) {
        let k = |x: i64| x.rem_euclid((p as i64).pow(5));
        let u = PadicScalar::from_i64(1 + p as i64 * k(seed.0), p, 8).unwrap();
        let v = PadicScalar::from_i64(1 + p as i64 * k(seed.1), p, 8).unwrap();
        let lhs = padic::padic_log(&u.mul(&v).unwrap()).unwrap();
        let rhs = padic::padic_log(&u).unwrap().add(&padic::padic_log(&v).unwrap()).unwrap();
        prop_assert!(lhs.eq_mod(&rhs), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn log_homomorphism_p5(u in one_unit(5, 8), v in one_unit(5, 8)) {
        let lhs = padic::padic_log(&u.mul(&v).unwrap()).unwrap();
        let rhs = padic::padic_log(&u).unwrap().add(&padic::padic_log(&v).unwrap()).unwrap();
        prop_assert!(lhs.eq_mod(&rhs));
    }

    #[test]
    fn antiderivative_inverts_d(f in poly2(6)) {
        let w = OneForm::exact(&f).unwrap();
        let back = antiderivative(&w).unwrap();
        let again = OneForm::exact(&back).unwrap();
        for i in 0..2 {
            prop_assert!(same(&again.dt[i], &w.dt[i], 4));
        }
        prop_assert!(same(&back, &f, 5));
    }

    #[test]
    fn padic_series_antiderivative(f in poly2(5)) {
        let ring = PadicRing { p: 7, n: 8 };
        let g = f.map_ring(ring, |q| PadicScalar::from_rational(q, 7, 8)).unwrap();
        let w = OneForm::exact(&g).unwrap();
        let back = antiderivative(&w).unwrap();
        let again = OneForm::exact(&back).unwrap();
        for i in 0..2 {
            let d = again.dt[i].truncate(4).sub(&w.dt[i].truncate(4)).unwrap();
            prop_assert!(d.terms().all(|(_, c)| c.is_zero()));
        }
    }

    #[test]
    fn rank_matches_elimination(rows in 1usize..=5, cols in 1usize..=7, k in 0usize..=5, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let k = k.min(rows).min(cols);
        let mut entry = || {
            let v = rng.gen_range(0..=2u32);
            let den = [1i64, 2, 3, 4, 6][rng.gen_range(0..5)];
            rat(rng.gen_range(-9i64..=9) * 7i64.pow(v), den)
        };
        let left: Vec<Vec<BigRational>> = (0..rows).map(|_| (0..k).map(|_| entry()).collect()).collect();
        let right: Vec<Vec<BigRational>> = (0..k).map(|_| (0..cols).map(|_| entry()).collect()).collect();
        let m = exactnum::qmat_mul(&left, &right);
        let m = if m.is_empty() || m[0].is_empty() { vec![vec![rat(0, 1); cols]; rows] } else { m };
        let pm = PadicMatrix::from_rational_rows(&m, 7, 8).unwrap();
        prop_assert_eq!(pm.rank_at_precision(0).unwrap().rank, exactnum::rank(&m));
    }
}
