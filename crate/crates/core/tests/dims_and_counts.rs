use chabauty_core::exactnum::{int, BoundValue};
use chabauty_core::filtered::{self, FilteredError, FilteredShape, WeightConvention};
use chabauty_core::liedims::{self, CurveType, FilipRhs};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

#[test]
fn dims_examples() {
    let p1 = liedims::graded_dims(CurveType::PuncturedLine, 8).unwrap();
    let want: Vec<BigInt> = [2, 1, 2, 3, 6, 9, 18, 30].iter().map(|&x| BigInt::from(x)).collect();
    assert_eq!(p1.e, want);
    let g2 = liedims::graded_dims(CurveType::ProjectiveGenus(2), 4).unwrap();
    assert_eq!(g2.get(4), &BigInt::from(45));
    assert!(liedims::graded_dims(CurveType::ProjectiveGenus(1), 4).is_err());
    assert!("genus:1".parse::<CurveType>().is_err());
    assert_eq!("genus:3".parse::<CurveType>().unwrap(), CurveType::ProjectiveGenus(3));
}

#[test]
fn literal_zero_rhs_is_not_integral() {
    assert!(liedims::filip_nonintegral_levels(2, 10, FilipRhs::ClosedForm).unwrap().is_empty());
    let bad = liedims::filip_nonintegral_levels(2, 10, FilipRhs::Zero).unwrap();
    assert!(bad.contains(&2), "{bad:?}");
    assert!(liedims::filip_chi_with(2, 10, FilipRhs::Zero).is_err());
}

#[test]
fn min_depth_monotone_in_rank() {
    let mut last = (0, 0);
    for s in 1..=120u64 {
        let m = liedims::min_depth(CurveType::PuncturedLine, 2 * s, 40).unwrap();
        assert!(m.exact_min >= last.0 && m.paper_bound >= last.1, "s = {s}");
        last = (m.exact_min, m.paper_bound);
    }
    for g in 2..=4u32 {
        let mut last = (0, 0);
        for r in 1..=200u64 {
            let m = liedims::min_depth(CurveType::ProjectiveGenus(g), r, 40).unwrap();
            assert!(m.exact_min >= last.0 && m.paper_bound >= last.1, "g = {g}, r = {r}");
            last = (m.exact_min, m.paper_bound);
        }
    }
}

#[test]
fn applied_depth_dominates_exact_depth() {
    for s in 2..=200u64 {
        let m = liedims::min_depth(CurveType::PuncturedLine, 2 * s, 40).unwrap();
        let (_, n) = liedims::applied_depth(2 * s, 40).unwrap();
        assert!(m.exact_min <= n, "s = {s}");
        assert!(m.exact_min <= m.paper_bound + 1, "s = {s}");
    }
}

/// Monomials of graded degree `<= max` in `d_k` variables of degree `k`, by recursion over the variables.
fn monomials(weights: &[usize], max: usize) -> u64 {
    match weights.split_first() {
        None => 1,
        Some((&w, rest)) => (0..=max / w).map(|a| monomials(rest, max - a * w)).sum(),
    }
}

fn weights(d: &[u64], conv: WeightConvention) -> Vec<usize> {
    d.iter()
        .enumerate()
        .flat_map(|(k, &dk)| {
            let w = match conv {
                WeightConvention::Weighted => k + 1,
                WeightConvention::Unweighted => 1,
            };
            std::iter::repeat_n(w, dk as usize)
        })
        .collect()
}

fn brute_j(d: &[u64], e: &[u64], conv: WeightConvention) -> BigInt {
    let w = weights(d, conv);
    (1..=d.len()).map(|i| BigInt::from(e[i - 1]) * BigInt::from(monomials(&w, i))).sum()
}

fn shape() -> impl Strategy<Value = (Vec<u64>, Vec<u64>)> {
    (1usize..=3).prop_flat_map(|n| (prop::collection::vec(0u64..=3, n), prop::collection::vec(0u64..=3, n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn j_exact_matches_enumeration((d, e) in shape()) {
        let s = FilteredShape::new(d.clone(), e.clone()).unwrap();
        prop_assert_eq!(filtered::j_exact(&s, WeightConvention::Weighted), brute_j(&d, &e, WeightConvention::Weighted));
        prop_assert_eq!(filtered::j_exact(&s, WeightConvention::Unweighted), brute_j(&d, &e, WeightConvention::Unweighted));
    }

    #[test]
    fn unweighted_dominates_cumulatively((d, _e) in shape(), max in 0usize..8) {
        let w = filtered::dj_table(&d, max, WeightConvention::Weighted);
        let u = filtered::dj_table(&d, max, WeightConvention::Unweighted);
        let (mut sw, mut su) = (BigInt::zero(), BigInt::zero());
        for i in 0..=max {
            sw += &w[i];
            su += &u[i];
            prop_assert!(su >= sw, "i = {}", i);
        }
    }

    #[test]
    fn witt_identity_in_genus(g in 2u32..8, depth in 1usize..30) {
        let dims = liedims::graded_dims(CurveType::ProjectiveGenus(g), depth).unwrap();
        let a = liedims::power_sums(CurveType::ProjectiveGenus(g), depth).unwrap();
        for n in 1..=depth {
            let s: BigInt = (1..=n).filter(|k| n % k == 0).map(|k| BigInt::from(k) * dims.get(k)).sum();
            prop_assert_eq!(&s, &a[n]);
        }
    }

    #[test]
    fn j_upper_dominates(r in 2u64..=30, ai in 0usize..3, bi in 0usize..3, n in 1usize..=6, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let consts = [BoundValue::from_int(2, 40), liedims::alpha_plus(2, 40), liedims::alpha_plus(3, 40)];
        let (alpha, beta) = (&consts[ai], &consts[bi]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        // floor(b^i / m)
        let floor = |b: &BoundValue, i: usize, m: i64| -> u64 {
            (b.powi(i as u32).lower() / int(m)).floor().to_integer().try_into().unwrap()
        };
        let mut d = vec![r];
        for i in 2..=n {
            d.push(rng.gen_range(0..=floor(alpha, i, 1)));
        }
        let e: Vec<u64> = (1..=n).map(|i| rng.gen_range(0..=floor(beta, i, i as i64))).collect();
        let s = FilteredShape::new(d, e).unwrap();
        let exact = filtered::j_exact(&s, WeightConvention::Weighted);
        let rb = BoundValue::from_int(r as i64, 40);
        match filtered::j_upper(&rb, alpha, beta, n as u32) {
            Ok(u) => prop_assert!(u.lower() >= &num_rational::BigRational::from_integer(exact.clone()), "{} vs {}", u, exact),
            Err(FilteredError::AmbiguousCase { .. }) => {}
            Err(other) => prop_assert!(false, "{}", other),
        }
    }
}

#[test]
fn dj_zero_without_variables() {
    let t = filtered::dj_table(&[0, 0, 0], 6, WeightConvention::Weighted);
    assert_eq!(t[0], BigInt::from(1));
    assert!(t[1..].iter().all(|x| x.is_zero()));
}
