use chabauty_core::bounds::{self, BoundReport, BoundsError, FamilyParams, Threshold, TwistVariant};
use chabauty_core::exactnum::{int, rat};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;

fn ceiling_contract(rep: &BoundReport) {
    let n = BigRational::from_integer(rep.min_n.clone());
    match &rep.threshold {
        Threshold::Exact(t) => {
            if t >= &BigRational::one() || rep.min_n > BigInt::one() {
                assert!(&n > t && &(n.clone() - int(1)) <= t, "{}: {} vs {t}", rep.name, rep.min_n);
            } else {
                assert_eq!(rep.min_n, BigInt::one());
            }
        }
        Threshold::Enclosure(v) => {
            assert!(&n > v.upper(), "{}", rep.name);
            assert!(&(n - int(1)) <= v.upper(), "{}", rep.name);
        }
    }
}

fn value(rep: &BoundReport) -> BigRational {
    match &rep.threshold {
        Threshold::Exact(q) => q.clone(),
        Threshold::Enclosure(v) => v.lower().clone(),
    }
}

#[test]
fn mg_identity_sweep() {
    for g in 4..=50 {
        let rep = bounds::mg_bound(g, g - 3).unwrap();
        assert_eq!(rep.threshold, Threshold::Exact(int(21 * g * g - 30 * g)));
        assert_eq!(rep.min_n, BigInt::from(21 * g * g - 30 * g + 1));
    }
    assert_eq!(bounds::mg_bound(10, 7).unwrap().threshold, Threshold::Exact(int(1800)));
    assert_eq!(bounds::mg_bound(4, 1).unwrap().min_n, BigInt::from(217));
}

#[test]
fn spot_values() {
    let r = bounds::stoll_zp(2, 1, 1).unwrap();
    assert_eq!((value(&r), r.min_n.clone()), (int(3), BigInt::from(4)));
    assert_eq!(bounds::stoll_zp(5, 2, 3).unwrap().threshold, Threshold::Exact(rat(17, 4)));
    assert!(bounds::padic_zp_check(2, 2, 3, 1).unwrap());
    assert!(!bounds::padic_zp_check(2, 2, 3, 2).unwrap());
    assert!(!bounds::padic_zp_check(2, 1, 0, 0).unwrap());
    assert!(bounds::padic_zp_check(2, 0, 1, 0).is_err());

    let rows = bounds::classical_rows(1, None, None, 50).unwrap();
    let ev = rows.iter().find(|r| r.name == "evertse").unwrap();
    assert_eq!(ev.threshold, Threshold::Exact(int(50421)));

    let rows = bounds::bad_reduction_rows(4, 1, 0, 0).unwrap();
    assert_eq!(value(&rows[0]), rat(5, 3));
    assert_eq!(value(&rows[1]), int(2));
    assert_eq!(value(&rows[2]), rat(112, 3));
    assert_eq!(bounds::stable_graph_caps(2).unwrap(), (2, 3));

    assert_eq!(bounds::gonality_check(4, 2, 0, 4).unwrap(), (true, int(4)));
    assert_eq!(bounds::gonality_check(4, 2, 0, 3).unwrap(), (false, int(4)));
    assert_eq!(bounds::gonality_check(5, 1, 1, 1).unwrap(), (true, int(0)));

    assert_eq!(bounds::degeneracy_codim(3, 2, 1, 0).unwrap(), BigInt::from(9));
    assert_eq!(bounds::degeneracy_codim(4, 5, 0, 4).unwrap(), BigInt::from(0));
}

#[test]
fn transcendental_rows() {
    let six = bounds::sunit_bound(6, 50).unwrap();
    let seven = bounds::sunit_bound(7, 50).unwrap();
    assert!(six.valid && !bounds::sunit_bound(5, 50).unwrap().valid);
    assert!(value(&seven) > value(&six));
    let f = six.threshold.approx_f64();
    assert!((f / 7.048e12 - 1.0).abs() < 1e-3, "{f}");

    let cv = int(1);
    let t23 = bounds::twist_bound(2, 23, &cv, TwistVariant::Statement, 50).unwrap();
    assert!(t23.valid);
    assert!(!bounds::twist_bound(2, 22, &cv, TwistVariant::Statement, 50).unwrap().valid);
    let a = bounds::twist_bound(2, 30, &cv, TwistVariant::Statement, 50).unwrap();
    let b = bounds::twist_bound(2, 30, &cv, TwistVariant::Expanded, 50).unwrap();
    assert!(value(&b) >= value(&a));
    for rep in [&six, &seven, &t23, &a, &b] {
        ceiling_contract(rep);
    }
}

#[test]
fn validity_windows() {
    assert!(matches!(bounds::thm1_smooth(&FamilyParams::new(4, 0, 3, 0)), Err(BoundsError::Validity(_))));
    assert!(matches!(bounds::thm1_stable(&FamilyParams::new(4, 0, 2, 0)), Err(BoundsError::Validity(_))));
    assert!(bounds::stoll_zp(1, 0, 0).is_err());
    assert!(bounds::bad_reduction_rows(3, 0, 1, 0).is_err());
}

proptest! {
    #[test]
    fn every_rational_row_honours_the_ceiling(g in 2i64..20, s in 0i64..40, r in 0i64..20, d in 0i64..5) {
        prop_assume!(d <= r);
        for rep in bounds::rational_table(&FamilyParams::new(g, s, r, d)) {
            ceiling_contract(&rep);
        }
    }

    #[test]
    fn monotone_in_s(g in 3i64..20, s in 0i64..40, r in 0i64..17, d in 0i64..3) {
        prop_assume!(d <= r && r <= g - 3);
        let p0 = FamilyParams::new(g, s, r, d);
        let p1 = FamilyParams::new(g, s + 1, r, d);
        prop_assert!(value(&bounds::thm1_smooth(&p1).unwrap()) >= value(&bounds::thm1_smooth(&p0).unwrap()));
        prop_assert!(value(&bounds::thm1_stable(&p1).unwrap()) >= value(&bounds::thm1_stable(&p0).unwrap()));
        prop_assert!(value(&bounds::stoll_zp(g, s + 1, r).unwrap()) >= value(&bounds::stoll_zp(g, s, r).unwrap()));
    }

    #[test]
    fn monotone_in_r(g in 4i64..20, s in 0i64..40, r in 0i64..16, d in 0i64..3) {
        prop_assume!(d <= r && r < g - 3);
        let p0 = FamilyParams::new(g, s, r, d);
        let p1 = FamilyParams::new(g, s, r + 1, d);
        prop_assert!(value(&bounds::thm1_smooth(&p1).unwrap()) >= value(&bounds::thm1_smooth(&p0).unwrap()));
        prop_assert!(value(&bounds::thm1_stable(&p1).unwrap()) >= value(&bounds::thm1_stable(&p0).unwrap()));
        prop_assert!(value(&bounds::stoll_zp(g, s, r + 1).unwrap()) >= value(&bounds::stoll_zp(g, s, r).unwrap()));
    }

    #[test]
    fn transcendental_monotone(s in 6i64..40, r in 23i64..120) {
        let a = bounds::sunit_bound(s, 30).unwrap();
        let b = bounds::sunit_bound(s + 1, 30).unwrap();
        prop_assert!(value(&b) >= value(&a));
        let cv = int(2);
        let t0 = bounds::twist_bound(2, r, &cv, TwistVariant::Statement, 30).unwrap();
        let t1 = bounds::twist_bound(2, r + 1, &cv, TwistVariant::Statement, 30).unwrap();
        prop_assert!(value(&t1) >= value(&t0));
        ceiling_contract(&a);
        ceiling_contract(&t0);
    }
}
