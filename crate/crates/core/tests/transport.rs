use chabauty_core::exactnum::{int, rat, QMatrix};
use chabauty_core::padic::{parse_poly, RationalRing, TruncSeries};
use chabauty_core::transport::{
    self, ConnectionForm, QSeries, SeriesMatrix, SingularResidue, TransportError,
};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

fn xy() -> Vec<String> {
    vec!["x".to_string(), "y".to_string()]
}

/// Random polynomial in `vars` with zero constant term and small rational coefficients.
fn random_poly(rng: &mut ChaCha8Rng, vars: &[String], cap: u32) -> QSeries {
    let terms: Vec<(Vec<u32>, BigRational)> = (0..rng.gen_range(0..=4))
        .filter_map(|_| {
            let m: Vec<u32> = vars.iter().map(|_| rng.gen_range(0..=3)).collect();
            let deg: u32 = m.iter().sum();
            (deg > 0 && deg <= cap).then(|| (m, rat(rng.gen_range(-5..=5), rng.gen_range(1..=3))))
        })
        .collect();
    TruncSeries::from_rational_terms(RationalRing, vars.to_vec(), cap, &terms).unwrap()
}

/// Lower unipotent gauge with `G(0) = 1`.
fn random_gauge(rng: &mut ChaCha8Rng, dim: usize, vars: &[String], cap: u32) -> SeriesMatrix {
    let mut g = SeriesMatrix::identity(dim, vars, cap);
    for i in 0..dim {
        for j in 0..i {
            g.set(i, j, random_poly(rng, vars, cap));
        }
    }
    g
}

fn qm(rows: &[&[i64]]) -> QMatrix {
    rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn gauge_connections_transport_to_their_gauge(seed in any::<u64>(), dim in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_gauge(&mut rng, dim, &xy(), 6);
        let conn = ConnectionForm::from_gauge(&g).unwrap();
        prop_assert!(transport::flatness_check(&conn).unwrap().flat);
        let h = transport::parallel_transport(&conn, None).unwrap().h;
        prop_assert_eq!(&h, &g.truncate(conn.cap()));
        prop_assert_eq!(transport::horizontality_residual(&conn, &h).unwrap(), None);
        prop_assert_eq!(&transport::axis_transport(&conn, &[0, 1], None).unwrap(), &h);
        prop_assert_eq!(&transport::axis_transport(&conn, &[1, 0], None).unwrap(), &h);
    }

    #[test]
    fn lower_caps_are_truncations(seed in any::<u64>(), m in 1u32..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let conn = ConnectionForm::from_gauge(&random_gauge(&mut rng, 3, &xy(), 9)).unwrap();
        let low = transport::parallel_transport(&conn, Some(m)).unwrap().h;
        let high = transport::parallel_transport(&conn, None).unwrap().h;
        prop_assert_eq!(low, high.truncate(m));
    }
}

#[test]
fn order_above_cap_is_rejected() {
    let conn = transport::demo_family(4);
    assert!(matches!(transport::parallel_transport(&conn, Some(5)), Err(TransportError::Domain(_))));
}

#[test]
fn perturbed_section_is_not_horizontal() {
    let conn = transport::demo_family(6);
    let mut h = transport::parallel_transport(&conn, None).unwrap().h;
    let bump = parse_poly(RationalRing, conn.vars(), 6, "x^3").unwrap();
    h.set(1, 0, h.get(1, 0).add(&bump).unwrap());
    assert_eq!(transport::horizontality_residual(&conn, &h).unwrap(), Some(2));
}

#[test]
fn transport_commutes_with_pullback() {
    let t = vec!["t".to_string()];
    let cap = 8;
    let a = SeriesMatrix::from_json(
        &json!([["0", "0", "0"], ["1 + t", "0", "0"], ["t^2", "2 - t", "0"]]),
        &t,
        cap,
    )
    .unwrap();
    let conn = ConnectionForm::new(vec![a.clone()], Vec::new()).unwrap();
    let h = transport::parallel_transport(&conn, None).unwrap().h;

    // phi(u) = 2u + u^2, pulled back connection A(phi) phi' du
    let phi = parse_poly(RationalRing, &t, cap, "2*t + t^2").unwrap();
    let dphi = phi.diff(0).unwrap();
    let composed = a.compose(std::slice::from_ref(&phi)).unwrap().truncate(cap - 1);
    let rows = (0..3)
        .map(|i| (0..3).map(|j| composed.get(i, j).mul(&dphi).unwrap()).collect())
        .collect();
    let pulled = ConnectionForm::new(vec![SeriesMatrix::from_rows(rows).unwrap()], Vec::new()).unwrap();
    let hp = transport::parallel_transport(&pulled, None).unwrap().h;
    let want = h.compose(std::slice::from_ref(&phi)).unwrap().truncate(hp.cap());
    assert_eq!(hp, want);
}

#[test]
fn zero_residue_leaves_transport_alone() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = random_gauge(&mut rng, 3, &xy(), 5);
    let z = SingularResidue { var: 1, n: qm(&[&[0, 0, 0], &[0, 0, 0], &[0, 0, 0]]) };
    assert_eq!(transport::log_singular_transport(&[z], &g).unwrap(), g);
}

#[test]
fn commuting_residues_factor() {
    let vars = xy();
    let cap = 5;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let g = random_gauge(&mut rng, 3, &vars, cap);
    // N1 = E10 + E21 and N2 = N1^2 = E20 commute
    let n1 = SingularResidue { var: 0, n: qm(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0]]) };
    let n2 = SingularResidue { var: 1, n: qm(&[&[0, 0, 0], &[0, 0, 0], &[1, 0, 0]]) };
    let id = SeriesMatrix::identity(3, &vars, cap);
    let e1 = transport::log_singular_transport(std::slice::from_ref(&n1), &id).unwrap();
    let e2 = transport::log_singular_transport(std::slice::from_ref(&n2), &id).unwrap();
    let both = transport::log_singular_transport(&[n1, n2], &g).unwrap();
    let gl = g.with_logs();
    assert_eq!(both, e1.mul(&e2).unwrap().mul(&gl).unwrap());
    assert_eq!(both, e2.mul(&e1).unwrap().mul(&gl).unwrap());

    // exp(N1 L) = 1 + N1 L + N1^2 L^2 / 2
    let l = QSeries::log_symbol(RationalRing, vars.clone(), cap, 0);
    let half_l2 = l.mul(&l).unwrap().scale(&rat(1, 2));
    assert_eq!(e1.get(1, 0), &l);
    assert_eq!(e1.get(2, 1), &l);
    assert_eq!(e1.get(2, 0), &half_l2);
    assert_eq!(e1.get(0, 0).constant_term(), int(1));
}

#[test]
fn noncommuting_residues_are_rejected() {
    let id = SeriesMatrix::identity(3, &xy(), 4);
    let a = SingularResidue { var: 0, n: qm(&[&[0, 0, 0], &[1, 0, 0], &[0, 0, 0]]) };
    let b = SingularResidue { var: 1, n: qm(&[&[0, 0, 0], &[0, 0, 0], &[0, 1, 0]]) };
    assert!(matches!(transport::log_singular_transport(&[a, b], &id), Err(TransportError::Domain(_))));
}

#[test]
fn residue_functional_and_quotient() {
    let vars = vec!["u".to_string(), "s".to_string()];
    let z = SeriesMatrix::zero(3, 3, &vars, 3);
    let n0 = SingularResidue { var: 0, n: qm(&[&[0, 0, 0], &[2, 0, 0], &[3, 0, 0]]) };
    let n1 = SingularResidue { var: 1, n: qm(&[&[0, 0, 0], &[1, 0, 0], &[0, 0, 0]]) };
    let conn = ConnectionForm::new(vec![z.clone(), z], vec![n0, n1]).unwrap();
    let r = transport::residue_functional(&conn, 0).unwrap();
    assert_eq!(r.functional, vec![int(2), int(3)]);
    assert_eq!(r.stoll_projection.len(), 1);
    let v = &r.stoll_projection[0];
    assert_eq!(&v[0] * int(2) + &v[1] * int(3), int(0));
    assert!(v.iter().any(|x| x != &int(0)));
    assert!(r.horizontal);
}

#[test]
fn json_round_trip_with_residues() {
    let vars = xy();
    let a = SeriesMatrix::from_json(&json!([["0", "0"], ["1/3 + y", "0"]]), &vars, 4).unwrap();
    let b = SeriesMatrix::from_json(&json!([["0", "0"], ["x", "0"]]), &vars, 4).unwrap();
    let n = SingularResidue { var: 1, n: vec![vec![int(0), int(0)], vec![rat(-5, 7), int(0)]] };
    let conn = ConnectionForm::new(vec![a, b], vec![n]).unwrap();
    let back = ConnectionForm::from_json(&conn.to_json()).unwrap();
    assert_eq!(back, conn);
    let text = serde_json::to_string(&conn.to_json()).unwrap();
    let reparsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(ConnectionForm::from_json(&reparsed).unwrap(), conn);
}

#[test]
fn evaluation_needs_integral_unipotent_data() {
    let t = vec!["t".to_string()];
    let pt = |x: i64| transport::padic_point(&[x], 5, 6).unwrap();
    let fifths = SeriesMatrix::from_json(&json!([["0", "0"], ["1/5", "0"]]), &t, 6).unwrap();
    let res = transport::parallel_transport(&ConnectionForm::new(vec![fifths], Vec::new()).unwrap(), None).unwrap();
    assert!(transport::transport_evaluate(&res, &pt(0), &pt(5)).is_err());
    let diag = SeriesMatrix::from_json(&json!([["1", "0"], ["0", "0"]]), &t, 6).unwrap();
    let res = transport::parallel_transport(&ConnectionForm::new(vec![diag], Vec::new()).unwrap(), None).unwrap();
    assert!(transport::transport_evaluate(&res, &pt(0), &pt(5)).is_err());
}
