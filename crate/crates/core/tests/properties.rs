use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use crmodel::algebra::{Monomial, Scalar, SparsePoly, Weight};
use crmodel::model::{validate_model, WeightVector};
use crmodel::report::{analyze, parse_expr, AnalysisReport, AnalyzeOptions, ModelSource};
use crmodel::structure::{balanced_test, diagonal_reproducing, lemtub_coefficients, lemtub_residual, CoordinateChange};
use crmodel::tangency::{residual_for, VectorField};

fn scalar() -> impl Strategy<Value = Scalar> {
    (-5i64..=5, 1i64..=4, -5i64..=5)
        .prop_map(|(a, d, b)| Scalar::new(BigRational::new(a.into(), d.into()), BigRational::from_integer(b.into())))
}

fn nonzero_scalar() -> impl Strategy<Value = Scalar> {
    scalar().prop_filter("nonzero", |c| c.norm_sqr() != BigRational::from_integer(0.into()))
}

fn poly(n: usize) -> impl Strategy<Value = SparsePoly> {
    let mono = (prop::collection::vec(0u32..3, n), prop::collection::vec(0u32..3, n), 0u32..2, 0u32..2)
        .prop_map(|(alpha, beta, p, q)| Monomial { alpha, beta, p, q });
    prop::collection::vec((mono, scalar()), 0..6).prop_map(move |ts| SparsePoly::from_terms(n, ts))
}

fn holo(n: usize) -> impl Strategy<Value = SparsePoly> {
    let mono = (prop::collection::vec(0u32..3, n), 0u32..2).prop_map(move |(alpha, p)| Monomial { alpha, beta: vec![0; n], p, q: 0 });
    prop::collection::vec((mono, scalar()), 0..4).prop_map(move |ts| SparsePoly::from_terms(n, ts))
}

/// `Σ ε_j |z_j|^{2 k_j}` with weights `1/(2 k_j)` in descending order.
fn diagonal_model() -> impl Strategy<Value = (SparsePoly, WeightVector)> {
    prop::collection::vec((1u32..=3, prop::bool::ANY), 1..=3).prop_map(|mut blocks| {
        blocks.sort_by_key(|b| b.0);
        let n = blocks.len();
        let mut p = SparsePoly::zero(n);
        let mut ws = Vec::new();
        for (j, (k, neg)) in blocks.iter().enumerate() {
            let t = (&SparsePoly::z(n, j) * &SparsePoly::zbar(n, j)).pow(*k);
            p = if *neg { &p - &t } else { &p + &t };
            ws.push(Weight::new(1, 2 * *k as i64));
        }
        (p, WeightVector::new(ws))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn display_parses_back(p in poly(2)) {
        prop_assert_eq!(parse_expr(&p.to_string(), 2).unwrap(), p);
    }

    #[test]
    fn residual_is_real_linear(f1 in holo(2), f2 in holo(2), g in holo(2), c in scalar()) {
        // The residual takes a real part, so only real scalars factor out.
        let c = Scalar::real(c.re);
        let p = parse_expr("Re(z1*conj(z2)^3)", 0).unwrap();
        let w = Weight::new(0, 1);
        let a = VectorField::new(vec![f1.clone(), f2.clone()], g.clone(), w);
        let b = VectorField::new(vec![f2, g], f1, w);
        let lhs = residual_for(&a.add(&b.scale(&c)), &p);
        let rhs = &residual_for(&a, &p) + &residual_for(&b, &p).scale(&c);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn coordinate_changes_invert(c in nonzero_scalar(), h in holo(2), f1 in holo(2), f2 in holo(2), g in holo(2)) {
        let h = h.partition(|m| m.p == 0).0;
        let changes = vec![
            CoordinateChange::scale_z(2, 0, &c),
            CoordinateChange::translate_z(2, 0, &SparsePoly::z(2, 1).pow(2)),
            CoordinateChange::shift_w(2, &h),
        ];
        let y = VectorField::new(vec![f1, f2], g, Weight::new(0, 1));
        let fwd = crmodel::structure::forward_all(&changes, &y);
        prop_assert_eq!(crmodel::structure::pullback_all(&changes, &fwd), y);
    }

    #[test]
    fn diagonal_models_are_balanced((p, w) in diagonal_model()) {
        let m = validate_model(&p, &w).unwrap();
        let cert = balanced_test(&m).expect("diagonal sums are balanced");
        prop_assert!(cert.check(&p));
        prop_assert!(diagonal_reproducing(&p).is_some());
    }

    #[test]
    fn reports_round_trip_and_stay_consistent((p, w) in diagonal_model()) {
        let src = ModelSource { text: format!("Im w = {p}"), declared_weights: Some(w) };
        let r = analyze(&src, &AnalyzeOptions { skip_embedding: true, ..AnalyzeOptions::default() }).unwrap();
        prop_assert_eq!(AnalysisReport::from_json(&r.to_json()).unwrap(), r.clone());
        if let Some(v) = &r.verdict {
            prop_assert_eq!(v.one_jet_determined, !v.balanced && !v.chain_hypersurface);
        }
        if let Some(d) = &r.decomposition {
            prop_assert!(d.g1_dim() <= 1);
            for y in d.all_fields() {
                prop_assert!(residual_for(y, &r.polynomial).is_zero());
            }
        }
    }

    #[test]
    fn lemtub_identity_holds(m in 1u32..=10) {
        let alpha = lemtub_coefficients(m).unwrap();
        prop_assert!(lemtub_residual(m, &alpha).is_zero());
    }
}
