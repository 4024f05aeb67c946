//! Exact scalar and sparse polynomial arithmetic.
//!
//! Polynomials live in `z_1..z_n, z̄_1..z̄_n, w, w̄`. Restricting to the model
//! `w = u + iP` is done by [`substitute_w`], which writes the real variable
//! `u = Re w` as `(w + w̄)/2`; identities in `z, z̄, u` are then identities in
//! the larger ring, and the map is injective, so zero tests are unaffected.

pub mod poly;
pub mod scalar;

use std::collections::BTreeMap;

pub use poly::{Monomial, SparsePoly, Var, Weight};
pub use scalar::{parse_rational, rat, rat_int, rat_to_string, rational_str, rational_vec_str, Rational, Scalar};

use crate::error::{Error, Result};

pub fn conjugate(p: &SparsePoly) -> SparsePoly {
    p.conjugate()
}

pub fn partial(p: &SparsePoly, v: Var) -> SparsePoly {
    p.partial(v)
}

/// `u = Re w` expressed as `(w + w̄)/2`.
pub fn re_w(n: usize) -> SparsePoly {
    (&SparsePoly::w(n) + &SparsePoly::wbar(n)).scale(&Scalar::from_frac(1, 2))
}

/// Replace `w` by `u + iP` and `w̄` by `u − iP`.
pub fn substitute_w(p: &SparsePoly, model: &SparsePoly) -> Result<SparsePoly> {
    if !model.is_real_type() {
        return Err(Error::InvalidModelPolynomial("substitution polynomial is not real".into()));
    }
    if !model.is_w_free() {
        return Err(Error::InvalidModelPolynomial("substitution polynomial depends on w".into()));
    }
    Ok(substitute_w_unchecked(p, model))
}

pub(crate) fn substitute_w_unchecked(p: &SparsePoly, model: &SparsePoly) -> SparsePoly {
    if p.is_w_free() {
        return p.clone();
    }
    let n = p.nvars();
    let w_sub = &re_w(n) + &model.scale(&Scalar::i());
    p.substitute(&SparsePoly::identity_z(n), &w_sub)
}

/// Group terms by κ = (p+q) + Σ(α_i+β_i)λ_i, increasing in κ.
pub fn weighted_components(p: &SparsePoly, lambdas: &[Weight]) -> Vec<(Weight, SparsePoly)> {
    group_by(p, |m| m.weighted_degree(lambdas))
}

/// Group terms by the weighted degree in `z` alone, increasing.
pub fn holo_weight_expansion(p: &SparsePoly, lambdas: &[Weight]) -> Vec<(Weight, SparsePoly)> {
    group_by(p, |m| m.holo_weight(lambdas))
}

fn group_by<F: Fn(&Monomial) -> Weight>(p: &SparsePoly, key: F) -> Vec<(Weight, SparsePoly)> {
    let mut parts: BTreeMap<Weight, SparsePoly> = BTreeMap::new();
    for (m, c) in p.terms() {
        parts.entry(key(m)).or_insert_with(|| SparsePoly::zero(p.nvars())).add_term(m.clone(), c);
    }
    parts.into_iter().collect()
}

/// True when every term has weighted degree `deg`.
pub fn is_homogeneous(p: &SparsePoly, lambdas: &[Weight], deg: Weight) -> bool {
    p.terms().all(|(m, _)| m.weighted_degree(lambdas) == deg)
}

/// All exponent vectors `a ∈ ℕⁿ` with `Σ a_i λ_i = target`, in lexicographic order.
pub fn exponents_of_weight(lambdas: &[Weight], target: Weight) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; lambdas.len()];
    fn rec(lambdas: &[Weight], i: usize, rem: Weight, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == lambdas.len() {
            if rem == Weight::from_integer(0) {
                out.push(cur.clone());
            }
            return;
        }
        let l = lambdas[i];
        let mut k = 0u32;
        loop {
            let used = l * Weight::from_integer(k as i64);
            if used > rem {
                break;
            }
            cur[i] = k;
            rec(lambdas, i + 1, rem - used, cur, out);
            if l == Weight::from_integer(0) {
                break;
            }
            k += 1;
        }
        cur[i] = 0;
    }
    if target >= Weight::from_integer(0) {
        rec(lambdas, 0, target, &mut cur, &mut out);
    }
    out
}

/// Holomorphic monomials `z^a w^k` of weighted degree `target` (w has weight one).
pub fn holo_monomials_of_weight(lambdas: &[Weight], target: Weight) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut k = 0i64;
    while Weight::from_integer(k) <= target {
        for a in exponents_of_weight(lambdas, target - Weight::from_integer(k)) {
            out.push(Monomial::holo(a, k as u32));
        }
        k += 1;
    }
    out.sort();
    out
}

/// Render a weight as `p` or `p/q`.
pub fn weight_to_string(w: &Weight) -> String {
    if w.is_integer() {
        w.numer().to_string()
    } else {
        format!("{}/{}", w.numer(), w.denom())
    }
}

/// Parse a weight written as `p` or `p/q`.
pub fn parse_weight(s: &str) -> Option<Weight> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<i64>().ok()?, d.trim().parse::<i64>().ok()?),
        None => (s.parse::<i64>().ok()?, 1),
    };
    (d != 0).then(|| Weight::new(n, d))
}

/// Serde adapter for a weight as a `"p/q"` string.
pub mod weight_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(w: &Weight, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&weight_to_string(w))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Weight, D::Error> {
        let s = String::deserialize(d)?;
        parse_weight(&s).ok_or_else(|| serde::de::Error::custom(format!("bad weight {s:?}")))
    }
}

/// Serde adapter for a list of weights as `"p/q"` strings.
pub mod weight_vec_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Weight], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(weight_to_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Weight>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| parse_weight(s).ok_or_else(|| serde::de::Error::custom(format!("bad weight {s:?}"))))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn w(a: i64, b: i64) -> Weight {
        Weight::new(a, b)
    }

    fn z(n: usize, j: usize) -> SparsePoly {
        SparsePoly::z(n, j)
    }

    fn zb(n: usize, j: usize) -> SparsePoly {
        SparsePoly::zbar(n, j)
    }

    #[test]
    fn conjugation_examples() {
        let p = (&z(2, 0) * &zb(2, 1)).scale(&Scalar::from_ints(1, 1));
        let expect = (&zb(2, 0) * &z(2, 1)).scale(&Scalar::from_ints(1, -1));
        assert_eq!(conjugate(&p), expect);
        let real = &(&z(1, 0) * &zb(1, 0)) + &SparsePoly::one(1);
        assert_eq!(conjugate(&real), real);
        assert_eq!(conjugate(&z(1, 0).pow(3)), zb(1, 0).pow(3));
    }

    #[test]
    fn partial_examples() {
        let p = &z(2, 0).pow(2) * &zb(2, 1);
        let expect = (&z(2, 0) * &zb(2, 1)).scale(&Scalar::from(2));
        assert_eq!(partial(&p, Var::Z(0)), expect);
        assert!(partial(&z(2, 0).pow(2), Var::Z(1)).is_zero());
        // ∂/∂z ((z+z̄)³/8) = 3(z+z̄)²/8
        let x = &z(1, 0) + &zb(1, 0);
        let p = x.pow(3).scale(&Scalar::from_frac(1, 8));
        assert_eq!(partial(&p, Var::Z(0)), x.pow(2).scale(&Scalar::from_frac(3, 8)));
    }

    #[test]
    fn substitute_w_examples() {
        let n = 1;
        let model = &z(n, 0) * &zb(n, 0);
        let u = re_w(n);
        let iw = model.scale(&Scalar::i());
        assert_eq!(substitute_w(&SparsePoly::w(n), &model).unwrap(), &u + &iw);
        // Im w restricts to P
        let im_w = SparsePoly::w(n).imag_part();
        assert_eq!(substitute_w(&im_w, &model).unwrap(), model);
        // w² → u² + 2iuP − P²
        let expect = &(&u.pow(2) + &(&u * &model).scale(&Scalar::from_ints(0, 2))) - &model.pow(2);
        assert_eq!(substitute_w(&SparsePoly::w(n).pow(2), &model).unwrap(), expect);
        let not_real = z(n, 0).pow(2);
        assert!(matches!(substitute_w(&SparsePoly::w(n), &not_real), Err(Error::InvalidModelPolynomial(_))));
    }

    #[test]
    fn weighted_component_examples() {
        let p = &z(1, 0) * &zb(1, 0);
        let parts = weighted_components(&p, &[w(1, 2)]);
        assert_eq!(parts, vec![(w(1, 1), p.clone())]);
        let q = &z(2, 0) * &zb(2, 1).pow(3);
        assert_eq!(weighted_components(&q, &[w(1, 4), w(1, 4)])[0].0, w(1, 1));
        let r = &SparsePoly::w(1) * &z(1, 0);
        assert_eq!(weighted_components(&r, &[w(1, 2)])[0].0, w(3, 2));
    }

    #[test]
    fn holo_expansion_examples() {
        let lam = [w(1, 4), w(1, 4)];
        let re_cubic = (&z(2, 0) * &zb(2, 1).pow(3)).real_part();
        let parts = holo_weight_expansion(&re_cubic, &lam);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].0, w(1, 4));
        assert_eq!(parts[0].1, (&z(2, 0) * &zb(2, 1).pow(3)).scale(&Scalar::from_frac(1, 2)));
        assert_eq!(parts[1].0, w(3, 4));
        let x2 = (&z(1, 0) + &zb(1, 0)).pow(2).scale(&Scalar::from_frac(1, 4));
        let parts = holo_weight_expansion(&x2, &[w(1, 2)]);
        let ws: Vec<_> = parts.iter().map(|p| p.0).collect();
        assert_eq!(ws, vec![w(0, 1), w(1, 2), w(1, 1)]);
    }

    #[test]
    fn division() {
        let n = 2;
        let d = &z(n, 0) + &z(n, 1);
        let q = &z(n, 0).pow(2) - &z(n, 1);
        let p = &d * &q;
        assert_eq!(p.exact_div(&d), Some(q));
        assert!((&p + &SparsePoly::one(n)).exact_div(&d).is_none());
    }

    #[test]
    fn monomial_enumeration() {
        let lam = [w(1, 2)];
        let ms = holo_monomials_of_weight(&lam, w(3, 2));
        // z³, z·w
        assert_eq!(ms.len(), 2);
        assert_eq!(exponents_of_weight(&[w(1, 4), w(1, 4)], w(1, 2)).len(), 3);
    }

    fn arb_poly(n: usize) -> impl Strategy<Value = SparsePoly> {
        let term =
            (proptest::collection::vec(0u32..3, n), proptest::collection::vec(0u32..3, n), 0u32..2, 0u32..2, -4i64..5, -3i64..4, 1i64..4);
        proptest::collection::vec(term, 0..5).prop_map(move |ts| {
            SparsePoly::from_terms(
                n,
                ts.into_iter().map(|(a, b, p, q, re, im, d)| (Monomial { alpha: a, beta: b, p, q }, Scalar::new(rat(re, d), rat(im, d)))),
            )
        })
    }

    fn arb_real_poly(n: usize) -> impl Strategy<Value = SparsePoly> {
        arb_poly(n).prop_map(|p| {
            let (_, wfree) = p.partition(|m| !m.is_w_free());
            wfree.real_part()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_axioms(a in arb_poly(2), b in arb_poly(2), c in arb_poly(2)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn conjugation_is_involutive_automorphism(a in arb_poly(2), b in arb_poly(2)) {
            prop_assert_eq!(a.conjugate().conjugate(), a.clone());
            prop_assert_eq!((&a * &b).conjugate(), &a.conjugate() * &b.conjugate());
            prop_assert_eq!((&a + &b).conjugate(), &a.conjugate() + &b.conjugate());
            prop_assert!(a.real_part().is_real_type());
        }

        #[test]
        fn leibniz(a in arb_poly(2), b in arb_poly(2)) {
            for v in [Var::Z(0), Var::Zbar(1), Var::W] {
                let lhs = partial(&(&a * &b), v);
                let rhs = &(&partial(&a, v) * &b) + &(&a * &partial(&b, v));
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn substitution_chain_rule(p in arb_poly(2), model in arb_real_poly(2)) {
            // ∂/∂z̄_j (p|_{w=u+iP}) = (p_z̄j + i p_w P_z̄j − i p_w̄ P_z̄j)|_{w=u+iP}
            let v = Var::Zbar(0);
            let lhs = partial(&substitute_w(&p, &model).unwrap(), v);
            let pz = partial(&p, v);
            let dp = partial(&model, v).scale(&Scalar::i());
            let rhs = &(&pz + &(&partial(&p, Var::W) * &dp)) - &(&partial(&p, Var::Wbar) * &dp);
            prop_assert_eq!(lhs, substitute_w(&rhs, &model).unwrap());
        }

        #[test]
        fn weighted_parts_partition(p in arb_poly(2)) {
            let lam = [Weight::new(1, 3), Weight::new(1, 4)];
            let parts = weighted_components(&p, &lam);
            let mut sum = SparsePoly::zero(2);
            for (k, part) in &parts {
                prop_assert!(is_homogeneous(part, &lam, *k));
                sum = &sum + part;
            }
            prop_assert_eq!(sum, p.clone());
            let total: usize = parts.iter().map(|(_, q)| q.len()).sum();
            prop_assert_eq!(total, p.len());
        }
    }
}
