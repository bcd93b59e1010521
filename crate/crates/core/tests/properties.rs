use kgred::io::*;
use kgred::poly::apply_box;
use kgred::scalars::{format_rational, parse_rational, rat, UPoly};
use kgred::states::state_explicit;
use kgred::{Metric, MultiIndex, Poly, Rational, RationalFn, WeylElement};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn small_rat() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, q)| rat(p, q))
}

fn upoly(max_len: usize) -> impl Strategy<Value = UPoly> {
    prop::collection::vec(small_rat(), 0..=max_len).prop_map(UPoly::new)
}

fn rfn() -> impl Strategy<Value = RationalFn> {
    (upoly(3), upoly(3)).prop_filter_map("zero denominator", |(p, q)| RationalFn::new(p, q).ok())
}

fn weyl(n: usize) -> impl Strategy<Value = WeylElement> {
    let term = (
        prop::collection::vec(0u32..=2, n),
        prop::collection::vec(0u32..=2, n),
        small_rat(),
    );
    prop::collection::vec(term, 0..=3).prop_map(move |ts| {
        let mut w = WeylElement::zero(n);
        for (x, d, c) in ts {
            w.add_term((MultiIndex(x), MultiIndex(d)), c);
        }
        w
    })
}

fn poly(n: usize) -> impl Strategy<Value = Poly> {
    let term = (prop::collection::vec(0u32..=3, n), small_rat());
    prop::collection::vec(term, 0..=4).prop_map(move |ts| {
        Poly::from_terms(n, ts.into_iter().map(|(e, c)| (MultiIndex(e), c))).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in rfn(), b in rfn(), c in rfn()) {
        prop_assert_eq!((a.clone() + b.clone()) + c.clone(), a.clone() + (b.clone() + c.clone()));
        prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
        prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c);
        prop_assert_eq!(a.clone() - a.clone(), RationalFn::zero());
        if !a.is_zero() {
            prop_assert_eq!(a.clone() * a.inv().unwrap(), RationalFn::one());
        }
    }

    #[test]
    fn shifts_compose(g in rfn(), s in small_rat(), t in small_rat()) {
        prop_assert_eq!(g.shift(&s).shift(&t), g.shift(&(s + t)));
    }

    #[test]
    fn canonical_form_ignores_common_factors(p in upoly(3), q in upoly(2), k in upoly(2)) {
        prop_assume!(!q.is_zero() && !k.is_zero());
        let direct = RationalFn::new(p.clone(), q.clone()).unwrap();
        let kk = RationalFn::poly(k);
        let widened = (RationalFn::poly(p) * kk.clone()).checked_div(&(RationalFn::poly(q) * kk)).unwrap();
        prop_assert_eq!(direct, widened);
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in rfn(), b in rfn(), h in small_rat()) {
        if let (Ok(x), Ok(y)) = (a.eval(&h), b.eval(&h)) {
            prop_assert_eq!((a.clone() * b.clone()).eval(&h).unwrap(), x.clone() * y.clone());
            prop_assert_eq!((a + b).eval(&h).unwrap(), x + y);
        }
    }

    #[test]
    fn weyl_product_is_associative(u in weyl(3), v in weyl(3), w in weyl(3)) {
        let l = u.mul(&v).unwrap().mul(&w).unwrap();
        let r = u.mul(&v.mul(&w).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn weyl_action_is_a_representation(u in weyl(3), v in weyl(3), p in poly(3)) {
        let uv = u.mul(&v).unwrap();
        prop_assert_eq!(uv.apply(&p).unwrap(), u.apply(&v.apply(&p).unwrap()).unwrap());
    }

    #[test]
    fn star_is_an_involutive_antihomomorphism(u in weyl(3), v in weyl(3)) {
        prop_assert_eq!(u.star().star(), u.clone());
        prop_assert_eq!(u.mul(&v).unwrap().star(), v.star().mul(&u.star()).unwrap());
    }

    #[test]
    fn states_are_harmonic(word in prop::collection::vec(0usize..4, 0..=5), pick in 0usize..2) {
        let m = if pick == 0 { Metric::euclidean(4).unwrap() } else { Metric::minkowski(4).unwrap() };
        let s = state_explicit(&m, &word).unwrap();
        prop_assert!(apply_box(&m, &s).unwrap().is_zero());
        prop_assert_eq!(s.homogeneous_degree().unwrap() as usize, word.len());
    }

    #[test]
    fn json_round_trips(f in rfn(), p in poly(3), w in weyl(3), r in small_rat()) {
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        let fj: RationalFnJson = serde_json::from_str(&serde_json::to_string(&rfn_to_json(&f)).unwrap()).unwrap();
        prop_assert_eq!(rfn_from_json(&fj).unwrap(), f);
        prop_assert_eq!(poly_from_json(&poly_to_json(&p)).unwrap(), p);
        prop_assert_eq!(weyl_from_json(&weyl_to_json(&w)).unwrap(), w);
    }
}
