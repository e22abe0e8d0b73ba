//! Property tests for field arithmetic, the projective action and heights.

use core::cmp::Ordering;

use num_bigint::BigInt;
use proptest::prelude::*;
use qcf_core::exactfield::{euclid_gcd, FieldElem, FieldId, Sign};
use qcf_core::height::HeightSq;
use qcf_core::{CaseId, GaussMap, ProjPoint};

fn field() -> impl Strategy<Value = FieldId> {
    prop::sample::select(FieldId::ALL.to_vec())
}

fn quadratic() -> impl Strategy<Value = FieldId> {
    prop::sample::select(FieldId::ALL.into_iter().filter(|f| f.is_quadratic()).collect::<Vec<_>>())
}

fn elem_in(f: FieldId, max: i64, max_den: i64) -> impl Strategy<Value = FieldElem> {
    (prop::collection::vec(-max..=max, f.degree()), 1..=max_den).prop_map(move |(c, d)| {
        FieldElem::from_parts(f, c.into_iter().map(BigInt::from).collect(), BigInt::from(d)).unwrap()
    })
}

fn elem() -> impl Strategy<Value = FieldElem> {
    field().prop_flat_map(|f| elem_in(f, 60, 12))
}

fn triple() -> impl Strategy<Value = (FieldElem, FieldElem, FieldElem)> {
    field().prop_flat_map(|f| (elem_in(f, 60, 12), elem_in(f, 60, 12), elem_in(f, 60, 12)))
}

fn integral_pair() -> impl Strategy<Value = (FieldElem, FieldElem)> {
    field().prop_flat_map(|f| (elem_in(f, 400, 1), elem_in(f, 400, 1)))
}

/// A point of `[0, inf]`.
fn point_in(f: FieldId) -> impl Strategy<Value = ProjPoint> {
    (elem_in(f, 10_000, 10_000), any::<bool>()).prop_map(|(x, inv)| {
        let x = x.abs();
        if inv && !x.is_zero() {
            ProjPoint::from_pair(FieldElem::one(x.field()), x).unwrap()
        } else {
            ProjPoint::from_elem(&x)
        }
    })
}

fn case() -> impl Strategy<Value = CaseId> {
    prop::sample::select(CaseId::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws((x, y, z) in triple()) {
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&(&x + &y) * &z, &(&x * &z) + &(&y * &z));
        prop_assert_eq!(&(&x - &y) + &y, x.clone());
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
    }

    #[test]
    fn automorphisms_are_ring_maps((x, y, _z) in triple()) {
        for j in 0..x.field().degree() {
            prop_assert_eq!((&x * &y).automorphism(j), &x.automorphism(j) * &y.automorphism(j));
            prop_assert_eq!((&x + &y).automorphism(j), &x.automorphism(j) + &y.automorphism(j));
        }
        prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
    }

    #[test]
    fn inverse_and_division(x in elem()) {
        prop_assume!(!x.is_zero());
        let one = FieldElem::one(x.field());
        prop_assert_eq!(&x * &x.inverse().unwrap(), one.clone());
        prop_assert_eq!(one.try_div(&x).unwrap(), x.inverse().unwrap());
    }

    #[test]
    fn sign_matches_floating_point(x in elem()) {
        let v = x.to_f64();
        if v.abs() > 1e-9 {
            prop_assert_eq!(x.sign(), if v > 0.0 { Sign::Positive } else { Sign::Negative });
        }
        for j in 0..x.field().degree() {
            let v = x.to_f64_at(j);
            if v.abs() > 1e-9 {
                prop_assert_eq!(x.sign_at(j) == Sign::Positive, v > 0.0);
            }
        }
    }

    #[test]
    fn cmp_real_is_a_total_order((x, y, z) in triple()) {
        prop_assert_eq!(x.cmp_real(&y), y.cmp_real(&x).reverse());
        if x.cmp_real(&y) != Ordering::Greater && y.cmp_real(&z) != Ordering::Greater {
            prop_assert_ne!(x.cmp_real(&z), Ordering::Greater);
        }
        prop_assert_eq!(x.cmp_real(&y) == Ordering::Equal, x == y);
    }

    #[test]
    fn gcd_divides_both((a, b) in integral_pair()) {
        prop_assume!(!(a.is_zero() && b.is_zero()));
        let g = euclid_gcd(&a, &b).unwrap();
        prop_assert!(a.try_div(&g).unwrap().is_integral());
        prop_assert!(b.try_div(&g).unwrap().is_integral());
    }

    #[test]
    fn action_is_a_homomorphism(c in case(), w in prop::collection::vec(0usize..64, 1..6), seed in 0usize..1000) {
        let g = GaussMap::build(c).unwrap();
        let letters: Vec<usize> = w.iter().map(|x| x % g.r() + 1).collect();
        let p = g.endpoints()[seed % (g.r() + 1)].clone();
        let m = g.word_matrix(&letters).unwrap();
        let mut q = p.clone();
        for &a in letters.iter().rev() {
            q = g.matrix(a).act(&q);
        }
        prop_assert_eq!(m.act(&p), q.clone());
        prop_assert_eq!(m.act_inverse(&q), p);
    }

    #[test]
    fn compare_matches_floating_point((p, q) in field().prop_flat_map(|f| (point_in(f), point_in(f)))) {
        let o = p.compare(&q).unwrap();
        prop_assert_eq!(o, q.compare(&p).unwrap().reverse());
        let (x, y) = (p.to_f64(), q.to_f64());
        if x.is_finite() && y.is_finite() && (x - y).abs() > 1e-9 * (1.0 + x.abs()) {
            prop_assert_eq!(o, x.partial_cmp(&y).unwrap());
        }
    }

    #[test]
    fn height_ignores_representative((p, s) in field().prop_flat_map(|f| (point_in(f), elem_in(f, 5, 1)))) {
        prop_assume!(!s.is_zero());
        let (a1, a2) = p.coords();
        let q = ProjPoint::from_pair(&s * a1, &s * a2).unwrap();
        prop_assert_eq!(HeightSq::of(&q), HeightSq::of(&p));
    }

    #[test]
    fn height_is_symmetric(p in quadratic().prop_flat_map(point_in)) {
        let (a1, a2) = p.coords();
        let h = HeightSq::of(&p);
        // inversion and Galois conjugation preserve the height
        let inv = ProjPoint::from_pair(a2.clone(), a1.clone()).unwrap();
        prop_assert_eq!(HeightSq::of(&inv), h.clone());
        let conj = ProjPoint::from_pair(a1.conj().unwrap(), a2.conj().unwrap()).unwrap();
        prop_assert_eq!(HeightSq::of(&conj), h.clone());
        prop_assert!(h.value().cmp_real(&FieldElem::one(p.field())) != Ordering::Less);
    }
}
