//! Orbits, E-sets and the one-parameter analysis checked against direct
//! computation.

use core::cmp::Ordering;

use num_bigint::BigInt;
use proptest::prelude::*;
use qcf_core::exactfield::FieldElem;
use qcf_core::gaussmaps::OrbitStatus;
use qcf_core::height::HeightSq;
use qcf_core::sharpsets::{classify_point, e_sets, f_eval, t_of, HeightChange, Region};
use qcf_core::symbolic::family_analysis;
use qcf_core::{CaseId, FieldId, GaussMap, OrderedInterval, ProjPoint, UniMat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn quadratic_case() -> impl Strategy<Value = CaseId> {
    prop::sample::select(CaseId::ALL.into_iter().filter(|c| c.field().is_quadratic()).collect::<Vec<_>>())
}

fn point_in(f: FieldId, max: i64) -> impl Strategy<Value = ProjPoint> {
    (prop::collection::vec(-max..=max, f.degree()), 1..=max).prop_map(move |(c, d)| {
        let x = FieldElem::from_parts(f, c.into_iter().map(BigInt::from).collect(), BigInt::from(d)).unwrap();
        ProjPoint::from_elem(&x.abs())
    })
}

fn case_point() -> impl Strategy<Value = (CaseId, ProjPoint)> {
    prop::sample::select(CaseId::ALL.to_vec()).prop_flat_map(|c| (Just(c), point_in(c.field(), 10_000)))
}

fn word(r: usize, len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1..=r, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn orbit_replays((c, x) in case_point()) {
        let g = GaussMap::build(c).unwrap();
        let o = g.orbit(&x, 300).unwrap();
        let mut pts: Vec<ProjPoint> = o.steps.iter().map(|s| s.point.clone()).collect();
        pts.push(o.final_point.clone());
        prop_assert_eq!(&pts[0], &x);
        for (i, s) in o.steps.iter().enumerate() {
            prop_assert!(g.interval(s.digit).contains(&s.point).unwrap());
            prop_assert_eq!(g.inverse(s.digit).act(&s.point), pts[i + 1].clone());
            prop_assert_eq!(&s.h2, &HeightSq::of(&s.point));
        }
        // the digits so far locate x in their cylinder
        let prefix: Vec<usize> = o.digits().into_iter().take(12).collect();
        prop_assert!(g.cylinder(&prefix).unwrap().contains(&x).unwrap());
        if let OrbitStatus::FixedPointReached { period: 1 } = o.status {
            let (_, y) = g.step(&o.final_point).unwrap();
            prop_assert_eq!(y, o.final_point.clone());
        }
    }

    #[test]
    fn f_is_unimodal((c, w) in quadratic_case().prop_flat_map(|c| (Just(c), word(c.r(), 1..5))),
                     xs in prop::collection::vec(0u32..4000, 3)) {
        let g = GaussMap::build(c).unwrap();
        let m = g.word_matrix(&w).unwrap();
        let f = g.field();
        let pt = |n: u32| ProjPoint::from_pair(FieldElem::from_int(f, n), FieldElem::from_int(f, 1000)).unwrap();
        let mut xs: Vec<ProjPoint> = xs.into_iter().map(pt).collect();
        xs.sort_by(|p, q| p.compare(q).unwrap());
        let vals: Vec<FieldElem> = xs.iter().map(|x| f_eval(&m, x).unwrap()).collect();
        let one = ProjPoint::one(f);
        for i in 0..2 {
            let both_left = xs[i + 1].compare(&one).unwrap() != Ordering::Greater;
            let both_right = xs[i].compare(&one).unwrap() != Ordering::Less;
            if both_left {
                prop_assert_ne!(vals[i].cmp_real(&vals[i + 1]), Ordering::Greater);
            }
            if both_right {
                prop_assert_ne!(vals[i].cmp_real(&vals[i + 1]), Ordering::Less);
            }
        }
    }

    #[test]
    fn row_swap_keeps_t_and_f((c, w) in quadratic_case().prop_flat_map(|c| (Just(c), word(c.r(), 1..6)))) {
        let g = GaussMap::build(c).unwrap();
        let m = g.word_matrix(&w).unwrap();
        let [a, b, cc, d] = m.entries().map(Clone::clone);
        let s = UniMat::new(cc, d, a, b).unwrap();
        prop_assert_eq!(t_of(&m).unwrap(), t_of(&s).unwrap());
        for x in g.endpoints() {
            prop_assert_eq!(f_eval(&m, x).unwrap(), f_eval(&s, x).unwrap());
        }
        let (em, es) = (e_sets(&m).unwrap(), e_sets(&s).unwrap());
        prop_assert_eq!(em.esharp, es.esharp);
    }

    #[test]
    fn sharp_region_increases_height((c, w) in quadratic_case().prop_flat_map(|c| (Just(c), word(c.r(), 1..5))),
                                     seed in any::<u64>()) {
        let g = GaussMap::build(c).unwrap();
        let m = g.word_matrix(&w).unwrap();
        let e = e_sets(&m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..6 {
            let coords: Vec<BigInt> = (0..2).map(|_| BigInt::from(rng.gen_range(-2000i64..=2000))).collect();
            let x = FieldElem::from_parts(c.field(), coords, BigInt::from(rng.gen_range(1i64..=300))).unwrap().abs();
            let p = ProjPoint::from_elem(&x);
            let pc = classify_point(&m, &p).unwrap();
            prop_assert!(pc.consistent, "{} at {}", m, p);
            if e.region_of(&p).unwrap() == Region::Sharp {
                prop_assert_eq!(pc.change, HeightChange::Increase);
            }
        }
    }
}

/// `t(A P^k)`, the containments and the right end of `E#` from the symbolic
/// analysis agree with the matrices themselves.
#[test]
fn family_analysis_matches_direct_computation() {
    for (c, a) in [(CaseId::C2_5, 1), (CaseId::C2_5, 2), (CaseId::C3_6, 2), (CaseId::C3_6, 3), (CaseId::C4Inf, 6)] {
        let g = GaussMap::build(c).unwrap();
        let p = g.matrix(g.r());
        let intervals: Vec<OrderedInterval> = (1..=g.r()).map(|b| g.interval(b)).collect();
        let fa = family_analysis(g.matrix(a), p, &intervals).unwrap();
        for k in 0..=64u32 {
            let m = g.matrix(a).mul(&p.pow(k));
            let e = e_sets(&m).unwrap();
            assert_eq!(fa.t.eval(k as u64), e.t, "{c} a={a} k={k}");
            for (b, set) in &fa.containment {
                assert_eq!(set.contains(k as u64), e.closure_contains(&g.interval(*b)).unwrap(), "{c} a={a} b={b} k={k}");
            }
            if let Some(re) = &fa.right_end {
                if k as u64 >= re.from {
                    assert_eq!(re.end.at(g.field(), k as u64), e.esharp.as_ref().unwrap().hi, "{c} a={a} k={k}");
                }
            }
        }
    }
}

/// Cylinders of long random words are tiny.
#[test]
fn cylinders_shrink() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for c in CaseId::ALL {
        let g = GaussMap::build(c).unwrap();
        for _ in 0..10 {
            let w: Vec<usize> = (0..60).map(|_| rng.gen_range(1..=g.r())).collect();
            let d = g.cylinder(&w).unwrap().diameter_bound();
            assert!(d < 1e-6, "{c} {w:?}: {d}");
        }
    }
}
