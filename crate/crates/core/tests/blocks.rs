//! Block families: certification, soundness of the all-parameter verdicts
//! against direct checks, completeness and height descent along orbits.

use core::cmp::Ordering;

use num_bigint::BigInt;
use qcf_core::blocks::{
    is_decreasing_block, split_orbit, verify_completeness, verify_family, BlockFamily, BlockPattern, Item, Variant,
};
use qcf_core::exactfield::FieldElem;
use qcf_core::gaussmaps::OrbitStatus;
use qcf_core::height::HeightSq;
use qcf_core::{CaseId, GaussMap, ProjPoint};
use rand::seq::IteratorRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn quadratic_cases() -> impl Iterator<Item = CaseId> {
    CaseId::ALL.into_iter().filter(|c| c.field().is_quadratic())
}

fn sample_word(p: &BlockPattern, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut w = Vec::new();
    for it in &p.items {
        match it {
            Item::ChooseFrom(s) => w.push(*s.iter().choose(rng).unwrap()),
            Item::Star(a) => w.extend(std::iter::repeat_n(*a, star_count(rng))),
            Item::Repeat { letter, min, max } => {
                let n = match max {
                    Some(m) => rng.gen_range(*min..=*m) as usize,
                    None => *min as usize + star_count(rng),
                };
                w.extend(std::iter::repeat_n(*letter, n));
            }
        }
    }
    w
}

fn star_count(rng: &mut ChaCha8Rng) -> usize {
    match rng.gen_range(0..4) {
        0 => 64,
        1 => rng.gen_range(0..=64),
        _ => rng.gen_range(0..=4),
    }
}

#[test]
fn corrected_tables_are_certified_and_complete() {
    for c in quadratic_cases() {
        let g = GaussMap::build(c).unwrap();
        let fam = BlockFamily::builtin(c).unwrap();
        let cert = verify_family(&g, &fam).unwrap();
        for p in &cert.patterns {
            assert!(p.ok, "{c}: `{}` fails at {:?}", p.pattern, p.counterexample);
        }
        let comp = verify_completeness(&g, &fam).unwrap();
        assert!(comp.complete, "{c}: lasso {:?}", comp.lasso);
    }
    let g = GaussMap::build(CaseId::C3_6).unwrap();
    let coarse = BlockFamily::variant(CaseId::C3_6, Variant::Coarse).unwrap();
    assert!(verify_family(&g, &coarse).unwrap().ok());
    assert!(verify_completeness(&g, &coarse).unwrap().complete);
}

#[test]
fn literal_tables_defects() {
    let check = |c: CaseId| {
        let g = GaussMap::build(c).unwrap();
        let fam = BlockFamily::literal(c).unwrap();
        let bad: Vec<Vec<usize>> =
            verify_family(&g, &fam).unwrap().patterns.into_iter().filter_map(|p| p.counterexample).collect();
        (bad, verify_completeness(&g, &fam).unwrap())
    };
    let (bad, comp) = check(CaseId::C4_6);
    assert_eq!(bad, vec![vec![12, 1, 6, 1]]);
    assert!(!comp.complete);
    let (bad, comp) = check(CaseId::C4_12);
    assert_eq!(bad, vec![vec![30, 1, 1]]);
    assert!(comp.complete);
    let (bad, comp) = check(CaseId::C3_6);
    assert!(bad.is_empty());
    assert!(!comp.complete);
    for c in [CaseId::C2_5, CaseId::C3_4, CaseId::C3_5, CaseId::C4Inf, CaseId::C5Inf, CaseId::C6Inf] {
        let (bad, comp) = check(c);
        assert!(bad.is_empty() && comp.complete, "{c}");
    }
    // the witnesses really are not decreasing
    let g = GaussMap::build(CaseId::C4_6).unwrap();
    assert!(!is_decreasing_block(&g, &[12, 1, 7, 1]).unwrap().is_decreasing());
    let g = GaussMap::build(CaseId::C4_12).unwrap();
    assert!(!is_decreasing_block(&g, &[30, 1, 1]).unwrap().is_decreasing());
}

#[test]
fn expanded_words_are_decreasing() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for c in quadratic_cases() {
        let g = GaussMap::build(c).unwrap();
        for p in BlockFamily::builtin(c).unwrap().patterns {
            assert!(p.matches(&sample_word(&p, &mut rng)));
            for _ in 0..12 {
                let w = sample_word(&p, &mut rng);
                let cert = is_decreasing_block(&g, &w).unwrap();
                assert!(cert.is_decreasing(), "{c}: `{p}` emits {w:?}");
            }
        }
    }
}

fn random_point(c: CaseId, rng: &mut ChaCha8Rng) -> ProjPoint {
    let f = c.field();
    let coords: Vec<BigInt> = (0..f.degree()).map(|_| BigInt::from(rng.gen_range(-10_000i64..=10_000))).collect();
    let x = FieldElem::from_parts(f, coords, BigInt::from(rng.gen_range(1i64..=10_000))).unwrap();
    ProjPoint::from_elem(&x.abs())
}

#[test]
fn heights_drop_across_blocks() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for c in quadratic_cases() {
        let g = GaussMap::build(c).unwrap();
        let fam = BlockFamily::builtin(c).unwrap();
        let (zero, one) = (ProjPoint::zero(g.field()), ProjPoint::one(g.field()));
        for _ in 0..25 {
            let x = random_point(c, &mut rng);
            let o = g.orbit(&x, 100_000).unwrap();
            assert!(matches!(o.status, OrbitStatus::FixedPointReached { period: 1 }), "{c} {x}: {:?}", o.status);
            let mut word = o.digits();
            let mut pts: Vec<ProjPoint> = o.steps.iter().map(|s| s.point.clone()).collect();
            word.push(g.digit(&o.final_point).unwrap());
            pts.push(o.final_point.clone());
            if word[0] == g.r() {
                continue;
            }
            let split = split_orbit(&fam, &word).unwrap();
            let b = &split.boundaries;
            for i in 1..b.len() {
                let (p, q) = (&pts[b[i - 1]], &pts[b[i]]);
                match HeightSq::of(p).cmp(&HeightSq::of(q)) {
                    Ordering::Greater => {}
                    Ordering::Equal => {
                        assert!(i == b.len() - 1 && *p == one && *q == zero, "{c} {x}: equal heights at {i}");
                    }
                    Ordering::Less => panic!("{c} {x}: height grows across block {i}"),
                }
            }
        }
    }
}
