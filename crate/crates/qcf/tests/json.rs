use num_bigint::BigInt;
use proptest::prelude::*;
use qcf::format::{
    decimal, elem_from_json, elem_json, matrix_from_json, matrix_json, point_from_json, point_json,
};
use qcf_core::exactfield::parse_elem;
use qcf_core::{CaseId, FieldElem, FieldId, GaussMap, ProjPoint};

const FIELDS: [FieldId; 5] = [FieldId::Sqrt2, FieldId::Sqrt3, FieldId::Tau, FieldId::Sqrt6, FieldId::Lambda7];

fn elem() -> impl Strategy<Value = FieldElem> {
    (0..FIELDS.len(), prop::collection::vec(-10_000i64..=10_000, 3), 1i64..=10_000).prop_map(|(i, num, den)| {
        let f = FIELDS[i];
        let num: Vec<BigInt> = num[..f.degree()].iter().map(|&n| BigInt::from(n)).collect();
        FieldElem::from_parts(f, num, BigInt::from(den)).unwrap()
    })
}

proptest! {
    #[test]
    fn element_roundtrip(x in elem()) {
        let v = elem_json(&x);
        let y = elem_from_json(&v, x.field()).unwrap();
        prop_assert_eq!(&y, &x);
        prop_assert_eq!(elem_json(&y), v);
        prop_assert_eq!(parse_elem(&x.to_string(), x.field()).unwrap(), x);
    }

    #[test]
    fn point_roundtrip(x in elem()) {
        let p = ProjPoint::from_elem(&x.abs());
        let v = point_json(&p);
        let q = point_from_json(&v, x.field()).unwrap();
        prop_assert_eq!(&q, &p);
        prop_assert_eq!(point_json(&q), v);
    }

    #[test]
    fn decimal_is_correctly_rounded(x in elem()) {
        let d: f64 = decimal(&x, 6).parse().unwrap();
        prop_assert!((d - x.to_f64()).abs() <= 5e-7 + 1e-9 * x.to_f64().abs());
    }
}

#[test]
fn matrix_roundtrip() {
    for c in CaseId::ALL {
        let g = GaussMap::build(c).unwrap();
        for m in g.matrices() {
            let v = matrix_json(m);
            let n = matrix_from_json(&v, c.field()).unwrap();
            assert_eq!(&n, m);
            assert_eq!(matrix_json(&n), v);
        }
    }
}

#[test]
fn infinity_and_malformed() {
    let f = FieldId::Sqrt2;
    let inf = ProjPoint::infinity(f);
    assert_eq!(point_json(&inf), serde_json::json!("inf"));
    assert_eq!(point_from_json(&point_json(&inf), f).unwrap(), inf);
    assert!(point_from_json(&serde_json::json!(["1"]), f).is_err());
    assert!(point_from_json(&serde_json::json!(["1", "0"]), f).is_ok());
    assert!(elem_from_json(&serde_json::json!({"coords": [["1", "0"], ["0", "1"]]}), f).is_err());
    assert!(elem_from_json(&serde_json::json!({"coords": [["1", "2"]]}), f).is_err());
}

#[test]
fn decimal_ties_and_signs() {
    let f = FieldId::Tau;
    let q = |s: &str| parse_elem(s, f).unwrap();
    assert_eq!(decimal(&q("1/8"), 2), "0.13");
    assert_eq!(decimal(&q("-1/8"), 2), "-0.13");
    assert_eq!(decimal(&q("-1/1000"), 2), "0.00");
    assert_eq!(decimal(&q("tau"), 6), "1.618034");
    assert_eq!(decimal(&q("-tau"), 0), "-2");
}
