use std::path::PathBuf;

use mcpoint_core::curve::parse_table_notation;
use mcpoint_core::multiplicity::{decompose, EpsilonPolicy};
use mcpoint_core::newform::NewformStore;
use mcpoint_core::points::{count_points, genus, real_weil_poly_of_curve, FieldSize};
use mcpoint_core::IntPoly;
use num_bigint::BigInt;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures/examples")
        .join(name)
}

fn store() -> NewformStore {
    NewformStore::load(&fixture("x6_7.json")).unwrap()
}

fn q(s: &str) -> FieldSize {
    s.parse().unwrap()
}

#[test]
fn level_contents() {
    let s = store();
    assert!(s.newforms_of_level(6).unwrap().is_empty());
    assert_eq!(s.newforms_of_level(147).unwrap().len(), 5);
    let total: usize = [1, 2, 3, 6, 49, 98, 147, 294]
        .iter()
        .map(|n| s.newforms_of_level(*n).unwrap().len())
        .sum();
    assert_eq!(total, 15);
    assert!(s.newforms_of_level(14).is_err());
}

#[test]
fn quotient_by_w6_w7() {
    let s = store();
    let c = parse_table_notation("(6,7){1,2;3}").unwrap();
    let dec = decompose(&c, &s, EpsilonPolicy::Strict).unwrap();
    assert_eq!(genus(&dec), 7);
    assert_eq!(dec.terms.len(), 4);
    assert!(dec.terms.iter().all(|t| t.multiplicity == 1));
    let r1 = count_points(&dec, q("11")).unwrap();
    assert_eq!(r1.count, BigInt::from(26));
    let r5 = count_points(&dec, q("11^5")).unwrap();
    assert_eq!(r5.count, BigInt::from(166666));
    assert!(r5.maximal);
    let h = real_weil_poly_of_curve(&dec, q("11")).unwrap();
    assert_eq!(h, IntPoly::linear(BigInt::from(-2)).pow(7));
}

#[test]
fn quotient_by_w3_w7() {
    let s = store();
    let c = parse_table_notation("(6,7){2;3}").unwrap();
    let dec = decompose(&c, &s, EpsilonPolicy::Strict).unwrap();
    assert_eq!(genus(&dec), 7);
    let mut ms: Vec<u64> = dec.terms.iter().map(|t| t.multiplicity).collect();
    ms.sort_unstable();
    assert_eq!(ms, vec![1, 1, 2]);
    assert_eq!(count_points(&dec, q("11")).unwrap().count, BigInt::from(19));
    assert_eq!(count_points(&dec, q("11^5")).unwrap().count, BigInt::from(166589));
}

#[test]
fn bad_reduction_is_an_error() {
    let s = store();
    let c = parse_table_notation("(6,7){}").unwrap();
    let dec = decompose(&c, &s, EpsilonPolicy::Strict).unwrap();
    assert!(count_points(&dec, q("7")).is_err());
}

#[test]
fn examples_agree_with_corpus() {
    let corpus_path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/corpus");
    let corpus = NewformStore::load(&corpus_path).unwrap();
    for name in ["x6_7.json", "x156_1.json", "x67_1.json"] {
        let ex = NewformStore::load(&fixture(name)).unwrap();
        for level in ex.coverage() {
            let a = ex.newforms_of_level(*level).unwrap();
            let b = corpus.newforms_of_level(*level).unwrap();
            assert_eq!(a.len(), b.len(), "{name}: level {level}");
            for (x, y) in a.iter().zip(b) {
                assert_eq!(x.label, y.label);
                assert_eq!(x.dim, y.dim);
                assert_eq!(x.al_signs, y.al_signs);
                for (p, c) in &x.hecke_charpolys {
                    assert_eq!(Some(c), y.hecke_charpolys.get(p), "{} at {p}", x.label);
                }
            }
        }
    }
}
