use std::path::{Path, PathBuf};

use mcpoint_core::multiplicity::EpsilonPolicy;
use mcpoint_core::newform::NewformStore;
use mcpoint_core::points::{hws_bound, FieldSize};
use mcpoint_core::scanner::{
    best_table, format_coeffs, maximal_table, read_rows_csv, scan, sidecar_path, ScanConfig,
    UpperBounds,
};
use num_bigint::BigInt;

fn examples() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/examples")
}

fn store() -> NewformStore {
    NewformStore::load(&examples()).unwrap()
}

fn config(dir: &Path, max_n: u64, primes: Vec<u64>, pairs: Option<Vec<[u64; 2]>>) -> ScanConfig {
    let mut cfg = ScanConfig::new(max_n, primes, examples(), dir.join("scan.csv"));
    cfg.pairs = pairs;
    cfg
}

fn q(s: &str) -> FieldSize {
    s.parse().unwrap()
}

#[test]
fn genus_seven_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), 294, vec![11], Some(vec![[6, 7]]));
    let out = scan(&cfg, &store()).unwrap();
    assert_eq!(out.rows.len(), 16 * 5);
    let row = out
        .rows
        .iter()
        .find(|r| r.curve.to_string() == "(6,7){1,2;3}" && r.q == q("11^5"))
        .unwrap();
    assert_eq!((row.genus, row.count.clone(), row.maximal), (7, BigInt::from(166666), true));
    assert_eq!(read_rows_csv(&cfg.output).unwrap(), out.rows);
    let csv = std::fs::read_to_string(&cfg.output).unwrap();
    assert!(csv.starts_with("curve,genus,p,k,count,maximal\n"));
    assert!(csv.contains("\"(6,7){1,2;3}\",7,11,5,166666,true\n"));
}

#[test]
fn genus_twelve_row() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path(), 156, vec![11], Some(vec![[156, 1]]));
    cfg.max_k_by_prime.insert("11".into(), 5);
    let out = scan(&cfg, &store()).unwrap();
    let row = out
        .rows
        .iter()
        .find(|r| r.curve.to_string() == "(156,1){3}" && r.q == q("11^5"))
        .unwrap();
    assert_eq!(row.genus, 12);
    assert_eq!(row.count, BigInt::from(170676));
    assert_eq!(row.count, hws_bound(12, q("11^5")));
    assert!(row.maximal);
}

#[test]
fn empty_prime_set_gives_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), 294, vec![], Some(vec![[6, 7]]));
    let out = scan(&cfg, &store()).unwrap();
    assert!(out.rows.is_empty());
    assert_eq!(
        std::fs::read_to_string(&cfg.output).unwrap(),
        "curve,genus,p,k,count,maximal\n"
    );
}

#[test]
fn uncovered_pairs_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), 30, vec![11], None);
    let out = scan(&cfg, &store()).unwrap();
    let skipped: Vec<(u64, u64)> = out.skips.iter().map(|s| (s.n0, s.n_ns)).collect();
    assert!(skipped.contains(&(5, 1)));
    assert!(skipped.contains(&(1, 5)));
    assert!(!skipped.contains(&(6, 1)));
    assert!(out.skips.iter().all(|s| s.reason.contains("not covered")));
    let sidecar = std::fs::read_to_string(sidecar_path(&cfg.output, "skips.json")).unwrap();
    assert!(sidecar.contains("\"n0\": 5"));
    // every scanned prime is coprime to n
    assert!(out.rows.iter().all(|r| r.curve.level().n() % r.q.p != 0));
}

#[test]
fn thread_count_does_not_change_output() {
    let store = store();
    let mut outputs = Vec::new();
    for threads in [1, 4] {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config(dir.path(), 300, vec![2, 5, 11, 13], None);
        cfg.threads = threads;
        scan(&cfg, &store).unwrap();
        outputs.push((
            std::fs::read(&cfg.output).unwrap(),
            std::fs::read(sidecar_path(&cfg.output, "skips.json")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn resume_recomputes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let store = store();
    let cfg = config(dir.path(), 294, vec![5, 11], Some(vec![[6, 7], [156, 1], [67, 1]]));
    let first = scan(&cfg, &store).unwrap();
    assert_eq!((first.computed, first.resumed), (3, 0));
    let bytes = std::fs::read(&cfg.output).unwrap();
    let second = scan(&cfg, &store).unwrap();
    assert_eq!((second.computed, second.resumed), (0, 3));
    assert_eq!(std::fs::read(&cfg.output).unwrap(), bytes);

    // a changed search space invalidates the journal
    let mut other = cfg.clone();
    other.primes = vec![5];
    let third = scan(&other, &store).unwrap();
    assert_eq!((third.computed, third.resumed), (3, 0));
}

#[test]
fn tables_from_level_67() {
    let dir = tempfile::tempdir().unwrap();
    let store = store();
    let cfg = config(dir.path(), 67, vec![2], Some(vec![[67, 1]]));
    let out = scan(&cfg, &store).unwrap();
    let row = out
        .rows
        .iter()
        .find(|r| r.curve.to_string() == "(67,1){1}" && r.q == q("2"))
        .unwrap();
    assert_eq!((row.genus, row.count.clone()), (2, BigInt::from(6)));
    assert!(!row.maximal);

    assert!(maximal_table(&out.rows, &store, EpsilonPolicy::default(), &UpperBounds::new())
        .unwrap()
        .iter()
        .all(|g| g.q != q("2") || g.genus != 2));

    let mut bounds = UpperBounds::new();
    bounds.insert(2, q("2"), BigInt::from(6));
    let groups = maximal_table(&out.rows, &store, EpsilonPolicy::default(), &bounds).unwrap();
    let g = groups.iter().find(|g| g.genus == 2 && g.q == q("2")).unwrap();
    assert_eq!(format_coeffs(&g.h_w), "[1,3,1]");
    assert_eq!(g.curves.iter().map(|c| c.to_string()).collect::<Vec<_>>(), ["(67,1){1}"]);

    let best = best_table(&out.rows, 2..=2, None);
    assert_eq!(best[0].count, BigInt::from(6));
}

#[test]
fn maximal_group_for_genus_seven() {
    let dir = tempfile::tempdir().unwrap();
    let store = store();
    let cfg = config(dir.path(), 294, vec![11], Some(vec![[6, 7]]));
    let out = scan(&cfg, &store).unwrap();
    let groups = maximal_table(&out.rows, &store, EpsilonPolicy::default(), &UpperBounds::new()).unwrap();
    let g = groups.iter().find(|g| g.genus == 7 && g.q == q("11^5")).unwrap();
    assert_eq!(g.curves.len(), 1);
    assert_eq!(g.curves[0].to_string(), "(6,7){1,2;3}");
    assert_eq!(g.count, BigInt::from(166666));
}
