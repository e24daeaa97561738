use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mcpoint_core::curve::parse_table_notation;
use mcpoint_core::multiplicity::{decompose, EpsilonPolicy};
use mcpoint_core::newform::NewformStore;
use mcpoint_core::points::{count_points, genus, hws_bound, real_weil_poly_of_curve, FieldSize};
use mcpoint_core::scanner::format_coeffs;

fn example(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/examples").join(name)
}

fn mcpoint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcpoint"))
        .args(args)
        .env_remove("MCPOINT_FIXTURES")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn count_matches_library() {
    let fx = example("x6_7.json");
    let store = NewformStore::load(&fx).unwrap();
    for notation in ["(6,7){1,2;3}", "(6,7){2;3}", "(6,7){1}", "(6,7){1;2;3}"] {
        let c = parse_table_notation(notation).unwrap();
        let d = decompose(&c, &store, EpsilonPolicy::OldformPlusOne).unwrap();
        let out = mcpoint(&["count", "--curve", notation, "--q", "5", "--q", "11^3", "--fixtures", path(&fx)]);
        assert!(out.status.success());
        let expected: Vec<String> = ["5", "11^3"]
            .iter()
            .map(|q| {
                let r = count_points(&d, q.parse().unwrap()).unwrap();
                format!(
                    "curve={c} q={q} genus={} count={} maximal={} bound={}",
                    r.genus, r.count, r.maximal, r.hws_bound
                )
            })
            .collect();
        assert_eq!(stdout(&out).lines().collect::<Vec<_>>(), expected);
    }
}

#[test]
fn genus_decompose_and_weil() {
    let fx = example("x6_7.json");
    let out = mcpoint(&["decompose", "--curve", "(6,7){3;2}", "--fixtures", path(&fx)]);
    assert_eq!(
        stdout(&out),
        "label=98.2.a.b dim=2 multiplicity=1\n\
         label=147.2.a.d dim=2 multiplicity=2\n\
         label=294.2.a.e dim=1 multiplicity=1\n\
         curve=(6,7){2;3} genus=7 classes=3 dropped=12\n"
    );
    let out = mcpoint(&["genus", "--curve", "(6,7){3}", "--fixtures", path(&fx)]);
    let store = NewformStore::load(&fx).unwrap();
    let c = parse_table_notation("(6,7){3}").unwrap();
    let d = decompose(&c, &store, EpsilonPolicy::OldformPlusOne).unwrap();
    assert_eq!(stdout(&out), format!("curve=(6,7){{3}} genus={}\n", genus(&d)));

    let fx = example("x67_1.json");
    let store = NewformStore::load(&fx).unwrap();
    let c = parse_table_notation("(67,1){1}").unwrap();
    let d = decompose(&c, &store, EpsilonPolicy::OldformPlusOne).unwrap();
    let h = real_weil_poly_of_curve(&d, FieldSize::new(2, 1).unwrap()).unwrap();
    let out = mcpoint(&["weil", "--curve", "(67,1){1}", "--q", "2", "--fixtures", path(&fx)]);
    assert_eq!(stdout(&out), format!("curve=(67,1){{1}} q=2 genus=2 h_w={}\n", format_coeffs(&h)));
    assert_eq!(format_coeffs(&h), "[1,3,1]");
}

#[test]
fn bound_and_lattice() {
    let out = mcpoint(&["bound", "--genus", "12", "--q", "161051"]);
    let expected = hws_bound(12, FieldSize::new(11, 5).unwrap());
    assert_eq!(stdout(&out), format!("genus=12 q=11^5 bound={expected}\n"));
    assert_eq!(expected, 170676.into());

    let out = mcpoint(&["lattice", "--r", "2", "--data", r#"{"0":16,"1":6,"2":7,"3":2}"#, "--subgroup", "0b11"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "subset=0b0 coefficient=1\nsubset=0b1 coefficient=-1\nsubset=0b10 coefficient=-1\nsubset=0b11 coefficient=2\nvalue=7\n"
    );
}

#[test]
fn typeset_notation_is_accepted() {
    let fx = example("x156_1.json");
    let out = mcpoint(&["count", "--curve", r"(156,1)\{ 3 \}", "--q", "11^5", "--fixtures", path(&fx)]);
    assert_eq!(
        stdout(&out),
        "curve=(156,1){3} q=11^5 genus=12 count=170676 maximal=true bound=170676\n"
    );
}

#[test]
fn exit_codes() {
    let fx = example("x6_7.json");
    // usage errors
    for args in [
        vec!["count", "--curve", "(6,7){1}", "--q", "12"],
        vec!["count", "--curve", "(6,7){9}", "--q", "5"],
        vec!["count", "--curve", "(6,7){1}"],
        vec!["frobnicate"],
        vec!["bound", "--genus", "2", "--q", "2", "--verbose"],
    ] {
        let out = mcpoint(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    // bad reduction
    let out = mcpoint(&["count", "--curve", "(6,7){}", "--q", "7", "--fixtures", path(&fx)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: point-counter: "));
    // uncovered level
    let out = mcpoint(&["count", "--curve", "(67,1){}", "--q", "5", "--fixtures", path(&fx)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("multiplicity-engine"));
    // missing fixture file
    let out = mcpoint(&["genus", "--curve", "(6,7){}", "--fixtures", "/nonexistent/fx.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: newform-store"));
}

#[test]
fn scan_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scan.toml");
    std::fs::write(dir.path().join("bounds.csv"), "genus,q,bound\n7,11^5,166666\n").unwrap();
    std::fs::write(
        &config,
        format!(
            "max_n = 294\nprimes = [5, 11]\npairs = [[6, 7]]\nfixtures = {:?}\noutput = \"scan.csv\"\nbounds = \"bounds.csv\"\n",
            path(&example("x6_7.json"))
        ),
    )
    .unwrap();
    let out = mcpoint(&["scan", "--config", path(&config), "--threads", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("rows=160 skipped=0 computed=1 resumed=0"));
    let best = std::fs::read_to_string(dir.path().join("scan.best.csv")).unwrap();
    assert!(best.contains("7,11^5,166666,"));
    let records = std::fs::read_to_string(dir.path().join("scan.records.csv")).unwrap();
    assert!(records.lines().any(|l| l.starts_with("7,11^5,166666,166666,")));
    let maximal = std::fs::read_to_string(dir.path().join("scan.maximal.csv")).unwrap();
    assert!(maximal.contains("(6,7){1,2;3}"));

    let again = mcpoint(&["scan", "--config", path(&config)]);
    assert!(stdout(&again).contains("computed=0 resumed=1"));
}
