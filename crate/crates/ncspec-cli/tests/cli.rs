use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

struct Docs {
    dir: TempDir,
}

impl Docs {
    fn new() -> Self {
        Docs { dir: tempfile::tempdir().unwrap() }
    }

    fn write(&self, name: &str, body: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    }
}

fn ncspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncspec")).args(args).output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

const Z6: &str = r#"{"schema_version": 1, "kind": "modular", "n": 6}"#;
const SKEW2: &str = r#"{"schema_version": 1, "kind": "skew_laurent", "nvars": 2, "lambda": [["2"]]}"#;

#[test]
fn ncspec_of_z6_is_a_diamond() {
    let d = Docs::new();
    let ring = d.write("z6.json", Z6);
    let out = ncspec(&["ncspec", "--ring", ring.to_str().unwrap(), "--format", "dot"]);
    assert!(out.status.success());
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.lines().filter(|l| l.contains("[label=")).count(), 4);
    assert_eq!(dot.lines().filter(|l| l.contains("->")).count(), 4);
}

#[test]
fn gamma_of_the_free_module_counts_monomials() {
    let d = Docs::new();
    let ring = d.write("skew2.json", SKEW2);
    let module = d.write("free.json", r#"{"schema_version": 1, "degrees": [0]}"#);
    let out = ncspec(&["proj-gamma", "--ring", ring.to_str().unwrap(), "--module", module.to_str().unwrap(), "--window", "0", "6"]);
    assert!(out.status.success());
    let r = report(&out);
    assert_eq!(r["status"], "pass");
    let dims: Vec<u64> = r["payload"]["degrees"].as_array().unwrap().iter().map(|g| g["dim"].as_u64().unwrap()).collect();
    assert_eq!(dims, (1..=7).collect::<Vec<_>>());
    assert_eq!(r["provenance"]["window"], serde_json::json!([0, 6]));
}

#[test]
fn serre_unit_on_a_free_module_passes() {
    let d = Docs::new();
    let ring = d.write("skew2.json", SKEW2);
    let module = d.write("free.json", r#"{"schema_version": 1, "degrees": [0, 1]}"#);
    let out = ncspec(&["serre-check", "--ring", ring.to_str().unwrap(), "--module", module.to_str().unwrap(), "--window", "0", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn identity_is_prim_and_the_merged_example_is_not() {
    let d = Docs::new();
    let m = d.write(
        "id.json",
        r#"{"schema_version": 1, "source": {"kind": "modular", "n": 6}, "target": {"kind": "modular", "n": 6}, "rule": {"kind": "identity"}}"#,
    );
    let out = ncspec(&["prim-check", "--morphism", m.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(report(&out)["payload"]["prim"], true);

    let out = ncspec(&["prim-check", "--example", "merged points"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["status"], "fail");
}

#[test]
fn commutative_checks_pass_on_z6() {
    let d = Docs::new();
    let ring = d.write("z6.json", Z6);
    for cmd in ["ring-validate", "semilattice", "spec", "embed", "exp"] {
        let out = ncspec(&[cmd, "--ring", ring.to_str().unwrap()]);
        assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn spec_of_a_matrix_ring_fails_with_the_error_name() {
    let d = Docs::new();
    let ring = d.write("m2.json", r#"{"schema_version": 1, "kind": "matrix", "base": "f2", "size": 2}"#);
    let out = ncspec(&["spec", "--ring", ring.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["error"]["name"], "NotCommutative");
}

#[test]
fn malformed_documents_are_reported() {
    let d = Docs::new();
    let unknown = d.write("unknown.json", r#"{"schema_version": 1, "kind": "modular", "n": 6, "colour": "red"}"#);
    let r = report(&ncspec(&["ring-validate", "--ring", unknown.to_str().unwrap()]));
    assert_eq!(r["error"]["name"], "SchemaViolation");
    assert!(r["error"]["message"].as_str().unwrap().contains("$.colour"));

    let broken = d.write("broken.json", "{\"schema_version\": 1,\n  \"kind\": }");
    let out = ncspec(&["ring-validate", "--ring", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["error"]["name"], "ParseError");
    assert!(r["error"]["message"].as_str().unwrap().contains("line 2"));

    let unversioned = d.write("unversioned.json", r#"{"kind": "modular", "n": 6}"#);
    assert_eq!(report(&ncspec(&["ring-validate", "--ring", unversioned.to_str().unwrap()]))["error"]["name"], "SchemaViolation");
}

#[test]
fn glue_and_qcoh_documents_run() {
    let d = Docs::new();
    let glue = d.write(
        "glue.json",
        r#"{"schema_version": 1, "pieces": [{"kind": "modular", "n": 6}, {"kind": "modular", "n": 6}],
            "gluings": [{"from": 0, "to": 1, "map": {"↓R_{0}": "↓R_{0}", "↓R_{2}": "↓R_{2}"}},
                        {"from": 1, "to": 0, "map": {"↓R_{0}": "↓R_{0}", "↓R_{2}": "↓R_{2}"}}]}"#,
    );
    let r = report(&ncspec(&["glue", "--datum", glue.to_str().unwrap()]));
    assert_eq!(r["status"], "pass");
    assert_eq!(r["payload"]["points"].as_array().unwrap().len(), 6);

    let qcoh = r#"{"schema_version": 1, "ring": {"kind": "modular", "n": 6}, "module": {"kind": "regular"}, "charts": [[1], [2]]"#;
    let good = d.write("qcoh.json", &format!("{qcoh}}}"));
    assert!(ncspec(&["qcoh-check", "--datum", good.to_str().unwrap()]).status.success());
    let scaled = d.write("scaled.json", &format!(r#"{qcoh}, "scale": [{{"from": 0, "to": 1, "by": 2}}]}}"#));
    let out = ncspec(&["qcoh-check", "--datum", scaled.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reports_are_deterministic() {
    let d = Docs::new();
    let ring = d.write("z6.json", Z6);
    let a = ncspec(&["ncspec", "--ring", ring.to_str().unwrap()]);
    let b = ncspec(&["ncspec", "--ring", ring.to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn dot_is_refused_where_there_is_no_graph() {
    let d = Docs::new();
    let ring = d.write("z6.json", Z6);
    let out = ncspec(&["spec", "--ring", ring.to_str().unwrap(), "--format", "dot"]);
    assert_eq!(out.status.code(), Some(2));
}
