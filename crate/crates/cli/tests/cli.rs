//! End-to-end runs of the `vclab` binary: exit codes, pipelines and pinned
//! JSON schemas. Set `UPDATE_GOLDEN=1` to rewrite the schema files.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vclab"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("vclab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("VCLAB_BUDGET_NODES").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut a = args.to_vec();
    a.push("--json");
    let o = run(&a);
    (serde_json::from_str(&stdout(&o)).unwrap_or_else(|e| panic!("{e}: {}", stdout(&o))), code(&o))
}

/// Key paths with value kinds; array elements share the path `[]`.
fn schema(v: &Value, path: &str, out: &mut Vec<String>) {
    let kind = match v {
        Value::Null => "null",
        Value::Bool(_) => "bool",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    };
    out.push(format!("{path}: {kind}"));
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                schema(x, &format!("{path}.{k}"), out);
            }
        }
        Value::Array(a) => {
            for x in a {
                schema(x, &format!("{path}[]"), out);
            }
        }
        _ => {}
    }
}

fn check_golden(name: &str, v: &Value) {
    let mut lines = Vec::new();
    schema(v, "$", &mut lines);
    lines.sort();
    lines.dedup();
    let text = lines.join("\n") + "\n";
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.schema"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &text).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(text, want, "schema drift for {name}");
}

fn mz_file() -> PathBuf {
    let p = scratch("mz8.fam");
    let o = run(&["construct", "--kind", "mz", "--n", "8", "--d", "2", "--out", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    p
}

#[test]
fn construct_then_vcdim() {
    let p = mz_file();
    let o = run(&["vcdim", p.to_str().unwrap()]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "2"));
    let (v, c) = json(&["vcdim", p.to_str().unwrap()]);
    assert_eq!((c, v["vc_dimension"].as_u64(), v["size"].as_u64()), (0, Some(2), Some(22)));
    check_golden("vcdim", &v);
}

#[test]
fn audit_json_has_zero_deficiency() {
    let p = mz_file();
    let (v, c) = json(&["audit", p.to_str().unwrap(), "--J", "1,2"]);
    assert_eq!(c, 0);
    assert_eq!(v["deficiency"], 0);
    assert_eq!(v["holds"], true);
    check_golden("audit", &v);
}

#[test]
fn polycert_round_trip() {
    let p = mz_file();
    let cert = scratch("cert.json");
    let o = run(&["polycert", p.to_str().unwrap(), "--gamma", "12", "--out", cert.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = run(&["polycert", "--verify", cert.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    for key in ["n", "d", "gamma", "family_sha256", "witnesses", "yz_pairs", "matrix_side", "rank", "bound", "valid"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    check_golden("certificate", &v);

    // A tampered bound fails verification with exit 1.
    let mut bad = v.clone();
    bad["bound"] = Value::from(bad["bound"].as_i64().unwrap() + 1);
    let badp = scratch("bad.json");
    std::fs::write(&badp, bad.to_string()).unwrap();
    assert_eq!(code(&run(&["polycert", "--verify", badp.to_str().unwrap()])), 1);
}

#[test]
fn witness_violation_exits_one() {
    let p = scratch("full.fam");
    assert_eq!(code(&run(&["construct", "--kind", "complete", "--n", "6", "--d", "2", "--out", p.to_str().unwrap()])), 0);
    let (v, c) = json(&["witness", p.to_str().unwrap()]);
    assert_eq!((c, v["holds"].as_bool()), (1, Some(false)));
    let (v, c) = json(&["witness", mz_file().to_str().unwrap()]);
    assert_eq!(c, 0);
    check_golden("witness", &v);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&run(&["bogus"])), 2);
    assert_eq!(code(&run(&["vcdim", "/nonexistent/vclab.fam"])), 2);
    let p = scratch("broken.fam");
    std::fs::write(&p, "4 2\n1 9\n").unwrap();
    assert_eq!(code(&run(&["vcdim", p.to_str().unwrap()])), 2);
}

#[test]
fn search_and_budget() {
    let (v, c) = json(&["search", "--problem", "switness", "--n", "7", "--d", "2", "--s", "1"]);
    assert_eq!((c, v["size"].as_u64()), (0, Some(15)));
    assert_eq!(v["exceeds_conjectured_bound"], false);
    check_golden("search", &v);

    let o = bin()
        .args(["search", "--problem", "switness", "--n", "8", "--d", "2", "--s", "1", "--json"])
        .env("VCLAB_BUDGET_NODES", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["incomplete"], true);
    assert!(v["lower_bound"].as_u64().unwrap() >= 21);

    let (v, c) = json(&["search", "--problem", "intersecting", "--n", "7", "--k", "3", "--nontrivial"]);
    assert_eq!((c, v["size"].as_u64()), (0, Some(13)));
}

#[test]
fn hunt_is_seeded_and_finds_nothing() {
    let a = run(&["hunt", "--n", "7", "--d", "2", "--s", "1", "--seed", "5", "--json"]);
    let b = run(&["hunt", "--n", "7", "--d", "2", "--s", "1", "--seed", "5", "--json", "--threads", "2"]);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
    let v: Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert!(v["counterexample"].is_null());
    check_golden("hunt", &v);
}

#[test]
fn random_construction_depends_only_on_seed() {
    let a = run(&["construct", "--kind", "mz", "--n", "9", "--d", "2", "--assignment", "random", "--seed", "3"]);
    let b = run(&["construct", "--kind", "mz", "--n", "9", "--d", "2", "--assignment", "random", "--seed", "3"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn remaining_subcommands_emit_stable_json() {
    let p = mz_file();
    let f = p.to_str().unwrap();
    let (v, c) = json(&["links", f]);
    assert_eq!((c, v["holds"].as_bool()), (0, Some(true)));
    check_golden("links", &v);
    let (v, c) = json(&["links", f, "--v", "1"]);
    assert_eq!(c, 0);
    check_golden("link_pair", &v);
    let (v, c) = json(&["transversal", f, "--s", "1"]);
    assert_eq!(c, 0);
    check_golden("transversal", &v);
    let (v, c) = json(&["shadow", f, "--s", "2"]);
    assert_eq!(c, 0);
    check_golden("shadow", &v);
    let (v, c) = json(&["kk", f]);
    assert_eq!((c, v["holds"].as_bool()), (0, Some(true)));
    check_golden("kk", &v);
    let (v, c) = json(&["kk", "--m", "10", "--k", "3", "--s", "2"]);
    assert_eq!((c, v["min_shadow"].as_str()), (0, Some("10")));
    let (v, c) = json(&["sunflower", f, "--r", "3"]);
    assert_eq!(c, 0);
    check_golden("sunflower", &v);
    let (v, c) = json(&["sunflower", f, "--audit"]);
    assert_eq!((c, v["holds"].as_bool()), (0, Some(true)));
    check_golden("sunflower_audit", &v);

    // Star at 10 with each member's smaller non-centre element as witness.
    let mut text = String::from("10 3\n");
    for a in 1..10 {
        for b in a + 1..10 {
            text.push_str(&format!("{a} {b} 10 | {a}\n"));
        }
    }
    let s1 = scratch("s1.fam");
    std::fs::write(&s1, text).unwrap();
    let (v, c) = json(&["audit", s1.to_str().unwrap(), "--s1"]);
    assert_eq!(c, 0, "{v}");
    check_golden("s1", &v);
}
