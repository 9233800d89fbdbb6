use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn problem(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../problems")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_congruence"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn structured(args: &[&str]) -> (Value, i32) {
    let mut full = vec!["--format", "structured"];
    full.extend_from_slice(args);
    let out = run(&full);
    let v = serde_json::from_slice(&out.stdout).expect("structured output is JSON");
    (v, out.status.code().unwrap())
}

fn text_map(args: &[&str]) -> BTreeMap<String, String> {
    let out = run(args);
    String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| {
            let (k, v) = l.split_once(": ").expect("text lines are `key: value`");
            (k.to_string(), v.to_string())
        })
        .collect()
}

/// Reads `O/pi^a (+) O/pi (+) O^r` back into exponents and free rank.
fn parse_module(s: &str) -> (Vec<u64>, u64) {
    let mut torsion = Vec::new();
    let mut free = 0;
    if s == "0" {
        return (torsion, free);
    }
    for part in s.split(" (+) ") {
        if let Some(e) = part.strip_prefix("O/pi") {
            torsion.push(e.strip_prefix('^').map_or(1, |e| e.parse().unwrap()));
        } else if part == "O" {
            free = 1;
        } else {
            free = part.strip_prefix("O^").unwrap().parse().unwrap();
        }
    }
    (torsion, free)
}

/// Every leaf of the structured record appears with the same value in the
/// text rendering; finite modules are compared through their invariants.
fn assert_same_data(v: &Value, path: &str, text: &BTreeMap<String, String>) {
    let join = |k: &str| {
        if path.is_empty() {
            k.to_string()
        } else {
            format!("{path}.{k}")
        }
    };
    match v {
        Value::Object(m) if m.contains_key("torsion_exponents") => {
            let (t, r) = parse_module(&text[path]);
            let expected: Vec<u64> = m["torsion_exponents"]
                .as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_u64().unwrap())
                .collect();
            assert_eq!(t, expected, "{path}");
            assert_eq!(r, m["free_rank"].as_u64().unwrap(), "{path}");
        }
        Value::Object(m) if !m.is_empty() => {
            for (k, x) in m {
                assert_same_data(x, &join(k), text);
            }
        }
        Value::Array(a) if !a.is_empty() => {
            for (i, x) in a.iter().enumerate() {
                assert_same_data(x, &format!("{path}[{i}]"), text);
            }
        }
        Value::Object(_) => assert_eq!(text[path], "{}"),
        Value::Array(_) => assert_eq!(text[path], "[]"),
        Value::Null => assert_eq!(text[path], "none", "{path}"),
        Value::String(s) => assert_eq!(&text[path], s, "{path}"),
        other => assert_eq!(text[path], other.to_string(), "{path}"),
    }
}

#[test]
fn analyze_a2() {
    let f = problem("a2.toml");
    let (v, code) = structured(&["analyze", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    let r = &v["result"]["modules"]["ring"];
    assert_eq!(r["eta"], "(pi^2)");
    assert_eq!(r["psi"]["text"], "O/pi^2");
    assert_eq!(r["phi"]["torsion_exponents"], serde_json::json!([2]));
    assert_eq!(r["verdicts"]["wld"], "holds");
}

#[test]
fn analyze_regular_ring_is_trivial() {
    let f = problem("line.toml");
    let (v, code) = structured(&["analyze", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    let r = &v["result"]["modules"]["ring"];
    assert_eq!(r["eta"], "(1)");
    assert_eq!(r["psi"]["text"], "0");
    assert_eq!(r["phi"]["text"], "0");
    assert_eq!(r["fitt_c"], "(1)");
    assert_eq!(r["regularity"]["regular_global"], true);
}

#[test]
fn deform_cylinder() {
    let f = problem("cylinder.toml");
    let (v, code) = structured(&["deform", f.to_str().unwrap(), "--element", "y"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["lhs"], 3);
    assert_eq!(v["result"]["rhs"], 3);
    assert_eq!(v["result"]["exact_sequence_holds"], true);
}

#[test]
fn text_and_structured_agree() {
    let cases: Vec<Vec<String>> = vec![
        vec!["analyze".into(), problem("a2_module.toml").display().to_string()],
        vec!["analyze".into(), problem("ring_b.toml").display().to_string()],
        vec!["lattice".into(), problem("ramanujan.toml").display().to_string()],
        vec![
            "serre".into(),
            problem("cylinder.toml").display().to_string(),
            "--products".into(),
        ],
        vec![
            "probe-fitting-question".into(),
            "--count".into(),
            "6".into(),
            "--seed".into(),
            "11".into(),
        ],
    ];
    for args in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (v, _) = structured(&args);
        let text = text_map(&args);
        assert_same_data(&v, "", &text);
    }
}

#[test]
fn structured_output_is_deterministic() {
    for args in [
        vec!["--format", "structured", "probe-fitting-question", "--count", "16", "--seed", "5"],
        vec!["--format", "structured", "--seed", "5", "probe-fitting-question", "--count", "16"],
    ] {
        let a = run(&args).stdout;
        let b = run(&args).stdout;
        assert!(!a.is_empty());
        assert_eq!(a, b);
    }
    let f = problem("two_branches.toml");
    let args = ["--format", "structured", "analyze", f.to_str().unwrap()];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn exit_codes() {
    let b = problem("ring_b.toml");
    assert_eq!(run(&["analyze", b.to_str().unwrap()]).status.code(), Some(1));

    let c = problem("cylinder.toml");
    let out = run(&["--degree-bound", "1", "eta", c.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    let out = run(&["eta", "/nonexistent/problem.toml"]);
    assert_eq!(out.status.code(), Some(2));

    let a = problem("a2.toml");
    let out = run(&["psi", a.to_str().unwrap(), "--module", "missing"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["criterion", a.to_str().unwrap(), "--mode", "sideways"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn parse_errors_carry_positions() {
    let dir = std::env::temp_dir().join(format!("congruence-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.toml");
    std::fs::write(
        &path,
        "[dvr]\nkind = \"p_adic\"\np = 5\n\n[ring]\nvars = [\"x\"]\nrelations = [\"x*(x - pi^2\"]\n\n[augmentation]\nvalues = { x = \"0\" }\ncodim = 0\n",
    )
    .unwrap();
    let out = run(&["eta", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad.toml:7:"), "{err}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn invariance_under_killing_a_branch() {
    let a = problem("two_branches.toml");
    let b = problem("a2.toml");
    let (v, code) = structured(&[
        "invariance",
        a.to_str().unwrap(),
        "--target",
        b.to_str().unwrap(),
        "--map",
        "x -> x, y -> 0",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["eta_source"], "(pi^2)");
    assert_eq!(v["result"]["eta_target"], "(pi^2)");
}
