use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn apm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apm")).args(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("apm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn lines(path: &PathBuf) -> Vec<Value> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn summary(path: &PathBuf) -> Value {
    lines(path).into_iter().find(|v| v["record"] == "summary").unwrap()
}

#[test]
fn builtin_round_trips_through_a_file() {
    let out = apm(&["builtin", "lands-mini"]);
    assert!(out.status.success());
    let file = scratch("lands.json");
    std::fs::write(&file, &out.stdout).unwrap();
    let parsed: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["name"], "lands-mini");

    let (a, b) = (scratch("a.ndjson"), scratch("b.ndjson"));
    assert_eq!(
        apm(&["solve", "lands-mini", "--out", a.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        apm(&["solve", file.to_str().unwrap(), "--out", b.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
    let (sa, sb) = (summary(&a), summary(&b));
    assert_eq!(sa["z_upper"], sb["z_upper"]);
    assert_eq!(sa["x"], sb["x"]);
}

#[test]
fn output_is_reproducible() {
    let (a, b) = (scratch("r1.ndjson"), scratch("r2.ndjson"));
    for p in [&a, &b] {
        let o = apm(&["solve", "prodmix", "--eps", "0.05", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let recs = lines(&a);
    let s = summary(&a);
    assert_eq!(s["status"], "converged");
    assert_eq!(s["iterations"], 9);
    assert_eq!(recs.iter().filter(|v| v["record"] == "iteration").count(), 9);
    assert!((s["z_upper"].as_f64().unwrap() + 17711.57).abs() < 0.01);
}

#[test]
fn exit_codes() {
    assert_eq!(apm(&["solve", "prodmix", "--max-iter", "1"]).status.code(), Some(2));
    assert_eq!(apm(&["solve", "deterministic"]).status.code(), Some(0));
    let o = apm(&["solve", "no-such-instance"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown builtin"));
    assert_eq!(apm(&["solve", "prodmix", "--eps=-1"]).status.code(), Some(1));
    assert_eq!(apm(&["solve", "prodmix", "--bogus"]).status.code(), Some(1));
    assert_eq!(apm(&["--version"]).status.code(), Some(0));
    assert_eq!(apm(&["builtin", "nope"]).status.code(), Some(1));
}

#[test]
fn bad_files_name_the_offending_field() {
    let out = apm(&["builtin", "cvar-discrete"]);
    let mut v: Value = serde_json::from_slice(&out.stdout).unwrap();
    v["distribution"]["payload"]["atoms"][0]["weight"] = Value::from("x");
    let f = scratch("bad-weight.json");
    std::fs::write(&f, v.to_string()).unwrap();
    let o = apm(&["solve", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("distribution.payload.atoms[0].weight"));

    // payload ahead of its tag
    let mut sorted = serde_json::Map::new();
    sorted.insert("payload".into(), v["distribution"]["payload"].clone());
    sorted.insert("type".into(), v["distribution"]["type"].clone());
    v["distribution"] = Value::Object(sorted);
    let text = v.to_string();
    assert!(text.find("\"payload\"").unwrap() < text.find("\"type\"").unwrap());
    let f = scratch("bad-weight-sorted.json");
    std::fs::write(&f, text).unwrap();
    let o = apm(&["solve", f.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("distribution.payload.atoms[0].weight"));

    let f = scratch("bad-field.json");
    std::fs::write(&f, r#"{"name":"x","bogus":1}"#).unwrap();
    let o = apm(&["solve", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown field `bogus`"));
}

#[test]
fn infeasible_iterates_need_cuts() {
    let f = scratch("incomplete.json");
    std::fs::write(
        &f,
        r#"{
  "name": "incomplete",
  "first_stage": {"c": [-1.0, 0.0], "A": [[1.0, 1.0]], "b": [2.0]},
  "recourse": {"W": [[1.0]], "q": [1.0]},
  "distribution": {"type": "atoms", "payload": {"atoms": [
    {"T": [[1.0, 0.0]], "h": [1.0], "weight": 0.5},
    {"T": [[1.0, 0.0]], "h": [1.5], "weight": 0.5}
  ]}}
}"#,
    )
    .unwrap();
    let o = apm(&["solve", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    let out = scratch("incomplete.ndjson");
    let o = apm(&[
        "solve",
        f.to_str().unwrap(),
        "--feasibility",
        "cuts",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!((summary(&out)["z_upper"].as_f64().unwrap() + 0.75).abs() < 1e-6);
}

#[test]
fn reference_modes() {
    let mv = scratch("mv.ndjson");
    let o = apm(&[
        "solve",
        "cvar-discrete",
        "--mode",
        "meanvalue",
        "--out",
        mv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let s = summary(&mv);
    assert_eq!(s["mode"], "meanvalue");
    assert!(s["z_lower"].as_f64().unwrap() <= s["z_upper"].as_f64().unwrap());

    let saa = scratch("saa.ndjson");
    let o = apm(&[
        "solve",
        "lands-mini",
        "--mode",
        "saa-ref",
        "--samples",
        "100",
        "--replications",
        "3",
        "--out",
        saa.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("SAA mean"));
    let recs = lines(&saa);
    assert_eq!(recs.iter().filter(|v| v["record"] == "replication").count(), 3);
    assert_eq!(summary(&saa)["mode"], "saa-ref");

    let o = apm(&["solve", "lands-mini", "--mode", "saa-ref", "--replications", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn partition_dump() {
    let p = scratch("part.ndjson");
    let o = apm(&[
        "solve",
        "cvar-discrete",
        "--show-partition",
        "--partition-out",
        p.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("lineage"));
    let cells = lines(&p);
    let table_rows = stdout
        .lines()
        .skip_while(|l| !l.contains("lineage"))
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .count();
    assert_eq!(cells.len(), table_rows);
    let mass: f64 = cells.iter().map(|c| c["prob"].as_f64().unwrap()).sum();
    assert!((mass - 1.0).abs() < 1e-9);
}
