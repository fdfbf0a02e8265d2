use std::fs;
use std::path::{Path, PathBuf};

use paraproduct::cli::{run, EXIT_INPUT, EXIT_OK, EXIT_RESOURCE, EXIT_VERIFY};
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["paraproduct"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn decompose_matches_golden_certificates() {
    for name in ["triangle", "chain"] {
        let (code, out, err) = call(&["decompose", s(&fixture(&format!("{name}.graph")))]);
        assert_eq!(code, EXIT_OK, "{err}");
        let golden = fs::read_to_string(fixture(&format!("{name}.cert.json"))).unwrap();
        assert_eq!(out, golden, "{name}");
    }
}

#[test]
fn decompose_writes_file_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c.json");
    let (code, out, _) = call(&["decompose", s(&fixture("triangle.graph")), "-o", s(&cert)]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("nodes: "));
    assert!(out.contains("measure trace: "));
    let (code, out, _) = call(&["verify", s(&cert)]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("pass: true"));
}

#[test]
fn mutated_certificate_fails_with_its_path() {
    let text = fs::read_to_string(fixture("chain.cert.json")).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    let nodes = v["nodes"].as_array_mut().unwrap();
    let target = nodes.iter().position(|n| n["parent"].is_u64() && !n["graph"]["edges"].as_array().unwrap().is_empty()).unwrap();
    let w = nodes[target]["graph"]["edges"][0]["weight"].as_i64().unwrap();
    nodes[target]["graph"]["edges"][0]["weight"] = Value::from(w + 5);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    fs::write(&p, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    let (code, out, _) = call(&["verify", s(&p)]);
    assert_eq!(code, EXIT_VERIFY, "{out}");
    assert!(out.contains("FAIL node"));
    assert!(out.contains("path 0/"));
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty");
    fs::write(&empty, "").unwrap();
    assert_eq!(call(&["verify", s(&empty)]).0, EXIT_INPUT);
    assert_eq!(call(&["decompose", s(&empty)]).0, EXIT_INPUT);
    assert_eq!(call(&["verify", s(&dir.path().join("missing"))]).0, EXIT_INPUT);

    let bad = dir.path().join("bad.graph");
    fs::write(&bad, "# format-version: 1\nvertices: 1 *0\nedge: 1 7 0\n").unwrap();
    let (code, _, err) = call(&["decompose", s(&bad)]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("line 3"), "{err}");

    assert_eq!(call(&["decompose", s(&fixture("pair.graph"))]).0, EXIT_INPUT);
    assert_eq!(call(&["evaluate", s(&fixture("pair.graph")), "--grid-size", "100"]).0, EXIT_INPUT);
    assert_eq!(call(&["sweep", s(&fixture("ring.template")), "--exponents", "2,3"]).0, EXIT_INPUT);
    assert_eq!(call(&["frobnicate"]).0, EXIT_INPUT);
}

#[test]
fn resource_errors_exit_three() {
    let (code, _, err) = call(&["decompose", s(&fixture("chain.graph")), "--budget", "2"]);
    assert_eq!(code, EXIT_RESOURCE);
    assert!(err.contains("budget"));
    let (code, _, err) = call(&["evaluate", s(&fixture("pair.graph")), "--grid-size", "64", "--box-radius", "0"]);
    assert_eq!(code, EXIT_RESOURCE);
    assert!(err.contains("scale box"), "{err}");
}

#[test]
fn evaluate_zero_inputs_give_zero_ratio() {
    let (code, out, _) = call(&["evaluate", s(&fixture("pair.graph")), "--grid-size", "64", "--ensemble", "2", "--zero"]);
    assert_eq!(code, EXIT_OK);
    let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert_eq!(r.rsplit(',').next().unwrap().parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn evaluate_maximal_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"grid_size": 64, "ensemble": 2, "seed": 9}"#).unwrap();
    let (code, out, _) = call(&["evaluate", s(&fixture("competing.graph")), "--config", s(&cfg)]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("# seed: 9 grid-size: 64"));
    let (_, flagged, _) = call(&["evaluate", s(&fixture("competing.graph")), "--config", s(&cfg), "--seed", "10"]);
    assert!(flagged.contains("# seed: 10 grid-size: 64"));
    fs::write(&cfg, r#"{"grid": 64}"#).unwrap();
    assert_eq!(call(&["evaluate", s(&fixture("competing.graph")), "--config", s(&cfg)]).0, EXIT_INPUT);
}

#[test]
fn sweep_output_is_independent_of_jobs() {
    let template = fixture("ring.template");
    let base = ["sweep", s(&template), "--grid-size", "64", "--ensemble", "6", "--a-values", "0..5", "--seed", "3"];
    let (c1, one, _) = call(&[&base[..], &["--jobs", "1"]].concat());
    let (c4, four, _) = call(&[&base[..], &["--jobs", "4"]].concat());
    assert_eq!((c1, c4), (EXIT_OK, EXIT_OK));
    assert_eq!(one, four);
    assert_eq!(one.lines().count(), 3 + 6);
    let (_, listed, _) = call(&["sweep", s(&fixture("ring.template")), "--grid-size", "64", "--ensemble", "6", "--a-values", "0,1,2,3,4,5", "--seed", "3"]);
    assert_eq!(one, listed);
}

#[test]
fn reduce_corollary_writes_graphs_and_checks_the_sum() {
    let dir = tempfile::tempdir().unwrap();
    let outdir = dir.path().join("red");
    let (code, out, err) = call(&["reduce-corollary", s(&fixture("corollary.json")), "--check", "-o", s(&outdir)]);
    assert_eq!(code, EXIT_OK, "{out}{err}");
    assert!(out.contains("symbols vanish at origin: true"));
    let graphs = fs::read_dir(&outdir).unwrap().filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "graph")).count();
    assert!(graphs >= 1);
    for k in 0..graphs {
        let text = fs::read_to_string(outdir.join(format!("instance-{k}.graph"))).unwrap();
        paraproduct::format::parse_graph(&text).unwrap();
    }
    let side: Value = serde_json::from_str(&fs::read_to_string(outdir.join("symbols.json")).unwrap()).unwrap();
    assert_eq!(side["format_version"], 1);
    assert_eq!(side["instances"].as_array().unwrap().len(), graphs);
}
