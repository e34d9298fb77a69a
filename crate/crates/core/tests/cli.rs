//! End-to-end runs of the `ontoforge` binary.

mod common;

use std::fs;

use serde_json::Value;

use common::{fixture, ontoforge, read_fixture, run_fixture_plan};

fn stdout_json(out: &std::process::Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{e}: {}\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

#[test]
fn compile_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a", "b"] {
        let out = ontoforge(
            [
                "compile",
                "--tbox",
                fixture("synthesis_tbox.ttl").to_str().unwrap(),
                "--out",
            ]
            .iter()
            .map(|s| s.to_string())
            .chain([dir.path().join(name).display().to_string()]),
        );
        assert!(out.status.success());
    }
    for file in ["manifest.json", "plan.json"] {
        let a = fs::read(dir.path().join("a").join(file)).unwrap();
        let b = fs::read(dir.path().join("b").join(file)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{file}");
    }
    let manifest: Value = serde_json::from_slice(&fs::read(dir.path().join("a/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["tools"].as_array().unwrap().len(), 18);
}

#[test]
fn run_plan_reproduces_the_golden_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_fixture_plan(dir.path(), &fixture("si_repair_trace.json"), "si-repair", false);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["final_status"], "done");
    assert_eq!(report["violations"], 1);
    assert_eq!(report["repairs_succeeded"], 1);

    assert_eq!(
        fs::read_to_string(dir.path().join("si-repair.log.jsonl")).unwrap(),
        read_fixture("golden/si-repair.log.jsonl")
    );
    assert_eq!(
        fs::read_to_string(dir.path().join("si-repair.ttl")).unwrap(),
        read_fixture("golden/si-repair.ttl")
    );
}

#[test]
fn run_plan_without_feedback_hides_the_violation() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_fixture_plan(dir.path(), &fixture("si_repair_trace.json"), "si-repair", true);
    assert!(out.status.success());
    let report = stdout_json(&out);
    // the server accepts everything, so the agent sees a clean run
    assert_eq!(report["final_status"], "done");
    assert_eq!(report["violations"], 0);
    assert_eq!(report["repairs_attempted"], 0);

    let check = ontoforge([
        "validate".as_ref(),
        "--tbox".as_ref(),
        fixture("synthesis_tbox.ttl").as_os_str(),
        "--graph".as_ref(),
        dir.path().join("si-repair.ttl").as_os_str(),
    ]);
    assert_eq!(check.status.code(), Some(1));
}

#[test]
fn validate_exit_codes() {
    let tbox = fixture("synthesis_tbox.ttl");
    let ok = ontoforge([
        "validate".as_ref(),
        "--tbox".as_ref(),
        tbox.as_os_str(),
        "--graph".as_ref(),
        fixture("golden/si-repair.ttl").as_os_str(),
    ]);
    assert!(ok.status.success());
    assert_eq!(stdout_json(&ok), serde_json::json!([]));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ttl");
    // a synthesis with no steps breaks its minimum cardinality
    fs::write(
        &bad,
        "@prefix ex: <https://ontoforge.example/synthesis#> .\n\
         @prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n\
         <https://ontoforge.example/kg/x/Synthesis_1> a ex:Synthesis ; rdfs:label \"S\" .\n",
    )
    .unwrap();
    let out = ontoforge([
        "validate".as_ref(),
        "--tbox".as_ref(),
        tbox.as_os_str(),
        "--graph".as_ref(),
        bad.as_os_str(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!stdout_json(&out).as_array().unwrap().is_empty());
}

#[test]
fn project_and_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let (pred, gold, metrics) = (
        dir.path().join("pred"),
        dir.path().join("gold"),
        dir.path().join("metrics"),
    );
    fs::create_dir_all(&pred).unwrap();
    fs::create_dir_all(&gold).unwrap();
    let schema = fixture("steps.schema.json");
    let out = ontoforge([
        "project".as_ref(),
        "--graph".as_ref(),
        fixture("golden/si-repair.ttl").as_os_str(),
        "--schema".as_ref(),
        schema.as_os_str(),
    ]);
    assert!(out.status.success());
    let records = stdout_json(&out);
    assert_eq!(records.as_array().unwrap().len(), 1);
    assert_eq!(records[0]["step_number"], 3);
    assert_eq!(records[0]["temperature_value"], 120);

    fs::write(pred.join("10.1000.x.json"), &out.stdout).unwrap();
    fs::write(gold.join("10.1000.x.json"), &out.stdout).unwrap();
    let mut wrong = records.clone();
    wrong[0]["temperature_value"] = 150.into();
    fs::write(pred.join("10.1000.y.json"), wrong.to_string()).unwrap();
    fs::write(gold.join("10.1000.y.json"), &out.stdout).unwrap();

    let out = ontoforge([
        "evaluate".as_ref(),
        "--pred".as_ref(),
        pred.as_os_str(),
        "--gold".as_ref(),
        gold.as_os_str(),
        "--schema".as_ref(),
        schema.as_os_str(),
        "--out".as_ref(),
        metrics.as_os_str(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(metrics.join("scores.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[1], "10.1000.x,4,0,0,1.000,1.000,1.000");
    assert_eq!(lines[2], "10.1000.y,3,1,1,0.750,0.750,0.750");
    assert_eq!(lines[3], "Overall,7,1,1,0.875,0.875,0.875");
    let m: Value = serde_json::from_str(&fs::read_to_string(metrics.join("metrics.json")).unwrap()).unwrap();
    assert_eq!(m["anatomy"]["fields"][0]["slot"], "temperature_value");
}

#[test]
fn aggregate_category_counts() {
    let dir = tempfile::tempdir().unwrap();
    let counts = dir.path().join("counts.csv");
    fs::write(&counts, "category,tp,fp,fn\na,8,2,0\nb,0,0,4\n").unwrap();
    let out = ontoforge(["aggregate".as_ref(), "--counts".as_ref(), counts.as_os_str()]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    // micro: 8/10 precision, 8/12 recall
    assert!((v["micro"]["precision"].as_f64().unwrap() - 0.8).abs() < 1e-12);
    assert!((v["micro"]["recall"].as_f64().unwrap() - 8.0 / 12.0).abs() < 1e-12);
    // macro: b has no predictions, so precision 1 and recall 0
    assert!((v["macro"]["precision"].as_f64().unwrap() - 0.9).abs() < 1e-12);
    assert!((v["macro"]["recall"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn build_index_and_ground_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let index = dir.path().join("index.json");
    let out = ontoforge([
        "build-index".as_ref(),
        "--reference".as_ref(),
        fixture("reference_species.ttl").as_os_str(),
        "--classes".as_ref(),
        "https://species.example/kb/Species".as_ref(),
        "--out".as_ref(),
        index.as_os_str(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let grounded = dir.path().join("grounded.ttl");
    let out = ontoforge([
        "ground".as_ref(),
        "--in".as_ref(),
        fixture("local_species.ttl").as_os_str(),
        "--index".as_ref(),
        index.as_os_str(),
        "--classes".as_ref(),
        "https://ontoforge.example/synthesis#ChemInput".as_ref(),
        "--out".as_ref(),
        grounded.as_os_str(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let map: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("grounded.grounding.json")).unwrap()).unwrap();
    assert_eq!(map["pairs"].as_array().unwrap().len(), 4);
    let ttl = fs::read_to_string(&grounded).unwrap();
    assert_eq!(ttl.matches("sameAs").count(), 4, "{ttl}");
}

#[test]
fn usage_errors_exit_2() {
    let out = ontoforge([
        "ground".as_ref(),
        "--in".as_ref(),
        fixture("local_species.ttl").as_os_str(),
        "--index".as_ref(),
        fixture("missing-index.json").as_os_str(),
        "--classes".as_ref(),
        "https://ontoforge.example/synthesis#ChemInput".as_ref(),
        "--out".as_ref(),
        "/dev/null".as_ref(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}
