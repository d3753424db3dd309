use std::process::{Command, Output};

use serde_json::Value;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_brownian-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn strip_timestamp(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timestamp");
    v
}

#[test]
fn scalar_z_squared_scenario_passes() {
    let out = lab(&["run", "scalar_z_squared"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["summary"]["all_passed"], true);
    let results = r["results"].as_array().unwrap();
    assert_eq!(results.len(), 7);
    let canonical = results.iter().find(|x| x["kind"] == "canonical").unwrap();
    assert_eq!(canonical["details"]["defect_dim"], 1);
    let classify = results.iter().find(|x| x["kind"] == "classify").unwrap();
    assert_eq!(classify["details"]["kind"], "type2");
}

#[test]
fn equivalence_grid_flags_exactly_the_predicted_pairs() {
    let out = lab(&["run", "equivalence_grid"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let verdicts: Vec<bool> = r["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x["details"]["equivalent"].as_bool().unwrap())
        .collect();
    assert_eq!(
        verdicts,
        [true, true, true, true, false, false, false, false, false, true, false]
    );
}

#[test]
fn every_bundled_scenario_passes() {
    for name in ["potapov_type2", "reducing_product", "scalar_structure"] {
        let out = lab(&["run", name]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn missing_sigma_is_an_input_error() {
    let dir = std::env::temp_dir().join(format!("brownian-lab-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    let text = brownian_lab::bundled("scalar_z_squared")
        .unwrap()
        .replace("\"sigma\": 1.0, ", "");
    std::fs::write(&path, text).unwrap();
    let out_path = dir.join("report.json");
    let out = lab(&["run", path.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sigma"));
    assert!(out.stdout.is_empty());
    assert!(!out_path.exists());
}

#[test]
fn failing_expectation_exits_one() {
    let dir = std::env::temp_dir().join(format!("brownian-lab-fail-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("wrong.json");
    let text = brownian_lab::bundled("scalar_z_squared")
        .unwrap()
        .replace("\"expect\": \"type2\"", "\"expect\": \"type1\"");
    std::fs::write(&path, text).unwrap();
    let out = lab(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["summary"]["failed"], 1);
}

#[test]
fn runs_are_deterministic_modulo_timestamp() {
    let a = lab(&["run", "reducing_product", "--seed", "99"]);
    let b = lab(&["run", "reducing_product", "--seed", "99"]);
    let (ra, rb) = (report(&a), report(&b));
    assert_eq!(ra["environment"]["seed"], 99);
    assert_eq!(strip_timestamp(ra), strip_timestamp(rb));
}

#[test]
fn degree_override_is_applied() {
    let out = lab(&["run", "scalar_z_squared", "--degree", "40"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["environment"]["max_degree"], 40);
}

#[test]
fn properties_suite_is_reproducible() {
    let dir = std::env::temp_dir().join(format!("brownian-lab-suite-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (p1, p2) = (dir.join("a.json"), dir.join("b.json"));
    for p in [&p1, &p2] {
        let out = lab(&["suite", "properties", "--seed", "4", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    }
    let read = |p: &std::path::Path| strip_timestamp(serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap());
    assert_eq!(read(&p1), read(&p2));
}

#[test]
fn list_scenarios_names_bundles() {
    let out = lab(&["list-scenarios"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for (name, _) in brownian_lab::BUNDLED_SCENARIOS {
        assert!(text.contains(name));
    }
}

#[test]
fn unknown_suite_is_rejected() {
    assert_eq!(lab(&["suite", "bogus"]).status.code(), Some(2));
}
