use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use combforge::certificate::{Body, Certificate};
use combforge::ops::{extract, Operation, RunConfig};
use combforge::verify::{verify, ViolationClass};

fn fixtures(sub: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(sub)
}

fn load(path: PathBuf) -> Certificate {
    Certificate::from_json(&fs::read_to_string(&path).unwrap()).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn class_name(c: ViolationClass) -> String {
    serde_json::to_value(c).unwrap().as_str().unwrap().to_owned()
}

#[test]
fn valid_fixtures_verify() {
    let mut kinds = Vec::new();
    for entry in fs::read_dir(fixtures("valid")).unwrap() {
        let cert = load(entry.unwrap().path());
        let report = verify(&cert).unwrap();
        assert!(report.ok(), "{report:?}");
        kinds.push(cert.kind());
    }
    kinds.sort();
    assert_eq!(kinds, ["comb", "fan", "rayless-tree", "star", "star-decomposition"]);
}

#[test]
fn every_forged_fixture_is_rejected_with_its_class() {
    let expected: BTreeMap<String, String> =
        serde_json::from_str(&fs::read_to_string(fixtures("forged").join("expected.json")).unwrap()).unwrap();
    assert!(expected.len() >= 12);
    for (name, class) in &expected {
        let report = verify(&load(fixtures("forged").join(format!("{name}.json")))).unwrap();
        let got: Vec<String> = report.classes().into_iter().map(class_name).collect();
        assert_eq!(got, vec![class.clone()], "{name}");
    }
}

#[test]
fn forged_corpus_covers_each_certificate_kind() {
    let mut kinds: Vec<&str> = fs::read_dir(fixtures("forged"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "expected.json")
        .map(|p| load(p).kind())
        .collect();
    kinds.sort();
    kinds.dedup();
    assert_eq!(kinds, ["comb", "fan", "rayless-tree", "star", "star-decomposition"]);
}

#[test]
fn json_shape_has_the_five_top_level_keys() {
    let e = extract(&RunConfig::new("ray", "all", Operation::StarComb, 3)).unwrap();
    let value: serde_json::Value = serde_json::from_str(&e.certificate.to_json()).unwrap();
    let mut keys: Vec<&str> = value.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort();
    assert_eq!(keys, ["audit", "budgets", "family", "kind", "payload"]);
    let first = &value["payload"]["spine"][0];
    assert_eq!(first["index"], 0);
    assert_eq!(first["label"], "v0");
}

#[test]
fn tampering_with_a_fresh_certificate_is_caught() {
    let e = extract(&RunConfig::new("infinite-star", "leaves", Operation::StarComb, 4)).unwrap();
    let mut cert = e.certificate.clone();
    let Body::Star(p) = &mut cert.body else { panic!("expected a star") };
    p.leaves[2] = p.leaves[0].clone();
    let report = verify(&cert).unwrap();
    assert!(!report.ok());
    assert!(report.classes().contains(&ViolationClass::EndpointMismatch));
}

#[test]
fn unknown_family_in_a_file_is_an_error_not_a_violation() {
    let mut cert = load(fixtures("valid").join("star-infinite-star-leaves.json"));
    cert.family = "no-such-family".into();
    assert!(verify(&cert).is_err());
}
