use std::path::PathBuf;
use std::process::{Command, Output};

fn combforge(args: &[&str]) -> Output {
    combforge_env(args, None)
}

fn combforge_env(args: &[&str], depth: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_combforge"));
    cmd.args(args).env_remove("COMBFORGE_DEPTH_DEFAULT");
    if let Some(d) = depth {
        cmd.env("COMBFORGE_DEPTH_DEFAULT", d);
    }
    cmd.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn fixture(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(rel).display().to_string()
}

#[test]
fn star_on_infinite_star_leaves() {
    let o = combforge(&["extract", "star-comb", "--family", "infinite-star", "--u", "leaves", "-k", "5"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["kind"], "star");
    assert_eq!(v["payload"]["leaves"].as_array().unwrap().len(), 5);
}

#[test]
fn theorem1_on_the_grid_gives_a_comb() {
    let o = combforge(&["extract", "theorem1", "--family", "grid", "--u", "all", "-k", "8", "--depth", "40"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["kind"], "comb");
    assert_eq!(v["payload"]["undominated"], true);
}

#[test]
fn documentation_family_exits_4() {
    let o = combforge(&["extract", "theorem1", "--family", "seymour-thomas"]);
    assert_eq!(code(&o), 4);
    assert!(o.stdout.is_empty());
}

#[test]
fn star_decomposition_with_an_undominated_end_exits_4() {
    assert_eq!(code(&combforge(&["extract", "star-decomposition", "--family", "ray", "--u", "all"])), 4);
}

#[test]
fn missing_fan_exits_2() {
    assert_eq!(code(&combforge(&["extract", "fan", "--family", "ray", "--u", "all"])), 2);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&combforge(&["frobnicate"])), 1);
    assert_eq!(code(&combforge(&["extract", "theorem1", "--family", "ray", "--u", "nope"])), 1);
    assert_eq!(code(&combforge(&["extract", "theorem1", "--family", "petersen"])), 1);
    assert_eq!(code(&combforge(&["suite", "duality", "--family", "no-such-family"])), 1);
    assert_eq!(code(&combforge(&["export"])), 1);
    assert_eq!(code(&combforge(&["--help"])), 0);
}

#[test]
fn verify_accepts_valid_and_rejects_forged() {
    let ok = combforge(&["verify", &fixture("valid/comb-comb-teeth.json")]);
    assert_eq!(code(&ok), 0);
    assert_eq!(json(&ok)["violations"].as_array().unwrap().len(), 0);

    let bad = combforge(&["verify", &fixture("forged/comb-teeth-share-path-vertex.json")]);
    assert_eq!(code(&bad), 3);
    assert_eq!(json(&bad)["violations"][0]["class"], "paths-not-disjoint");

    let leaf = combforge(&["verify", &fixture("forged/star-leaf-not-in-u.json")]);
    assert_eq!(code(&leaf), 3);
    assert_eq!(json(&leaf)["violations"][0]["class"], "not-in-u");
}

#[test]
fn extracted_certificates_verify_through_the_cli() {
    let dir = std::env::temp_dir().join(format!("combforge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for (op, fam, u) in [
        ("theorem1", "complete", "all"),
        ("theorem1", "ray", "evens"),
        ("star-decomposition", "grid", "block5"),
        ("fan", "fan", "all"),
    ] {
        let file = dir.join(format!("{op}-{fam}-{u}.json")).display().to_string();
        assert_eq!(code(&combforge(&["extract", op, "--family", fam, "--u", u, "-k", "3", "-o", &file])), 0);
        assert_eq!(code(&combforge(&["verify", &file])), 0, "{file}");
        let dot = combforge(&["export", "--certificate", &file]);
        assert_eq!(code(&dot), 0);
        assert!(String::from_utf8(dot.stdout).unwrap().starts_with("graph "));
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn output_is_byte_deterministic() {
    let args = ["extract", "theorem1", "--family", "binary-tree-with-tops", "--u", "t2-vertices", "-k", "4"];
    assert_eq!(combforge(&args).stdout, combforge(&args).stdout);
    let suite = ["suite", "cuts", "--family", "ladder"];
    let (a, b) = (combforge(&suite), combforge(&suite));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn depth_default_comes_from_the_environment() {
    let args = ["extract", "star-comb", "--family", "ray", "--u", "all", "-k", "3"];
    assert_eq!(json(&combforge_env(&args, Some("7")))["budgets"]["depth"], 7);
    assert_eq!(json(&combforge(&args))["budgets"]["depth"], 40);
    let mut explicit = args.to_vec();
    explicit.extend(["--depth", "9"]);
    assert_eq!(json(&combforge_env(&explicit, Some("7")))["budgets"]["depth"], 9);
    assert_eq!(code(&combforge_env(&args, Some("deep"))), 1);
}

#[test]
fn families_json_matches_the_shipped_manifest() {
    let o = combforge(&["families", "--json"]);
    assert_eq!(code(&o), 0);
    let shipped = std::fs::read(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../families.json")).unwrap();
    assert_eq!(o.stdout, shipped);
    let text = String::from_utf8(combforge(&["families"]).stdout).unwrap();
    assert!(text.contains("seymour-thomas"));
    assert_eq!(text.lines().count(), 12);
}

#[test]
fn window_export_formats() {
    let dot = String::from_utf8(combforge(&["export", "--family", "ray", "--cap", "4"]).stdout).unwrap();
    assert!(dot.contains("v0 -- v1;") && dot.contains("v2 -- v3;") && !dot.contains("v4"));
    let v: serde_json::Value =
        serde_json::from_slice(&combforge(&["export", "--family", "ray", "--cap", "3", "--format", "json"]).stdout).unwrap();
    assert_eq!(v["edges"], serde_json::json!([[0, 1], [1, 2]]));
}

#[test]
fn suite_table_has_a_summary_line() {
    let o = combforge(&["suite", "duality", "--family", "infinite-star"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.ends_with("3 rows, 0 failed\n"), "{text}");
}
