use combforge::suite::{run_suite, SuiteBudgets, SuiteName};

fn rows(name: SuiteName, filter: &str) -> Vec<(String, String, bool, String)> {
    let r = run_suite(name, Some(filter), SuiteBudgets::default()).unwrap();
    r.rows.into_iter().map(|r| (r.family, r.case, r.pass, r.detail)).collect()
}

#[test]
fn cuts_suite_on_ladder_and_fan() {
    let ladder = rows(SuiteName::Cuts, "ladder");
    assert_eq!(ladder.len(), 1);
    assert!(ladder[0].2 && ladder[0].3.starts_with("all finite"));

    let fan = rows(SuiteName::Cuts, "fan");
    let case = |c: &str| fan.iter().find(|r| r.1 == c).unwrap().clone();
    assert!(case("ray-tree").2 && case("ray-tree").3.starts_with("infinite cuts"));
    assert!(case("apex-star").2 && case("apex-star").3.starts_with("all finite"));
    assert_eq!(case("ray-tree/budgets").3, "exceeds 4 of 4 budgets up to 10^4");
}

#[test]
fn contraction_suite_on_the_fan_merge() {
    let r = rows(SuiteName::Contraction, "fan");
    assert_eq!(r.len(), 3);
    assert!(r.iter().all(|r| r.2 && r.1.starts_with("fan-merge/")), "{r:?}");
}

#[test]
fn decomposition_suite_on_the_infinite_star() {
    let r = rows(SuiteName::Decomposition, "infinite-star");
    assert!(r.iter().all(|r| r.2), "{r:?}");
    assert_eq!(r.iter().filter(|r| r.1.ends_with("/star")).count(), 3);
}

#[test]
fn duality_suite_on_the_grid() {
    let r = rows(SuiteName::Duality, "grid");
    let outcome = |c: &str| r.iter().find(|r| r.1 == c).unwrap().3.split(':').next().unwrap().to_owned();
    assert_eq!(outcome("all"), "comb");
    assert_eq!(outcome("axis"), "comb");
    assert_eq!(outcome("block5"), "complement");
}

#[test]
fn suite_output_is_deterministic() {
    let a = run_suite(SuiteName::All, Some("comb"), SuiteBudgets::default()).unwrap().table();
    let b = run_suite(SuiteName::All, Some("comb"), SuiteBudgets::default()).unwrap().table();
    assert_eq!(a, b);
}
