//! Oracle-backed checks over the core pipeline stages.

use debunk_testkit::checks;

fn ok(r: checks::CheckResult) {
    match r {
        Ok(summary) => println!("{summary}"),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn extraction_fixtures_exact() {
    ok(checks::extraction_fixture_suite());
}

#[test]
fn pattern_matches_expansion_language() {
    ok(checks::pattern_expansion_equivalence(300, 20, 11));
}

#[test]
fn shipped_patterns_have_probes() {
    ok(checks::shipped_pattern_probes());
}

#[test]
fn wmd_two_by_two_grid() {
    ok(checks::wmd_grid_2x2());
}

#[test]
fn wmd_three_by_three_random() {
    ok(checks::wmd_random_3x3(200, 12));
}

#[test]
fn wmd_metric_properties() {
    ok(checks::wmd_metric_properties(300, 13));
}

#[test]
fn grouping_matches_relation_graph() {
    ok(checks::grouping_properties(40, 80, 14));
}

#[test]
fn ranking_worked_example() {
    ok(checks::ranking_worked_example());
}

#[test]
fn ranking_scaling_invariance() {
    ok(checks::ranking_scaling(50, 15));
}

#[test]
fn kappa_random_labels_near_zero() {
    ok(checks::kappa_random_labels(10_000, 16));
}
