use btstrata_core::report::{Report, SkipReason, EXIT_FAILED, EXIT_OK};
use btstrata_core::suites::{charts_suite, strata_suite, vertex_suite, SuiteConfig};
use btstrata_core::Error;

fn cfg(n: usize, h: u32, m_max: u32) -> SuiteConfig {
    SuiteConfig { n: Some(n), h: Some(h), m_max, ..SuiteConfig::desk() }
}

fn run(f: fn(&SuiteConfig, &mut Report) -> btstrata_core::Result<()>, c: &SuiteConfig) -> Report {
    let mut r = Report::new("test", serde_json::to_value(c).unwrap());
    f(c, &mut r).unwrap();
    r.finish();
    r
}

#[test]
fn vertex_suite_passes_at_n3() {
    let r = run(vertex_suite, &cfg(3, 1, 1));
    assert_eq!(r.exit_code(), EXIT_OK, "{:?}", r.summary);
    for id in ["vertex_type_parity", "vertex_condition", "duality_involution", "de_morgan", "inclusion_reversal"] {
        assert!(r.checks.iter().any(|c| c.check_id == id), "{id}");
    }
}

#[test]
fn chart_suite_at_n4_passes() {
    let r = run(charts_suite, &cfg(4, 1, 2));
    assert_eq!(r.exit_code(), EXIT_OK, "{:?}", r.summary);
    assert!(r.checks.iter().any(|c| c.check_id == "chart_count"));
}

#[test]
fn strata_suite_at_n3_is_deterministic_and_fails_only_known_checks() {
    let c = cfg(3, 1, 2);
    let a = run(strata_suite, &c);
    let b = run(strata_suite, &c);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let known = ["zz_intersection_literal", "yy_intersection_literal", "extremal_vertex_types"];
    assert!(a.summary.failed_checks.iter().all(|id| known.contains(&id.as_str())), "{:?}", a.summary.failed_checks);
    assert!(a.exit_code() == EXIT_OK || a.exit_code() == EXIT_FAILED);
    assert!(a.checks.iter().any(|c| c.check_id == "worst_point_count" && c.pass));
}

#[test]
fn single_level_dimension_checks_are_skipped() {
    let r = run(strata_suite, &cfg(3, 1, 1));
    assert!(r.skipped.iter().any(|s| s.reason == SkipReason::InsufficientData));
    assert!(r.skipped.iter().all(|s| s.reason != SkipReason::Bound));
}

#[test]
fn config_validation() {
    assert!(SuiteConfig::desk().validate().is_ok());
    assert!(matches!(cfg(4, 2, 1).validate(), Err(Error::PiModularExcluded)));
    assert!(SuiteConfig { p: 4, ..SuiteConfig::desk() }.validate().is_err());
    assert!(SuiteConfig { m_max: 0, ..SuiteConfig::desk() }.validate().is_err());
    assert!(SuiteConfig { window: Some(3), ..SuiteConfig::desk() }.validate().is_err());
    assert!(SuiteConfig { h: Some(1), ..SuiteConfig::desk() }.validate().is_err());
}
