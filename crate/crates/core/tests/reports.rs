use spinalg::lie::AlgebraSpec;
use spinalg::models::{Coupling, ModelKind, ModelSpec};
use spinalg::verify::{run_lie_suite, run_model_suite, solve_lambda, CheckStatus, SuiteConfig};
use spinalg::{Rational, Scalar};

fn calogero(n: usize, t: i64, lambda: Coupling<Rational>) -> ModelSpec<Rational> {
    ModelSpec::new(AlgebraSpec::new(n, t).unwrap(), 3, ModelKind::Calogero, lambda)
}

#[test]
fn summary_matches_tallies_and_order() {
    let cfg = SuiteConfig { timing: false, ..SuiteConfig::default() }.only(&["conservation", "relations"]);
    let r = run_model_suite(&calogero(3, 1, Coupling::Explicit(Rational::from_int(1))), &cfg).unwrap();
    let count = |s| r.checks.iter().filter(|c| c.status == s).count();
    assert_eq!(r.summary.total, r.checks.len());
    assert_eq!(r.summary.pass, count(CheckStatus::Pass));
    assert_eq!(r.summary.fail, count(CheckStatus::Fail));
    assert!(r.checks.windows(2).all(|w| (&w[0].name, &w[0].params) <= (&w[1].name, &w[1].params)));
    for c in &r.checks {
        if c.status == CheckStatus::Fail {
            assert!(c.witness.is_some(), "{c:?}");
            assert!(c.witness.as_ref().unwrap().terms.len() <= 10);
        }
        assert_eq!(c.millis, 0);
    }
    assert!(!r.all_passed());
}

#[test]
fn reports_are_deterministic() {
    let cfg = SuiteConfig { timing: false, ..SuiteConfig::default() };
    let spec = ModelSpec::new(AlgebraSpec::new(2, -1).unwrap(), 3, ModelKind::Sutherland, Coupling::Star);
    let a = run_model_suite(&spec, &cfg).unwrap();
    let b = run_model_suite(&spec, &SuiteConfig { jobs: Some(1), ..cfg }).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.render_text(), b.render_text());
}

#[test]
fn json_schema_field_order() {
    let cfg = SuiteConfig { timing: false, ..SuiteConfig::default() }.only(&["lie.jacobi"]);
    let r = run_lie_suite(AlgebraSpec::new(3, 1).unwrap(), &cfg).unwrap();
    let text = serde_json::to_string(&r).unwrap();
    let pos = |k: &str| text.find(&format!("\"{k}\"")).unwrap_or_else(|| panic!("{k} missing"));
    assert!(pos("spec") < pos("checks"));
    assert!(pos("checks") < pos("summary"));
    assert!(pos("summary") < pos("engine_version"));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let check = &v["checks"][0];
    for k in ["name", "params", "status", "millis"] {
        assert!(check.get(k).is_some(), "{k}");
    }
    assert_eq!(check["status"], "pass");
}

#[test]
fn solver_finds_exactly_the_special_coupling() {
    let cfg = SuiteConfig::default();
    for (n, t, star) in [(3, 1, Rational::from_int(-2)), (2, -1, Rational::from_frac(1, 3))] {
        for kind in [ModelKind::Calogero, ModelKind::Sutherland] {
            let ms = ModelSpec::new(AlgebraSpec::new(n, t).unwrap(), 3, kind, Coupling::Symbolic);
            let sol = solve_lambda(&ms, &cfg).unwrap();
            assert_eq!(sol.roots, vec![star.clone()], "{n} {t} {kind}");
            assert!(sol.trivial_root);
        }
    }
    let so4 = ModelSpec::new(AlgebraSpec::new(4, 1).unwrap(), 3, ModelKind::Calogero, Coupling::Symbolic);
    assert!(solve_lambda(&so4, &cfg).unwrap().roots.is_empty());
}

#[test]
fn abelian_algebra_is_flagged() {
    let cfg = SuiteConfig::default().only(&["relations"]);
    let so2 = ModelSpec::new(AlgebraSpec::new(2, 1).unwrap(), 3, ModelKind::Calogero, Coupling::Star);
    let r = run_model_suite(&so2, &cfg).unwrap();
    assert!(r.checks.iter().all(|c| c.status == CheckStatus::Skipped));
    assert!(r.checks[0].note.as_deref().unwrap().contains("abelian"));
}
