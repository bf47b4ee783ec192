mod common;

use common::q;
use spinalg::arith::{Poly, RatFunc, Var};
use spinalg::lie::AlgebraSpec;
use spinalg::models::{Coupling, Frequency, Model, ModelKind, ModelSpec, Transcription};
use spinalg::operator::Operator;
use spinalg::spin_ops::SpinOps;
use spinalg::verify::{check_appendix_f, run_model_suite, CheckStatus, SuiteConfig};
use spinalg::{Rational, Scalar};

fn spec(n: usize, t: i64, sites: usize, kind: ModelKind, lambda: Coupling<Rational>) -> ModelSpec<Rational> {
    ModelSpec::new(AlgebraSpec::new(n, t).unwrap(), sites, kind, lambda)
}

fn status(report: &spinalg::verify::CheckReport, name: &str) -> CheckStatus {
    report.find(name).unwrap_or_else(|| panic!("{name} missing")).status
}

#[test]
fn two_site_calogero_hamiltonian_by_hand() {
    let alg = AlgebraSpec::new(3, 1).unwrap();
    let model = Model::new(spec(3, 1, 2, ModelKind::Calogero, Coupling::Symbolic)).unwrap();
    let shape = model.shape();
    let ops = SpinOps::new(alg, 2);
    let lam = RatFunc::var(Var::Lambda);
    let d1 = Operator::partial(shape, 1);
    let d2 = Operator::partial(shape, 2);
    let kinetic = -&(&(&d1 * &d1) + &(&d2 * &d2));
    let spin = &(&Operator::function(shape, &lam * &lam) - &ops.p(1, 2).unwrap().mul_function(&lam))
        + &ops.q(1, 2).unwrap().mul_function(&lam);
    let inv = RatFunc::inverse_difference(1, 2);
    let pot = spin.mul_function(&(&inv * &inv)).scale(&Rational::from_int(2));
    assert_eq!(model.hamiltonian().unwrap(), &kinetic + &pot);
}

#[test]
fn confined_hamiltonian_at_zero_frequency_is_calogero() {
    let cal = Model::new(spec(2, -1, 3, ModelKind::Calogero, Coupling::Symbolic)).unwrap();
    let conf = Model::new(spec(2, -1, 3, ModelKind::Confined, Coupling::Symbolic)).unwrap();
    let h0 = conf.hamiltonian().unwrap().substitute(&[(Var::Omega, Rational::from_int(0))]).unwrap();
    assert_eq!(h0, cal.hamiltonian().unwrap());
    let shape = conf.shape();
    let mut trap = Operator::zero(shape);
    for j in 1..=3 {
        let xj = RatFunc::from(Poly::var(Var::X(j)));
        trap = &trap + &Operator::function(shape, &xj * &xj);
    }
    let om = RatFunc::var(Var::Omega);
    let diff = &conf.hamiltonian().unwrap() - &cal.hamiltonian().unwrap();
    assert_eq!(diff, trap.mul_function(&(&om * &om)));
}

#[test]
fn calogero_so3_conserves_only_at_lambda_star() {
    let cfg = SuiteConfig::default().only(&["conservation"]);
    let good = run_model_suite(&spec(3, 1, 3, ModelKind::Calogero, Coupling::Star), &cfg).unwrap();
    assert!(good.all_passed(), "{}", good.render_text());
    let off = spec(3, 1, 3, ModelKind::Calogero, Coupling::Explicit(Rational::from_int(-1)));
    let bad = run_model_suite(&off, &cfg).unwrap();
    assert_eq!(status(&bad, "conservation.level0"), CheckStatus::Pass);
    assert_eq!(status(&bad, "conservation.level1"), CheckStatus::Fail);
    let w = bad.find("conservation.level1").unwrap().witness.as_ref().unwrap();
    assert!(!w.terms.is_empty());
}

#[test]
fn sutherland_sp2_relations_at_lambda_star() {
    let cfg = SuiteConfig::default().only(&["conservation", "relations"]);
    let r = run_model_suite(&spec(2, -1, 3, ModelKind::Sutherland, Coupling::Star), &cfg).unwrap();
    assert!(r.all_passed(), "{}", r.render_text());
}

#[test]
fn printed_sutherland_level_one_is_not_conserved() {
    let cfg = SuiteConfig::default().only(&["conservation.level1"]);
    let printed = spec(2, -1, 3, ModelKind::Sutherland, Coupling::Star).with_transcription(Transcription::AsPrinted);
    let r = run_model_suite(&printed, &cfg).unwrap();
    assert_eq!(status(&r, "conservation.level1"), CheckStatus::Fail);
}

#[test]
fn printed_level_two_breaks_the_relation() {
    let cfg = SuiteConfig::default().only(&["relations.level2"]);
    let corrected = spec(3, 1, 3, ModelKind::Calogero, Coupling::Star);
    let r = run_model_suite(&corrected, &cfg).unwrap();
    assert_eq!(status(&r, "relations.level2"), CheckStatus::Pass);
    let printed = corrected.with_transcription(Transcription::AsPrinted);
    let r = run_model_suite(&printed, &cfg).unwrap();
    assert_eq!(status(&r, "relations.level2"), CheckStatus::Fail);
}

#[test]
fn half_loop_serre_on_four_sites() {
    let cfg = SuiteConfig::default().only(&["serre"]);
    let r = run_model_suite(&spec(3, 1, 4, ModelKind::Calogero, Coupling::Star), &cfg).unwrap();
    assert_eq!(status(&r, "serre.half-loop"), CheckStatus::Pass);
}

#[test]
fn confined_omega_limit_and_scaling() {
    let cfg = SuiteConfig::default().only(&["serre"]);
    let ms = spec(2, -1, 3, ModelKind::Confined, Coupling::Star);
    assert_eq!(ms.omega, Frequency::Symbolic);
    let r = run_model_suite(&ms, &cfg).unwrap();
    for name in ["serre.yangian", "serre.omega-limit", "serre.scaling"] {
        assert_eq!(status(&r, name), CheckStatus::Pass, "{}", r.render_text());
    }
}

#[test]
fn appendix_function_by_hand() {
    // (λ(N - 4θ₀)(x1 + x2)² - 8 x1 x2) / (2 (x1 - x2)²) with λ(N - 4θ₀) = 2.
    let (x1, x2) = (Poly::var(Var::X(1)), Poly::var(Var::X(2)));
    let s = &x1 + &x2;
    let num = &(&s * &s).scale(&Rational::from_int(2)) - &(&x1 * &x2).scale(&Rational::from_int(8));
    let inv = RatFunc::inverse_difference(1, 2);
    let f = &RatFunc::from(num) * &(&inv * &inv).scale(&q(1, 2));
    assert!(f.is_one());
    for (n, t) in [(3, 1), (2, -1), (4, -1), (5, 1), (6, 1), (6, -1)] {
        let r = check_appendix_f(AlgebraSpec::new(n, t).unwrap(), None, &SuiteConfig::default());
        assert!(r.is_pass(), "{r:?}");
    }
    let off = check_appendix_f(AlgebraSpec::new(3, 1).unwrap(), Some(Rational::from_int(1)), &SuiteConfig::default());
    assert_eq!(off.status, CheckStatus::Fail);
}

#[test]
fn degenerate_star_is_rejected() {
    let ms = spec(4, 1, 3, ModelKind::Calogero, Coupling::Star);
    let err = ms.validate().unwrap_err().to_string();
    assert!(err.contains("not a simple Lie algebra"), "{err}");
}
