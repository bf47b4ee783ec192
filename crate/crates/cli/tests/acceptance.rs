//! Acceptance run: one PASS/FAIL line per criterion, exact arithmetic
//! throughout. Criteria listed in `DOCUMENTED` are known to be unattainable
//! as worded; they still print their real verdict but do not fail the run.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use serde_json::Value;

use spinalg::lie::AlgebraSpec;
use spinalg::models::{Coupling, ModelKind, ModelSpec};
use spinalg::verify::{run_lie_suite, run_model_suite, solve_lambda, CheckReport, CheckStatus, SuiteConfig};
use spinalg::{Rational, Scalar};

/// Criterion 5 asks the Yangian Serre check to fail at λ = 1 for sp(2) and
/// so(3). Both algebras are three-dimensional, where the cubic Serre
/// combination vanishes identically, so both sides are zero at every λ.
const DOCUMENTED: [u8; 1] = [5];

const LIE_SPECS: [(usize, i64); 7] = [(2, -1), (3, 1), (4, 1), (4, -1), (5, 1), (6, 1), (6, -1)];
const CALOGERO_SPECS: [(usize, i64); 4] = [(3, 1), (2, -1), (4, -1), (5, 1)];

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict { pass, detail: detail.into() }
    }
}

/// Oracle reports collected from every suite the criteria run.
#[derive(Default)]
struct Ledger {
    oracle: Vec<(String, CheckStatus, bool)>,
}

impl Ledger {
    fn keep(&mut self, label: String, report: &CheckReport) {
        if let Some(c) = report.find("oracle.crosscheck") {
            self.oracle.push((label, c.status, report.summary.oracle_disagreement));
        }
    }
}

fn cfg() -> SuiteConfig {
    SuiteConfig::default()
}

fn algebra(n: usize, t: i64) -> AlgebraSpec {
    AlgebraSpec::new(n, t).unwrap()
}

fn model(n: usize, t: i64, sites: usize, kind: ModelKind, lambda: Coupling<Rational>) -> ModelSpec<Rational> {
    ModelSpec::new(algebra(n, t), sites, kind, lambda)
}

fn failures(report: &CheckReport) -> Vec<String> {
    report
        .checks
        .iter()
        .filter(|c| c.status != CheckStatus::Pass)
        .map(|c| format!("{} {:?}", c.name, c.status))
        .collect()
}

fn status(report: &CheckReport, name: &str) -> Option<CheckStatus> {
    report.find(name).map(|c| c.status)
}

fn criterion_1(ledger: &mut Ledger) -> Verdict {
    let start = Instant::now();
    let mut bad = Vec::new();
    for (n, t) in LIE_SPECS {
        let r = run_lie_suite(algebra(n, t), &cfg().only(&["lie", "oracle"])).unwrap();
        bad.extend(failures(&r).into_iter().map(|f| format!("{}: {f}", algebra(n, t))));
        ledger.keep(format!("lie {}", algebra(n, t)), &r);
    }
    let took = start.elapsed();
    let pass = bad.is_empty() && took < Duration::from_secs(10);
    Verdict::new(pass, format!("7 algebras, {:.1} s total{}", took.as_secs_f64(), joined(&bad)))
}

fn criterion_2(ledger: &mut Ledger) -> Verdict {
    let mut bad = Vec::new();
    let mut slowest = Duration::ZERO;
    for (n, t) in CALOGERO_SPECS {
        let alg = algebra(n, t);
        let start = Instant::now();
        let star = model(n, t, 3, ModelKind::Calogero, Coupling::Star);
        let r = run_model_suite(&star, &cfg().only(&["conservation", "oracle"])).unwrap();
        slowest = slowest.max(start.elapsed());
        bad.extend(failures(&r).into_iter().map(|f| format!("{alg}: {f}")));
        ledger.keep(format!("calogero {alg} conservation"), &r);

        let shifted = alg.special_coupling::<Rational>().unwrap() + Rational::from_int(1);
        let off = model(n, t, 3, ModelKind::Calogero, Coupling::Explicit(shifted.clone()));
        let r = run_model_suite(&off, &cfg().only(&["conservation.level1"])).unwrap();
        let c = r.find("conservation.level1").unwrap();
        let witnessed = c.witness.as_ref().is_some_and(|w| !w.terms.is_empty());
        if c.status != CheckStatus::Fail || !witnessed {
            bad.push(format!("{alg}: level 1 at lambda = {shifted} did not fail with a witness"));
        }
    }
    let pass = bad.is_empty() && slowest < Duration::from_secs(60);
    Verdict::new(
        pass,
        format!(
            "so(3), sp(2), sp(4), so(5); level 1 fails at lambda*+1; slowest {:.1} s{}",
            slowest.as_secs_f64(),
            joined(&bad)
        ),
    )
}

fn criterion_3() -> Verdict {
    let mut bad = Vec::new();
    for (n, t) in CALOGERO_SPECS {
        for kind in [ModelKind::Calogero, ModelKind::Sutherland] {
            let ms = model(n, t, 3, kind, Coupling::Symbolic);
            let sol = solve_lambda(&ms, &cfg()).unwrap();
            let star = algebra(n, t).special_coupling::<Rational>().unwrap();
            if sol.roots != vec![star.clone()] {
                bad.push(format!("{} {kind}: {:?}, expected {star}", algebra(n, t), sol.labels()));
            }
        }
    }
    let out = cli(&["model", "--model", "calogero", "--N", "4", "--theta0", "+1", "--L", "3", "--lambda", "star"]);
    if out.0 != Some(2) {
        bad.push(format!("so(4) star exit code {:?}", out.0));
    }
    Verdict::new(bad.is_empty(), format!("8 singleton root sets, so(4) star exits 2{}", joined(&bad)))
}

fn criterion_4(ledger: &mut Ledger) -> Verdict {
    let mut bad = Vec::new();
    let mut slowest = Duration::ZERO;
    for (n, t) in [(3, 1), (2, -1)] {
        for sites in [3, 4] {
            let start = Instant::now();
            let ms = model(n, t, sites, ModelKind::Calogero, Coupling::Star);
            let r = run_model_suite(&ms, &cfg().only(&["serre.half-loop", "oracle"])).unwrap();
            slowest = slowest.max(start.elapsed());
            if status(&r, "serre.half-loop") != Some(CheckStatus::Pass) {
                bad.push(format!("{} L={sites}", algebra(n, t)));
            }
            ledger.keep(format!("half-loop {} L={sites}", algebra(n, t)), &r);
        }
    }
    let pass = bad.is_empty() && slowest < Duration::from_secs(300);
    Verdict::new(pass, format!("so(3), sp(2) at L = 3, 4; slowest {:.1} s{}", slowest.as_secs_f64(), joined(&bad)))
}

fn criterion_5(ledger: &mut Ledger) -> Verdict {
    let mut notes = Vec::new();
    let mut star_ok = true;
    let mut one_fails = true;
    for (n, t) in [(2, -1), (3, 1)] {
        let alg = algebra(n, t);
        let star = model(n, t, 3, ModelKind::Sutherland, Coupling::Star);
        let r = run_model_suite(&star, &cfg().only(&["serre.yangian", "oracle"])).unwrap();
        star_ok &= status(&r, "serre.yangian") == Some(CheckStatus::Pass);
        ledger.keep(format!("yangian {alg} star"), &r);
        let one = star.with_lambda(Coupling::Explicit(Rational::from_int(1)));
        let r = run_model_suite(&one, &cfg().only(&["serre.yangian"])).unwrap();
        let failed = status(&r, "serre.yangian") == Some(CheckStatus::Fail);
        one_fails &= failed;
        notes.push(format!("{alg} at lambda = 1: {}", if failed { "fails" } else { "passes, both sides vanish" }));
    }
    // The same check on sp(4), where the cubic combination is nonzero.
    let sp4 = model(4, -1, 3, ModelKind::Sutherland, Coupling::Star);
    let r = run_model_suite(&sp4, &cfg().only(&["serre.yangian"])).unwrap();
    let sp4_star = status(&r, "serre.yangian") == Some(CheckStatus::Pass);
    let r =
        run_model_suite(&sp4.with_lambda(Coupling::Explicit(Rational::from_int(1))), &cfg().only(&["serre.yangian"]))
            .unwrap();
    let sp4_one = status(&r, "serre.yangian") == Some(CheckStatus::Fail);
    notes.push(format!(
        "sp(4): {} at lambda*, {} at lambda = 1",
        if sp4_star { "passes" } else { "FAILS" },
        if sp4_one { "fails" } else { "PASSES" }
    ));
    let pass = star_ok && one_fails;
    Verdict::new(pass, format!("sp(2), so(3) pass at lambda*: {star_ok}; {}", notes.join("; ")))
}

fn criterion_6(ledger: &mut Ledger) -> Verdict {
    let mut bad = Vec::new();
    for (n, t) in [(2, -1), (3, 1)] {
        let alg = algebra(n, t);
        let ms = model(n, t, 3, ModelKind::Confined, Coupling::Star);
        let r = run_model_suite(&ms, &cfg()).unwrap();
        bad.extend(failures(&r).into_iter().map(|f| format!("{alg}: {f}")));
        for name in ["conservation.level1", "relations.level1", "serre.yangian", "serre.omega-limit", "serre.scaling"] {
            if r.find(name).is_none() {
                bad.push(format!("{alg}: {name} did not run"));
            }
        }
        ledger.keep(format!("confined {alg}"), &r);
    }
    Verdict::new(
        bad.is_empty(),
        format!("sp(2), so(3), omega symbolic, omega -> 0 matches the half-loop text{}", joined(&bad)),
    )
}

fn criterion_7(ledger: &mut Ledger) -> Verdict {
    let mut bad = Vec::new();
    let mut count = 0;
    for (n, t) in LIE_SPECS {
        let alg = algebra(n, t);
        if alg.is_degenerate() {
            continue;
        }
        count += 1;
        let r = run_lie_suite(alg, &cfg().only(&["appendix", "oracle"])).unwrap();
        if status(&r, "appendix.f") != Some(CheckStatus::Pass) {
            bad.push(alg.to_string());
        }
        ledger.keep(format!("appendix {alg}"), &r);
    }
    Verdict::new(bad.is_empty(), format!("f = 1 for {count} non-degenerate algebras{}", joined(&bad)))
}

fn criterion_8(ledger: &mut Ledger) -> Verdict {
    let mut bad = Vec::new();
    for (n, t) in [(2, 1), (2, -1), (3, 1), (4, 1), (4, -1)] {
        let alg = algebra(n, t);
        let r = run_lie_suite(alg, &cfg().only(&["spin", "oracle"])).unwrap();
        bad.extend(failures(&r).into_iter().map(|f| format!("{alg}: {f}")));
        if status(&r, "spin.dense-agreement") != Some(CheckStatus::Pass) {
            bad.push(format!("{alg}: dense oracle"));
        }
        ledger.keep(format!("spin {alg}"), &r);
    }
    Verdict::new(bad.is_empty(), format!("N = 2, 3, 4, symbolic and dense{}", joined(&bad)))
}

fn criterion_9(ledger: &Ledger) -> Verdict {
    let bad: Vec<String> = ledger
        .oracle
        .iter()
        .filter(|(_, s, d)| *s != CheckStatus::Pass || *d)
        .map(|(l, s, _)| format!("{l}: {s:?}"))
        .collect();
    Verdict::new(
        bad.is_empty() && !ledger.oracle.is_empty(),
        format!("{} oracle runs, 20 trials per identity family{}", ledger.oracle.len(), joined(&bad)),
    )
}

fn cli(args: &[&str]) -> (Option<i32>, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_spinalg"))
        .args(args)
        .env_remove("SPINALG_JOBS")
        .env_remove("SPINALG_TERM_CEILING")
        .output()
        .expect("binary runs");
    (out.status.code(), String::from_utf8(out.stdout).unwrap())
}

fn top_level_keys(text: &str) -> Vec<String> {
    let v: Value = serde_json::from_str(text).unwrap();
    let mut keys: Vec<(usize, String)> = v
        .as_object()
        .unwrap()
        .keys()
        .map(|k| (text.find(&format!("\n  \"{k}\"")).unwrap_or(usize::MAX), k.clone()))
        .collect();
    keys.sort();
    keys.into_iter().map(|(_, k)| k).collect()
}

fn criterion_10() -> Verdict {
    let golden = |name: &str| {
        std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
    };
    let mut bad = Vec::new();
    let (code, _) =
        cli(&["model", "--model", "calogero", "--N", "3", "--theta0", "+1", "--L", "3", "--lambda", "star"]);
    if code != Some(0) {
        bad.push(format!("so(3) star exit {code:?}"));
    }
    let (code, _) =
        cli(&["model", "--model", "calogero", "--N", "4", "--theta0", "+1", "--L", "3", "--lambda", "star"]);
    if code != Some(2) {
        bad.push(format!("so(4) star exit {code:?}"));
    }
    let (code, text) = cli(&[
        "solve-lambda",
        "--model",
        "sutherland",
        "--N",
        "2",
        "--theta0",
        "-1",
        "--L",
        "3",
        "--format",
        "json",
        "--no-timing",
    ]);
    if code != Some(0) {
        bad.push(format!("solve-lambda exit {code:?}"));
    }
    let v: Value = serde_json::from_str(&text).unwrap();
    if v["lambda_roots"] != serde_json::json!(["1/3"]) {
        bad.push(format!("lambda_roots {}", v["lambda_roots"]));
    }
    if top_level_keys(&text) != ["spec", "lambda_roots", "checks", "summary", "engine_version"] {
        bad.push(format!("key order {:?}", top_level_keys(&text)));
    }
    if text != golden("solve_sp2_sutherland.json") {
        bad.push("solve-lambda JSON differs from golden".into());
    }
    let (_, text) = cli(&[
        "model",
        "--model",
        "calogero",
        "--N",
        "3",
        "--theta0",
        "+1",
        "--L",
        "3",
        "--lambda",
        "star",
        "--format",
        "json",
        "--no-timing",
    ]);
    if top_level_keys(&text) != ["spec", "checks", "summary", "engine_version"] || text != golden("model_so3_star.json")
    {
        bad.push("model JSON differs from golden".into());
    }
    Verdict::new(bad.is_empty(), format!("exit codes 0, 2, 0; JSON matches golden files{}", joined(&bad)))
}

fn joined(bad: &[String]) -> String {
    if bad.is_empty() {
        String::new()
    } else {
        format!("; problems: {}", bad.join(", "))
    }
}

fn main() {
    let titles = [
        "Lie structure suite",
        "Calogero conservation",
        "coupling solver",
        "half-loop Serre",
        "Yangian Serre",
        "confined model",
        "appendix function",
        "spin identities",
        "oracle cross-check",
        "CLI golden runs",
    ];
    let mut ledger = Ledger::default();
    let mut verdicts: Vec<(u8, Verdict, Duration)> = Vec::new();
    type Run<'a> = Box<dyn FnOnce(&mut Ledger) -> Verdict + 'a>;
    let runs: Vec<(u8, Run)> = vec![
        (1, Box::new(criterion_1)),
        (2, Box::new(criterion_2)),
        (3, Box::new(|_| criterion_3())),
        (4, Box::new(criterion_4)),
        (5, Box::new(criterion_5)),
        (6, Box::new(criterion_6)),
        (7, Box::new(criterion_7)),
        (8, Box::new(criterion_8)),
        (9, Box::new(|l| criterion_9(l))),
        (10, Box::new(|_| criterion_10())),
    ];
    for (id, run) in runs {
        let start = Instant::now();
        let v = run(&mut ledger);
        let took = start.elapsed();
        let label = if v.pass { "PASS" } else { "FAIL" };
        let tag = if !v.pass && DOCUMENTED.contains(&id) { " [documented]" } else { "" };
        println!(
            "criterion {id:>2}: {label}{tag}  {} ({:.1} s): {}",
            titles[id as usize - 1],
            took.as_secs_f64(),
            v.detail
        );
        verdicts.push((id, v, took));
    }
    let passed = verdicts.iter().filter(|(_, v, _)| v.pass).count();
    let unexpected: Vec<u8> =
        verdicts.iter().filter(|(id, v, _)| !v.pass && !DOCUMENTED.contains(id)).map(|(id, _, _)| *id).collect();
    println!("acceptance: {passed}/{} criteria pass", verdicts.len());
    if !unexpected.is_empty() {
        println!("acceptance: unexpected failures in criteria {unexpected:?}");
        std::process::exit(1);
    }
}
