use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use crate::lie::{AlgebraSpec, GeneratorIndex};
use crate::models::ModelSpec;
use crate::operator::Operator;
use crate::Scalar;

/// Witness lines kept per failing check.
pub const WITNESS_TERMS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
    Error,
}

impl CheckStatus {
    pub fn label(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skipped => "SKIP",
            CheckStatus::Error => "ERROR",
        }
    }
}

/// Parameters a check ran under.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Params {
    pub n: usize,
    pub theta0: i8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sites: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<String>,
}

impl Params {
    pub fn algebra(spec: AlgebraSpec) -> Self {
        Params { n: spec.n(), theta0: spec.theta0(), sites: None, model: None, lambda: None, omega: None }
    }

    pub fn model<C: Scalar>(ms: &ModelSpec<C>) -> Self {
        use crate::models::ModelKind;
        Params {
            sites: Some(ms.sites),
            model: Some(ms.kind.name().to_string()),
            lambda: Some(ms.lambda.to_string()),
            omega: (ms.kind == ModelKind::Confined).then(|| ms.omega.to_string()),
            ..Params::algebra(ms.algebra)
        }
    }

    pub fn with_lambda(mut self, lambda: impl Into<String>) -> Self {
        self.lambda = Some(lambda.into());
        self
    }

    pub fn with_sites(mut self, sites: usize) -> Self {
        self.sites = Some(sites);
        self
    }

    fn render(&self) -> String {
        let mut s = format!("N={} theta0={:+}", self.n, self.theta0);
        if let Some(l) = self.sites {
            let _ = write!(s, " L={l}");
        }
        if let Some(m) = &self.model {
            let _ = write!(s, " model={m}");
        }
        if let Some(l) = &self.lambda {
            let _ = write!(s, " lambda={l}");
        }
        if let Some(o) = &self.omega {
            let _ = write!(s, " omega={o}");
        }
        s
    }
}

/// Counterexample: the basis indices involved and the first offending terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub indices: Vec<String>,
    pub terms: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Witness {
    pub fn from_operator<C: Scalar>(indices: &[GeneratorIndex], op: &Operator<C>) -> Self {
        Witness {
            indices: indices.iter().map(|g| g.to_string()).collect(),
            terms: op.lines(WITNESS_TERMS),
            note: (op.len() > WITNESS_TERMS).then(|| format!("{} terms in total", op.len())),
        }
    }

    pub fn message(text: impl Into<String>) -> Self {
        Witness { indices: Vec::new(), terms: Vec::new(), note: Some(text.into()) }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        let note = note.into();
        self.note = Some(match self.note.take() {
            Some(old) => format!("{old}; {note}"),
            None => note,
        });
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub params: Params,
    pub status: CheckStatus,
    pub millis: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    pub fn new(name: &str, params: Params, status: CheckStatus) -> Self {
        CheckResult { name: name.to_string(), params, status, millis: 0, witness: None, note: None }
    }

    pub fn pass(name: &str, params: Params) -> Self {
        Self::new(name, params, CheckStatus::Pass)
    }

    pub fn fail(name: &str, params: Params, witness: Witness) -> Self {
        CheckResult { witness: Some(witness), ..Self::new(name, params, CheckStatus::Fail) }
    }

    pub fn skipped(name: &str, params: Params, why: impl Into<String>) -> Self {
        CheckResult { note: Some(why.into()), ..Self::new(name, params, CheckStatus::Skipped) }
    }

    pub fn error(name: &str, params: Params, why: impl Into<String>) -> Self {
        CheckResult { note: Some(why.into()), ..Self::new(name, params, CheckStatus::Error) }
    }

    /// Pass, or fail with the given witness.
    pub fn verdict(name: &str, params: Params, witness: Option<Witness>) -> Self {
        match witness {
            None => Self::pass(name, params),
            Some(w) => Self::fail(name, params, w),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        let note = note.into();
        self.note = Some(match self.note.take() {
            Some(old) => format!("{old}; {note}"),
            None => note,
        });
        self
    }

    pub fn is_pass(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

/// Runs `f` and records its wall time when `timing` is on.
pub(crate) fn timed(timing: bool, f: impl FnOnce() -> CheckResult) -> CheckResult {
    let start = Instant::now();
    let mut r = f();
    r.millis = if timing { start.elapsed().as_millis() as u64 } else { 0 };
    r
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
    pub error: usize,
    pub oracle_disagreement: bool,
}

/// What was run, echoed at the top of a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunInfo {
    pub command: String,
    pub algebra: String,
    pub n: usize,
    pub theta0: i8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sites: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transcription: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl RunInfo {
    pub fn algebra(command: &str, spec: AlgebraSpec) -> Self {
        RunInfo {
            command: command.to_string(),
            algebra: spec.name(),
            n: spec.n(),
            theta0: spec.theta0(),
            sites: None,
            model: None,
            lambda: None,
            omega: None,
            transcription: None,
            seed: None,
        }
    }

    pub fn model<C: Scalar>(command: &str, ms: &ModelSpec<C>, seed: Option<u64>) -> Self {
        let p = Params::model(ms);
        RunInfo {
            sites: p.sites,
            model: p.model,
            lambda: p.lambda,
            omega: p.omega,
            transcription: Some(ms.transcription.name().to_string()),
            seed,
            ..RunInfo::algebra(command, ms.algebra)
        }
    }
}

/// Ordered check results with tallies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub spec: RunInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_roots: Option<Vec<String>>,
    pub checks: Vec<CheckResult>,
    pub summary: Summary,
    pub engine_version: String,
}

impl CheckReport {
    /// Sorts by check name, then parameters, and tallies the statuses.
    pub fn new(spec: RunInfo, mut checks: Vec<CheckResult>, oracle_disagreement: bool) -> Self {
        checks.sort_by(|a, b| (&a.name, &a.params).cmp(&(&b.name, &b.params)));
        let count = |s| checks.iter().filter(|c| c.status == s).count();
        let summary = Summary {
            total: checks.len(),
            pass: count(CheckStatus::Pass),
            fail: count(CheckStatus::Fail),
            skipped: count(CheckStatus::Skipped),
            error: count(CheckStatus::Error),
            oracle_disagreement,
        };
        CheckReport { spec, lambda_roots: None, checks, summary, engine_version: crate::ENGINE_VERSION.to_string() }
    }

    pub fn with_lambda_roots(mut self, roots: Vec<String>) -> Self {
        self.lambda_roots = Some(roots);
        self
    }

    pub fn all_passed(&self) -> bool {
        self.summary.fail == 0 && self.summary.error == 0 && !self.summary.oracle_disagreement
    }

    pub fn find(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Plain-text rendering with the same verdicts as the JSON form.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let s = &self.spec;
        let _ = write!(out, "{} {}", s.command, s.algebra);
        if let Some(l) = s.sites {
            let _ = write!(out, " L={l}");
        }
        if let Some(m) = &s.model {
            let _ = write!(out, " model={m}");
        }
        if let Some(l) = &s.lambda {
            let _ = write!(out, " lambda={l}");
        }
        if let Some(o) = &s.omega {
            let _ = write!(out, " omega={o}");
        }
        let _ = writeln!(out, " (engine {})", self.engine_version);
        if self.summary.oracle_disagreement {
            let _ = writeln!(out, "!!! ORACLE DISAGREEMENT: symbolic and evaluated results differ !!!");
        }
        if let Some(roots) = &self.lambda_roots {
            let _ = writeln!(out, "lambda roots: {{{}}}", roots.join(", "));
        }
        for c in &self.checks {
            let _ = writeln!(out, "{:<5} {:<28} {} ({} ms)", c.status.label(), c.name, c.params.render(), c.millis);
            if let Some(n) = &c.note {
                let _ = writeln!(out, "      note: {n}");
            }
            if let Some(w) = &c.witness {
                if !w.indices.is_empty() {
                    let _ = writeln!(out, "      at {}", w.indices.join(" "));
                }
                for t in &w.terms {
                    let _ = writeln!(out, "      {t}");
                }
                if let Some(n) = &w.note {
                    let _ = writeln!(out, "      {n}");
                }
            }
        }
        let m = &self.summary;
        let _ = writeln!(
            out,
            "summary: {} checks, {} pass, {} fail, {} skipped, {} error",
            m.total, m.pass, m.fail, m.skipped, m.error
        );
        out
    }
}
