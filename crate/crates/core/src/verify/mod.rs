//! Check suites over exact operators: conservation, level relations, Serre
//! identities, the coupling solver, Lie-structure and spin identities, and
//! an evaluation-based oracle that re-checks passing identities.

mod context;
mod lie_checks;
mod model_checks;
mod oracle;
mod report;
mod serre;
mod solve;

use rayon::prelude::*;
use thiserror::Error;

use crate::lie::{AlgebraSpec, LieError};
use crate::models::{ModelError, ModelSpec};
use crate::operator::OperatorError;
use crate::spin_ops::SpinOpError;
use crate::Rational;

pub use context::ModelContext;
pub use lie_checks::{check_appendix_bar_extension, check_appendix_f, check_lie_structure, check_pq_identities};
pub use model_checks::{check_conservation, check_level_relations};
pub use oracle::{lie_oracle_crosscheck, oracle_crosscheck, Expr, TestPoint};
pub use report::{CheckReport, CheckResult, CheckStatus, Params, RunInfo, Summary, Witness, WITNESS_TERMS};
pub use serre::{check_serre_halfloop, check_serre_yangian, serre_lhs, SerreCoefficients, SYMMETRIZER_PREFACTORS};
pub use solve::{solve_lambda, LambdaSolution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    SpinOp(#[from] SpinOpError),
    #[error("at least one oracle trial is required")]
    NoTrials,
    #[error("could not start a worker pool: {0}")]
    Pool(String),
}

/// Check groups run by default for a model.
pub const MODEL_GROUPS: [&str; 4] = ["conservation", "relations", "serre", "oracle"];
/// Check groups run by default for an algebra.
pub const LIE_GROUPS: [&str; 4] = ["lie", "spin", "appendix", "oracle"];
/// Checks that only run when named explicitly.
pub const OPT_IN: [&str; 1] = ["relations.level1-symbolic"];

/// Options shared by every suite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteConfig {
    /// Check names or group prefixes; `None` selects the defaults.
    pub checks: Option<Vec<String>>,
    /// Worker threads; `None` lets rayon decide.
    pub jobs: Option<usize>,
    pub seed: u64,
    pub trials: usize,
    pub term_ceiling: Option<usize>,
    pub timing: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { checks: None, jobs: None, seed: 1, trials: 20, term_ceiling: None, timing: true }
    }
}

impl SuiteConfig {
    pub fn only(mut self, checks: &[&str]) -> Self {
        self.checks = Some(checks.iter().map(|s| s.to_string()).collect());
        self
    }

    /// Whether check `name` is selected, given the suite's default groups.
    pub fn selects(&self, name: &str, defaults: &[&str]) -> bool {
        let in_group = |g: &str| name == g || name.strip_prefix(g).is_some_and(|r| r.starts_with('.'));
        match &self.checks {
            Some(list) => list.iter().any(|item| if OPT_IN.contains(&name) { item == name } else { in_group(item) }),
            None => !OPT_IN.contains(&name) && defaults.iter().any(|g| in_group(g)),
        }
    }

    fn pool(&self) -> Result<rayon::ThreadPool, VerifyError> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(j) = self.jobs {
            b = b.num_threads(j.max(1));
        }
        b.build().map_err(|e| VerifyError::Pool(e.to_string()))
    }
}

/// Runs the selected model checks, then the oracle over those that passed.
pub fn run_model_suite(spec: &ModelSpec<Rational>, cfg: &SuiteConfig) -> Result<CheckReport, VerifyError> {
    let ctx = ModelContext::new(spec.clone(), cfg.clone())?;
    let pool = cfg.pool()?;
    pool.install(|| {
        type Job = fn(&ModelContext) -> Vec<CheckResult>;
        let jobs: [(&[&str], Job); 3] = [
            (&["conservation.level0", "conservation.level1"], |c| check_conservation(c)),
            (
                &[
                    "relations.level0",
                    "relations.level1",
                    "relations.level1-symbolic",
                    "relations.level2",
                    "relations.o-half-loop",
                ],
                |c| check_level_relations(c),
            ),
            (&["serre.half-loop", "serre.yangian", "serre.omega-limit", "serre.scaling"], |c| {
                let mut out = check_serre_halfloop(c);
                out.extend(check_serre_yangian(c));
                out
            }),
        ];
        let mut checks: Vec<CheckResult> = jobs
            .par_iter()
            .filter(|(names, _)| names.iter().any(|n| cfg.selects(n, &MODEL_GROUPS)))
            .flat_map(|(_, job)| job(&ctx))
            .collect();
        let mut disagreement = false;
        if cfg.selects("oracle.crosscheck", &MODEL_GROUPS) {
            let passed: Vec<String> = checks.iter().filter(|c| c.is_pass()).map(|c| c.name.clone()).collect();
            let (r, bad) = oracle_crosscheck(&ctx, &passed);
            disagreement = bad;
            checks.push(r);
        }
        Ok(CheckReport::new(RunInfo::model("model", spec, Some(cfg.seed)), checks, disagreement))
    })
}

/// Lie-structure, spin-identity and appendix checks for one algebra.
pub fn run_lie_suite(spec: AlgebraSpec, cfg: &SuiteConfig) -> Result<CheckReport, VerifyError> {
    let pool = cfg.pool()?;
    pool.install(|| {
        let mut checks: Vec<CheckResult> = Vec::new();
        type Group = fn(AlgebraSpec, &SuiteConfig) -> Vec<CheckResult>;
        let groups: [Group; 3] = [
            |s, c| check_lie_structure(s, c),
            |s, c| check_pq_identities(s, c),
            |s, c| vec![check_appendix_f(s, None, c), check_appendix_bar_extension(s, c)],
        ];
        let results: Vec<Vec<CheckResult>> = groups.par_iter().map(|run| run(spec, cfg)).collect();
        for r in results.into_iter().flatten() {
            if cfg.selects(&r.name, &LIE_GROUPS) {
                checks.push(r);
            }
        }
        let mut disagreement = false;
        if cfg.selects("oracle.crosscheck", &LIE_GROUPS) {
            let passed: Vec<String> = checks.iter().filter(|c| c.is_pass()).map(|c| c.name.clone()).collect();
            let (r, bad) = lie_oracle_crosscheck(spec, cfg, &passed);
            disagreement = bad;
            checks.push(r);
        }
        let mut info = RunInfo::algebra("lie", spec);
        info.seed = Some(cfg.seed);
        Ok(CheckReport::new(info, checks, disagreement))
    })
}

/// The coupling solver as a report with a single `solve.lambda` check.
pub fn run_solve_lambda(spec: &ModelSpec<Rational>, cfg: &SuiteConfig) -> Result<CheckReport, VerifyError> {
    let pool = cfg.pool()?;
    let (result, roots) = pool.install(|| solve::check_solve_lambda(spec, cfg))?;
    let info = RunInfo::model("solve-lambda", &spec.with_lambda(crate::models::Coupling::Symbolic), None);
    Ok(CheckReport::new(info, vec![result], false).with_lambda_roots(roots.iter().map(|r| r.to_string()).collect()))
}
