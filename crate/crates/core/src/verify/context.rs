use std::sync::OnceLock;

use super::report::{timed, CheckResult, Params};
use super::{SuiteConfig, VerifyError};
use crate::lie::LieTables;
use crate::models::{Coupling, Model, ModelSpec};
use crate::operator::Operator;
use crate::Rational;

type Op = Operator<Rational>;
type Cached<T> = OnceLock<Result<T, VerifyError>>;

/// A model with its tables and lazily built operator grids, shared by the
/// checks of one run.
pub struct ModelContext {
    pub model: Model<Rational>,
    /// The same model with λ left symbolic.
    pub symbolic: Model<Rational>,
    pub tables: LieTables<Rational>,
    pub cfg: SuiteConfig,
    hamiltonian: Cached<Op>,
    hamiltonian_symbolic: Cached<Op>,
    level0: Cached<Vec<Op>>,
    level1: Cached<Vec<Op>>,
    level1_symbolic: Cached<Vec<Op>>,
}

impl ModelContext {
    pub fn new(spec: ModelSpec<Rational>, cfg: SuiteConfig) -> Result<Self, VerifyError> {
        let model = Model::new(spec.clone())?;
        let symbolic = Model::new(spec.with_lambda(Coupling::Symbolic))?;
        let tables = LieTables::new(spec.algebra)?;
        Ok(ModelContext {
            model,
            symbolic,
            tables,
            cfg,
            hamiltonian: OnceLock::new(),
            hamiltonian_symbolic: OnceLock::new(),
            level0: OnceLock::new(),
            level1: OnceLock::new(),
            level1_symbolic: OnceLock::new(),
        })
    }

    pub fn spec(&self) -> &ModelSpec<Rational> {
        self.model.spec()
    }

    pub fn params(&self) -> Params {
        Params::model(self.spec())
    }

    pub fn dim(&self) -> usize {
        self.tables.basis().len()
    }

    pub fn ceiling(&self) -> Option<usize> {
        self.cfg.term_ceiling
    }

    pub fn hamiltonian(&self) -> Result<&Op, VerifyError> {
        cached(&self.hamiltonian, || Ok(self.model.hamiltonian()?))
    }

    pub fn hamiltonian_symbolic(&self) -> Result<&Op, VerifyError> {
        cached(&self.hamiltonian_symbolic, || Ok(self.symbolic.hamiltonian()?))
    }

    /// Level-0 generators over the basis.
    pub fn level0(&self) -> Result<&[Op], VerifyError> {
        cached(&self.level0, || Ok(self.model.generators(0)?)).map(Vec::as_slice)
    }

    /// Level-1 generators over the basis, at the spec's λ.
    pub fn level1(&self) -> Result<&[Op], VerifyError> {
        cached(&self.level1, || Ok(self.model.generators(1)?)).map(Vec::as_slice)
    }

    pub fn level1_symbolic(&self) -> Result<&[Op], VerifyError> {
        cached(&self.level1_symbolic, || Ok(self.symbolic.generators(1)?)).map(Vec::as_slice)
    }

    /// A timed check; errors become `status = error`.
    pub(crate) fn run(
        &self,
        name: &str,
        params: Params,
        f: impl FnOnce() -> Result<CheckResult, VerifyError>,
    ) -> CheckResult {
        run_check(self.cfg.timing, name, params, f)
    }

    /// The note attached to checks whose constraint needs three sites.
    pub(crate) fn weak_note(&self) -> Option<&'static str> {
        (self.spec().sites < 3).then_some("weak: L = 2 has no three-site terms")
    }
}

fn cached<T>(cell: &Cached<T>, build: impl FnOnce() -> Result<T, VerifyError>) -> Result<&T, VerifyError> {
    cell.get_or_init(build).as_ref().map_err(Clone::clone)
}

pub(crate) fn run_check(
    timing: bool,
    name: &str,
    params: Params,
    f: impl FnOnce() -> Result<CheckResult, VerifyError>,
) -> CheckResult {
    timed(timing, || match f() {
        Ok(r) => r,
        Err(e) => CheckResult::error(name, params, e.to_string()),
    })
}
