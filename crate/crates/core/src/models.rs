//! Hamiltonians and symmetry generators of the Calogero, Sutherland and
//! confined Calogero spin models.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{RatFunc, Var};
use crate::lie::{AlgebraSpec, GeneratorIndex, LieError};
use crate::operator::{Operator, OperatorError, Shape};
use crate::spin_ops::{sum, SpinOpError, SpinOps};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(
        "the special coupling 2/(N - 4 theta0) is undefined for {0}: N = 4 theta0 selects so(4), \
         which is not a simple Lie algebra"
    )]
    DegenerateCoupling(AlgebraSpec),
    #[error("generator index {0} is not in the basis of {1}")]
    NotInBasis(GeneratorIndex, AlgebraSpec),
    #[error("at least 2 particles are required (got {0})")]
    TooFewSites(usize),
    #[error("{what} is only defined for the {model} model")]
    WrongModel { what: &'static str, model: ModelKind },
    #[error("level {0} is not provided")]
    Level(usize),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    SpinOp(#[from] SpinOpError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Calogero,
    Sutherland,
    Confined,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Calogero => "calogero",
            ModelKind::Sutherland => "sutherland",
            ModelKind::Confined => "confined",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How λ enters: the special value, a formal variable, or a number.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Coupling<C> {
    Star,
    Symbolic,
    Explicit(C),
}

/// Which transcription of the level-1 Sutherland and level-2 Calogero
/// generators to build. `Corrected` uses `-λ/2` for the two-site part of
/// `K_1` and `∂_j + ∂_k` in the first-order part of `J_2`; `AsPrinted` uses
/// `-λ` and `∂_j - ∂_k`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transcription {
    #[default]
    Corrected,
    AsPrinted,
}

impl Transcription {
    pub fn name(&self) -> &'static str {
        match self {
            Transcription::Corrected => "corrected",
            Transcription::AsPrinted => "as-printed",
        }
    }
}

/// How ω enters the confined model.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Frequency<C> {
    Symbolic,
    Explicit(C),
}

impl<C: Scalar> fmt::Display for Coupling<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coupling::Star => f.write_str("star"),
            Coupling::Symbolic => f.write_str("symbolic"),
            Coupling::Explicit(c) => write!(f, "{c}"),
        }
    }
}

impl<C: Scalar> fmt::Display for Frequency<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frequency::Symbolic => f.write_str("symbolic"),
            Frequency::Explicit(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModelSpec<C> {
    pub algebra: AlgebraSpec,
    pub sites: usize,
    pub kind: ModelKind,
    pub lambda: Coupling<C>,
    pub omega: Frequency<C>,
    pub transcription: Transcription,
}

impl<C: Scalar> ModelSpec<C> {
    pub fn new(algebra: AlgebraSpec, sites: usize, kind: ModelKind, lambda: Coupling<C>) -> Self {
        ModelSpec { algebra, sites, kind, lambda, omega: Frequency::Symbolic, transcription: Transcription::Corrected }
    }

    pub fn with_transcription(mut self, transcription: Transcription) -> Self {
        self.transcription = transcription;
        self
    }

    pub fn with_omega(mut self, omega: Frequency<C>) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_lambda(&self, lambda: Coupling<C>) -> Self {
        ModelSpec { lambda, ..self.clone() }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.sites < 2 {
            return Err(ModelError::TooFewSites(self.sites));
        }
        if self.lambda == Coupling::Star && self.algebra.is_degenerate() {
            return Err(ModelError::DegenerateCoupling(self.algebra));
        }
        Ok(())
    }

    /// The exact λ in force, or `None` when it is symbolic.
    pub fn lambda_value(&self) -> Result<Option<C>, ModelError> {
        match &self.lambda {
            Coupling::Star => {
                self.algebra.special_coupling().map(Some).ok_or(ModelError::DegenerateCoupling(self.algebra))
            }
            Coupling::Symbolic => Ok(None),
            Coupling::Explicit(c) => Ok(Some(c.clone())),
        }
    }
}

/// `{A, B, C}` with an explicit prefactor times the sum over the six orderings.
pub fn symmetrize3_with<C: Scalar>(
    prefactor: &C,
    a: &Operator<C>,
    b: &Operator<C>,
    c: &Operator<C>,
) -> Result<Operator<C>, OperatorError> {
    let shape = a.shape();
    let orders: [[&Operator<C>; 3]; 6] = [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]];
    let products =
        orders.iter().map(|[x, y, z]| x.checked_mul(y, None)?.checked_mul(z, None)).collect::<Result<Vec<_>, _>>()?;
    Operator::linear_combination(shape, products.iter().map(|p| (prefactor.clone(), p)))
}

/// `{A, B, C} = 1/24 Σ_{σ ∈ S_3}` of the permuted products.
pub fn symmetrize3<C: Scalar>(a: &Operator<C>, b: &Operator<C>, c: &Operator<C>) -> Result<Operator<C>, OperatorError> {
    symmetrize3_with(&C::from_frac(1, 24), a, b, c)
}

/// Builders for one model specification.
#[derive(Clone)]
pub struct Model<C> {
    spec: ModelSpec<C>,
    ops: SpinOps,
    lambda: RatFunc<C>,
    omega: RatFunc<C>,
}

impl<C: Scalar> Model<C> {
    pub fn new(spec: ModelSpec<C>) -> Result<Self, ModelError> {
        spec.validate()?;
        let lambda = match spec.lambda_value()? {
            Some(v) => RatFunc::constant(v),
            None => RatFunc::var(Var::Lambda),
        };
        let omega = match &spec.omega {
            Frequency::Symbolic => RatFunc::var(Var::Omega),
            Frequency::Explicit(c) => RatFunc::constant(c.clone()),
        };
        let ops = SpinOps::new(spec.algebra, spec.sites);
        Ok(Model { spec, ops, lambda, omega })
    }

    pub fn spec(&self) -> &ModelSpec<C> {
        &self.spec
    }

    pub fn shape(&self) -> Shape {
        self.ops.shape()
    }

    pub fn spin_ops(&self) -> &SpinOps {
        &self.ops
    }

    /// λ as a coefficient function (constant or the formal variable).
    pub fn lambda(&self) -> &RatFunc<C> {
        &self.lambda
    }

    pub fn omega(&self) -> &RatFunc<C> {
        &self.omega
    }

    fn sites(&self) -> usize {
        self.spec.sites
    }

    fn check_index(&self, ab: GeneratorIndex) -> Result<(), ModelError> {
        if self.spec.algebra.in_basis(ab) {
            Ok(())
        } else {
            Err(ModelError::NotInBasis(ab, self.spec.algebra))
        }
    }

    fn require(&self, kind: ModelKind, what: &'static str) -> Result<(), ModelError> {
        if self.spec.kind == kind {
            Ok(())
        } else {
            Err(ModelError::WrongModel { what, model: kind })
        }
    }

    fn ordered_pairs(&self) -> Vec<(usize, usize)> {
        let l = self.sites();
        (1..=l).flat_map(|j| (1..=l).filter(move |&k| k != j).map(move |k| (j, k))).collect()
    }

    fn x(&self, j: usize) -> RatFunc<C> {
        RatFunc::var(Var::X(j))
    }

    fn op(&self, f: RatFunc<C>) -> Operator<C> {
        Operator::function(self.shape(), f)
    }

    /// `λ² - λ P_{jk} + λ Q_{jk}`.
    fn pair_potential(&self, j: usize, k: usize) -> Result<Operator<C>, ModelError> {
        let lam = &self.lambda;
        let p = self.ops.p::<C>(j, k)?;
        let q = self.ops.q::<C>(j, k)?;
        let spin = &q - &p;
        Ok(&self.op(lam * lam) + &spin.mul_function(lam))
    }

    /// The model's Hamiltonian; `Σ_{j≠k}` runs over ordered pairs.
    pub fn hamiltonian(&self) -> Result<Operator<C>, ModelError> {
        let shape = self.shape();
        let mut parts = Vec::new();
        for j in 1..=self.sites() {
            let d = Operator::partial(shape, j);
            let kinetic = match self.spec.kind {
                ModelKind::Sutherland => {
                    let euler = d.mul_function(&self.x(j));
                    &euler * &euler
                }
                _ => &d * &d,
            };
            parts.push(-&kinetic);
        }
        for (j, k) in self.ordered_pairs() {
            let inv = RatFunc::inverse_difference(j, k);
            let mut weight = &inv * &inv;
            if self.spec.kind == ModelKind::Sutherland {
                weight = &weight * &(&self.x(j) * &self.x(k));
            }
            parts.push(self.pair_potential(j, k)?.mul_function(&weight));
        }
        if self.spec.kind == ModelKind::Confined {
            let w2 = &self.omega * &self.omega;
            for j in 1..=self.sites() {
                parts.push(self.op(&w2 * &(&self.x(j) * &self.x(j))));
            }
        }
        Ok(sum(shape, &parts))
    }

    fn level0(&self, ab: GeneratorIndex) -> Result<Operator<C>, ModelError> {
        let parts = (1..=self.sites()).map(|j| self.ops.f::<C>(j, ab.a, ab.b)).collect::<Result<Vec<_>, _>>()?;
        Ok(sum(self.shape(), &parts))
    }

    /// `J_n^{ab}` for `n ≤ 2`.
    pub fn gen_j(&self, level: usize, ab: GeneratorIndex) -> Result<Operator<C>, ModelError> {
        self.check_index(ab)?;
        match level {
            0 => self.level0(ab),
            1 => self.j1(ab),
            2 => self.j2(ab),
            n => Err(ModelError::Level(n)),
        }
    }

    fn j1(&self, ab: GeneratorIndex) -> Result<Operator<C>, ModelError> {
        let shape = self.shape();
        let mut parts = Vec::new();
        for j in 1..=self.sites() {
            parts.push(&self.ops.f::<C>(j, ab.a, ab.b)? * &Operator::partial(shape, j));
        }
        let minus_lambda = -&self.lambda;
        for (j, k) in self.ordered_pairs() {
            let w = &minus_lambda * &RatFunc::inverse_difference(j, k);
            parts.push(self.ops.ff::<C>(j, k, ab.a, ab.b)?.mul_function(&w));
        }
        Ok(sum(shape, &parts))
    }

    fn j2(&self, ab: GeneratorIndex) -> Result<Operator<C>, ModelError> {
        let shape = self.shape();
        let alg = self.spec.algebra;
        let (a, b) = (ab.a, ab.b);
        let lam = &self.lambda;
        let mut parts = Vec::new();
        for j in 1..=self.sites() {
            let d = Operator::partial(shape, j);
            parts.push(&self.ops.f::<C>(j, a, b)? * &(&d * &d));
        }
        let sign = C::from_int((alg.theta(a)? * alg.theta(b)?) as i64);
        for (j, k) in self.ordered_pairs() {
            let inv = RatFunc::inverse_difference(j, k);
            let ff = self.ops.ff::<C>(j, k, a, b)?;
            let grad = match self.spec.transcription {
                Transcription::Corrected => &Operator::partial(shape, j) + &Operator::partial(shape, k),
                Transcription::AsPrinted => &Operator::partial(shape, j) - &Operator::partial(shape, k),
            };
            parts.push(&ff.mul_function(&(&-lam * &inv)) * &grad);

            let middle = &(&self.ops.ee::<C>(j, k, a, b)?
                - &self.ops.ee::<C>(j, k, alg.bar(b)?, alg.bar(a)?)?.scale(&sign))
                - &self.ops.f::<C>(j, a, b)?.mul_function(lam);
            parts.push(middle.mul_function(&(lam * &(&inv * &inv))));
        }
        let minus_lam2 = -&(lam * lam);
        for (j, k) in self.ordered_pairs() {
            for l in 1..=self.sites() {
                if l == j || l == k {
                    continue;
                }
                let w = &minus_lam2 * &(&RatFunc::inverse_difference(j, k) * &RatFunc::inverse_difference(j, l));
                parts.push(self.ops.fff::<C>(k, j, l, a, b)?.mul_function(&w));
            }
        }
        Ok(sum(shape, &parts))
    }

    /// `K_n^{ab}` for `n ≤ 1` (Sutherland model).
    pub fn gen_k(&self, level: usize, ab: GeneratorIndex) -> Result<Operator<C>, ModelError> {
        self.require(ModelKind::Sutherland, "K_n")?;
        self.check_index(ab)?;
        match level {
            0 => self.level0(ab),
            1 => self.k1(ab),
            n => Err(ModelError::Level(n)),
        }
    }

    fn k1(&self, ab: GeneratorIndex) -> Result<Operator<C>, ModelError> {
        let shape = self.shape();
        let mut parts = Vec::new();
        for j in 1..=self.sites() {
            let euler = Operator::partial(shape, j).mul_function(&self.x(j));
            parts.push(&self.ops.f::<C>(j, ab.a, ab.b)? * &euler);
        }
        let minus_lambda = match self.spec.transcription {
            Transcription::Corrected => -&self.lambda.scale(&C::from_frac(1, 2)),
            Transcription::AsPrinted => -&self.lambda,
        };
        for (j, k) in self.ordered_pairs() {
            let w = &(&minus_lambda * &(&self.x(j) + &self.x(k))) * &RatFunc::inverse_difference(j, k);
            parts.push(self.ops.ff::<C>(j, k, ab.a, ab.b)?.mul_function(&w));
        }
        Ok(sum(shape, &parts))
    }

    /// `𝒪_n^{ab} = Σ_j F_j^{ab} x_j^n`.
    pub fn gen_o(&self, n: u32, ab: GeneratorIndex) -> Result<Operator<C>, ModelError> {
        self.check_index(ab)?;
        let mut parts = Vec::new();
        for j in 1..=self.sites() {
            let mut xn = RatFunc::one();
            for _ in 0..n {
                xn = &xn * &self.x(j);
            }
            parts.push(self.ops.f::<C>(j, ab.a, ab.b)?.mul_function(&xn));
        }
        Ok(sum(self.shape(), &parts))
    }

    /// `𝒥_0 = J_0`, `𝒥_1 = J_2 - ω² 𝒪_2` (confined model).
    pub fn gen_cal_j(&self, level: usize, ab: GeneratorIndex) -> Result<Operator<C>, ModelError> {
        self.require(ModelKind::Confined, "the confined generators")?;
        self.check_index(ab)?;
        match level {
            0 => self.level0(ab),
            1 => {
                let w2 = &self.omega * &self.omega;
                Ok(&self.j2(ab)? - &self.gen_o(2, ab)?.mul_function(&w2))
            }
            n => Err(ModelError::Level(n)),
        }
    }

    /// The model's level-`n` symmetry generator: `J_n` (Calogero), `K_n`
    /// (Sutherland) or `𝒥_n` (confined), for `n ≤ 1`.
    pub fn generator(&self, level: usize, ab: GeneratorIndex) -> Result<Operator<C>, ModelError> {
        match self.spec.kind {
            ModelKind::Calogero => self.gen_j(level, ab),
            ModelKind::Sutherland => self.gen_k(level, ab),
            ModelKind::Confined => self.gen_cal_j(level, ab),
        }
    }

    /// `generator(level, ·)` over the whole basis, built in parallel.
    pub fn generators(&self, level: usize) -> Result<Vec<Operator<C>>, ModelError> {
        self.spec.algebra.basis().par_iter().map(|&ab| self.generator(level, ab)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Rational, Scalar};

    type Op = Operator<Rational>;

    fn model(n: usize, t: i64, l: usize, kind: ModelKind, lam: Coupling<Rational>) -> Model<Rational> {
        Model::new(ModelSpec::new(AlgebraSpec::new(n, t).unwrap(), l, kind, lam)).unwrap()
    }

    fn g(a: usize, b: usize) -> GeneratorIndex {
        GeneratorIndex::new(a, b)
    }

    #[test]
    fn calogero_two_sites_matches_hand_expansion() {
        let m = model(3, 1, 2, ModelKind::Calogero, Coupling::Symbolic);
        let s = m.shape();
        let lam = RatFunc::var(Var::Lambda);
        let d1 = Op::partial(s, 1);
        let d2 = Op::partial(s, 2);
        let ops = m.spin_ops();
        let v = &(&Op::function(s, &lam * &lam) - &ops.p::<Rational>(1, 2).unwrap().mul_function(&lam))
            + &ops.q::<Rational>(1, 2).unwrap().mul_function(&lam);
        let inv = RatFunc::inverse_difference(1, 2);
        let two = RatFunc::constant(Rational::from_int(2));
        let expected = &(&-&(&d1 * &d1) - &(&d2 * &d2)) + &v.mul_function(&(&two * &(&inv * &inv)));
        assert_eq!(m.hamiltonian().unwrap(), expected);
    }

    #[test]
    fn sutherland_kinetic_expansion() {
        let m = model(2, -1, 2, ModelKind::Sutherland, Coupling::Explicit(Rational::from_int(0)));
        let s = m.shape();
        let mut expected = Op::zero(s);
        for j in 1..=2 {
            let x = RatFunc::var(Var::X(j));
            let d = Op::partial(s, j);
            expected = &expected - &(&d * &d).mul_function(&(&x * &x));
            expected = &expected - &d.mul_function(&x);
        }
        assert_eq!(m.hamiltonian().unwrap(), expected);
    }

    #[test]
    fn confined_reduces_to_calogero() {
        let spec = ModelSpec::new(AlgebraSpec::new(3, 1).unwrap(), 3, ModelKind::Confined, Coupling::Star);
        let conf = Model::<Rational>::new(spec.clone()).unwrap();
        let cal = Model::new(ModelSpec { kind: ModelKind::Calogero, ..spec }).unwrap();
        let h0 = conf.hamiltonian().unwrap().substitute(&[(Var::Omega, Rational::from_int(0))]).unwrap();
        assert_eq!(h0, cal.hamiltonian().unwrap());
        let j1 = conf.gen_cal_j(1, g(1, 2)).unwrap();
        assert_eq!(j1.substitute(&[(Var::Omega, Rational::from_int(0))]).unwrap(), cal.gen_j(2, g(1, 2)).unwrap());
    }

    #[test]
    fn level_one_two_sites() {
        let m = model(3, 1, 2, ModelKind::Calogero, Coupling::Symbolic);
        let s = m.shape();
        let ops = m.spin_ops();
        let lam = RatFunc::var(Var::Lambda);
        let f = |j| ops.f::<Rational>(j, 1, 2).unwrap();
        let ff = &ops.ff::<Rational>(1, 2, 1, 2).unwrap() - &ops.ff(2, 1, 1, 2).unwrap();
        let expected = &(&(&f(1) * &Op::partial(s, 1)) + &(&f(2) * &Op::partial(s, 2)))
            - &ff.mul_function(&(&lam * &RatFunc::inverse_difference(1, 2)));
        assert_eq!(m.gen_j(1, g(1, 2)).unwrap(), expected);
    }

    #[test]
    fn k_generators() {
        let m = model(2, -1, 3, ModelKind::Sutherland, Coupling::Symbolic);
        assert_eq!(m.gen_k(0, g(1, 1)).unwrap(), m.gen_j(0, g(1, 1)).unwrap());
        let k1 = m.gen_k(1, g(1, 2)).unwrap();
        let stripped = k1.substitute(&[(Var::Lambda, Rational::from_int(0))]).unwrap();
        let s = m.shape();
        let mut expected = Op::zero(s);
        for j in 1..=3 {
            let f = m.spin_ops().f::<Rational>(j, 1, 2).unwrap();
            expected = &expected + &(&f * &Op::partial(s, j).mul_function(&RatFunc::var(Var::X(j))));
        }
        assert_eq!(stripped, expected);
        assert!(m.gen_k(1, g(2, 2)).is_err());
        assert!(m.gen_cal_j(0, g(1, 1)).is_err());
    }

    #[test]
    fn o_generators() {
        let m = model(3, 1, 3, ModelKind::Calogero, Coupling::Symbolic);
        assert_eq!(m.gen_o(0, g(2, 1)).unwrap(), m.gen_j(0, g(2, 1)).unwrap());
    }

    #[test]
    fn star_rejected_for_so4() {
        let spec = ModelSpec::<Rational>::new(AlgebraSpec::new(4, 1).unwrap(), 3, ModelKind::Calogero, Coupling::Star);
        assert!(matches!(Model::new(spec), Err(ModelError::DegenerateCoupling(_))));
    }

    #[test]
    fn symmetriser_examples() {
        let m = model(2, -1, 2, ModelKind::Calogero, Coupling::Symbolic);
        let a = m.gen_j(0, g(1, 2)).unwrap();
        let b = m.gen_j(0, g(1, 1)).unwrap();
        let c = m.gen_j(0, g(2, 1)).unwrap();
        let cube = &(&a * &a) * &a;
        assert_eq!(symmetrize3(&a, &a, &a).unwrap(), cube.scale(&Rational::from_frac(1, 4)));
        assert_eq!(symmetrize3(&a, &b, &c).unwrap(), symmetrize3(&b, &a, &c).unwrap());
        assert!(symmetrize3(&Op::zero(m.shape()), &b, &c).unwrap().is_zero());
    }

    #[test]
    fn builders_are_deterministic() {
        let m = model(2, -1, 3, ModelKind::Calogero, Coupling::Star);
        assert_eq!(m.gen_j(2, g(1, 2)).unwrap(), m.gen_j(2, g(1, 2)).unwrap());
        assert_eq!(m.hamiltonian().unwrap(), m.hamiltonian().unwrap());
    }
}
