use std::collections::BTreeMap;

use rustc_hash::FxHashMap;

use super::op::{Operator, Shape};
use super::words::{DerivMono, SpinState};
use super::OperatorError;
use crate::arith::{RatFunc, Var};
use crate::Scalar;

/// A spin-vector-valued function `Σ_σ ψ_σ(x) e_σ` with rational-function
/// components. Operators act on it directly, without forming operator
/// products, which makes it an independent route for checking identities.
#[derive(Clone, PartialEq, Eq)]
pub struct SpinField<C> {
    shape: Shape,
    comps: BTreeMap<SpinState, RatFunc<C>>,
}

/// Exact values for every variable at one evaluation point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalPoint<C> {
    pub positions: Vec<C>,
    pub lambda: Option<C>,
    pub omega: Option<C>,
}

impl<C: Scalar> EvalPoint<C> {
    pub fn positions(positions: Vec<C>) -> Self {
        EvalPoint { positions, lambda: None, omega: None }
    }

    fn value(&self, v: Var) -> Option<C> {
        match v {
            Var::X(j) => self.positions.get(j - 1).cloned(),
            Var::Lambda => self.lambda.clone(),
            Var::Omega => self.omega.clone(),
        }
    }
}

impl<C: Scalar> std::fmt::Debug for SpinField<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map().entries(self.comps.iter()).finish()
    }
}

impl<C: Scalar> SpinField<C> {
    pub fn zero(shape: Shape) -> Self {
        SpinField { shape, comps: BTreeMap::new() }
    }

    pub fn from_components<I>(shape: Shape, comps: I) -> Self
    where
        I: IntoIterator<Item = (SpinState, RatFunc<C>)>,
    {
        let mut groups: BTreeMap<SpinState, Vec<RatFunc<C>>> = BTreeMap::new();
        for (s, r) in comps {
            groups.entry(s).or_default().push(r);
        }
        let comps = groups
            .into_iter()
            .filter_map(|(s, parts)| {
                let v = RatFunc::sum(parts.iter());
                (!v.is_zero()).then_some((s, v))
            })
            .collect();
        SpinField { shape, comps }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn components(&self) -> impl Iterator<Item = (&SpinState, &RatFunc<C>)> {
        self.comps.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_components(self.shape, self.comps.iter().chain(other.comps.iter()).map(|(s, r)| (*s, r.clone())))
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_components(self.shape, self.comps.iter().map(|(s, r)| (*s, r.scale(c))))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-C::one()))
    }

    /// Multiplies every component by `f`.
    pub fn mul_function(&self, f: &RatFunc<C>) -> Self {
        Self::from_components(self.shape, self.comps.iter().map(|(s, r)| (*s, f * r)))
    }

    /// Exact values of the components at `point`.
    pub fn evaluate(&self, point: &EvalPoint<C>) -> Result<BTreeMap<SpinState, C>, OperatorError> {
        let mut out = BTreeMap::new();
        for (s, r) in &self.comps {
            let missing = std::cell::Cell::new(None);
            let v = r.evaluate(|var| {
                point.value(var).unwrap_or_else(|| {
                    missing.set(Some(var));
                    C::zero()
                })
            })?;
            if let Some(var) = missing.get() {
                return Err(OperatorError::UnboundVariable(var));
            }
            if !v.is_zero() {
                out.insert(*s, v);
            }
        }
        Ok(out)
    }
}

impl<C: Scalar> Operator<C> {
    /// Applies the operator to a field: derivatives act on the components,
    /// coefficients multiply, and spin words act on the basis states.
    pub fn act(&self, field: &SpinField<C>) -> Result<SpinField<C>, OperatorError> {
        if self.shape() != field.shape {
            return Err(OperatorError::ShapeMismatch { left: self.shape(), right: field.shape });
        }
        let mut derived: FxHashMap<(SpinState, DerivMono), RatFunc<C>> = FxHashMap::default();
        let mut groups: BTreeMap<SpinState, Vec<RatFunc<C>>> = BTreeMap::new();
        for ((deriv, spin), coeff) in self.terms() {
            for (state, psi) in &field.comps {
                let Some(target) = spin.apply(state) else { continue };
                let d = derived
                    .entry((*state, *deriv))
                    .or_insert_with(|| {
                        let mut r = psi.clone();
                        for (site, order) in deriv.iter() {
                            for _ in 0..order {
                                r = r.derivative(Var::X(site));
                            }
                        }
                        r
                    })
                    .clone();
                if d.is_zero() {
                    continue;
                }
                groups.entry(target).or_default().push(coeff * &d);
            }
        }
        let comps = groups
            .into_iter()
            .filter_map(|(s, parts)| {
                let v = RatFunc::sum(parts.iter());
                (!v.is_zero()).then_some((s, v))
            })
            .collect();
        Ok(SpinField { shape: self.shape(), comps })
    }

    /// Applies to a test field and evaluates the result at `point`.
    pub fn apply(&self, test: &SpinField<C>, point: &EvalPoint<C>) -> Result<BTreeMap<SpinState, C>, OperatorError> {
        distinct_positions(point)?;
        self.act(test)?.evaluate(point)
    }
}

fn distinct_positions<C: Scalar>(point: &EvalPoint<C>) -> Result<(), OperatorError> {
    for (i, a) in point.positions.iter().enumerate() {
        for (j, b) in point.positions.iter().enumerate().skip(i + 1) {
            if a == b {
                return Err(OperatorError::Substitution(crate::arith::SubstitutionError::PoleEvaluation(
                    crate::arith::SitePair::new(i + 1, j + 1),
                )));
            }
        }
    }
    Ok(())
}
