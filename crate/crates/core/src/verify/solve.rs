use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;

use super::context::run_check;
use super::report::{CheckResult, Params};
use super::{SuiteConfig, VerifyError};
use crate::arith::{UniPoly, Var};
use crate::models::{Coupling, Model, ModelSpec};
use crate::{Rational, Scalar};

/// Common roots in λ of every coefficient of `[H, G₁^{ab}]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaSolution {
    /// Nonzero rational roots, ascending.
    pub roots: Vec<Rational>,
    /// λ = 0 (no interaction) is also a root; it is reported here, not in `roots`.
    pub trivial_root: bool,
    /// Every coefficient vanishes identically: λ is unconstrained.
    pub unconstrained: bool,
    /// Number of univariate polynomials that entered the gcd.
    pub polynomials: usize,
}

impl LambdaSolution {
    /// Roots as strings; `["any"]` when unconstrained.
    pub fn labels(&self) -> Vec<String> {
        if self.unconstrained {
            vec!["any".to_string()]
        } else {
            self.roots.iter().map(|r| r.to_string()).collect()
        }
    }
}

/// Builds `[H, G₁^{ab}]` with λ symbolic, splits every coefficient numerator
/// into polynomials in λ (one per monomial in the positions and ω), and
/// intersects their root sets through a running gcd.
pub fn solve_lambda(spec: &ModelSpec<Rational>, cfg: &SuiteConfig) -> Result<LambdaSolution, VerifyError> {
    let model = Model::new(spec.with_lambda(Coupling::Symbolic))?;
    let h = model.hamiltonian()?;
    let g1 = model.generators(1)?;
    let polys: Vec<Vec<UniPoly<Rational>>> = g1
        .par_iter()
        .map(|g| {
            let defect = h.checked_commutator(g, cfg.term_ceiling)?;
            let mut out = Vec::new();
            for (_, coeff) in defect.terms() {
                for (_, p) in coeff.parameter_coefficients() {
                    let mut by_omega: BTreeMap<u8, Vec<Rational>> = BTreeMap::new();
                    for (m, c) in p.terms() {
                        let e = m.exponent(Var::Lambda) as usize;
                        let v = by_omega.entry(m.exponent(Var::Omega)).or_default();
                        if v.len() <= e {
                            v.resize(e + 1, Rational::from_int(0));
                        }
                        v[e] = c.clone();
                    }
                    out.extend(by_omega.into_values().map(UniPoly::new));
                }
            }
            Ok(out)
        })
        .collect::<Result<_, VerifyError>>()?;
    let polynomials: usize = polys.iter().map(Vec::len).sum();
    let g = polys.iter().flatten().fold(UniPoly::zero(), |acc, p| acc.gcd(p));
    if g.is_zero() {
        return Ok(LambdaSolution { roots: Vec::new(), trivial_root: false, unconstrained: true, polynomials });
    }
    let mut roots = g.rational_roots();
    roots.sort();
    let trivial_root = roots.iter().any(|r| r.is_zero());
    roots.retain(|r| !r.is_zero());
    Ok(LambdaSolution { roots, trivial_root, unconstrained: false, polynomials })
}

/// `solve.lambda` as a check: passes when the roots are exactly
/// `{2/(N - 4θ₀)}`, or empty for the degenerate algebra.
pub(crate) fn check_solve_lambda(
    spec: &ModelSpec<Rational>,
    cfg: &SuiteConfig,
) -> Result<(CheckResult, Vec<String>), VerifyError> {
    let name = "solve.lambda";
    let params = Params::model(&spec.with_lambda(Coupling::Symbolic));
    let mut labels = Vec::new();
    let result = run_check(cfg.timing, name, params.clone(), || {
        let solution = solve_lambda(spec, cfg)?;
        labels = solution.labels();
        let alg = spec.algebra;
        let expected: Vec<Rational> = alg.special_coupling().into_iter().collect();
        let mut r = if solution.unconstrained {
            if alg.is_abelian() {
                CheckResult::pass(name, params).with_note("abelian, dim 1: lambda is unconstrained")
            } else {
                CheckResult::fail(name, params, super::Witness::message("lambda is unconstrained"))
            }
        } else if solution.roots == expected {
            CheckResult::pass(name, params)
        } else {
            let expect = expected.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ");
            CheckResult::fail(
                name,
                params,
                super::Witness::message(format!("roots {{{}}}, expected {{{expect}}}", solution.labels().join(", "))),
            )
        };
        if alg.is_degenerate() && solution.roots.is_empty() {
            r = r.with_note("no admissible coupling: N = 4 theta0 gives so(4), which is not simple");
        }
        if solution.trivial_root {
            r = r.with_note("lambda = 0 (no interaction) is a trivial common root and is excluded");
        }
        if spec.sites < 3 {
            r = r.with_note("weak: L = 2 has no three-site terms");
        }
        Ok(r)
    });
    Ok((result, labels))
}
