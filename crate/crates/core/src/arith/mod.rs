//! Exact arithmetic: multivariate polynomials over the fixed variable table
//! `x_1 < ... < x_L < λ < ω`, and rational functions whose denominators are
//! products of difference factors `x_j - x_k`.

mod monomial;
mod poly;
mod ratfunc;
mod univariate;

pub use monomial::{DenominatorProfile, Monomial, SitePair, Var, MAX_SITES, NUM_PAIRS, NUM_VARS};
pub use poly::{NotDivisible, Poly, PolyAccumulator};
pub use ratfunc::{RatFunc, SubstitutionError};
pub use univariate::UniPoly;
