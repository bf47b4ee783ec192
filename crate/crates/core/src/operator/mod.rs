//! Noncommutative operator algebra on `C(x_1..x_L) ⊗ End((C^N)^{⊗L})`.
//!
//! Every operator is stored in the normal form
//! `Σ r(x, λ, ω) · ∂^α · E_{j1}^{a1 b1} ⋯ E_{jm}^{am bm}`: coefficient functions
//! left of derivatives, spin words on distinct sites. Products re-normalize
//! with `∂_j ∘ r = r ∂_j + ∂r/∂x_j` and `E^{ab} E^{cd} = δ_{bc} E^{ad}`.

mod field;
mod op;
mod words;

use thiserror::Error;

use crate::arith::{SubstitutionError, Var};

pub use field::{EvalPoint, SpinField};
pub use op::{Operator, Shape, TermKey};
pub use words::{DerivMono, SpinState, SpinWord, MAX_SPIN_DIM};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OperatorError {
    #[error("operator shapes differ: {left:?} vs {right:?}")]
    ShapeMismatch { left: Shape, right: Shape },
    #[error("product has {terms} uncancelled terms, above the ceiling of {limit}")]
    TermCeiling { terms: usize, limit: usize },
    #[error("position variable {0} cannot be bound in an operator substitution")]
    PositionBinding(Var),
    #[error("no value supplied for {0}")]
    UnboundVariable(Var),
    #[error(transparent)]
    Substitution(#[from] SubstitutionError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::RatFunc;
    use crate::{Rational, Scalar};

    type Op = Operator<Rational>;

    fn sh(n: usize, l: usize) -> Shape {
        Shape::new(n, l)
    }

    fn x(j: usize) -> RatFunc<Rational> {
        RatFunc::var(Var::X(j))
    }

    fn int(v: i64) -> Rational {
        Rational::from_int(v)
    }

    #[test]
    fn add_examples() {
        let s = sh(2, 2);
        let a = &Op::partial(s, 1) + &Op::spin_unit(s, 2, 1, 2).mul_function(&x(1));
        assert!((&a + &(-&a)).is_zero());
        assert_eq!((&Op::partial(s, 1) + &Op::partial(s, 2)).len(), 2);
        let e = Op::spin_unit(s, 1, 1, 2);
        assert_eq!(&e + &e, e.scale(&int(2)));
    }

    #[test]
    fn leibniz_rule() {
        let s = sh(1, 2);
        let d1 = Op::partial(s, 1);
        let prod = &d1 * &Op::function(s, x(1));
        let expected = &Op::partial(s, 1).mul_function(&x(1)) + &Op::identity(s);
        assert_eq!(prod, expected);

        let inv = RatFunc::inverse_difference(1, 2);
        let prod = &d1 * &Op::function(s, inv.clone());
        let expected = &d1.mul_function(&inv) - &Op::function(s, &inv * &inv);
        assert_eq!(prod, expected);
    }

    #[test]
    fn matrix_unit_products() {
        let s = sh(3, 1);
        let p = &Op::spin_unit(s, 1, 1, 2) * &Op::spin_unit(s, 1, 2, 1);
        assert_eq!(p, Op::spin_unit(s, 1, 1, 1));
        assert!((&Op::spin_unit(s, 1, 1, 2) * &Op::spin_unit(s, 1, 3, 1)).is_zero());
    }

    #[test]
    fn commutator_examples() {
        let s = sh(2, 1);
        let c = Op::partial(s, 1).commutator(&Op::function(s, x(1)));
        assert_eq!(c, Op::identity(s));

        let h = &Op::spin_unit(s, 1, 1, 1) - &Op::spin_unit(s, 1, 2, 2);
        let e = Op::spin_unit(s, 1, 1, 2).scale(&int(2));
        assert_eq!(h.commutator(&e), Op::spin_unit(s, 1, 1, 2).scale(&int(4)));
        assert!(e.commutator(&e).is_zero());
    }

    #[test]
    fn substitution_examples() {
        let s = sh(2, 2);
        let lam = RatFunc::var(Var::Lambda);
        let a = Op::function(s, &lam - &RatFunc::one());
        assert!(a.substitute(&[(Var::Lambda, int(1))]).unwrap().is_zero());

        let om = RatFunc::var(Var::Omega);
        let b = Op::function(s, &(&om * &om) * &(&x(1) * &x(1)));
        assert!(b.substitute(&[(Var::Omega, int(0))]).unwrap().is_zero());
        assert!(matches!(b.substitute(&[(Var::X(1), int(0))]), Err(OperatorError::PositionBinding(_))));
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let a = Op::identity(sh(2, 2));
        let b = Op::identity(sh(3, 2));
        assert!(matches!(a.checked_add(&b), Err(OperatorError::ShapeMismatch { .. })));
        assert!(matches!(a.checked_mul(&b, None), Err(OperatorError::ShapeMismatch { .. })));
    }

    #[test]
    fn term_ceiling_aborts() {
        let s = sh(2, 2);
        let a = &Op::spin_unit(s, 1, 1, 2) + &Op::spin_unit(s, 2, 1, 2);
        let b = &Op::spin_unit(s, 1, 2, 1) + &Op::spin_unit(s, 2, 2, 2);
        assert!(matches!(a.checked_mul(&b, Some(1)), Err(OperatorError::TermCeiling { .. })));
        assert!(a.checked_mul(&b, Some(100)).is_ok());
    }

    #[test]
    fn apply_examples() {
        let s = sh(2, 2);
        let psi = SpinField::from_components(s, [(SpinState::new(&[1, 1]), &x(1) * &x(1))]);
        let point = EvalPoint::positions(vec![int(3), int(5)]);
        let out = Op::partial(s, 1).apply(&psi, &point).unwrap();
        assert_eq!(out.into_iter().collect::<Vec<_>>(), vec![(SpinState::new(&[1, 1]), int(6))]);

        let e12 = SpinField::from_components(s, [(SpinState::new(&[1, 2]), RatFunc::one())]);
        // E_1^{21} E_2^{12} maps e1 x e2 to e2 x e1.
        let swap = &Op::spin_unit(s, 1, 2, 1) * &Op::spin_unit(s, 2, 1, 2);
        let out = swap.apply(&e12, &point).unwrap();
        assert_eq!(out.into_iter().collect::<Vec<_>>(), vec![(SpinState::new(&[2, 1]), int(1))]);

        assert!(Op::zero(s).apply(&psi, &point).unwrap().is_empty());
        let bad = EvalPoint::positions(vec![int(1), int(1)]);
        assert!(Op::identity(s).apply(&psi, &bad).is_err());
    }

    #[test]
    fn display_lists_terms() {
        let s = sh(2, 2);
        let a = Op::partial(s, 1).mul_function(&RatFunc::inverse_difference(1, 2));
        assert_eq!(a.to_string(), "1/(x1-x2) · d1 · Id\n");
    }
}
