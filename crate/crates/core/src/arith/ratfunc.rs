use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rustc_hash::FxHashMap;
use thiserror::Error;

use super::monomial::{DenominatorProfile, Monomial, SitePair, Var};
use super::poly::{Poly, PolyAccumulator};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstitutionError {
    #[error("substitution hits a pole: x{} - x{} evaluates to zero", .0.j, .0.k)]
    PoleEvaluation(SitePair),
    #[error("binding only one of x{} and x{} leaves a denominator outside the difference-factor class", .0.j, .0.k)]
    Unrepresentable(SitePair),
}

/// Exact rational function `numerator / ∏ (x_j - x_k)^{e_jk}`.
///
/// Canonical form: the numerator is not divisible by any difference factor
/// present in the denominator, and zero has an empty denominator. Under this
/// normalization two equal functions have identical representations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc<C> {
    num: Poly<C>,
    den: DenominatorProfile,
}

impl<C: Scalar> Default for RatFunc<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Scalar> From<Poly<C>> for RatFunc<C> {
    fn from(p: Poly<C>) -> Self {
        RatFunc { num: p, den: DenominatorProfile::ONE }
    }
}

impl<C: Scalar> RatFunc<C> {
    pub fn zero() -> Self {
        Poly::zero().into()
    }

    pub fn one() -> Self {
        Poly::one().into()
    }

    pub fn constant(c: C) -> Self {
        Poly::constant(c).into()
    }

    pub fn var(v: Var) -> Self {
        Poly::var(v).into()
    }

    /// `1 / (x_a - x_b)` for distinct sites in either orientation.
    pub fn inverse_difference(a: usize, b: usize) -> Self {
        let (pair, s) = SitePair::oriented(a, b);
        RatFunc { num: Poly::constant(C::from_int(s as i64)), den: DenominatorProfile::single(pair, 1) }
    }

    /// Builds and canonicalizes `num / den`.
    pub fn new(num: Poly<C>, den: DenominatorProfile) -> Self {
        Self::canonical(num, den)
    }

    pub fn numerator(&self) -> &Poly<C> {
        &self.num
    }

    pub fn denominator(&self) -> &DenominatorProfile {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<C> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn involves(&self, v: Var) -> bool {
        match v {
            Var::X(j) => self.num.involves(v) || self.den.factors().any(|(p, _)| p.contains(j)),
            _ => self.num.involves(v),
        }
    }

    /// Strips every difference factor that divides the numerator.
    fn canonical(mut num: Poly<C>, mut den: DenominatorProfile) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let factors: Vec<_> = den.factors().collect();
        for (pair, mut e) in factors {
            while e > 0 {
                match num.div_difference(pair) {
                    Ok(q) => {
                        num = q;
                        e -= 1;
                    }
                    Err(_) => break,
                }
            }
            den.set(pair, e);
        }
        RatFunc { num, den }
    }

    /// Re-runs canonicalization; idempotent on canonical input.
    pub fn normalize(&self) -> Self {
        Self::canonical(self.num.clone(), self.den)
    }

    /// True when no denominator factor divides the numerator.
    pub fn is_canonical(&self) -> bool {
        if self.num.is_zero() {
            return self.den.is_one();
        }
        self.den.factors().all(|(p, _)| self.num.div_difference(p).is_err())
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RatFunc { num: self.num.scale(c), den: self.den }
    }

    /// Product without re-canonicalization. The result may be non-canonical;
    /// it is meant to be fed into [`RatFunc::sum`].
    pub(crate) fn mul_raw(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        RatFunc { num: &self.num * &other.num, den: self.den.mul(&other.den) }
    }

    /// Exact sum of many (not necessarily canonical) terms, brought to the
    /// least common denominator and canonicalized once.
    pub fn sum<'a, I>(items: I) -> Self
    where
        I: IntoIterator<Item = &'a RatFunc<C>>,
    {
        let items: Vec<&RatFunc<C>> = items.into_iter().filter(|r| !r.is_zero()).collect();
        match items.len() {
            0 => return Self::zero(),
            1 => return items[0].normalize(),
            _ => {}
        }
        let lcm = items.iter().fold(DenominatorProfile::ONE, |acc, r| acc.lcm(&r.den));
        let mut multipliers: FxHashMap<DenominatorProfile, Poly<C>> = FxHashMap::default();
        let mut acc = PolyAccumulator::new();
        for r in items {
            if r.den == lcm {
                acc.add_poly(&r.num);
                continue;
            }
            let missing = lcm.quotient(&r.den);
            let mult = multipliers.entry(missing).or_insert_with(|| expand_profile(&missing));
            acc.add_product(&r.num, mult);
        }
        Self::canonical(acc.finish(), lcm)
    }

    /// Partial derivative with respect to any variable of the table.
    pub fn derivative(&self, v: Var) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let Var::X(m) = v else {
            return Self::canonical(self.num.derivative(v), self.den);
        };
        let mut parts = vec![RatFunc { num: self.num.derivative(v), den: self.den }];
        for (pair, e) in self.den.factors() {
            if !pair.contains(m) {
                continue;
            }
            // d/dx_j (x_j - x_k)^{-e} = -e (x_j - x_k)^{-e-1}; the x_k derivative flips the sign.
            let sign = if pair.j == m { -1 } else { 1 };
            let c = C::from_int(sign * e as i64);
            parts.push(RatFunc { num: self.num.scale(&c), den: self.den.mul(&DenominatorProfile::single(pair, 1)) });
        }
        Self::sum(parts.iter())
    }

    /// Substitution homomorphism. Position bindings must bind both ends of a
    /// denominator factor or neither.
    pub fn substitute(&self, bindings: &[(Var, C)]) -> Result<Self, SubstitutionError> {
        if bindings.is_empty() || self.is_zero() {
            return Ok(self.clone());
        }
        let value = |site: usize| bindings.iter().find(|(v, _)| *v == Var::X(site)).map(|(_, c)| c.clone());
        let mut num = self.num.substitute(bindings);
        let mut den = DenominatorProfile::ONE;
        for (pair, e) in self.den.factors() {
            match (value(pair.j), value(pair.k)) {
                (None, None) => den.set(pair, e),
                (Some(a), Some(b)) => {
                    let d = a - b;
                    if d.is_zero() {
                        return Err(SubstitutionError::PoleEvaluation(pair));
                    }
                    let inv = C::one() / super::poly::pow(&d, e);
                    num = num.scale(&inv);
                }
                _ => return Err(SubstitutionError::Unrepresentable(pair)),
            }
        }
        Ok(Self::canonical(num, den))
    }

    /// Evaluates at a full assignment of the occurring variables.
    pub fn evaluate(&self, value_of: impl Fn(Var) -> C) -> Result<C, SubstitutionError> {
        let mut den = C::one();
        for (pair, e) in self.den.factors() {
            let d = value_of(Var::X(pair.j)) - value_of(Var::X(pair.k));
            if d.is_zero() {
                return Err(SubstitutionError::PoleEvaluation(pair));
            }
            den = den * super::poly::pow(&d, e);
        }
        Ok(self.num.evaluate(&value_of) / den)
    }

    /// Numerator monomials grouped by position part; see [`Poly::split_positions`].
    pub fn parameter_coefficients(&self) -> Vec<(Monomial, Poly<C>)> {
        self.num.split_positions()
    }
}

fn expand_profile<C: Scalar>(profile: &DenominatorProfile) -> Poly<C> {
    let mut out = Poly::one();
    for (pair, e) in profile.factors() {
        out = &out * &Poly::difference_power(pair, e);
    }
    out
}

impl<C: Scalar> Add for &RatFunc<C> {
    type Output = RatFunc<C>;

    fn add(self, rhs: &RatFunc<C>) -> RatFunc<C> {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        RatFunc::sum([self, rhs])
    }
}

impl<C: Scalar> Neg for &RatFunc<C> {
    type Output = RatFunc<C>;

    fn neg(self) -> RatFunc<C> {
        RatFunc { num: -&self.num, den: self.den }
    }
}

impl<C: Scalar> Sub for &RatFunc<C> {
    type Output = RatFunc<C>;

    fn sub(self, rhs: &RatFunc<C>) -> RatFunc<C> {
        self + &(-rhs)
    }
}

impl<C: Scalar> Mul for &RatFunc<C> {
    type Output = RatFunc<C>;

    fn mul(self, rhs: &RatFunc<C>) -> RatFunc<C> {
        let raw = self.mul_raw(rhs);
        RatFunc::canonical(raw.num, raw.den)
    }
}

impl<C: Scalar> fmt::Debug for RatFunc<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<C: Scalar> fmt::Display for RatFunc<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let single = self.num.len() <= 1;
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let num = if single { self.num.to_string() } else { format!("({})", self.num) };
        if self.den.factors().count() == 1 {
            write!(f, "{num}/{}", self.den)
        } else {
            write!(f, "{num}/({})", self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    type R = RatFunc<Rational>;

    fn x(j: usize) -> R {
        R::var(Var::X(j))
    }

    fn c(v: i64) -> R {
        R::constant(Rational::from_int(v))
    }

    #[test]
    fn opposite_fractions_cancel_to_canonical_zero() {
        let a = R::inverse_difference(1, 2);
        let s = &a + &(-&a);
        assert!(s.is_zero());
        assert_eq!(s, R::zero());
        assert!(s.denominator().is_one());
    }

    #[test]
    fn product_cancels_difference_factor() {
        let a = &(&x(1) + &x(2)) * &R::inverse_difference(1, 2);
        let b = &a * &(&x(1) - &x(2));
        assert_eq!(b, &x(1) + &x(2));
    }

    #[test]
    fn denominator_merge() {
        let p = &R::inverse_difference(1, 2) * &R::inverse_difference(1, 3);
        let expected = R::new(
            Poly::one(),
            DenominatorProfile::single(SitePair::new(1, 2), 1).mul(&DenominatorProfile::single(SitePair::new(1, 3), 1)),
        );
        assert_eq!(p, expected);
    }

    #[test]
    fn orientation_is_absorbed_into_the_numerator() {
        assert_eq!(R::inverse_difference(2, 1), -&R::inverse_difference(1, 2));
    }

    #[test]
    fn quotient_rule_examples() {
        let inv = R::inverse_difference(1, 2);
        let d = inv.derivative(Var::X(1));
        assert_eq!(d, -&(&inv * &inv));

        let f = &(&x(1) + &x(2)) * &inv;
        let df = f.derivative(Var::X(1));
        let expected = &(&c(-2) * &x(2)) * &(&inv * &inv);
        assert_eq!(df, expected);

        assert!(inv.derivative(Var::X(3)).is_zero());
    }

    #[test]
    fn appendix_function_is_one_at_special_coupling() {
        // f = (λ(N-4θ0)(x1+x2)^2 - 8 x1 x2) / (2 (x1-x2)^2), N = 3, θ0 = +1.
        let lam = R::var(Var::Lambda);
        let s = &x(1) + &x(2);
        let num = &(&(&lam * &c(-1)) * &(&s * &s)) - &(&c(8) * &(&x(1) * &x(2)));
        let inv = R::inverse_difference(1, 2);
        let f = &(&num * &(&inv * &inv)) * &R::constant(Rational::from_frac(1, 2));
        let at = f.substitute(&[(Var::Lambda, Rational::from_int(-2))]).unwrap();
        assert!(at.is_one());
    }

    #[test]
    fn pole_is_reported() {
        let inv = R::inverse_difference(1, 2);
        let one = Rational::from_int(1);
        let err = inv.substitute(&[(Var::X(1), one.clone()), (Var::X(2), one)]).unwrap_err();
        assert_eq!(err, SubstitutionError::PoleEvaluation(SitePair::new(1, 2)));
        let half = inv.substitute(&[(Var::X(1), Rational::from_int(1))]);
        assert!(matches!(half, Err(SubstitutionError::Unrepresentable(_))));
    }

    #[test]
    fn full_position_binding_folds_the_denominator() {
        let f = &x(3) * &R::inverse_difference(1, 2);
        let v = f.substitute(&[(Var::X(1), Rational::from_int(5)), (Var::X(2), Rational::from_int(3))]).unwrap();
        assert_eq!(v, &x(3) * &R::constant(Rational::from_frac(1, 2)));
    }
}
