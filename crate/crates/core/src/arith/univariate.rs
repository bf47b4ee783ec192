use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::monomial::Var;
use super::poly::Poly;
use crate::{Rational, Scalar};

/// Dense univariate polynomial, coefficients from degree 0 upward, trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly<C> {
    coeffs: Vec<C>,
}

impl<C: Scalar> UniPoly<C> {
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    /// Reads a polynomial in the single variable `v`; `None` if others occur.
    pub fn from_poly(p: &Poly<C>, v: Var) -> Option<Self> {
        let mut coeffs = vec![C::zero(); p.degree_in(v) as usize + 1];
        for (m, c) in p.terms() {
            let e = m.exponent(v);
            if m.degree() != e as u32 {
                return None;
            }
            coeffs[e as usize] = c.clone();
        }
        Some(Self::new(coeffs))
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &C) -> C {
        self.coeffs.iter().rev().fold(C::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    fn monic(&self) -> Self {
        match self.coeffs.last() {
            None => Self::zero(),
            Some(lead) => {
                let lead = lead.clone();
                Self::new(self.coeffs.iter().map(|c| c.clone() / lead.clone()).collect())
            }
        }
    }

    fn rem(&self, divisor: &Self) -> Self {
        let d = divisor.degree().expect("division by zero polynomial");
        let lead = divisor.coeffs[d].clone();
        let mut r = self.coeffs.clone();
        while r.len() > d && !r.is_empty() {
            let top = r.len() - 1;
            let q = r[top].clone() / lead.clone();
            if !q.is_zero() {
                for i in 0..=d {
                    let idx = top - d + i;
                    r[idx] = r[idx].clone() - q.clone() * divisor.coeffs[i].clone();
                }
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        Self::new(r)
    }

    /// Monic greatest common divisor (zero iff both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }
}

impl UniPoly<Rational> {
    /// All distinct rational roots, ascending.
    pub fn rational_roots(&self) -> Vec<Rational> {
        if self.is_zero() {
            return Vec::new();
        }
        // Clear denominators to an integer polynomial.
        let lcm = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut ints: Vec<BigInt> =
            self.coeffs.iter().map(|c| (c * Rational::from(lcm.clone())).to_integer()).collect();
        let mut roots = Vec::new();
        if ints[0].is_zero() {
            roots.push(Rational::zero());
            let shift = ints.iter().take_while(|c| c.is_zero()).count();
            ints.drain(..shift);
        }
        if ints.len() > 1 {
            let p_divs = divisors(&ints[0]);
            let q_divs = divisors(ints.last().unwrap());
            let reduced = UniPoly::new(ints.iter().map(|c| Rational::from(c.clone())).collect());
            for p in &p_divs {
                for q in &q_divs {
                    for sign in [1i64, -1] {
                        let cand = Rational::new(p * BigInt::from(sign), q.clone());
                        if !roots.contains(&cand) && reduced.eval(&cand).is_zero() {
                            roots.push(cand);
                        }
                    }
                }
            }
        }
        roots.sort();
        roots
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            let other = &n / &d;
            if other != d {
                out.push(other);
            }
        }
        d += 1;
    }
    out
}
