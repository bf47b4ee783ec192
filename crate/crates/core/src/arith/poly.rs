use std::collections::hash_map::Entry;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rustc_hash::FxHashMap;

use super::monomial::{Monomial, SitePair, Var};
use crate::Scalar;

/// Sparse multivariate polynomial with exact coefficients.
///
/// Terms are kept sorted by the graded lexicographic monomial order and never
/// carry a zero coefficient.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<C> {
    terms: Vec<(Monomial, C)>,
}

/// Returned by [`Poly::div_difference`] when `x_j - x_k` does not divide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NotDivisible;

impl<C: Scalar> Default for Poly<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Scalar> Poly<C> {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(Monomial::ONE, c)
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(Monomial::var(v), C::one())
    }

    pub fn monomial(m: Monomial, c: C) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    /// Builds a polynomial from arbitrary (possibly repeated) terms.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, C)>>(terms: I) -> Self {
        let mut acc = PolyAccumulator::new();
        for (m, c) in terms {
            acc.add_term(m, c);
        }
        acc.finish()
    }

    /// `x_j - x_k`.
    pub fn difference(pair: SitePair) -> Self {
        Self::from_sorted_unchecked(vec![
            (Monomial::var(Var::X(pair.j)), C::one()),
            (Monomial::var(Var::X(pair.k)), -C::one()),
        ])
    }

    /// `(x_j - x_k)^n` by the binomial expansion.
    pub fn difference_power(pair: SitePair, n: u8) -> Self {
        let mut terms = Vec::with_capacity(n as usize + 1);
        let mut binom = C::one();
        for i in 0..=n {
            // x_j^{n-i} (-x_k)^i
            let mut m = Monomial::ONE;
            m.set_slot(Var::X(pair.j).slot(), n - i);
            m.set_slot(Var::X(pair.k).slot(), i);
            let c = if i % 2 == 0 { binom.clone() } else { -binom.clone() };
            terms.push((m, c));
            binom = binom * C::from_int((n - i) as i64) / C::from_int(i as i64 + 1);
        }
        Self::from_terms(terms)
    }

    pub(crate) fn from_sorted_unchecked(mut terms: Vec<(Monomial, C)>) -> Self {
        terms.sort_unstable_by_key(|t| t.0);
        debug_assert!(terms.windows(2).all(|w| w[0].0 != w[1].0));
        debug_assert!(terms.iter().all(|(_, c)| !c.is_zero()));
        Poly { terms }
    }

    pub fn terms(&self) -> &[(Monomial, C)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the polynomial is a constant.
    pub fn as_constant(&self) -> Option<C> {
        match self.terms.as_slice() {
            [] => Some(C::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn coefficient(&self, m: &Monomial) -> C {
        self.terms.binary_search_by(|(t, _)| t.cmp(m)).map(|i| self.terms[i].1.clone()).unwrap_or_else(|_| C::zero())
    }

    pub fn degree_in(&self, v: Var) -> u8 {
        self.terms.iter().map(|(m, _)| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn involves(&self, v: Var) -> bool {
        self.degree_in(v) > 0
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, a)| (*m, a.clone() * c.clone())).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        // Multiplying every term by the same monomial preserves the order.
        Poly { terms: self.terms.iter().map(|(t, c)| (t.mul(m), c.clone())).collect() }
    }

    pub fn derivative(&self, v: Var) -> Self {
        let slot = v.slot();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let e = m.slot_exp(slot);
            if e == 0 {
                continue;
            }
            let mut m2 = *m;
            m2.set_slot(slot, e - 1);
            terms.push((m2, c.clone() * C::from_int(e as i64)));
        }
        // Distinct monomials stay distinct, but the order can change.
        Self::from_sorted_unchecked(terms)
    }

    /// Substitutes exact values for some variables.
    pub fn substitute(&self, bindings: &[(Var, C)]) -> Self {
        if bindings.is_empty() {
            return self.clone();
        }
        let mut acc = PolyAccumulator::new();
        for (m, c) in &self.terms {
            let mut m2 = *m;
            let mut coeff = c.clone();
            for (v, val) in bindings {
                let slot = v.slot();
                let e = m2.slot_exp(slot);
                if e > 0 {
                    coeff = coeff * pow(val, e);
                    m2.set_slot(slot, 0);
                }
            }
            acc.add_term(m2, coeff);
        }
        acc.finish()
    }

    /// Evaluates with every occurring variable bound by `value_of`.
    pub fn evaluate(&self, value_of: impl Fn(Var) -> C) -> C {
        let mut sum = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m.iter() {
                t = t * pow(&value_of(v), e);
            }
            sum = sum + t;
        }
        sum
    }

    /// Renames `x_j -> x_k`, i.e. restricts to the diagonal `x_j = x_k`.
    pub fn restrict_to_diagonal(&self, pair: SitePair) -> Self {
        let (sj, sk) = (Var::X(pair.j).slot(), Var::X(pair.k).slot());
        let mut acc = PolyAccumulator::new();
        for (m, c) in &self.terms {
            let mut m2 = *m;
            let e = m2.slot_exp(sj) + m2.slot_exp(sk);
            m2.set_slot(sj, 0);
            m2.set_slot(sk, e);
            acc.add_term(m2, c.clone());
        }
        acc.finish()
    }

    /// Exact quotient by `x_j - x_k`, if it divides.
    pub fn div_difference(&self, pair: SitePair) -> Result<Self, NotDivisible> {
        if self.is_zero() {
            return Ok(Self::zero());
        }
        if !self.restrict_to_diagonal(pair).is_zero() {
            return Err(NotDivisible);
        }
        // x_j^a = (x_j - x_k) * sum_{i<a} x_j^i x_k^{a-1-i} + x_k^a, and the
        // x_k^a remainders sum to the diagonal restriction, which vanishes.
        let (sj, sk) = (Var::X(pair.j).slot(), Var::X(pair.k).slot());
        let mut acc = PolyAccumulator::new();
        for (m, c) in &self.terms {
            let a = m.slot_exp(sj);
            let b = m.slot_exp(sk);
            for i in 0..a {
                let mut m2 = *m;
                m2.set_slot(sj, i);
                m2.set_slot(sk, a - 1 - i + b);
                acc.add_term(m2, c.clone());
            }
        }
        Ok(acc.finish())
    }

    /// Collects coefficients by the monomial in position variables only; each
    /// value is a polynomial in the parameters λ, ω.
    pub fn split_positions(&self) -> Vec<(Monomial, Poly<C>)> {
        let mut groups: FxHashMap<Monomial, Vec<(Monomial, C)>> = FxHashMap::default();
        for (m, c) in &self.terms {
            let mut pos = *m;
            let mut par = Monomial::ONE;
            for v in [Var::Lambda, Var::Omega] {
                par.set_slot(v.slot(), m.exponent(v));
                pos.set_slot(v.slot(), 0);
            }
            groups.entry(pos).or_default().push((par, c.clone()));
        }
        let mut out: Vec<_> = groups.into_iter().map(|(pos, ts)| (pos, Self::from_sorted_unchecked(ts))).collect();
        out.sort_by_key(|t| t.0);
        out
    }
}

pub(crate) fn pow<C: Scalar>(base: &C, e: u8) -> C {
    let mut r = C::one();
    for _ in 0..e {
        r = r * base.clone();
    }
    r
}

/// Hash-based accumulator used to sum many terms before sorting once.
pub struct PolyAccumulator<C> {
    map: FxHashMap<Monomial, C>,
}

impl<C: Scalar> Default for PolyAccumulator<C> {
    fn default() -> Self {
        Self::new()
    }
}

impl<C: Scalar> PolyAccumulator<C> {
    pub fn new() -> Self {
        PolyAccumulator { map: FxHashMap::default() }
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.map.entry(m) {
            Entry::Occupied(mut e) => {
                let v = std::mem::replace(e.get_mut(), C::zero());
                let s = v + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn add_poly(&mut self, p: &Poly<C>) {
        for (m, c) in &p.terms {
            self.add_term(*m, c.clone());
        }
    }

    /// Adds `a * b`.
    pub fn add_product(&mut self, a: &Poly<C>, b: &Poly<C>) {
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                self.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
    }

    pub fn finish(self) -> Poly<C> {
        let terms: Vec<_> = self.map.into_iter().collect();
        Poly::from_sorted_unchecked(terms)
    }
}

impl<C: Scalar> Add for &Poly<C> {
    type Output = Poly<C>;

    fn add(self, rhs: &Poly<C>) -> Poly<C> {
        // Merge of two sorted term lists.
        let mut out = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &rhs.terms);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let s = a[i].1.clone() + b[j].1.clone();
                    if !s.is_zero() {
                        out.push((a[i].0, s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Poly { terms: out }
    }
}

impl<C: Scalar> Neg for &Poly<C> {
    type Output = Poly<C>;

    fn neg(self) -> Poly<C> {
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect() }
    }
}

impl<C: Scalar> Sub for &Poly<C> {
    type Output = Poly<C>;

    fn sub(self, rhs: &Poly<C>) -> Poly<C> {
        self + &(-rhs)
    }
}

impl<C: Scalar> Mul for &Poly<C> {
    type Output = Poly<C>;

    fn mul(self, rhs: &Poly<C>) -> Poly<C> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        if let [(m, c)] = self.terms.as_slice() {
            return rhs.mul_monomial(m).scale(c);
        }
        if let [(m, c)] = rhs.terms.as_slice() {
            return self.mul_monomial(m).scale(c);
        }
        let mut acc = PolyAccumulator::new();
        acc.add_product(self, rhs);
        acc.finish()
    }
}

impl<C: Scalar> fmt::Debug for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<C: Scalar> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}
