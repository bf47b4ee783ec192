use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::words::{DerivMono, SpinWord, MAX_SPIN_DIM};
use super::OperatorError;
use crate::arith::{RatFunc, Var, MAX_SITES};
use crate::Scalar;

/// Spin dimension `N` and particle count `L` an operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shape {
    pub n: usize,
    pub sites: usize,
}

impl Shape {
    pub fn new(n: usize, sites: usize) -> Self {
        assert!((1..=MAX_SPIN_DIM).contains(&n), "spin dimension {n} unsupported");
        assert!((1..=MAX_SITES).contains(&sites), "particle count {sites} unsupported");
        Shape { n, sites }
    }
}

/// Term key: derivative monomial and spin word.
pub type TermKey = (DerivMono, SpinWord);

/// Canonical sum of `coefficient · ∂^α · spin word` terms, coefficients to the
/// left of derivatives. The empty map is the zero operator.
#[derive(Clone, PartialEq, Eq)]
pub struct Operator<C> {
    shape: Shape,
    terms: BTreeMap<TermKey, RatFunc<C>>,
}

/// Term pairs per rayon task in products.
const PAR_CHUNK: usize = 16;

impl<C: Scalar> Operator<C> {
    pub fn zero(shape: Shape) -> Self {
        Operator { shape, terms: BTreeMap::new() }
    }

    pub fn identity(shape: Shape) -> Self {
        Self::function(shape, RatFunc::one())
    }

    /// Multiplication by a function of positions and parameters.
    pub fn function(shape: Shape, f: RatFunc<C>) -> Self {
        Self::term(shape, f, DerivMono::IDENTITY, SpinWord::IDENTITY)
    }

    pub fn scalar(shape: Shape, c: C) -> Self {
        Self::function(shape, RatFunc::constant(c))
    }

    /// `∂_site`.
    pub fn partial(shape: Shape, site: usize) -> Self {
        Self::term(shape, RatFunc::one(), DerivMono::single(site, 1), SpinWord::IDENTITY)
    }

    /// `E_site^{ab}`.
    pub fn spin_unit(shape: Shape, site: usize, a: usize, b: usize) -> Self {
        assert!(a <= shape.n && b <= shape.n, "matrix unit ({a},{b}) exceeds N = {}", shape.n);
        Self::term(shape, RatFunc::one(), DerivMono::IDENTITY, SpinWord::unit(site, a, b))
    }

    pub fn term(shape: Shape, coeff: RatFunc<C>, deriv: DerivMono, spin: SpinWord) -> Self {
        assert!(deriv.max_site() <= shape.sites && spin.max_site() <= shape.sites);
        assert!(spin.max_index() <= shape.n);
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            let mut words = Vec::new();
            spin.expand_top(shape.n, &mut words);
            for (s, w) in words {
                let c = if s == 1 { coeff.clone() } else { -&coeff };
                terms.insert((deriv, w), c);
            }
        }
        Operator { shape, terms }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exact zero test: the canonical form is unique, so this decides equality.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &RatFunc<C>)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, deriv: &DerivMono, spin: &SpinWord) -> RatFunc<C> {
        self.terms.get(&(*deriv, *spin)).cloned().unwrap_or_default()
    }

    /// True when every term is a pure spin word with a constant coefficient.
    pub fn is_constant_spin(&self) -> bool {
        self.terms.iter().all(|((d, _), c)| d.is_identity() && c.as_constant().is_some())
    }

    fn check_shape(&self, other: &Self) -> Result<(), OperatorError> {
        if self.shape != other.shape {
            return Err(OperatorError::ShapeMismatch { left: self.shape, right: other.shape });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, OperatorError> {
        self.check_shape(other)?;
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            match terms.get_mut(k) {
                Some(v) => {
                    let s = &*v + c;
                    if s.is_zero() {
                        terms.remove(k);
                    } else {
                        *v = s;
                    }
                }
                None => {
                    terms.insert(*k, c.clone());
                }
            }
        }
        Ok(Operator { shape: self.shape, terms })
    }

    /// Exact linear combination `Σ c_i · op_i` with a single canonicalization per key.
    pub fn linear_combination<'a, I>(shape: Shape, parts: I) -> Result<Self, OperatorError>
    where
        I: IntoIterator<Item = (C, &'a Operator<C>)>,
    {
        let mut groups: FxHashMap<TermKey, Vec<RatFunc<C>>> = FxHashMap::default();
        for (c, op) in parts {
            if op.shape != shape {
                return Err(OperatorError::ShapeMismatch { left: shape, right: op.shape });
            }
            if c.is_zero() {
                continue;
            }
            for (k, r) in &op.terms {
                groups.entry(*k).or_default().push(r.scale(&c));
            }
        }
        Ok(Self::from_groups(shape, groups))
    }

    fn from_groups(shape: Shape, groups: FxHashMap<TermKey, Vec<RatFunc<C>>>) -> Self {
        let summed: Vec<(TermKey, RatFunc<C>)> = groups
            .into_par_iter()
            .filter_map(|(k, parts)| {
                let s = RatFunc::sum(parts.iter());
                (!s.is_zero()).then_some((k, s))
            })
            .collect();
        Operator { shape, terms: summed.into_iter().collect() }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.shape);
        }
        Operator { shape: self.shape, terms: self.terms.iter().map(|(k, r)| (*k, r.scale(c))).collect() }
    }

    /// Left multiplication by a function: `f · A`.
    pub fn mul_function(&self, f: &RatFunc<C>) -> Self {
        let mut terms = BTreeMap::new();
        for (k, r) in &self.terms {
            let p = f * r;
            if !p.is_zero() {
                terms.insert(*k, p);
            }
        }
        Operator { shape: self.shape, terms }
    }

    /// Raw product terms of `sign · self · other`, pushed into `groups`.
    fn push_product(&self, other: &Self, sign: &C, groups: &mut FxHashMap<TermKey, Vec<RatFunc<C>>>) {
        let n = self.shape.n;
        let right: Vec<(&TermKey, &RatFunc<C>)> = other.terms.iter().collect();
        let left: Vec<(&TermKey, &RatFunc<C>)> = self.terms.iter().collect();
        let partials: Vec<FxHashMap<TermKey, Vec<RatFunc<C>>>> = left
            .par_chunks(PAR_CHUNK)
            .map(|chunk| {
                let mut local: FxHashMap<TermKey, Vec<RatFunc<C>>> = FxHashMap::default();
                let mut words = Vec::new();
                // Derivatives of right coefficients, memoized per (term, γ).
                let mut cache: Vec<FxHashMap<DerivMono, RatFunc<C>>> = vec![FxHashMap::default(); right.len()];
                for ((da, sa), ra) in chunk {
                    let splits = da.sub_multi_indices();
                    let ra_signed = ra.scale(sign);
                    for (idx, ((db, sb), rb)) in right.iter().enumerate() {
                        let Some(spin) = sa.mul(sb) else { continue };
                        if spin.has_top(n) {
                            spin.expand_top(n, &mut words);
                        } else {
                            words.clear();
                            words.push((1, spin));
                        }
                        for (gamma, weight, rest) in &splits {
                            let deriv_rb = if gamma.is_identity() {
                                (*rb).clone()
                            } else {
                                cache[idx].entry(*gamma).or_insert_with(|| derive(rb, gamma)).clone()
                            };
                            if deriv_rb.is_zero() {
                                continue;
                            }
                            let mut coeff = ra_signed.mul_raw(&deriv_rb);
                            if *weight != 1 {
                                coeff = coeff.scale(&C::from_int(*weight));
                            }
                            let deriv = rest.mul(db);
                            for (s, w) in &words {
                                let c = if *s == 1 { coeff.clone() } else { -&coeff };
                                local.entry((deriv, *w)).or_default().push(c);
                            }
                        }
                    }
                }
                local
            })
            .collect();
        for part in partials {
            for (k, mut v) in part {
                groups.entry(k).or_default().append(&mut v);
            }
        }
    }

    /// Exact product with an optional ceiling on the number of result terms.
    pub fn checked_mul(&self, other: &Self, ceiling: Option<usize>) -> Result<Self, OperatorError> {
        self.check_shape(other)?;
        let mut groups = FxHashMap::default();
        self.push_product(other, &C::one(), &mut groups);
        Self::bounded(groups.len(), ceiling)?;
        Ok(Self::from_groups(self.shape, groups))
    }

    /// `self · other - other · self`, accumulated in one pass.
    pub fn checked_commutator(&self, other: &Self, ceiling: Option<usize>) -> Result<Self, OperatorError> {
        self.check_shape(other)?;
        let mut groups = FxHashMap::default();
        self.push_product(other, &C::one(), &mut groups);
        other.push_product(self, &-C::one(), &mut groups);
        Self::bounded(groups.len(), ceiling)?;
        Ok(Self::from_groups(self.shape, groups))
    }

    /// Rejects a product whose uncancelled term count exceeds the ceiling.
    fn bounded(terms: usize, ceiling: Option<usize>) -> Result<(), OperatorError> {
        match ceiling {
            Some(limit) if terms > limit => Err(OperatorError::TermCeiling { terms, limit }),
            _ => Ok(()),
        }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.checked_commutator(other, None).expect("operator shapes differ")
    }

    /// Substitutes exact values for λ and/or ω.
    pub fn substitute(&self, bindings: &[(Var, C)]) -> Result<Self, OperatorError> {
        if let Some((v, _)) = bindings.iter().find(|(v, _)| v.is_position()) {
            return Err(OperatorError::PositionBinding(*v));
        }
        let mut terms = BTreeMap::new();
        for (k, r) in &self.terms {
            let s = r.substitute(bindings).map_err(OperatorError::Substitution)?;
            if !s.is_zero() {
                terms.insert(*k, s);
            }
        }
        Ok(Operator { shape: self.shape, terms })
    }

    pub fn involves(&self, v: Var) -> bool {
        self.terms.values().any(|r| r.involves(v))
    }

    /// Up to `limit` terms as display lines, in canonical order.
    pub fn lines(&self, limit: usize) -> Vec<String> {
        self.terms.iter().take(limit).map(|(k, r)| format_term(k, r)).collect()
    }
}

fn derive<C: Scalar>(r: &RatFunc<C>, gamma: &DerivMono) -> RatFunc<C> {
    let mut out = r.clone();
    for (site, order) in gamma.iter() {
        for _ in 0..order {
            out = out.derivative(Var::X(site));
            if out.is_zero() {
                return out;
            }
        }
    }
    out
}

fn format_term<C: Scalar>((d, s): &TermKey, r: &RatFunc<C>) -> String {
    format!("{r} · {d} · {s}")
}

impl<C: Scalar> Add for &Operator<C> {
    type Output = Operator<C>;

    fn add(self, rhs: &Operator<C>) -> Operator<C> {
        self.checked_add(rhs).expect("operator shapes differ")
    }
}

impl<C: Scalar> Neg for &Operator<C> {
    type Output = Operator<C>;

    fn neg(self) -> Operator<C> {
        Operator { shape: self.shape, terms: self.terms.iter().map(|(k, r)| (*k, -r)).collect() }
    }
}

impl<C: Scalar> Sub for &Operator<C> {
    type Output = Operator<C>;

    fn sub(self, rhs: &Operator<C>) -> Operator<C> {
        self + &(-rhs)
    }
}

impl<C: Scalar> Mul for &Operator<C> {
    type Output = Operator<C>;

    fn mul(self, rhs: &Operator<C>) -> Operator<C> {
        self.checked_mul(rhs, None).expect("operator shapes differ")
    }
}

impl<C: Scalar> fmt::Debug for Operator<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Operator(N={}, L={}) {{", self.shape.n, self.shape.sites)?;
        for (k, r) in &self.terms {
            write!(f, "\n  {}", format_term(k, r))?;
        }
        f.write_str("\n}")
    }
}

impl<C: Scalar> fmt::Display for Operator<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0\n");
        }
        for (k, r) in &self.terms {
            writeln!(f, "{}", format_term(k, r))?;
        }
        Ok(())
    }
}
