//! so(N) / sp(N) inside gl(N): sign conventions, generators
//! `F^{ab} = E^{ab} - θ_a θ_b E^{b̄ā}`, the bases indexed by ℰ±, structure
//! constants, and the invariant metric `g^{ab,cd} = ½ Tr(F^{ab} F^{cd})`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::dense::DenseMatrix;
use crate::operator::{Operator, Shape};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error("N must be at least 2 (got {0})")]
    Dimension(usize),
    #[error("theta0 must be +1 or -1 (got {0})")]
    Sign(i64),
    #[error("theta0 = -1 (symplectic) requires even N (got N = {0})")]
    OddSymplectic(usize),
    #[error("index {index} outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("generator index {0} is not in the basis set")]
    NotInBasis(GeneratorIndex),
    #[error("metric tensor is singular")]
    SingularMetric,
}

/// The pair `(N, θ₀)`: so(N) for θ₀ = +1, sp(N) for θ₀ = -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AlgebraSpec {
    n: usize,
    theta0: i8,
}

/// Index pair `(a, b)` of a generator `F^{ab}`, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GeneratorIndex {
    pub a: usize,
    pub b: usize,
}

impl GeneratorIndex {
    pub fn new(a: usize, b: usize) -> Self {
        GeneratorIndex { a, b }
    }
}

impl fmt::Display for GeneratorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

impl AlgebraSpec {
    pub fn new(n: usize, theta0: i64) -> Result<Self, LieError> {
        if n < 2 {
            return Err(LieError::Dimension(n));
        }
        if theta0 != 1 && theta0 != -1 {
            return Err(LieError::Sign(theta0));
        }
        if theta0 == -1 && n % 2 == 1 {
            return Err(LieError::OddSymplectic(n));
        }
        Ok(AlgebraSpec { n, theta0: theta0 as i8 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn theta0(&self) -> i8 {
        self.theta0
    }

    pub fn is_orthogonal(&self) -> bool {
        self.theta0 == 1
    }

    /// "so(N)" or "sp(N)".
    pub fn name(&self) -> String {
        format!("{}({})", if self.is_orthogonal() { "so" } else { "sp" }, self.n)
    }

    fn check(&self, a: usize) -> Result<(), LieError> {
        if (1..=self.n).contains(&a) {
            Ok(())
        } else {
            Err(LieError::IndexOutOfRange { index: a, n: self.n })
        }
    }

    /// θ_a: +1 in the first half (or always, for odd N), θ₀ in the second.
    pub fn theta(&self, a: usize) -> Result<i8, LieError> {
        self.check(a)?;
        Ok(self.sign(a))
    }

    /// ā = N + 1 - a.
    pub fn bar(&self, a: usize) -> Result<usize, LieError> {
        self.check(a)?;
        Ok(self.conj(a))
    }

    pub(crate) fn sign(&self, a: usize) -> i8 {
        if self.n % 2 == 1 || a <= self.n / 2 {
            1
        } else {
            self.theta0
        }
    }

    pub(crate) fn conj(&self, a: usize) -> usize {
        self.n + 1 - a
    }

    /// Membership in ℰ⁺ = {ā > b} (so) or ℰ⁻ = {ā ≥ b} (sp).
    pub fn in_basis(&self, ab: GeneratorIndex) -> bool {
        let (a, b) = (ab.a, ab.b);
        if !(1..=self.n).contains(&a) || !(1..=self.n).contains(&b) {
            return false;
        }
        let abar = self.conj(a);
        if self.is_orthogonal() {
            abar > b
        } else {
            abar >= b
        }
    }

    /// ℰ± in lexicographic order.
    pub fn basis(&self) -> Vec<GeneratorIndex> {
        let mut out = Vec::new();
        for a in 1..=self.n {
            for b in 1..=self.n {
                let g = GeneratorIndex::new(a, b);
                if self.in_basis(g) {
                    out.push(g);
                }
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        if self.is_orthogonal() {
            self.n * (self.n - 1) / 2
        } else {
            self.n * (self.n + 1) / 2
        }
    }

    pub fn is_abelian(&self) -> bool {
        self.n == 2 && self.is_orthogonal()
    }

    /// `N = 4θ₀`: so(4), where the special coupling is undefined.
    pub fn is_degenerate(&self) -> bool {
        self.n as i64 == 4 * self.theta0 as i64
    }

    /// The coupling `2 / (N - 4θ₀)`, or `None` for so(4).
    pub fn special_coupling<C: Scalar>(&self) -> Option<C> {
        let den = self.n as i64 - 4 * self.theta0 as i64;
        (den != 0).then(|| C::from_frac(2, den))
    }

    /// Defining-representation matrix of `F^{ab}` (any `a, b` in 1..=N).
    pub fn f_matrix<C: Scalar>(&self, a: usize, b: usize) -> Result<DenseMatrix<C>, LieError> {
        self.check(a)?;
        self.check(b)?;
        let s = self.sign(a) * self.sign(b);
        let n = self.n;
        Ok(&DenseMatrix::unit(n, a, b)
            - &DenseMatrix::unit(n, self.conj(b), self.conj(a)).scale(&C::from_int(s as i64)))
    }

    /// `F_site^{ab}` as an operator; defined on the full index square.
    pub fn f_generator<C: Scalar>(
        &self,
        sites: usize,
        site: usize,
        a: usize,
        b: usize,
    ) -> Result<Operator<C>, LieError> {
        self.check(a)?;
        self.check(b)?;
        let shape = Shape::new(self.n, sites);
        let s = self.sign(a) * self.sign(b);
        let first = Operator::spin_unit(shape, site, a, b);
        let second = Operator::spin_unit(shape, site, self.conj(b), self.conj(a));
        Ok(&first - &second.scale(&C::from_int(s as i64)))
    }
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// `f^{ab,cd}_{ef}` over the basis, as sparse rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureConstants<C> {
    spec: AlgebraSpec,
    basis: Vec<GeneratorIndex>,
    rows: Vec<Vec<Vec<(usize, C)>>>,
}

fn delta(i: usize, j: usize) -> i64 {
    (i == j) as i64
}

impl<C: Scalar> StructureConstants<C> {
    /// The closed-form structure constants, entry by entry, including the
    /// `H(ē, f)` weight (1 if ē > f, ½ if ē = f).
    pub fn new(spec: AlgebraSpec) -> Self {
        let basis = spec.basis();
        let bar = |i| spec.conj(i);
        let th = |i| spec.sign(i) as i64;
        let half = C::from_frac(1, 2);
        let mut rows = Vec::with_capacity(basis.len());
        for ab in &basis {
            let mut row_set = Vec::with_capacity(basis.len());
            for cd in &basis {
                let (a, b, c, d) = (ab.a, ab.b, cd.a, cd.b);
                let mut row = Vec::new();
                for (k, ef) in basis.iter().enumerate() {
                    let (e, f) = (ef.a, ef.b);
                    let v = delta(b, c)
                        * (delta(a, e) * delta(d, f) - th(a) * th(d) * delta(a, bar(f)) * delta(d, bar(e)))
                        - delta(a, d)
                            * (delta(b, f) * delta(c, e) - th(b) * th(c) * delta(b, bar(e)) * delta(c, bar(f)))
                        - delta(a, bar(c))
                            * (th(a) * th(b) * delta(b, bar(e)) * delta(d, f)
                                - th(c) * th(d) * delta(b, f) * delta(d, bar(e)))
                        + delta(b, bar(d))
                            * (th(a) * th(b) * delta(a, bar(f)) * delta(c, e)
                                - th(c) * th(d) * delta(a, e) * delta(c, bar(f)));
                    if v == 0 {
                        continue;
                    }
                    let mut value = C::from_int(v);
                    if bar(e) == f {
                        value = value * half.clone();
                    }
                    row.push((k, value));
                }
                row_set.push(row);
            }
            rows.push(row_set);
        }
        StructureConstants { spec, basis, rows }
    }

    pub fn spec(&self) -> AlgebraSpec {
        self.spec
    }

    pub fn basis(&self) -> &[GeneratorIndex] {
        &self.basis
    }

    pub fn position(&self, g: GeneratorIndex) -> Result<usize, LieError> {
        self.basis.iter().position(|&h| h == g).ok_or(LieError::NotInBasis(g))
    }

    /// Sparse row of `[F^{ab}, F^{cd}]` by basis position.
    pub fn row_at(&self, i: usize, j: usize) -> &[(usize, C)] {
        &self.rows[i][j]
    }

    /// Sparse row of `[F^{ab}, F^{cd}]` keyed by generator index.
    pub fn row(&self, ab: GeneratorIndex, cd: GeneratorIndex) -> Result<Vec<(GeneratorIndex, C)>, LieError> {
        let (i, j) = (self.position(ab)?, self.position(cd)?);
        Ok(self.rows[i][j].iter().map(|(k, v)| (self.basis[*k], v.clone())).collect())
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> C {
        self.rows[i][j].iter().find(|(idx, _)| *idx == k).map(|(_, v)| v.clone()).unwrap_or_else(C::zero)
    }

    pub fn is_antisymmetric(&self) -> bool {
        let d = self.basis.len();
        (0..d).all(|i| {
            (0..d).all(|j| {
                let mut neg: Vec<(usize, C)> = self.rows[j][i].iter().map(|(k, v)| (*k, -v.clone())).collect();
                neg.sort_by_key(|(k, _)| *k);
                neg == self.rows[i][j]
            })
        })
    }

    /// Jacobi identity on the bare table.
    pub fn jacobi_holds(&self) -> bool {
        let d = self.basis.len();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let mut acc = vec![C::zero(); d];
                    for (x, y, z) in [(i, j, k), (j, k, i), (k, i, j)] {
                        for (e, fe) in &self.rows[x][y] {
                            for (g, fg) in &self.rows[*e][z] {
                                acc[*g] = acc[*g].clone() + fe.clone() * fg.clone();
                            }
                        }
                    }
                    if acc.iter().any(|v| !v.is_zero()) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// As a dense tensor with slots (upper, upper, lower).
    pub fn to_tensor(&self) -> Tensor<C> {
        let d = self.basis.len();
        let mut t = Tensor::zeros(d, vec![Slot::Upper, Slot::Upper, Slot::Lower]);
        for i in 0..d {
            for j in 0..d {
                for (k, v) in &self.rows[i][j] {
                    t.set(&[i, j, *k], v.clone());
                }
            }
        }
        t
    }
}

/// `g^{ab,cd} = ½ Tr(F^{ab} F^{cd})` over the basis, with its exact inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricTensor<C> {
    metric: DenseMatrix<C>,
    inverse: DenseMatrix<C>,
}

impl<C: Scalar> MetricTensor<C> {
    pub fn new(spec: AlgebraSpec) -> Result<Self, LieError> {
        let basis = spec.basis();
        let mats: Vec<DenseMatrix<C>> = basis.iter().map(|g| spec.f_matrix(g.a, g.b)).collect::<Result<_, _>>()?;
        let half = C::from_frac(1, 2);
        let metric =
            DenseMatrix::from_fn(basis.len(), basis.len(), |i, j| (&mats[i] * &mats[j]).trace() * half.clone());
        let inverse = metric.inverse().ok_or(LieError::SingularMetric)?;
        Ok(MetricTensor { metric, inverse })
    }

    /// Upper-index metric `g^{AB}`.
    pub fn metric(&self) -> &DenseMatrix<C> {
        &self.metric
    }

    /// Its inverse, `g_{AB}`.
    pub fn inverse(&self) -> &DenseMatrix<C> {
        &self.inverse
    }

    pub fn matrix(&self, side: MetricSide) -> &DenseMatrix<C> {
        match side {
            MetricSide::Metric => &self.metric,
            MetricSide::Inverse => &self.inverse,
        }
    }
}

/// Variance of a tensor slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Slot {
    Upper,
    Lower,
}

/// Which matrix performs a raise or a lower.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MetricSide {
    Metric,
    Inverse,
}

/// Index-moving convention. The tensorial default lowers with `g_{AB}`
/// (the inverse of `g^{AB}`) and raises with `g^{AB}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct MetricConvention {
    pub lower_with: MetricSide,
    pub raise_with: MetricSide,
}

impl Default for MetricConvention {
    fn default() -> Self {
        MetricConvention { lower_with: MetricSide::Inverse, raise_with: MetricSide::Metric }
    }
}

impl MetricConvention {
    pub fn all() -> [MetricConvention; 4] {
        use MetricSide::*;
        [
            MetricConvention { lower_with: Inverse, raise_with: Metric },
            MetricConvention { lower_with: Metric, raise_with: Inverse },
            MetricConvention { lower_with: Metric, raise_with: Metric },
            MetricConvention { lower_with: Inverse, raise_with: Inverse },
        ]
    }

    pub fn label(&self) -> String {
        let side = |s: MetricSide| match s {
            MetricSide::Metric => "g",
            MetricSide::Inverse => "g^-1",
        };
        format!("lower={},raise={}", side(self.lower_with), side(self.raise_with))
    }
}

/// Dense tensor over the basis with per-slot variance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tensor<C> {
    dim: usize,
    slots: Vec<Slot>,
    data: Vec<C>,
}

impl<C: Scalar> Tensor<C> {
    pub fn zeros(dim: usize, slots: Vec<Slot>) -> Self {
        let len = dim.pow(slots.len() as u32);
        Tensor { dim, slots, data: vec![C::zero(); len] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    fn offset(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.slots.len());
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> &C {
        &self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: C) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_zero())
    }

    /// `T'[.., i, ..] = Σ_j M[i][j] T[.., j, ..]` at `slot`, with a new variance.
    pub fn contract_slot(&self, slot: usize, m: &DenseMatrix<C>, variance: Slot) -> Self {
        let rank = self.slots.len();
        let mut slots = self.slots.clone();
        slots[slot] = variance;
        let mut out = Tensor::<C>::zeros(self.dim, slots);
        let stride = self.dim.pow((rank - slot - 1) as u32);
        for (o, v) in self.data.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let j = (o / stride) % self.dim;
            let base = o - j * stride;
            for i in 0..self.dim {
                let mij = m.get(i, j);
                if mij.is_zero() {
                    continue;
                }
                let t = base + i * stride;
                out.data[t] = out.data[t].clone() + mij.clone() * v.clone();
            }
        }
        out
    }

    /// Moves the listed slots to the requested variance. Slots already at
    /// that variance are left alone.
    pub fn raise_lower(&self, metric: &MetricTensor<C>, moves: &[(usize, Slot)], convention: MetricConvention) -> Self {
        let mut t = self.clone();
        for &(slot, target) in moves {
            if t.slots[slot] == target {
                continue;
            }
            let side = match target {
                Slot::Lower => convention.lower_with,
                Slot::Upper => convention.raise_with,
            };
            t = t.contract_slot(slot, metric.matrix(side), target);
        }
        t
    }

    /// Antisymmetry under every transposition of a rank-3 tensor.
    pub fn is_totally_antisymmetric(&self) -> bool {
        assert_eq!(self.slots.len(), 3);
        let d = self.dim;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let v = self.get(&[i, j, k]).clone();
                    if *self.get(&[j, i, k]) != -v.clone()
                        || *self.get(&[i, k, j]) != -v.clone()
                        || *self.get(&[k, j, i]) != -v
                    {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Structure constants and metric for one algebra, built once.
#[derive(Debug, Clone)]
pub struct LieTables<C> {
    pub spec: AlgebraSpec,
    pub constants: StructureConstants<C>,
    pub metric: MetricTensor<C>,
}

impl<C: Scalar> LieTables<C> {
    pub fn new(spec: AlgebraSpec) -> Result<Self, LieError> {
        Ok(LieTables { spec, constants: StructureConstants::new(spec), metric: MetricTensor::new(spec)? })
    }

    pub fn basis(&self) -> &[GeneratorIndex] {
        self.constants.basis()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Rational, Scalar};

    fn spec(n: usize, t: i64) -> AlgebraSpec {
        AlgebraSpec::new(n, t).unwrap()
    }

    #[test]
    fn theta_and_bar_examples() {
        assert_eq!(spec(6, -1).theta(2), Ok(1));
        assert_eq!(spec(6, -1).theta(5), Ok(-1));
        assert_eq!(spec(5, 1).theta(4), Ok(1));
        assert_eq!(spec(5, 1).bar(1), Ok(5));
        assert_eq!(spec(5, 1).bar(3), Ok(3));
        assert_eq!(spec(2, -1).bar(2), Ok(1));
        assert!(spec(3, 1).theta(4).is_err());
        assert!(spec(3, 1).bar(0).is_err());
    }

    #[test]
    fn spec_validation() {
        assert_eq!(AlgebraSpec::new(3, -1), Err(LieError::OddSymplectic(3)));
        assert_eq!(AlgebraSpec::new(1, 1), Err(LieError::Dimension(1)));
        assert_eq!(AlgebraSpec::new(4, 0), Err(LieError::Sign(0)));
    }

    #[test]
    fn basis_examples() {
        let g = |a, b| GeneratorIndex::new(a, b);
        assert_eq!(spec(3, 1).basis(), vec![g(1, 1), g(1, 2), g(2, 1)]);
        assert_eq!(spec(2, -1).basis(), vec![g(1, 1), g(1, 2), g(2, 1)]);
        assert_eq!(spec(4, 1).basis().len(), 6);
        for (n, t) in [(2, -1), (3, 1), (4, 1), (4, -1), (5, 1), (6, 1), (6, -1)] {
            let s = spec(n, t);
            assert_eq!(s.basis().len(), s.dim(), "{s}");
        }
    }

    #[test]
    fn generator_examples() {
        let so3 = spec(3, 1);
        let f12 = so3.f_matrix::<Rational>(1, 2).unwrap();
        let expected = &DenseMatrix::<Rational>::unit(3, 1, 2) - &DenseMatrix::unit(3, 2, 3);
        assert_eq!(f12, expected);
        for a in 1..=3 {
            assert!(so3.f_matrix::<Rational>(a, 4 - a).unwrap().is_zero());
        }
        let sp2 = spec(2, -1);
        assert_eq!(sp2.f_matrix::<Rational>(1, 2).unwrap(), DenseMatrix::unit(2, 1, 2).scale(&Rational::from_int(2)));
    }

    #[test]
    fn sp2_structure_constant_and_metric() {
        let s = spec(2, -1);
        let f = StructureConstants::<Rational>::new(s);
        let g = |a, b| GeneratorIndex::new(a, b);
        assert_eq!(f.row(g(1, 1), g(1, 2)).unwrap(), vec![(g(1, 2), Rational::from_int(2))]);
        assert!(f.row(g(1, 2), g(1, 2)).unwrap().is_empty());
        assert!(f.row(g(2, 2), g(1, 2)).is_err());

        let m = MetricTensor::<Rational>::new(s).unwrap();
        let pos = |x| f.position(x).unwrap();
        assert_eq!(*m.metric().get(pos(g(1, 1)), pos(g(1, 1))), Rational::from_int(1));
        assert_eq!(*m.metric().get(pos(g(1, 2)), pos(g(2, 1))), Rational::from_int(2));
        assert_eq!(*m.metric().get(pos(g(1, 2)), pos(g(1, 2))), Rational::from_int(0));
    }

    #[test]
    fn special_coupling_values() {
        assert_eq!(spec(3, 1).special_coupling::<Rational>(), Some(Rational::from_int(-2)));
        assert_eq!(spec(2, -1).special_coupling::<Rational>(), Some(Rational::from_frac(1, 3)));
        assert_eq!(spec(4, -1).special_coupling::<Rational>(), Some(Rational::from_frac(1, 4)));
        assert_eq!(spec(5, 1).special_coupling::<Rational>(), Some(Rational::from_int(2)));
        assert_eq!(spec(4, 1).special_coupling::<Rational>(), None);
    }

    #[test]
    fn lowering_then_raising_is_identity() {
        let tables = LieTables::<Rational>::new(spec(4, -1)).unwrap();
        let t = tables.constants.to_tensor();
        let conv = MetricConvention::default();
        let lowered = t.raise_lower(&tables.metric, &[(1, Slot::Lower)], conv);
        let back = lowered.raise_lower(&tables.metric, &[(1, Slot::Upper)], conv);
        assert_eq!(back, t);
        let z = Tensor::<Rational>::zeros(3, vec![Slot::Upper, Slot::Upper, Slot::Lower]);
        assert!(z.raise_lower(&tables.metric, &[(2, Slot::Upper)], conv).is_zero());
    }

    #[test]
    fn sp2_fully_raised_constants_are_totally_antisymmetric() {
        let tables = LieTables::<Rational>::new(spec(2, -1)).unwrap();
        let up =
            tables.constants.to_tensor().raise_lower(&tables.metric, &[(2, Slot::Upper)], MetricConvention::default());
        assert!(up.is_totally_antisymmetric());
        assert!(!up.is_zero());
    }
}
