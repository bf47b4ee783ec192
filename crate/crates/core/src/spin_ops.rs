//! Two-site operators `P_{jk}`, `Q_{jk}` and the index contractions
//! `(F_j F_k)^{ab}`, `(F_k F_j F_ℓ)^{ab}`, `(E_j E_k)^{ab}`.

use thiserror::Error;

use crate::lie::{AlgebraSpec, LieError};
use crate::operator::{Operator, Shape};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpinOpError {
    #[error("sites must be distinct (got {0:?})")]
    RepeatedSite(Vec<usize>),
    #[error("site {site} outside 1..={sites}")]
    SiteOutOfRange { site: usize, sites: usize },
    #[error("operator shape has N = {shape} but the algebra has N = {algebra}")]
    DimensionMismatch { shape: usize, algebra: usize },
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// Spin operators for one algebra on `L` sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinOps {
    spec: AlgebraSpec,
    shape: Shape,
}

impl SpinOps {
    pub fn new(spec: AlgebraSpec, sites: usize) -> Self {
        SpinOps { spec, shape: Shape::new(spec.n(), sites) }
    }

    pub fn spec(&self) -> AlgebraSpec {
        self.spec
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    fn distinct(&self, sites: &[usize]) -> Result<(), SpinOpError> {
        for (i, &s) in sites.iter().enumerate() {
            if !(1..=self.shape.sites).contains(&s) {
                return Err(SpinOpError::SiteOutOfRange { site: s, sites: self.shape.sites });
            }
            if sites[..i].contains(&s) {
                return Err(SpinOpError::RepeatedSite(sites.to_vec()));
            }
        }
        Ok(())
    }

    fn index(&self, a: usize) -> Result<(), SpinOpError> {
        self.spec.theta(a)?;
        Ok(())
    }

    /// `F_site^{ab}` for any `a, b` in 1..=N.
    pub fn f<C: Scalar>(&self, site: usize, a: usize, b: usize) -> Result<Operator<C>, SpinOpError> {
        self.distinct(&[site])?;
        Ok(self.spec.f_generator(self.shape.sites, site, a, b)?)
    }

    /// `E_site^{ab}`.
    pub fn e<C: Scalar>(&self, site: usize, a: usize, b: usize) -> Result<Operator<C>, SpinOpError> {
        self.distinct(&[site])?;
        self.index(a)?;
        self.index(b)?;
        Ok(Operator::spin_unit(self.shape, site, a, b))
    }

    /// `P_{jk} = Σ E_j^{ab} E_k^{ba}`.
    pub fn p<C: Scalar>(&self, j: usize, k: usize) -> Result<Operator<C>, SpinOpError> {
        self.distinct(&[j, k])?;
        let n = self.spec.n();
        let mut parts = Vec::with_capacity(n * n);
        for a in 1..=n {
            for b in 1..=n {
                parts.push(&Operator::spin_unit(self.shape, j, a, b) * &Operator::spin_unit(self.shape, k, b, a));
            }
        }
        Ok(sum(self.shape, &parts))
    }

    /// `Q_{jk} = Σ θ_a θ_b E_j^{ab} E_k^{āb̄}`.
    pub fn q<C: Scalar>(&self, j: usize, k: usize) -> Result<Operator<C>, SpinOpError> {
        self.distinct(&[j, k])?;
        let n = self.spec.n();
        let s = &self.spec;
        let mut parts = Vec::with_capacity(n * n);
        for a in 1..=n {
            for b in 1..=n {
                let sign = (s.theta(a)? * s.theta(b)?) as i64;
                let term = &Operator::spin_unit(self.shape, j, a, b)
                    * &Operator::spin_unit(self.shape, k, s.bar(a)?, s.bar(b)?);
                parts.push(term.scale(&C::from_int(sign)));
            }
        }
        Ok(sum(self.shape, &parts))
    }

    /// `(F_j F_k)^{ab} = Σ_c F_j^{ac} F_k^{cb}`.
    pub fn ff<C: Scalar>(&self, j: usize, k: usize, a: usize, b: usize) -> Result<Operator<C>, SpinOpError> {
        self.distinct(&[j, k])?;
        let mut parts = Vec::new();
        for c in 1..=self.spec.n() {
            parts.push(&self.f::<C>(j, a, c)? * &self.f(k, c, b)?);
        }
        Ok(sum(self.shape, &parts))
    }

    /// `(F_k F_j F_ℓ)^{ab} = Σ_{α,β} F_k^{aα} F_j^{αβ} F_ℓ^{βb}`.
    pub fn fff<C: Scalar>(&self, k: usize, j: usize, l: usize, a: usize, b: usize) -> Result<Operator<C>, SpinOpError> {
        self.distinct(&[k, j, l])?;
        let n = self.spec.n();
        let mut parts = Vec::new();
        for alpha in 1..=n {
            let left = self.f::<C>(k, a, alpha)?;
            if left.is_zero() {
                continue;
            }
            for beta in 1..=n {
                let mid = &left * &self.f(j, alpha, beta)?;
                if mid.is_zero() {
                    continue;
                }
                parts.push(&mid * &self.f(l, beta, b)?);
            }
        }
        Ok(sum(self.shape, &parts))
    }

    /// `(E_j E_k)^{ab} = Σ_c E_j^{ac} E_k^{cb}`, on raw matrix units.
    pub fn ee<C: Scalar>(&self, j: usize, k: usize, a: usize, b: usize) -> Result<Operator<C>, SpinOpError> {
        self.distinct(&[j, k])?;
        self.index(a)?;
        self.index(b)?;
        let mut parts = Vec::new();
        for c in 1..=self.spec.n() {
            parts.push(&self.e::<C>(j, a, c)? * &self.e(k, c, b)?);
        }
        Ok(sum(self.shape, &parts))
    }
}

pub(crate) fn sum<C: Scalar>(shape: Shape, parts: &[Operator<C>]) -> Operator<C> {
    Operator::linear_combination(shape, parts.iter().map(|p| (C::one(), p))).expect("operands share one shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::DenseMatrix;
    use crate::{Rational, Scalar};

    type Op = Operator<Rational>;

    fn ops(n: usize, t: i64, l: usize) -> SpinOps {
        SpinOps::new(AlgebraSpec::new(n, t).unwrap(), l)
    }

    #[test]
    fn p_is_symmetric_involution() {
        let s = ops(3, 1, 2);
        let p12: Op = s.p(1, 2).unwrap();
        assert_eq!(p12, s.p(2, 1).unwrap());
        assert_eq!(&p12 * &p12, Op::identity(s.shape()));
        assert!(s.p::<Rational>(1, 1).is_err());
    }

    #[test]
    fn q_relations() {
        for (n, t) in [(2, -1), (3, 1), (4, 1), (4, -1)] {
            let s = ops(n, t, 2);
            let p: Op = s.p(1, 2).unwrap();
            let q: Op = s.q(1, 2).unwrap();
            assert_eq!(q, s.q(2, 1).unwrap());
            assert_eq!(&q * &q, q.scale(&Rational::from_int(n as i64)));
            assert_eq!(&p * &q, q.scale(&Rational::from_int(t)));
            assert_eq!(&q * &p, q.scale(&Rational::from_int(t)));
        }
    }

    #[test]
    fn p_minus_q_is_half_ff() {
        for (n, t) in [(2, -1), (3, 1), (4, -1)] {
            let s = ops(n, t, 2);
            let mut parts = Vec::new();
            for a in 1..=n {
                for b in 1..=n {
                    parts.push(&s.f::<Rational>(1, a, b).unwrap() * &s.f(2, b, a).unwrap());
                }
            }
            let half = sum(s.shape(), &parts).scale(&Rational::from_frac(1, 2));
            assert_eq!(&s.p::<Rational>(1, 2).unwrap() - &s.q(1, 2).unwrap(), half);
        }
    }

    #[test]
    fn contractions_need_distinct_sites() {
        let s = ops(3, 1, 3);
        assert!(s.ff::<Rational>(1, 1, 1, 2).is_err());
        assert!(s.fff::<Rational>(1, 2, 1, 1, 2).is_err());
        assert!(s.ee::<Rational>(2, 2, 1, 2).is_err());
        assert!(s.p::<Rational>(1, 4).is_err());
    }

    #[test]
    fn ff_has_no_identity_term_for_so3() {
        let s = ops(3, 1, 2);
        for a in 1..=3 {
            let ff: Op = s.ff(1, 2, a, 4 - a).unwrap();
            assert!(ff.terms().all(|((_, w), _)| w.site_count() == 2));
        }
    }

    #[test]
    fn fff_is_associative_contraction() {
        let s = ops(2, -1, 3);
        let n = 2;
        for (a, b) in [(1, 2), (1, 1), (2, 1)] {
            let direct: Op = s.fff(1, 2, 3, a, b).unwrap();
            let mut left_first = Vec::new();
            for beta in 1..=n {
                let mut inner = Vec::new();
                for alpha in 1..=n {
                    inner.push(&s.f::<Rational>(1, a, alpha).unwrap() * &s.f(2, alpha, beta).unwrap());
                }
                left_first.push(&sum(s.shape(), &inner) * &s.f(3, beta, b).unwrap());
            }
            assert_eq!(direct, sum(s.shape(), &left_first));
        }
    }

    #[test]
    fn fff_matches_dense_oracle() {
        let spec = AlgebraSpec::new(2, -1).unwrap();
        let s = SpinOps::new(spec, 3);
        let id = DenseMatrix::<Rational>::identity(2);
        let at = |site: usize, m: &DenseMatrix<Rational>| {
            let mut out = DenseMatrix::identity(1);
            for j in 1..=3 {
                out = out.kron(if j == site { m } else { &id });
            }
            out
        };
        let fm = |a, b| spec.f_matrix::<Rational>(a, b).unwrap();
        let mut dense = DenseMatrix::zeros(8, 8);
        for alpha in 1..=2 {
            for beta in 1..=2 {
                let t = &(&at(1, &fm(1, alpha)) * &at(2, &fm(alpha, beta))) * &at(3, &fm(beta, 2));
                dense = &dense + &t;
            }
        }
        let op: Op = s.fff(1, 2, 3, 1, 2).unwrap();
        assert_eq!(to_dense(&op, 2, 3), dense);
    }

    /// Matrix of a pure spin operator on `(C^n)^{⊗l}`.
    fn to_dense(op: &Op, n: usize, l: usize) -> DenseMatrix<Rational> {
        use crate::operator::SpinState;
        let dim = n.pow(l as u32);
        let mut m = DenseMatrix::<Rational>::zeros(dim, dim);
        let states = SpinState::all(n, l);
        for (col, st) in states.iter().enumerate() {
            for ((d, w), c) in op.terms() {
                assert!(d.is_identity());
                if let Some(out) = w.apply(st) {
                    let row = states.iter().position(|s| *s == out).unwrap();
                    let v = m.get(row, col).clone() + c.as_constant().unwrap();
                    m.set(row, col, v);
                }
            }
        }
        m
    }
}
