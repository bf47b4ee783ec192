use num_traits::Zero;

use super::context::run_check;
use super::report::{CheckResult, Params, Witness};
use super::{SuiteConfig, VerifyError};
use crate::arith::{Poly, RatFunc, Var};
use crate::dense::DenseMatrix;
use crate::lie::{AlgebraSpec, GeneratorIndex, LieTables, MetricConvention, Slot};
use crate::operator::{Operator, Shape, SpinState};
use crate::spin_ops::SpinOps;
use crate::{Rational, Scalar};

type Op = Operator<Rational>;
type Dense = DenseMatrix<Rational>;

fn int(v: i64) -> Rational {
    Rational::from_int(v)
}

/// Matrix of a constant-coefficient, derivative-free operator on
/// `(C^N)^{⊗L}`, site 1 most significant.
pub(crate) fn operator_to_dense(op: &Op) -> Option<Dense> {
    let shape = op.shape();
    let states = SpinState::all(shape.n, shape.sites);
    let dim = states.len();
    let mut m = Dense::zeros(dim, dim);
    for ((d, w), c) in op.terms() {
        if !d.is_identity() {
            return None;
        }
        let c = c.as_constant()?;
        for (col, st) in states.iter().enumerate() {
            if let Some(out) = w.apply(st) {
                let row = states.binary_search(&out).ok()?;
                let v = m.get(row, col).clone() + c.clone();
                m.set(row, col, v);
            }
        }
    }
    Some(m)
}

/// Independent two-site matrices built from Kronecker products.
struct DenseTwoSite {
    n: usize,
    p: Dense,
    q: Dense,
    f1: Vec<Vec<Dense>>,
    f2: Vec<Vec<Dense>>,
}

impl DenseTwoSite {
    fn new(spec: AlgebraSpec) -> Result<Self, VerifyError> {
        let n = spec.n();
        let id = Dense::identity(n);
        let mut p = Dense::zeros(n * n, n * n);
        let mut q = Dense::zeros(n * n, n * n);
        let mut f1 = vec![Vec::new(); n + 1];
        let mut f2 = vec![Vec::new(); n + 1];
        for a in 1..=n {
            f1[a].push(Dense::zeros(0, 0));
            f2[a].push(Dense::zeros(0, 0));
            for b in 1..=n {
                p = &p + &Dense::unit(n, a, b).kron(&Dense::unit(n, b, a));
                let s = int((spec.theta(a)? * spec.theta(b)?) as i64);
                let qt = Dense::unit(n, a, b).kron(&Dense::unit(n, spec.bar(a)?, spec.bar(b)?));
                q = &q + &qt.scale(&s);
                let f = spec.f_matrix::<Rational>(a, b)?;
                f1[a].push(f.kron(&id));
                f2[a].push(id.kron(&f));
            }
        }
        Ok(DenseTwoSite { n, p, q, f1, f2 })
    }
}

/// Symbolic two-site operators.
struct SymbolicTwoSite {
    shape: Shape,
    p: Op,
    q: Op,
    f1: Vec<Vec<Op>>,
    f2: Vec<Vec<Op>>,
}

impl SymbolicTwoSite {
    fn new(spec: AlgebraSpec) -> Result<Self, VerifyError> {
        let ops = SpinOps::new(spec, 2);
        let n = spec.n();
        let mut f1 = vec![Vec::new(); n + 1];
        let mut f2 = vec![Vec::new(); n + 1];
        for a in 1..=n {
            f1[a].push(Op::zero(ops.shape()));
            f2[a].push(Op::zero(ops.shape()));
            for b in 1..=n {
                f1[a].push(ops.f(1, a, b)?);
                f2[a].push(ops.f(2, a, b)?);
            }
        }
        Ok(SymbolicTwoSite { shape: ops.shape(), p: ops.p(1, 2)?, q: ops.q(1, 2)?, f1, f2 })
    }
}

/// Runs one spin identity on both representations.
fn both(
    name: &str,
    params: Params,
    symbolic: Result<Option<String>, VerifyError>,
    dense: Option<String>,
) -> Result<CheckResult, VerifyError> {
    let sym = symbolic?;
    Ok(match (sym, dense) {
        (None, None) => CheckResult::pass(name, params),
        (Some(s), None) => CheckResult::fail(name, params, Witness::message(format!("symbolic: {s}"))),
        (None, Some(d)) => CheckResult::fail(name, params, Witness::message(format!("dense oracle: {d}"))),
        (Some(s), Some(d)) => {
            CheckResult::fail(name, params, Witness::message(format!("symbolic: {s}; dense oracle: {d}")))
        }
    })
}

fn nonzero_op(label: &str, op: &Op) -> Option<String> {
    (!op.is_zero()).then(|| format!("{label} leaves {} terms, first {}", op.len(), op.lines(1).join("")))
}

fn nonzero_dense(label: &str, m: &Dense) -> Option<String> {
    (!m.is_zero()).then(|| format!("{label} is not zero"))
}

/// `P² = Id`, `Q² = NQ`, `PQ = QP = θ₀Q`, `P - Q = ½ Σ F₁^{ab} F₂^{ba}` and
/// the swap properties `P F₁ = F₂ P`, `Q F₁ = -Q F₂`, on two sites, each
/// checked symbolically and on dense Kronecker matrices; plus agreement of
/// the two representations.
pub fn check_pq_identities(spec: AlgebraSpec, cfg: &SuiteConfig) -> Vec<CheckResult> {
    let params = Params::algebra(spec).with_sites(2);
    let tables = (|| Ok::<_, VerifyError>((SymbolicTwoSite::new(spec)?, DenseTwoSite::new(spec)?)))();
    let (s, d) = match tables {
        Ok(t) => t,
        Err(e) => return vec![CheckResult::error("spin.p-squared", params, e.to_string())],
    };
    let n = d.n;
    let th = int(spec.theta0() as i64);
    let idd = Dense::identity(n * n);
    let ido = Op::identity(s.shape);
    let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|a| (1..=n).map(move |b| (a, b))).collect();
    type Job<'a> = Box<dyn Fn() -> Result<CheckResult, VerifyError> + 'a>;
    let p = params.clone();
    let jobs: Vec<(&str, Job)> = vec![
        (
            "spin.p-squared",
            Box::new(|| {
                both(
                    "spin.p-squared",
                    p.clone(),
                    Ok(nonzero_op("P P - Id", &(&(&s.p * &s.p) - &ido))),
                    nonzero_dense("P P - Id", &(&(&d.p * &d.p) - &idd)),
                )
            }),
        ),
        (
            "spin.q-squared",
            Box::new(|| {
                let nn = int(n as i64);
                both(
                    "spin.q-squared",
                    p.clone(),
                    Ok(nonzero_op("Q Q - N Q", &(&(&s.q * &s.q) - &s.q.scale(&nn)))),
                    nonzero_dense("Q Q - N Q", &(&(&d.q * &d.q) - &d.q.scale(&nn))),
                )
            }),
        ),
        (
            "spin.pq",
            Box::new(|| {
                let sym = nonzero_op("P Q - theta0 Q", &(&(&s.p * &s.q) - &s.q.scale(&th)))
                    .or_else(|| nonzero_op("Q P - theta0 Q", &(&(&s.q * &s.p) - &s.q.scale(&th))));
                let den = nonzero_dense("P Q - theta0 Q", &(&(&d.p * &d.q) - &d.q.scale(&th)))
                    .or_else(|| nonzero_dense("Q P - theta0 Q", &(&(&d.q * &d.p) - &d.q.scale(&th))));
                both("spin.pq", p.clone(), Ok(sym), den)
            }),
        ),
        (
            "spin.p-minus-q",
            Box::new(|| {
                let half = Rational::from_frac(1, 2);
                let mut sym = &s.p - &s.q;
                let mut den = &d.p - &d.q;
                for &(a, b) in &pairs {
                    sym = &sym - &(&s.f1[a][b] * &s.f2[b][a]).scale(&half);
                    den = &den - &(&d.f1[a][b] * &d.f2[b][a]).scale(&half);
                }
                both(
                    "spin.p-minus-q",
                    p.clone(),
                    Ok(nonzero_op("P - Q - sum F F / 2", &sym)),
                    nonzero_dense("P - Q - sum F F / 2", &den),
                )
            }),
        ),
        (
            "spin.swap-p",
            Box::new(|| {
                let sym = pairs.iter().find_map(|&(a, b)| {
                    nonzero_op(
                        &format!("P F1^({a},{b}) - F2^({a},{b}) P"),
                        &(&(&s.p * &s.f1[a][b]) - &(&s.f2[a][b] * &s.p)),
                    )
                });
                let den = pairs.iter().find_map(|&(a, b)| {
                    nonzero_dense(
                        &format!("P F1^({a},{b}) - F2^({a},{b}) P"),
                        &(&(&d.p * &d.f1[a][b]) - &(&d.f2[a][b] * &d.p)),
                    )
                });
                both("spin.swap-p", p.clone(), Ok(sym), den)
            }),
        ),
        (
            "spin.swap-q",
            Box::new(|| {
                let sym = pairs.iter().find_map(|&(a, b)| {
                    nonzero_op(
                        &format!("Q F1^({a},{b}) + Q F2^({a},{b})"),
                        &(&(&s.q * &s.f1[a][b]) + &(&s.q * &s.f2[a][b])),
                    )
                });
                let den = pairs.iter().find_map(|&(a, b)| {
                    nonzero_dense(
                        &format!("Q F1^({a},{b}) + Q F2^({a},{b})"),
                        &(&(&d.q * &d.f1[a][b]) + &(&d.q * &d.f2[a][b])),
                    )
                });
                both("spin.swap-q", p.clone(), Ok(sym), den)
            }),
        ),
        (
            "spin.dense-agreement",
            Box::new(|| {
                let mut bad = Vec::new();
                let mut cmp = |label: String, op: &Op, m: &Dense| {
                    if operator_to_dense(op).as_ref() != Some(m) {
                        bad.push(label);
                    }
                };
                cmp("P".into(), &s.p, &d.p);
                cmp("Q".into(), &s.q, &d.q);
                for &(a, b) in &pairs {
                    cmp(format!("F1^({a},{b})"), &s.f1[a][b], &d.f1[a][b]);
                    cmp(format!("F2^({a},{b})"), &s.f2[a][b], &d.f2[a][b]);
                }
                Ok(if bad.is_empty() {
                    CheckResult::pass("spin.dense-agreement", p.clone())
                } else {
                    CheckResult::fail(
                        "spin.dense-agreement",
                        p.clone(),
                        Witness::message(format!("symbolic and dense matrices differ for {}", bad.join(", "))),
                    )
                })
            }),
        ),
    ];
    jobs.into_iter().map(|(name, job)| run_check(cfg.timing, name, params.clone(), job)).collect()
}

/// Structure constants, metric and generator checks for one algebra.
pub fn check_lie_structure(spec: AlgebraSpec, cfg: &SuiteConfig) -> Vec<CheckResult> {
    let params = Params::algebra(spec);
    let tables = match LieTables::<Rational>::new(spec) {
        Ok(t) => t,
        Err(e) => return vec![CheckResult::error("lie.metric", params, e.to_string())],
    };
    let basis = tables.basis().to_vec();
    let d = basis.len();
    let n = spec.n();
    let mats: Vec<Dense> = basis.iter().map(|g| spec.f_matrix(g.a, g.b).expect("basis index")).collect();
    let p = || params.clone();
    let verdict = |name: &str, w: Option<Witness>| CheckResult::verdict(name, p(), w);
    type Job<'a> = Box<dyn Fn() -> Result<CheckResult, VerifyError> + 'a>;
    let jobs: Vec<(&str, Job)> = vec![
        (
            "lie.closure",
            Box::new(|| {
                // The one-site operator algebra and the matrices must both close
                // with the tabulated constants.
                let ops = SpinOps::new(spec, 1);
                let f1: Vec<Op> = basis.iter().map(|g| ops.f(1, g.a, g.b)).collect::<Result<_, _>>()?;
                for i in 0..d {
                    for j in 0..d {
                        let row = tables.constants.row_at(i, j);
                        let expected =
                            Operator::linear_combination(ops.shape(), row.iter().map(|(k, c)| (c.clone(), &f1[*k])))?;
                        let defect = &f1[i].commutator(&f1[j]) - &expected;
                        if !defect.is_zero() {
                            return Ok(verdict(
                                "lie.closure",
                                Some(Witness::from_operator(&[basis[i], basis[j]], &defect)),
                            ));
                        }
                        let mut dense = mats[i].commutator(&mats[j]);
                        for (k, c) in row {
                            dense = &dense - &mats[*k].scale(c);
                        }
                        if !dense.is_zero() {
                            return Ok(verdict(
                                "lie.closure",
                                Some(Witness {
                                    indices: vec![basis[i].to_string(), basis[j].to_string()],
                                    terms: Vec::new(),
                                    note: Some("matrix commutator differs from the tabulated combination".into()),
                                }),
                            ));
                        }
                    }
                }
                Ok(verdict("lie.closure", None))
            }),
        ),
        (
            "lie.jacobi",
            Box::new(|| {
                Ok(verdict(
                    "lie.jacobi",
                    (!tables.constants.jacobi_holds()).then(|| Witness::message("Jacobi sum nonzero")),
                ))
            }),
        ),
        (
            "lie.antisymmetry",
            Box::new(|| {
                Ok(verdict(
                    "lie.antisymmetry",
                    (!tables.constants.is_antisymmetric()).then(|| Witness::message("f^{AB} differs from -f^{BA}")),
                ))
            }),
        ),
        (
            "lie.sym-f",
            Box::new(|| {
                for a in 1..=n {
                    for b in 1..=n {
                        let s = int((spec.theta(a)? * spec.theta(b)?) as i64);
                        let lhs = spec.f_matrix::<Rational>(a, b)?;
                        let rhs = spec.f_matrix::<Rational>(spec.bar(b)?, spec.bar(a)?)?.scale(&-s);
                        if lhs != rhs {
                            return Ok(verdict(
                                "lie.sym-f",
                                Some(Witness {
                                    indices: vec![GeneratorIndex::new(a, b).to_string()],
                                    terms: Vec::new(),
                                    note: Some("F^{ab} differs from -theta_a theta_b F^{bbar abar}".into()),
                                }),
                            ));
                        }
                    }
                }
                Ok(verdict("lie.sym-f", None))
            }),
        ),
        (
            "lie.theta-bar",
            Box::new(|| {
                for a in 1..=n {
                    let abar = spec.bar(a)?;
                    if spec.bar(abar)? != a || spec.theta(a)? * spec.theta(abar)? != spec.theta0() {
                        return Ok(verdict("lie.theta-bar", Some(Witness::message(format!("fails at a = {a}")))));
                    }
                }
                Ok(verdict("lie.theta-bar", None))
            }),
        ),
        (
            "lie.independence",
            Box::new(|| {
                let flat = Dense::from_fn(d, n * n, |i, k| mats[i].get(k / n, k % n).clone());
                let expected = if spec.is_orthogonal() { n * (n - 1) / 2 } else { n * (n + 1) / 2 };
                let rank = flat.rank();
                Ok(verdict(
                    "lie.independence",
                    (rank != d || d != expected).then(|| {
                        Witness::message(format!("rank {rank}, basis size {d}, expected dimension {expected}"))
                    }),
                ))
            }),
        ),
        (
            "lie.metric",
            Box::new(|| {
                let g = tables.metric.metric();
                let prod = g * tables.metric.inverse();
                let w = if !g.is_symmetric() {
                    Some(Witness::message("metric is not symmetric"))
                } else if prod != Dense::identity(d) {
                    Some(Witness::message("metric times inverse is not the identity"))
                } else {
                    None
                };
                Ok(verdict("lie.metric", w))
            }),
        ),
        (
            "lie.ad-invariance",
            Box::new(|| {
                let g = tables.metric.metric();
                for x in 0..d {
                    for y in 0..d {
                        for z in 0..d {
                            let mut acc = int(0);
                            for (e, c) in tables.constants.row_at(x, y) {
                                acc += c.clone() * g.get(*e, z).clone();
                            }
                            for (e, c) in tables.constants.row_at(x, z) {
                                acc += c.clone() * g.get(y, *e).clone();
                            }
                            if !acc.is_zero() {
                                return Ok(verdict(
                                    "lie.ad-invariance",
                                    Some(Witness {
                                        indices: vec![basis[x].to_string(), basis[y].to_string(), basis[z].to_string()],
                                        terms: vec![acc.to_string()],
                                        note: Some("g([X,Y],Z) + g(Y,[X,Z]) is not zero".into()),
                                    }),
                                ));
                            }
                        }
                    }
                }
                Ok(verdict("lie.ad-invariance", None))
            }),
        ),
        (
            "lie.raise-lower",
            Box::new(|| {
                let f = tables.constants.to_tensor();
                let conv = MetricConvention::default();
                let round = f.raise_lower(&tables.metric, &[(2, Slot::Upper)], conv).raise_lower(
                    &tables.metric,
                    &[(2, Slot::Lower)],
                    conv,
                );
                let all_up = f.raise_lower(&tables.metric, &[(2, Slot::Upper)], conv);
                let w = if round != f {
                    Some(Witness::message("raising then lowering does not return f"))
                } else if !all_up.is_totally_antisymmetric() {
                    Some(Witness::message("fully raised f is not totally antisymmetric"))
                } else {
                    None
                };
                Ok(verdict("lie.raise-lower", w))
            }),
        ),
    ];
    jobs.into_iter().map(|(name, job)| run_check(cfg.timing, name, params.clone(), job)).collect()
}

/// `f(x₁,x₂) = (λ(N-4θ₀)(x₁+x₂)² - 8x₁x₂) / (2(x₁-x₂)²)`.
pub(crate) fn appendix_function(spec: AlgebraSpec, lambda: &Rational) -> RatFunc<Rational> {
    let x1 = Poly::var(Var::X(1));
    let x2 = Poly::var(Var::X(2));
    let s = &x1 + &x2;
    let k = lambda.clone() * int(spec.n() as i64 - 4 * spec.theta0() as i64);
    let num = &(&s * &s).scale(&k) - &(&x1 * &x2).scale(&int(8));
    let inv = RatFunc::inverse_difference(1, 2);
    &(&RatFunc::from(num) * &(&inv * &inv)) * &RatFunc::constant(Rational::from_frac(1, 2))
}

/// `f(x₁,x₂) - 1 = 0` at `lambda` (default λ*).
pub fn check_appendix_f(spec: AlgebraSpec, lambda: Option<Rational>, cfg: &SuiteConfig) -> CheckResult {
    let name = "appendix.f";
    let lam = lambda.or_else(|| spec.special_coupling());
    let mut params = Params::algebra(spec);
    let Some(lam) = lam else {
        return CheckResult::skipped(name, params, "N = 4 theta0: lambda* is undefined (so(4) is not simple)");
    };
    params = params.with_lambda(lam.to_string());
    run_check(cfg.timing, name, params.clone(), || {
        let rem = &appendix_function(spec, &lam) - &RatFunc::one();
        Ok(CheckResult::verdict(name, params, (!rem.is_zero()).then(|| Witness::message(format!("f - 1 = {rem}")))))
    })
}

/// `K₀^{b̄ā} = -θ_a θ_b K₀^{ab}` for every `a, b`, with `K₀ = Σ_j F_j` on two sites.
pub fn check_appendix_bar_extension(spec: AlgebraSpec, cfg: &SuiteConfig) -> CheckResult {
    let name = "appendix.bar-extension";
    let params = Params::algebra(spec).with_sites(2);
    run_check(cfg.timing, name, params.clone(), || {
        let ops = SpinOps::new(spec, 2);
        let k0 = |a, b| -> Result<Op, VerifyError> { Ok(&ops.f(1, a, b)? + &ops.f(2, a, b)?) };
        for a in 1..=spec.n() {
            for b in 1..=spec.n() {
                let s = int((spec.theta(a)? * spec.theta(b)?) as i64);
                let defect = &k0(spec.bar(b)?, spec.bar(a)?)? + &k0(a, b)?.scale(&s);
                if !defect.is_zero() {
                    return Ok(CheckResult::fail(
                        name,
                        params,
                        Witness::from_operator(&[GeneratorIndex::new(a, b)], &defect),
                    ));
                }
            }
        }
        Ok(CheckResult::pass(name, params))
    })
}
