use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::context::{run_check, ModelContext};
use super::lie_checks::appendix_function;
use super::model_checks::level_grid;
use super::report::{CheckResult, Params, Witness};
use super::serre::{SerreCoefficients, SYMMETRIZER_PREFACTORS};
use super::{SuiteConfig, VerifyError};
use crate::arith::{Monomial, Poly, RatFunc, Var};
use crate::lie::{AlgebraSpec, LieTables, MetricConvention};
use crate::models::{Model, ModelKind, ModelSpec};
use crate::operator::{EvalPoint, Operator, OperatorError, Shape, SpinField, SpinState};
use crate::spin_ops::SpinOps;
use crate::{Rational, Scalar};

type Op = Operator<Rational>;
type Rf = RatFunc<Rational>;

/// An unsimplified operator expression, evaluated by acting on a field.
#[derive(Clone)]
pub enum Expr {
    Leaf(Arc<Op>),
    Scale(Rf, Box<Expr>),
    Sum(Vec<Expr>),
    /// Applied right to left.
    Product(Vec<Expr>),
    Bracket(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn leaf(op: &Arc<Op>) -> Self {
        Expr::Leaf(Arc::clone(op))
    }

    pub fn scaled(c: Rational, e: Expr) -> Self {
        Expr::Scale(RatFunc::constant(c), Box::new(e))
    }

    pub fn bracket(a: Expr, b: Expr) -> Self {
        Expr::Bracket(Box::new(a), Box::new(b))
    }

    pub fn minus(a: Expr, b: Expr) -> Self {
        Expr::Sum(vec![a, Expr::scaled(Rational::from_int(-1), b)])
    }

    /// Substitutes parameter values into every leaf and scale.
    pub fn bind(&self, bindings: &[(Var, Rational)]) -> Result<Expr, OperatorError> {
        self.bind_cached(bindings, &mut HashMap::new())
    }

    fn bind_cached(
        &self,
        bindings: &[(Var, Rational)],
        cache: &mut HashMap<*const Op, Arc<Op>>,
    ) -> Result<Expr, OperatorError> {
        Ok(match self {
            Expr::Leaf(op) => {
                let key = Arc::as_ptr(op);
                if let Some(b) = cache.get(&key) {
                    Expr::Leaf(Arc::clone(b))
                } else {
                    let b = Arc::new(op.substitute(bindings)?);
                    cache.insert(key, Arc::clone(&b));
                    Expr::Leaf(b)
                }
            }
            Expr::Scale(f, e) => Expr::Scale(f.substitute(bindings)?, Box::new(e.bind_cached(bindings, cache)?)),
            Expr::Sum(v) => Expr::Sum(v.iter().map(|e| e.bind_cached(bindings, cache)).collect::<Result<_, _>>()?),
            Expr::Product(v) => {
                Expr::Product(v.iter().map(|e| e.bind_cached(bindings, cache)).collect::<Result<_, _>>()?)
            }
            Expr::Bracket(a, b) => Expr::bracket(a.bind_cached(bindings, cache)?, b.bind_cached(bindings, cache)?),
        })
    }

    pub fn act(&self, psi: &SpinField<Rational>) -> Result<SpinField<Rational>, OperatorError> {
        match self {
            Expr::Leaf(op) => op.act(psi),
            Expr::Scale(f, e) => Ok(e.act(psi)?.mul_function(f)),
            Expr::Sum(v) => {
                let mut acc = SpinField::zero(psi.shape());
                for e in v {
                    acc = acc.add(&e.act(psi)?);
                }
                Ok(acc)
            }
            Expr::Product(v) => {
                let mut acc = psi.clone();
                for e in v.iter().rev() {
                    acc = e.act(&acc)?;
                }
                Ok(acc)
            }
            Expr::Bracket(a, b) => Ok(a.act(&b.act(psi)?)?.sub(&b.act(&a.act(psi)?)?)),
        }
    }
}

/// A pseudo-random polynomial spin field, point and parameter values.
#[derive(Debug, Clone)]
pub struct TestPoint {
    pub field: SpinField<Rational>,
    pub point: EvalPoint<Rational>,
}

fn small_rational(rng: &mut ChaCha8Rng, num: i64, den: i64, nonzero: bool) -> Rational {
    loop {
        let p = rng.gen_range(-num..=num);
        let q = rng.gen_range(1..=den);
        if !(nonzero && p == 0) {
            return Rational::from_frac(p, q);
        }
    }
}

impl TestPoint {
    pub fn random(shape: Shape, rng: &mut ChaCha8Rng) -> Self {
        let states = SpinState::all(shape.n, shape.sites);
        let mut comps = Vec::new();
        for _ in 0..2 {
            let s = states[rng.gen_range(0..states.len())];
            let mut terms = Vec::new();
            for _ in 0..3 {
                let mut m = Monomial::ONE;
                for _ in 0..rng.gen_range(0..=2) {
                    m = m.mul(&Monomial::var(Var::X(rng.gen_range(1..=shape.sites))));
                }
                terms.push((m, small_rational(rng, 3, 1, true)));
            }
            comps.push((s, RatFunc::from(Poly::from_terms(terms))));
        }
        let mut positions: Vec<Rational> = Vec::new();
        while positions.len() < shape.sites {
            let v = small_rational(rng, 9, 4, false);
            if !positions.contains(&v) {
                positions.push(v);
            }
        }
        let point = EvalPoint {
            positions,
            lambda: Some(small_rational(rng, 5, 3, true)),
            omega: Some(small_rational(rng, 5, 3, true)),
        };
        TestPoint { field: SpinField::from_components(shape, comps), point }
    }

    fn bindings(&self) -> Vec<(Var, Rational)> {
        let mut b = Vec::new();
        if let Some(l) = &self.point.lambda {
            b.push((Var::Lambda, l.clone()));
        }
        if let Some(o) = &self.point.omega {
            b.push((Var::Omega, o.clone()));
        }
        b
    }
}

/// One identity family: `count` instances, each an expression that must
/// evaluate to zero.
struct Family<'a> {
    name: &'static str,
    count: usize,
    build: Box<dyn Fn(usize) -> Expr + Sync + 'a>,
    /// Parameter values fixed before the random ones.
    fixed: Vec<(Var, Rational)>,
}

impl<'a> Family<'a> {
    fn new(name: &'static str, count: usize, build: impl Fn(usize) -> Expr + Sync + 'a) -> Self {
        Family { name, count, build: Box::new(build), fixed: Vec::new() }
    }
}

/// Stable stream id per family name, so a family's trials do not depend on
/// which other families run.
fn stream_of(name: &str) -> u64 {
    name.bytes().fold(0xcbf29ce484222325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3))
}

struct Disagreement {
    family: &'static str,
    instance: usize,
    trial: usize,
    detail: String,
}

fn run_families(
    families: &[Family<'_>],
    shape: Shape,
    seed: u64,
    trials: usize,
) -> Result<Option<Disagreement>, VerifyError> {
    let results: Vec<Result<Option<Disagreement>, VerifyError>> = families
        .par_iter()
        .map(|fam| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream_of(fam.name));
            for trial in 0..trials {
                let instance = rng.gen_range(0..fam.count);
                let tp = TestPoint::random(shape, &mut rng);
                let mut bindings = fam.fixed.clone();
                bindings.extend(tp.bindings().into_iter().filter(|(v, _)| !fam.fixed.iter().any(|(w, _)| w == v)));
                let expr = (fam.build)(instance).bind(&bindings)?;
                let values = expr.act(&tp.field)?.evaluate(&tp.point)?;
                if let Some((state, v)) = values.into_iter().next() {
                    return Ok(Some(Disagreement {
                        family: fam.name,
                        instance,
                        trial,
                        detail: format!("component {state} evaluates to {v}"),
                    }));
                }
            }
            Ok(None)
        })
        .collect();
    for r in results {
        if let Some(d) = r? {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

fn conclude(
    name: &str,
    params: Params,
    families: &[Family<'_>],
    outcome: Result<Option<Disagreement>, VerifyError>,
    trials: usize,
) -> (CheckResult, bool) {
    let names: Vec<&str> = families.iter().map(|f| f.name).collect();
    match outcome {
        Err(e) => (CheckResult::error(name, params, e.to_string()), false),
        Ok(None) => (
            CheckResult::pass(name, params).with_note(format!("{trials} trials each, all zero: {}", names.join(", "))),
            false,
        ),
        Ok(Some(d)) => (
            CheckResult::fail(
                name,
                params,
                Witness::message(format!(
                    "OracleDisagreement: {} instance {} trial {}: {}",
                    d.family, d.instance, d.trial, d.detail
                )),
            ),
            true,
        ),
    }
}

fn arcs(ops: &[Op]) -> Vec<Arc<Op>> {
    ops.iter().map(|o| Arc::new(o.clone())).collect()
}

fn combination(tables: &LieTables<Rational>, a: usize, b: usize, grid: &[Arc<Op>]) -> Expr {
    Expr::Sum(
        tables.constants.row_at(a, b).iter().map(|(e, c)| Expr::scaled(c.clone(), Expr::leaf(&grid[*e]))).collect(),
    )
}

/// `[left^A, right^B] - Σ f target`, instance `A·d + B`.
fn relation_family<'a>(
    name: &'static str,
    tables: &'a LieTables<Rational>,
    left: Vec<Arc<Op>>,
    right: Vec<Arc<Op>>,
    target: Vec<Arc<Op>>,
) -> Family<'a> {
    let d = left.len();
    Family::new(name, d * d, move |i| {
        let (a, b) = (i / d, i % d);
        Expr::minus(Expr::bracket(Expr::leaf(&left[a]), Expr::leaf(&right[b])), combination(tables, a, b, &target))
    })
}

/// Cyclic Serre sum as nested brackets.
fn serre_lhs_expr(g0: &[Arc<Op>], g1: &[Arc<Op>], a: usize, b: usize, c: usize) -> Expr {
    Expr::Sum(
        [(a, b, c), (c, a, b), (b, c, a)]
            .iter()
            .map(|&(x, y, z)| Expr::bracket(Expr::leaf(&g1[x]), Expr::bracket(Expr::leaf(&g0[y]), Expr::leaf(&g1[z]))))
            .collect(),
    )
}

/// `scale · Σ c_{αγε} Σ_σ G₀ G₀ G₀` as operator products.
fn serre_rhs_expr(coeffs: &SerreCoefficients, g0: &[Arc<Op>], scale: &Rf, a: usize, b: usize, c: usize) -> Expr {
    let terms = coeffs
        .get(a, b, c)
        .into_iter()
        .map(|([x, y, z], k)| {
            let orders = [[x, y, z], [x, z, y], [y, x, z], [y, z, x], [z, x, y], [z, y, x]];
            Expr::scaled(
                k,
                Expr::Sum(
                    orders.iter().map(|o| Expr::Product(o.iter().map(|&i| Expr::leaf(&g0[i])).collect())).collect(),
                ),
            )
        })
        .collect();
    Expr::Scale(scale.clone(), Box::new(Expr::Sum(terms)))
}

fn yangian_scale(model: &Model<Rational>) -> Rf {
    let lam = model.lambda();
    let mut f = &(lam * lam)
        * &RatFunc::constant(Rational::from_frac(SYMMETRIZER_PREFACTORS[0].0, SYMMETRIZER_PREFACTORS[0].1));
    if model.spec().kind == ModelKind::Confined {
        let om = model.omega();
        f = &f * &(&(om * om) * &RatFunc::constant(Rational::from_int(4)));
    }
    f
}

struct ModelGrids {
    h: Arc<Op>,
    h_sym: Arc<Op>,
    g0: Vec<Arc<Op>>,
    g1: Vec<Arc<Op>>,
    g1_sym: Vec<Arc<Op>>,
}

/// Re-evaluates every identity the model checks proved zero, without
/// forming operator products, on seeded random fields and points. Also
/// compares engine products against successive action. The flag is set on
/// an oracle disagreement.
pub fn oracle_crosscheck(ctx: &ModelContext, passed: &[String]) -> (CheckResult, bool) {
    let name = "oracle.crosscheck";
    let params = ctx.params();
    if ctx.cfg.trials == 0 {
        return (CheckResult::error(name, params, VerifyError::NoTrials.to_string()), false);
    }
    let mut flag = false;
    let r = run_check(ctx.cfg.timing, name, params.clone(), || {
        let grids = ModelGrids {
            h: Arc::new(ctx.hamiltonian()?.clone()),
            h_sym: Arc::new(ctx.hamiltonian_symbolic()?.clone()),
            g0: arcs(ctx.level0()?),
            g1: arcs(ctx.level1()?),
            g1_sym: if passed.iter().any(|p| p == "relations.level1-symbolic") {
                arcs(ctx.level1_symbolic()?)
            } else {
                Vec::new()
            },
        };
        let families = model_families(ctx, &grids, passed)?;
        let outcome = run_families(&families, ctx.model.shape(), ctx.cfg.seed, ctx.cfg.trials);
        let (res, bad) = conclude(name, params.clone(), &families, outcome, ctx.cfg.trials);
        flag = bad;
        Ok(res)
    });
    (r, flag)
}

fn model_families<'a>(
    ctx: &'a ModelContext,
    g: &'a ModelGrids,
    passed: &[String],
) -> Result<Vec<Family<'a>>, VerifyError> {
    let has = |n: &str| passed.iter().any(|p| p == n);
    let tables = &ctx.tables;
    let d = ctx.dim();
    let spec = ctx.spec();
    let mut fams: Vec<Family<'a>> = Vec::new();

    // Engine products against successive action.
    let pool: Vec<Arc<Op>> =
        std::iter::once(g.h.clone()).chain(g.g0.iter().cloned()).chain(g.g1.iter().cloned()).collect();
    let m = pool.len();
    fams.push(Family::new("engine.product", m * m, move |i| {
        let (x, y) = (&pool[i / m], &pool[i % m]);
        Expr::minus(Expr::Leaf(Arc::new(x.as_ref() * y.as_ref())), Expr::Product(vec![Expr::leaf(x), Expr::leaf(y)]))
    }));

    if has("conservation.level0") {
        let (h, g0) = (g.h_sym.clone(), g.g0.clone());
        fams.push(Family::new("conservation.level0", d, move |i| Expr::bracket(Expr::leaf(&h), Expr::leaf(&g0[i]))));
    }
    if has("conservation.level1") {
        let (h, g1) = (g.h.clone(), g.g1.clone());
        fams.push(Family::new("conservation.level1", d, move |i| Expr::bracket(Expr::leaf(&h), Expr::leaf(&g1[i]))));
    }
    if has("relations.level0") {
        fams.push(relation_family("relations.level0", tables, g.g0.clone(), g.g0.clone(), g.g0.clone()));
    }
    if has("relations.level1") {
        fams.push(relation_family("relations.level1", tables, g.g0.clone(), g.g1.clone(), g.g1.clone()));
    }
    if has("relations.level1-symbolic") {
        fams.push(relation_family(
            "relations.level1-symbolic",
            tables,
            g.g0.clone(),
            g.g1_sym.clone(),
            g.g1_sym.clone(),
        ));
    }
    if has("relations.level2") {
        let g2 = arcs(&level_grid(ctx, |ab| ctx.model.gen_j(2, ab))?);
        fams.push(relation_family("relations.level2", tables, g.g1.clone(), g.g1.clone(), g2));
    }
    if has("relations.o-half-loop") {
        let o: Vec<Vec<Arc<Op>>> = (0..=4u32)
            .map(|n| Ok(arcs(&level_grid(ctx, |ab| ctx.model.gen_o(n, ab))?)))
            .collect::<Result<_, VerifyError>>()?;
        fams.push(Family::new("relations.o-half-loop", 9 * d * d, move |i| {
            let (mn, ab) = (i / (d * d), i % (d * d));
            let (mm, nn) = (mn / 3, mn % 3);
            let (a, b) = (ab / d, ab % d);
            Expr::minus(
                Expr::bracket(Expr::leaf(&o[mm][a]), Expr::leaf(&o[nn][b])),
                combination(tables, a, b, &o[mm + nn]),
            )
        }));
    }
    if has("serre.half-loop") {
        let (g0, g1) = (g.g0.clone(), g.g1.clone());
        fams.push(Family::new("serre.half-loop", d * d * d, move |i| {
            serre_lhs_expr(&g0, &g1, i / (d * d), (i / d) % d, i % d)
        }));
    }
    let coeffs = Arc::new(SerreCoefficients::new(tables, MetricConvention::default()));
    let scale = yangian_scale(&ctx.model);
    if has("serre.yangian") {
        let (g0, g1, c, s) = (g.g0.clone(), g.g1.clone(), coeffs.clone(), scale.clone());
        fams.push(Family::new("serre.yangian", d * d * d, move |i| {
            let (a, b, cc) = (i / (d * d), (i / d) % d, i % d);
            Expr::minus(serre_lhs_expr(&g0, &g1, a, b, cc), serre_rhs_expr(&c, &g0, &s, a, b, cc))
        }));
    }
    if has("serre.omega-limit") {
        let calogero = Model::new(
            ModelSpec::new(spec.algebra, spec.sites, ModelKind::Calogero, spec.lambda.clone())
                .with_transcription(spec.transcription),
        )?;
        let j2 = arcs(&level_grid(ctx, |ab| calogero.gen_j(2, ab))?);
        let (g0, g1, c, s) = (g.g0.clone(), g.g1.clone(), coeffs.clone(), scale.clone());
        let mut fam = Family::new("serre.omega-limit", d * d * d, move |i| {
            let (a, b, cc) = (i / (d * d), (i / d) % d, i % d);
            let confined = Expr::minus(serre_lhs_expr(&g0, &g1, a, b, cc), serre_rhs_expr(&c, &g0, &s, a, b, cc));
            Expr::minus(confined, serre_lhs_expr(&g0, &j2, a, b, cc))
        });
        fam.fixed = vec![(Var::Omega, Rational::from_int(0))];
        fams.push(fam);
    }
    if has("serre.scaling") {
        let sutherland = Model::new(
            ModelSpec::new(spec.algebra, spec.sites, ModelKind::Sutherland, spec.lambda.clone())
                .with_transcription(spec.transcription),
        )?;
        let k0 = arcs(&level_grid(ctx, |ab| sutherland.gen_k(0, ab))?);
        let om = ctx.model.omega();
        let s_scale = &yangian_scale(&sutherland) * &(&(om * om) * &RatFunc::constant(Rational::from_int(4)));
        let (g0, c, s) = (g.g0.clone(), coeffs.clone(), scale.clone());
        fams.push(Family::new("serre.scaling", d * d * d, move |i| {
            let (a, b, cc) = (i / (d * d), (i / d) % d, i % d);
            Expr::minus(serre_rhs_expr(&c, &g0, &s, a, b, cc), serre_rhs_expr(&c, &k0, &s_scale, a, b, cc))
        }));
    }
    Ok(fams)
}

/// The oracle for the algebra suite: spin identities, closure, the
/// bar extension and the appendix function, on two sites.
pub fn lie_oracle_crosscheck(spec: AlgebraSpec, cfg: &SuiteConfig, passed: &[String]) -> (CheckResult, bool) {
    let name = "oracle.crosscheck";
    let params = Params::algebra(spec).with_sites(2);
    if cfg.trials == 0 {
        return (CheckResult::error(name, params, VerifyError::NoTrials.to_string()), false);
    }
    let mut flag = false;
    let r = run_check(cfg.timing, name, params.clone(), || {
        let tables = LieTables::<Rational>::new(spec)?;
        let ops = SpinOps::new(spec, 2);
        let shape = ops.shape();
        let n = spec.n();
        let d = tables.basis().len();
        let has = |n: &str| passed.iter().any(|p| p == n);
        let p = Arc::new(ops.p::<Rational>(1, 2)?);
        let q = Arc::new(ops.q::<Rational>(1, 2)?);
        let id = Arc::new(Op::identity(shape));
        let mut f1 = Vec::new();
        let mut f2 = Vec::new();
        for a in 1..=n {
            for b in 1..=n {
                f1.push(Arc::new(ops.f::<Rational>(1, a, b)?));
                f2.push(Arc::new(ops.f::<Rational>(2, a, b)?));
            }
        }
        let basis1: Vec<Arc<Op>> = tables
            .basis()
            .iter()
            .map(|g| Ok(Arc::new(ops.f::<Rational>(1, g.a, g.b)?)))
            .collect::<Result<_, VerifyError>>()?;
        let th = Rational::from_int(spec.theta0() as i64);
        let leaf = Expr::leaf;
        let prod = |x: &Arc<Op>, y: &Arc<Op>| Expr::Product(vec![leaf(x), leaf(y)]);
        let mut fams: Vec<Family> = Vec::new();
        if has("spin.p-squared") {
            let (p, id) = (p.clone(), id.clone());
            fams.push(Family::new("spin.p-squared", 1, move |_| Expr::minus(prod(&p, &p), leaf(&id))));
        }
        if has("spin.q-squared") {
            let q = q.clone();
            let nn = Rational::from_int(n as i64);
            fams.push(Family::new("spin.q-squared", 1, move |_| {
                Expr::minus(prod(&q, &q), Expr::scaled(nn.clone(), leaf(&q)))
            }));
        }
        if has("spin.pq") {
            let (p, q, th) = (p.clone(), q.clone(), th.clone());
            fams.push(Family::new("spin.pq", 2, move |i| {
                let pq = if i == 0 { prod(&p, &q) } else { prod(&q, &p) };
                Expr::minus(pq, Expr::scaled(th.clone(), leaf(&q)))
            }));
        }
        if has("spin.p-minus-q") {
            let (p, q, f1, f2) = (p.clone(), q.clone(), f1.clone(), f2.clone());
            fams.push(Family::new("spin.p-minus-q", 1, move |_| {
                let half = Rational::from_frac(1, 2);
                let ff = (0..n * n)
                    .map(|i| {
                        let (a, b) = (i / n, i % n);
                        Expr::scaled(half.clone(), prod(&f1[a * n + b], &f2[b * n + a]))
                    })
                    .collect();
                Expr::minus(Expr::minus(leaf(&p), leaf(&q)), Expr::Sum(ff))
            }));
        }
        if has("spin.swap-p") {
            let (p, f1, f2) = (p.clone(), f1.clone(), f2.clone());
            fams.push(Family::new("spin.swap-p", n * n, move |i| Expr::minus(prod(&p, &f1[i]), prod(&f2[i], &p))));
        }
        if has("spin.swap-q") {
            let (q, f1, f2) = (q.clone(), f1.clone(), f2.clone());
            fams.push(Family::new("spin.swap-q", n * n, move |i| Expr::Sum(vec![prod(&q, &f1[i]), prod(&q, &f2[i])])));
        }
        if has("lie.closure") {
            let b1 = basis1.clone();
            let t = &tables;
            fams.push(Family::new("lie.closure", d * d, move |i| {
                let (a, b) = (i / d, i % d);
                Expr::minus(Expr::bracket(leaf(&b1[a]), leaf(&b1[b])), combination(t, a, b, &b1))
            }));
        }
        if has("appendix.bar-extension") {
            let (f1, f2) = (f1.clone(), f2.clone());
            fams.push(Family::new("appendix.bar-extension", n * n, move |i| {
                let (a, b) = (i / n + 1, i % n + 1);
                let (ab, ba) = (spec.bar(a).unwrap(), spec.bar(b).unwrap());
                let s = Rational::from_int((spec.theta(a).unwrap() * spec.theta(b).unwrap()) as i64);
                let k = |x: usize, y: usize| {
                    Expr::Sum(vec![leaf(&f1[(x - 1) * n + y - 1]), leaf(&f2[(x - 1) * n + y - 1])])
                };
                Expr::Sum(vec![k(ba, ab), Expr::scaled(s, k(a, b))])
            }));
        }
        if has("appendix.f") {
            if let Some(lam) = spec.special_coupling::<Rational>() {
                let f = appendix_function(spec, &lam);
                let id = id.clone();
                fams.push(Family::new("appendix.f", 1, move |_| {
                    Expr::minus(Expr::Scale(f.clone(), Box::new(leaf(&id))), leaf(&id))
                }));
            }
        }
        let outcome = run_families(&fams, shape, cfg.seed, cfg.trials);
        let (res, bad) = conclude(name, params.clone(), &fams, outcome, cfg.trials);
        flag = bad;
        Ok(res)
    });
    (r, flag)
}
