use rayon::prelude::*;

use super::context::ModelContext;
use super::report::{CheckResult, Witness};
use super::VerifyError;
use crate::lie::{GeneratorIndex, LieTables};
use crate::models::ModelKind;
use crate::operator::{Operator, Shape};
use crate::Rational;

type Op = Operator<Rational>;

/// `Σ_E f^{AB}_E grid[E]`.
pub(crate) fn structure_combination(tables: &LieTables<Rational>, shape: Shape, a: usize, b: usize, grid: &[Op]) -> Op {
    let row = tables.constants.row_at(a, b);
    Operator::linear_combination(shape, row.iter().map(|(e, c)| (c.clone(), &grid[*e])))
        .expect("grid operators share one shape")
}

/// Evaluates `defect(i)` for `i < count` in parallel and returns the lowest
/// index whose defect is nonzero, with that defect.
pub(crate) fn first_defect<F>(count: usize, defect: F) -> Result<Option<(usize, Op)>, VerifyError>
where
    F: Fn(usize) -> Result<Op, VerifyError> + Sync,
{
    let mut bad: Vec<(usize, Result<Op, VerifyError>)> = (0..count)
        .into_par_iter()
        .filter_map(|i| match defect(i) {
            Ok(op) if op.is_zero() => None,
            other => Some((i, other)),
        })
        .collect();
    bad.sort_by_key(|(i, _)| *i);
    match bad.into_iter().next() {
        None => Ok(None),
        Some((i, r)) => r.map(|op| Some((i, op))),
    }
}

/// `[H, G₀^A] = 0` with λ symbolic and `[H, G₁^A] = 0` at the spec's λ.
pub fn check_conservation(ctx: &ModelContext) -> Vec<CheckResult> {
    let basis = ctx.tables.basis();
    let mut out = Vec::new();
    if ctx.cfg.selects("conservation.level0", &super::MODEL_GROUPS) {
        let params = ctx.params().with_lambda("symbolic");
        out.push(ctx.run("conservation.level0", params.clone(), || {
            let h = ctx.hamiltonian_symbolic()?;
            let g0 = ctx.level0()?;
            let bad = first_defect(g0.len(), |i| Ok(h.checked_commutator(&g0[i], ctx.ceiling())?))?;
            Ok(CheckResult::verdict(
                "conservation.level0",
                params,
                bad.map(|(i, op)| Witness::from_operator(&[basis[i]], &op)),
            ))
        }));
    }
    if ctx.cfg.selects("conservation.level1", &super::MODEL_GROUPS) {
        let params = ctx.params();
        out.push(ctx.run("conservation.level1", params.clone(), || {
            let h = ctx.hamiltonian()?;
            let g1 = ctx.level1()?;
            let bad = first_defect(g1.len(), |i| Ok(h.checked_commutator(&g1[i], ctx.ceiling())?))?;
            let mut r = CheckResult::verdict(
                "conservation.level1",
                params,
                bad.map(|(i, op)| Witness::from_operator(&[basis[i]], &op)),
            );
            if let Some(w) = ctx.weak_note() {
                r = r.with_note(w);
            }
            Ok(r)
        }));
    }
    out
}

/// Bracket-grid check `[left^A, right^B] - Σ f^{AB}_E target^E = 0` over all
/// ordered pairs.
fn relation_grid(ctx: &ModelContext, left: &[Op], right: &[Op], target: &[Op]) -> Result<Option<Witness>, VerifyError> {
    let d = ctx.dim();
    let basis = ctx.tables.basis();
    let shape = ctx.model.shape();
    let bad = first_defect(d * d, |i| {
        let (a, b) = (i / d, i % d);
        let bracket = left[a].checked_commutator(&right[b], ctx.ceiling())?;
        Ok(&bracket - &structure_combination(&ctx.tables, shape, a, b, target))
    })?;
    Ok(bad.map(|(i, op)| Witness::from_operator(&[basis[i / d], basis[i % d]], &op)))
}

/// Level relations: `[G₀,G₀] = f G₀`, `[G₀,G₁] = f G₁`, plus `[J₁,J₁] = f J₂`
/// (Calogero) and the `𝒪_m` half-loop brackets (Calogero, confined).
pub fn check_level_relations(ctx: &ModelContext) -> Vec<CheckResult> {
    let kind = ctx.spec().kind;
    let mut names = vec!["relations.level0", "relations.level1", "relations.level1-symbolic"];
    if kind == ModelKind::Calogero {
        names.push("relations.level2");
    }
    if kind != ModelKind::Sutherland {
        names.push("relations.o-half-loop");
    }
    names
        .into_iter()
        .filter(|n| ctx.cfg.selects(n, &super::MODEL_GROUPS))
        .map(|name| {
            let mut params = ctx.params();
            if name == "relations.level1-symbolic" {
                params = params.with_lambda("symbolic");
            }
            if ctx.spec().algebra.is_abelian() {
                return CheckResult::skipped(name, params, "abelian, dim 1: every f vanishes");
            }
            ctx.run(name, params.clone(), || {
                let g0 = ctx.level0()?;
                let witness = match name {
                    "relations.level0" => relation_grid(ctx, g0, g0, g0)?,
                    "relations.level1" => {
                        let g1 = ctx.level1()?;
                        relation_grid(ctx, g0, g1, g1)?
                    }
                    "relations.level1-symbolic" => {
                        let g1 = ctx.level1_symbolic()?;
                        relation_grid(ctx, g0, g1, g1)?
                    }
                    "relations.level2" => {
                        let g1 = ctx.level1()?;
                        let g2 = level_grid(ctx, |ab| ctx.model.gen_j(2, ab))?;
                        relation_grid(ctx, g1, g1, &g2)?
                    }
                    _ => o_half_loop(ctx)?,
                };
                Ok(CheckResult::verdict(name, params, witness))
            })
        })
        .collect()
}

pub(crate) fn level_grid<F>(ctx: &ModelContext, build: F) -> Result<Vec<Op>, VerifyError>
where
    F: Fn(GeneratorIndex) -> Result<Op, crate::models::ModelError> + Sync,
{
    ctx.tables.basis().par_iter().map(|&ab| Ok(build(ab)?)).collect()
}

/// `[𝒪_m^A, 𝒪_n^B] = Σ f 𝒪_{m+n}^E` for `m, n ≤ 2`.
fn o_half_loop(ctx: &ModelContext) -> Result<Option<Witness>, VerifyError> {
    let grids = (0..=4u32).map(|n| level_grid(ctx, |ab| ctx.model.gen_o(n, ab))).collect::<Result<Vec<_>, _>>()?;
    for m in 0..=2usize {
        for n in 0..=2usize {
            if let Some(w) = relation_grid(ctx, &grids[m], &grids[n], &grids[m + n])? {
                return Ok(Some(w.with_note(format!("m = {m}, n = {n}"))));
            }
        }
    }
    Ok(None)
}
