//! Riemann–Roch spaces on the first level of a tower, by valuation
//! constraints on a candidate space Σ_j L_0(T_j)·z^j.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{Fe, FieldCtx};
use crate::linalg::Matrix;
use crate::places::{principal_divisor, rr_basis_genus0, Divisor, Divisor0, RatFun};
use crate::series::Series;
use crate::tower::{with_precision, FunctionRep, LocalFrame, PlaceId, Tower, TowerDivisor};

/// Extra pole order allowed in each candidate bound.
pub const DEFAULT_PADDING: i64 = 2;

#[derive(Clone, Debug, Serialize)]
pub struct RRBasis {
    pub level: usize,
    pub degree: i64,
    pub genus: i64,
    pub basis: Vec<FunctionRep>,
}

impl RRBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Dimension of L(G) from its degree and the genus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RrDim {
    Exact(i64),
    /// Only ℓ(G) ≥ value is known.
    LowerBound(i64),
}

pub fn rr_dim(deg: i64, genus: i64) -> RrDim {
    if deg < 0 {
        RrDim::Exact(0)
    } else if deg >= 2 * genus - 1 {
        RrDim::Exact(deg - genus + 1)
    } else {
        RrDim::LowerBound((deg - genus + 1).max(0))
    }
}

/// The pole divisor of the level-1 generator z.
pub fn generator_pole_divisor(tower: &Tower) -> Result<TowerDivisor> {
    require_level_one(tower)?;
    let q = tower.desc.q;
    let z = FunctionRep::term(q, RatFun::one(), 1);
    let mut out = Divisor::zero(1);
    for p in pole_places(tower)? {
        for &r in &tower.node(p)?.children {
            let v = valuation(tower, &z, r)?.expect("z is nonzero");
            if v < 0 {
                out.add_term(r, -v);
            }
        }
    }
    Ok(out)
}

fn require_level_one(tower: &Tower) -> Result<()> {
    if tower.depth < 1 {
        return Err(Error::AnalysisRequired("level 1 is not analyzed".into()));
    }
    Ok(())
}

/// Level-0 places where u has a pole, i.e. where z can have one.
fn pole_places(tower: &Tower) -> Result<Vec<PlaceId>> {
    let ctx = tower.field();
    let div = principal_divisor(ctx, &tower.desc.u)?;
    div.terms()
        .filter(|(_, c)| *c < 0)
        .map(|(p, _)| tower.place_id(p))
        .collect()
}

/// Level-0 places where some coefficient of `f` has a pole.
fn coefficient_poles(tower: &Tower, f: &FunctionRep) -> Result<BTreeSet<PlaceId>> {
    let mut out = BTreeSet::new();
    for c in f.coeffs.iter().filter(|c| !c.is_zero()) {
        let div = principal_divisor(tower.field(), c)?;
        for (p, a) in div.terms() {
            if a < 0 {
                out.insert(tower.place_id(p)?);
            }
        }
    }
    Ok(out)
}

fn expand(f: &FunctionRep, frame: &LocalFrame) -> Result<Series> {
    f.series(&frame.field, &frame.emb, &frame.x, frame.z.as_ref())
}

/// ν_R(f), or None for f = 0.
pub fn valuation(tower: &Tower, f: &FunctionRep, id: PlaceId) -> Result<Option<i64>> {
    if f.is_zero() {
        return Ok(None);
    }
    with_precision(|n| {
        let s = expand(f, &tower.frame(id, n)?)?;
        s.valuation().map(Some)
    })
}

/// Whether ν_R(f) ≥ bound.
pub fn order_at_least(tower: &Tower, f: &FunctionRep, id: PlaceId, bound: i64) -> Result<bool> {
    if f.is_zero() {
        return Ok(true);
    }
    with_precision(|n| {
        let s = expand(f, &tower.frame(id, n)?)?;
        if s.prec() < bound {
            return Err(Error::Precision {
                what: format!("expansion at {} to order {bound}", tower.label(id)),
                cap: 256,
            });
        }
        for k in s.val_bound().min(bound)..bound {
            if !s.coeff(k)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    })
}

/// Value of f at a degree-one place of level 0 or 1.
pub fn evaluate(tower: &Tower, f: &FunctionRep, id: PlaceId) -> Result<Fe> {
    Ok(evaluate_many(tower, std::slice::from_ref(f), id)?[0])
}

/// Values of several functions at one rational place, sharing the local
/// expansion.
pub fn evaluate_many(tower: &Tower, fs: &[FunctionRep], id: PlaceId) -> Result<Vec<Fe>> {
    let node = tower.node(id)?;
    if node.degree != 1 {
        return Err(Error::Precondition(format!("{} is not rational", node.label)));
    }
    if fs.iter().all(|f| f.level == 0) {
        return fs.iter().map(|f| f.coeffs[0].evaluate(tower.field(), &node.base)).collect();
    }
    with_precision(|n| {
        let frame = tower.frame(id, n)?;
        fs.iter()
            .map(|f| {
                if f.is_zero() {
                    return Ok(Fe::ZERO);
                }
                let s = expand(f, &frame)?;
                if s.prec() < 1 {
                    return Err(Error::Precision {
                        what: format!("value at {}", node.label),
                        cap: 256,
                    });
                }
                for k in s.val_bound().min(0)..0 {
                    if !s.coeff(k)?.is_zero() {
                        return Err(Error::Evaluation(format!("pole at {}", node.label)));
                    }
                }
                pull_back(&frame, s.coeff(0)?)
            })
            .collect()
    })
}

/// Inverse of the constant-field embedding on its image.
fn pull_back(frame: &LocalFrame, a: Fe) -> Result<Fe> {
    let order = frame.emb.source_order();
    (0..order)
        .map(Fe)
        .find(|&b| frame.emb.apply(b) == a)
        .ok_or_else(|| Error::Inconsistency("residue value outside the constant field".into()))
}

/// Membership (f) ≥ −G at level 1, checked at every place where f or G can
/// be nonzero.
pub fn in_rr_ext(tower: &Tower, f: &FunctionRep, g: &TowerDivisor) -> Result<bool> {
    if f.is_zero() {
        return Ok(true);
    }
    let mut bases: BTreeSet<PlaceId> = coefficient_poles(tower, f)?;
    bases.extend(pole_places(tower)?);
    for (r, _) in g.terms() {
        bases.insert(base_of(tower, *r)?);
    }
    for p in bases {
        for &r in &tower.node(p)?.children {
            if !order_at_least(tower, f, r, -g.coeff(&r))? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn base_of(tower: &Tower, r: PlaceId) -> Result<PlaceId> {
    tower
        .node(r)?
        .parent
        .ok_or_else(|| Error::Argument(format!("{} is not a level-1 place", tower.label(r))))
}

/// Basis of L(G) for a divisor at level 1, with the default padding.
pub fn rr_basis_ext(tower: &Tower, g: &TowerDivisor) -> Result<RRBasis> {
    rr_basis_ext_with(tower, g, DEFAULT_PADDING)
}

pub fn rr_basis_ext_with(tower: &Tower, g: &TowerDivisor, padding: i64) -> Result<RRBasis> {
    require_level_one(tower)?;
    if g.level() != 1 {
        return Err(Error::Argument(format!("divisor at level {}, expected 1", g.level())));
    }
    let ctx = tower.field();
    let q = tower.desc.q as usize;
    let degree = tower.degree(g)?;
    let genus = tower.genus(1)?;

    let z_poles = generator_pole_divisor(tower)?;
    let mut support: BTreeSet<PlaceId> = pole_places(tower)?.into_iter().collect();
    for (r, _) in g.terms() {
        support.insert(base_of(tower, *r)?);
    }

    // Candidate bounds T_j on each base place in the support.
    let mut bounds: Vec<Divisor0> = vec![Divisor::zero(0); q];
    for &p in &support {
        let node = tower.node(p)?;
        for (j, t) in bounds.iter_mut().enumerate() {
            let mut need = i64::MIN;
            for &r in &node.children {
                let e = tower.node(r)?.e as i64;
                let a = g.coeff(&r) + j as i64 * z_poles.coeff(&r);
                need = need.max(a.div_euclid(e) + i64::from(a.rem_euclid(e) != 0));
            }
            t.add_term(node.base.clone(), need + padding);
        }
    }

    let mut candidates: Vec<FunctionRep> = Vec::new();
    for (j, t) in bounds.iter().enumerate() {
        for f in rr_basis_genus0(ctx, t)? {
            candidates.push(FunctionRep::term(q as u32, f, j));
        }
    }
    if candidates.is_empty() {
        return Ok(RRBasis { level: 1, degree, genus, basis: Vec::new() });
    }

    let constraints = constraint_rows(tower, &candidates, &support, g)?;
    let null = constraints.null_space(ctx);
    let basis: Vec<FunctionRep> = null
        .row_vecs()
        .into_iter()
        .map(|v| combine(ctx, q, &candidates, &v))
        .collect();
    let out = RRBasis { level: 1, degree, genus, basis };
    certify(tower, &out, g)?;
    Ok(out)
}

/// One row per vanishing coefficient ν_R(Σ c_k b_k) ≥ −G_R, split into
/// F_q-linear equations by the trace form at nonrational places.
fn constraint_rows(
    tower: &Tower,
    candidates: &[FunctionRep],
    support: &BTreeSet<PlaceId>,
    g: &TowerDivisor,
) -> Result<Matrix> {
    let ctx = tower.field();
    let mut m = Matrix::zeros(0, candidates.len());
    for &p in support {
        for &r in &tower.node(p)?.children {
            let bound = -g.coeff(&r);
            let (frame, series) = with_precision(|n| {
                let frame = tower.frame(r, n)?;
                let series = candidates
                    .iter()
                    .map(|c| expand(c, &frame))
                    .collect::<Result<Vec<_>>>()?;
                if series.iter().any(|s| s.prec() < bound) {
                    return Err(Error::Precision {
                        what: format!("candidate expansions at {}", tower.label(r)),
                        cap: 256,
                    });
                }
                Ok((frame, series))
            })?;
            let lowest = series.iter().map(Series::val_bound).min().unwrap_or(bound);
            let split = TraceSplit::new(ctx, &frame)?;
            for k in lowest..bound {
                let coeffs = series
                    .iter()
                    .map(|s| if s.val_bound() > k { Ok(Fe::ZERO) } else { s.coeff(k) })
                    .collect::<Result<Vec<_>>>()?;
                if coeffs.iter().all(|c| c.is_zero()) {
                    continue;
                }
                for row in split.rows(&coeffs)? {
                    m.push_row(&row);
                }
            }
        }
    }
    Ok(m)
}

/// Turns an equation with coefficients in a residue field K ⊇ F_q into the
/// equivalent F_q equations Tr(b_i·Σ c_k a_k) = 0 for a basis b_i of K/F_q.
struct TraceSplit<'a> {
    frame: &'a LocalFrame,
    basis: Vec<Fe>,
    sub_degree: u32,
    back: HashMap<Fe, Fe>,
}

impl<'a> TraceSplit<'a> {
    fn new(ctx: &FieldCtx, frame: &'a LocalFrame) -> Result<Self> {
        let k = frame.field.as_ref();
        let rel = k.degree() / ctx.degree();
        let basis = if rel == 1 {
            vec![Fe::ONE]
        } else {
            let g = k.generator();
            (0..rel as u64).map(|i| k.pow(g, i)).collect()
        };
        let back = ctx.elements().map(|c| (frame.emb.apply(c), c)).collect();
        Ok(TraceSplit {
            frame,
            basis,
            sub_degree: ctx.degree(),
            back,
        })
    }

    fn rows(&self, coeffs: &[Fe]) -> Result<Vec<Vec<Fe>>> {
        let k = self.frame.field.as_ref();
        self.basis
            .iter()
            .map(|&b| {
                coeffs
                    .iter()
                    .map(|&a| {
                        let t = k.trace(k.mul(a, b), self.sub_degree)?;
                        self.back
                            .get(&t)
                            .copied()
                            .ok_or_else(|| Error::Inconsistency("trace outside the constant field".into()))
                    })
                    .collect()
            })
            .collect()
    }
}

fn combine(ctx: &FieldCtx, q: usize, candidates: &[FunctionRep], v: &[Fe]) -> FunctionRep {
    let mut coeffs = vec![RatFun::zero(); q];
    for (c, b) in v.iter().zip(candidates) {
        if c.is_zero() {
            continue;
        }
        for (slot, f) in coeffs.iter_mut().zip(&b.coeffs) {
            if !f.is_zero() {
                *slot = slot.add(ctx, &f.scale(ctx, *c));
            }
        }
    }
    FunctionRep { level: 1, coeffs }
}

fn certify(tower: &Tower, b: &RRBasis, g: &TowerDivisor) -> Result<()> {
    let dim = b.dim() as i64;
    match rr_dim(b.degree, b.genus) {
        RrDim::Exact(expected) if expected != dim => {
            return Err(Error::Inconsistency(format!(
                "dim L(G) = {dim} but Riemann-Roch gives {expected} (deg {}, g {})",
                b.degree, b.genus
            )));
        }
        RrDim::LowerBound(lo) if dim < lo => {
            return Err(Error::Inconsistency(format!(
                "dim L(G) = {dim} below the Riemann-Roch bound {lo}"
            )));
        }
        _ => {}
    }
    for f in &b.basis {
        if !in_rr_ext(tower, f, g)? {
            return Err(Error::Inconsistency("basis member outside L(G)".into()));
        }
    }
    Ok(())
}

/// Lifts a level-0 function to level 1.
pub fn lift_function(q: u32, f: &RatFun) -> FunctionRep {
    FunctionRep::term(q, f.clone(), 0)
}
