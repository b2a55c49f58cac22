//! Linear codes over F_q: AG evaluation codes, duals, diagonal twists,
//! iso-duality witnesses and minimum distance.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{Fe, FieldCtx};
use crate::linalg::{row_space, Matrix};
use crate::places::{rr_basis_genus0, Divisor0, Place};
use crate::rr::evaluate_many;
use crate::tower::{FunctionRep, PlaceId, Tower, TowerDivisor};

/// Default limit on the number of codewords enumerated for exact distances.
pub const DEFAULT_BUDGET: u64 = 1 << 22;

/// Projective-point count up to which twist solutions are searched
/// exhaustively.
pub const EXHAUSTIVE_TWIST_LIMIT: u64 = 1 << 20;

const SAMPLES: usize = 1 << 14;

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Provenance {
    pub tower: String,
    pub level: usize,
    pub d: Vec<String>,
    pub g: Vec<(String, i64)>,
}

/// A code given by a full-rank generator matrix in reduced echelon form.
#[derive(Clone, Debug)]
pub struct LinearCode {
    field: Arc<FieldCtx>,
    n: usize,
    generator: Matrix,
    pub provenance: Option<Provenance>,
}

impl LinearCode {
    /// The row space of `rows`, canonicalized.
    pub fn from_rows(field: Arc<FieldCtx>, n: usize, rows: Vec<Vec<Fe>>) -> Self {
        let generator = row_space(&field, &Matrix::from_rows(n, rows));
        LinearCode {
            field,
            n,
            generator,
            provenance: None,
        }
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.generator.rows()
    }

    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    /// Same row space, ignoring provenance.
    pub fn same_space(&self, other: &LinearCode) -> bool {
        self.n == other.n && self.generator == other.generator
    }

    pub fn contains(&self, word: &[Fe]) -> bool {
        let mut m = self.generator.clone();
        m.push_row(word);
        m.rank(&self.field) == self.dim()
    }

    pub fn encode(&self, msg: &[Fe]) -> Vec<Fe> {
        let ctx = &self.field;
        let mut out = vec![Fe::ZERO; self.n];
        for (r, &c) in msg.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, &g) in out.iter_mut().zip(self.generator.row(r)) {
                *o = ctx.add(*o, ctx.mul(c, g));
            }
        }
        out
    }

    /// Generator rows as integers.
    pub fn matrix_u32(&self) -> Vec<Vec<u32>> {
        self.generator
            .row_vecs()
            .into_iter()
            .map(|r| r.into_iter().map(|c| c.0).collect())
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for row in self.matrix_u32() {
            let cells: Vec<String> = row.iter().map(u32::to_string).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

fn check_evaluation_set(labels: &[String]) -> Result<()> {
    let mut seen = labels.to_vec();
    seen.sort();
    seen.dedup();
    if seen.len() != labels.len() {
        return Err(Error::Precondition("D repeats a place".into()));
    }
    Ok(())
}

fn finish(field: Arc<FieldCtx>, n: usize, rows: Vec<Vec<Fe>>, expected: usize) -> Result<LinearCode> {
    let code = LinearCode::from_rows(field, n, rows);
    if code.dim() < expected {
        return Err(Error::Precondition(format!(
            "evaluation map is not injective: rank {} < dim L(G) = {expected}",
            code.dim()
        )));
    }
    Ok(code)
}

/// C_L(D, G) on the rational function field.
pub fn ag_code_genus0(ctx: &Arc<FieldCtx>, d: &[Place], g: &Divisor0) -> Result<LinearCode> {
    for p in d {
        if !p.is_rational() {
            return Err(Error::Precondition(format!("{} is not rational", p.label())));
        }
        if g.coeff(p) != 0 {
            return Err(Error::Precondition(format!("{} lies in supp G", p.label())));
        }
    }
    check_evaluation_set(&d.iter().map(Place::label).collect::<Vec<_>>())?;
    let basis = rr_basis_genus0(ctx, g)?;
    let rows = basis
        .iter()
        .map(|f| d.iter().map(|p| f.evaluate(ctx, p)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let mut code = finish(ctx.clone(), d.len(), rows, basis.len())?;
    code.provenance = Some(Provenance {
        tower: "rational".into(),
        level: 0,
        d: d.iter().map(Place::label).collect(),
        g: g.terms().map(|(p, c)| (p.label(), c)).collect(),
    });
    Ok(code)
}

/// C_L(D, G) at a tower level from a basis of L(G).
pub fn build_code(
    tower: &Tower,
    d: &[PlaceId],
    g: &TowerDivisor,
    basis: &[FunctionRep],
) -> Result<LinearCode> {
    let level = g.level();
    for &p in d {
        let node = tower.node(p)?;
        if p.level != level {
            return Err(Error::Precondition(format!("{} is not at level {level}", node.label)));
        }
        if node.degree != 1 {
            return Err(Error::Precondition(format!("{} is not rational", node.label)));
        }
        if g.coeff(&p) != 0 {
            return Err(Error::Precondition(format!("{} lies in supp G", node.label)));
        }
    }
    let labels: Vec<String> = d.iter().map(|&p| tower.label(p)).collect();
    check_evaluation_set(&labels)?;
    let columns: Vec<Vec<Fe>> = d
        .par_iter()
        .map(|&p| evaluate_many(tower, basis, p))
        .collect::<Result<_>>()?;
    let rows = (0..basis.len())
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect();
    let mut code = finish(tower.desc.field.clone(), d.len(), rows, basis.len())?;
    code.provenance = Some(Provenance {
        tower: format!("{} q={}", tower.desc.name, tower.desc.q),
        level,
        d: labels,
        g: g.terms().map(|(p, c)| (tower.label(*p), c)).collect(),
    });
    Ok(code)
}

pub fn dual_code(c: &LinearCode) -> LinearCode {
    let null = c.generator.null_space(&c.field);
    LinearCode::from_rows(c.field.clone(), c.n, null.row_vecs())
}

/// x·C.
pub fn scale_code(x: &[Fe], c: &LinearCode) -> Result<LinearCode> {
    if x.len() != c.n {
        return Err(Error::Precondition(format!(
            "twist of length {} for a code of length {}",
            x.len(),
            c.n
        )));
    }
    if x.iter().any(|v| v.is_zero()) {
        return Err(Error::Precondition("twist vector has a zero coordinate".into()));
    }
    let scaled = c.generator.scale_columns(&c.field, x);
    let mut out = LinearCode::from_rows(c.field.clone(), c.n, scaled.row_vecs());
    out.provenance = c.provenance.clone();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum IsoDuality {
    /// C⊥ = x·C, verified.
    Witness { x: Vec<u32> },
    /// Proven impossible.
    NotIsoDual { reason: String },
    /// Search exhausted without a proof either way.
    Inconclusive { reason: String },
}

impl IsoDuality {
    pub fn witness(&self) -> Option<Vec<Fe>> {
        match self {
            IsoDuality::Witness { x } => Some(x.iter().map(|&v| Fe(v)).collect()),
            _ => None,
        }
    }
}

/// Finds x with all coordinates nonzero and C⊥ = x·C.
///
/// x·C ⊆ C⊥ is the linear system Σ_j g_aj x_j g_bj = 0 over pairs of
/// generator rows; with k = n/2 containment is equality.
pub fn isodual_solve(c: &LinearCode, seed: u64) -> IsoDuality {
    let (n, k) = (c.n, c.dim());
    if n % 2 == 1 || 2 * k != n {
        return IsoDuality::NotIsoDual {
            reason: format!("k = {k} is not n/2 for n = {n}"),
        };
    }
    let ctx = &c.field;
    let mut system = Matrix::zeros(0, n);
    for a in 0..k {
        for b in a..k {
            let row: Vec<Fe> = (0..n)
                .map(|j| ctx.mul(c.generator.get(a, j), c.generator.get(b, j)))
                .collect();
            system.push_row(&row);
        }
    }
    let sol = system.null_space(ctx);
    let s = sol.rows();
    if let Some(j) = (0..n).find(|&j| (0..s).all(|r| sol.get(r, j).is_zero())) {
        return IsoDuality::NotIsoDual {
            reason: format!("every solution of the twist system vanishes at coordinate {j}"),
        };
    }
    let dual = dual_code(c);
    let verify = |x: &[Fe]| -> Option<IsoDuality> {
        if x.iter().any(|v| v.is_zero()) {
            return None;
        }
        let scaled = scale_code(x, c).ok()?;
        scaled.same_space(&dual).then(|| IsoDuality::Witness {
            x: x.iter().map(|v| v.0).collect(),
        })
    };
    let q = ctx.order() as u64;
    let points = projective_count(q, s as u32);
    if points <= EXHAUSTIVE_TWIST_LIMIT {
        // Projective representatives: leading nonzero coefficient 1.
        for lead in 0..s {
            let free = s - lead - 1;
            for idx in 0..q.pow(free as u32) {
                let mut coeffs = vec![Fe::ZERO; s];
                coeffs[lead] = Fe::ONE;
                let mut rest = idx;
                for slot in coeffs.iter_mut().skip(lead + 1) {
                    *slot = Fe((rest % q) as u32);
                    rest /= q;
                }
                if let Some(w) = verify(&combine_rows(ctx, &sol, &coeffs)) {
                    return w;
                }
            }
        }
        return IsoDuality::NotIsoDual {
            reason: format!("no twist among all {points} projective solutions is nowhere zero"),
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..SAMPLES {
        let coeffs: Vec<Fe> = (0..s).map(|_| Fe(rng.gen_range(0..q as u32))).collect();
        if let Some(w) = verify(&combine_rows(ctx, &sol, &coeffs)) {
            return w;
        }
    }
    IsoDuality::Inconclusive {
        reason: format!("no nowhere-zero twist in {SAMPLES} samples of a {s}-dimensional solution space"),
    }
}

fn projective_count(q: u64, s: u32) -> u64 {
    if s == 0 {
        return 0;
    }
    (0..s).fold(0u64, |acc, _| acc.saturating_mul(q).saturating_add(1))
}

fn combine_rows(ctx: &FieldCtx, m: &Matrix, coeffs: &[Fe]) -> Vec<Fe> {
    let mut out = vec![Fe::ZERO; m.cols()];
    for (r, &c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (o, &v) in out.iter_mut().zip(m.row(r)) {
            *o = ctx.add(*o, ctx.mul(c, v));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Distance {
    Exact { d: usize },
    /// Enumeration exceeded the budget; `designed` is a proven lower bound
    /// and `upper` the lightest sampled codeword.
    BoundOnly { designed: i64, upper: Option<usize> },
    /// The zero code.
    Empty,
}

impl Distance {
    pub fn exact(&self) -> Option<usize> {
        match self {
            Distance::Exact { d } => Some(*d),
            _ => None,
        }
    }

    /// The best proven lower bound.
    pub fn lower(&self) -> Option<i64> {
        match self {
            Distance::Exact { d } => Some(*d as i64),
            Distance::BoundOnly { designed, .. } => Some(*designed),
            Distance::Empty => None,
        }
    }
}

impl std::fmt::Display for Distance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Distance::Exact { d } => write!(f, "{d}"),
            Distance::BoundOnly { designed, .. } => write!(f, ">={designed}"),
            Distance::Empty => f.write_str("-"),
        }
    }
}

/// Budget from `ISODUAL_BUDGET`, else the default.
pub fn budget_from_env() -> u64 {
    std::env::var("ISODUAL_BUDGET")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

fn word_count(c: &LinearCode) -> Option<u64> {
    (c.field.order() as u64).checked_pow(c.dim() as u32)
}

/// Minimum distance by enumeration when q^k ≤ budget, else the designed
/// bound plus a sampled upper bound.
pub fn min_distance(c: &LinearCode, budget: u64, designed: i64, seed: u64) -> Distance {
    if c.dim() == 0 {
        return Distance::Empty;
    }
    match word_count(c) {
        Some(count) if count <= budget => {
            let best = AtomicUsize::new(c.n);
            enumerate(c, |w| {
                let wt = w.iter().filter(|v| !v.is_zero()).count();
                if wt > 0 {
                    best.fetch_min(wt, Ordering::Relaxed);
                }
            });
            Distance::Exact { d: best.into_inner() }
        }
        _ => {
            let ctx = &c.field;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q = ctx.order();
            let mut upper: Option<usize> = None;
            for _ in 0..SAMPLES {
                let msg: Vec<Fe> = (0..c.dim()).map(|_| Fe(rng.gen_range(0..q))).collect();
                let wt = c.encode(&msg).iter().filter(|v| !v.is_zero()).count();
                if wt > 0 {
                    upper = Some(upper.map_or(wt, |u| u.min(wt)));
                }
            }
            Distance::BoundOnly { designed, upper }
        }
    }
}

/// Number of codewords of each Hamming weight, or None beyond the budget.
pub fn weight_distribution(c: &LinearCode, budget: u64) -> Option<Vec<u64>> {
    if word_count(c)? > budget {
        return None;
    }
    let counts: Vec<AtomicUsize> = (0..=c.n).map(|_| AtomicUsize::new(0)).collect();
    enumerate(c, |w| {
        let wt = w.iter().filter(|v| !v.is_zero()).count();
        counts[wt].fetch_add(1, Ordering::Relaxed);
    });
    Some(counts.into_iter().map(|a| a.into_inner() as u64).collect())
}

/// Visits every codeword once. The message space is split on its first
/// coordinates across threads; inside a block, words are built by depth-first
/// traversal reusing partial sums.
fn enumerate(c: &LinearCode, visit: impl Fn(&[Fe]) + Sync) {
    let ctx = c.field.as_ref();
    let k = c.dim();
    let q = ctx.order() as usize;
    // multiples[r][a] = a · row r
    let multiples: Vec<Vec<Vec<Fe>>> = (0..k)
        .map(|r| {
            (0..q)
                .map(|a| c.generator.row(r).iter().map(|&g| ctx.mul(Fe(a as u32), g)).collect())
                .collect()
        })
        .collect();
    let mut split = 0;
    let mut blocks = 1usize;
    while split < k && blocks < 256 {
        split += 1;
        blocks *= q;
    }
    (0..blocks).into_par_iter().for_each(|b| {
        let mut prefix = vec![Fe::ZERO; c.n];
        let mut rest = b;
        for row in multiples.iter().take(split) {
            let a = rest % q;
            rest /= q;
            for (p, &v) in prefix.iter_mut().zip(&row[a]) {
                *p = ctx.add(*p, v);
            }
        }
        let mut stack = vec![prefix];
        walk(ctx, &multiples[split..], &mut stack, &visit);
    });
}

fn walk(ctx: &FieldCtx, rows: &[Vec<Vec<Fe>>], stack: &mut Vec<Vec<Fe>>, visit: &impl Fn(&[Fe])) {
    let Some((first, rest)) = rows.split_first() else {
        visit(stack.last().expect("nonempty"));
        return;
    };
    for mult in first {
        let top = stack.last().expect("nonempty");
        let next: Vec<Fe> = top.iter().zip(mult).map(|(&a, &b)| ctx.add(a, b)).collect();
        stack.push(next);
        walk(ctx, rest, stack, visit);
        stack.pop();
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub distance: Distance,
    #[serde(with = "ratio")]
    pub rate: Ratio<i64>,
    /// d/n, or a lower bound for it when the distance is bound-only.
    #[serde(with = "ratio_opt")]
    pub delta: Option<Ratio<i64>>,
    pub delta_is_bound: bool,
}

pub fn code_params(c: &LinearCode, distance: Distance) -> CodeParams {
    let n = c.n as i64;
    let rate = if n == 0 { Ratio::from_integer(0) } else { Ratio::new(c.dim() as i64, n) };
    let delta = distance.lower().filter(|_| n > 0).map(|d| Ratio::new(d, n));
    CodeParams {
        n: c.n,
        k: c.dim(),
        delta_is_bound: !matches!(distance, Distance::Exact { .. }),
        distance,
        rate,
        delta,
    }
}

/// Serde helpers writing ratios as "num/den" strings.
pub mod ratio {
    use num_rational::Ratio;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(r: &Ratio<i64>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }
}

pub mod ratio_opt {
    use num_rational::Ratio;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(r: &Option<Ratio<i64>>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_str(&r.to_string()),
            None => s.serialize_none(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot;
    use crate::places::Divisor;

    fn f8() -> Arc<FieldCtx> {
        FieldCtx::of_order(8).unwrap()
    }

    fn rational_code(ctx: &Arc<FieldCtx>, roots: &[u32], g_inf: i64) -> LinearCode {
        let d: Vec<Place> = roots.iter().map(|&a| Place::rational(ctx, Fe(a))).collect();
        ag_code_genus0(ctx, &d, &Divisor::single(0, Place::Infinity, g_inf)).unwrap()
    }

    /// Brute-force minimum distance by listing all q^k messages directly.
    fn oracle_distance(c: &LinearCode) -> usize {
        let q = c.field().order() as u64;
        let k = c.dim() as u32;
        (1..q.pow(k))
            .map(|mut i| {
                let msg: Vec<Fe> = (0..k)
                    .map(|_| {
                        let v = Fe((i % q) as u32);
                        i /= q;
                        v
                    })
                    .collect();
                c.encode(&msg).iter().filter(|v| !v.is_zero()).count()
            })
            .min()
            .unwrap()
    }

    #[test]
    fn six_three_four() {
        let ctx = f8();
        let c = rational_code(&ctx, &[2, 3, 4, 5, 6, 7], 2);
        assert_eq!((c.len(), c.dim()), (6, 3));
        let d = min_distance(&c, DEFAULT_BUDGET, 4, 0);
        assert_eq!(d, Distance::Exact { d: 4 });
        assert_eq!(oracle_distance(&c), 4);
        let w = isodual_solve(&c, 0).witness().expect("iso-dual");
        assert!(scale_code(&w, &c).unwrap().same_space(&dual_code(&c)));
        let p = code_params(&c, d);
        assert_eq!(p.rate, Ratio::new(1, 2));
        assert_eq!(p.delta, Some(Ratio::new(2, 3)));
    }

    #[test]
    fn wrong_degree_is_not_isodual() {
        let ctx = f8();
        let c = rational_code(&ctx, &[2, 3, 4, 5, 6, 7], 3);
        assert!(matches!(isodual_solve(&c, 0), IsoDuality::NotIsoDual { .. }));
    }

    #[test]
    fn dual_properties() {
        let ctx = f8();
        let full = LinearCode::from_rows(ctx.clone(), 3, Matrix::identity(3).row_vecs());
        assert_eq!(dual_code(&full).dim(), 0);
        let c = rational_code(&ctx, &[1, 2, 3, 4, 5, 6, 7], 2);
        let d = dual_code(&c);
        assert_eq!(c.dim() + d.dim(), 7);
        assert!(dual_code(&d).same_space(&c));
        for r in c.generator().row_vecs() {
            for s in d.generator().row_vecs() {
                assert!(dot(&ctx, &r, &s).is_zero());
            }
        }
    }

    #[test]
    fn twists_preserve_weights() {
        let ctx = f8();
        let c = rational_code(&ctx, &[2, 3, 4, 5, 6, 7], 2);
        let x: Vec<Fe> = (1..=6).map(Fe).collect();
        let s = scale_code(&x, &c).unwrap();
        assert_eq!(weight_distribution(&c, 1 << 20), weight_distribution(&s, 1 << 20));
        let inv: Vec<Fe> = x.iter().map(|&v| ctx.inv(v).unwrap()).collect();
        assert!(scale_code(&inv, &s).unwrap().same_space(&c));
        assert!(scale_code(&[Fe::ONE; 6], &c).unwrap().same_space(&c));
        assert!(scale_code(&[Fe::ZERO; 6], &c).is_err());
    }

    #[test]
    fn self_dual_accepts_ones() {
        let ctx = f8();
        // [2,1] repetition code is self-dual in characteristic 2
        let c = LinearCode::from_rows(ctx, 2, vec![vec![Fe::ONE, Fe::ONE]]);
        assert_eq!(isodual_solve(&c, 0), IsoDuality::Witness { x: vec![1, 1] });
    }

    #[test]
    fn empty_code_distance() {
        let c = LinearCode::from_rows(f8(), 4, vec![]);
        assert_eq!(min_distance(&c, 10, 0, 0), Distance::Empty);
    }

    #[test]
    fn over_budget_is_bound_only() {
        let ctx = f8();
        let c = rational_code(&ctx, &[2, 3, 4, 5, 6, 7], 2);
        let d = min_distance(&c, 100, 4, 1);
        assert!(matches!(d, Distance::BoundOnly { designed: 4, upper: Some(u) } if u >= 4));
    }

    #[test]
    fn overlapping_support_rejected() {
        let ctx = f8();
        let d = vec![Place::Infinity, Place::rational(&ctx, Fe(1))];
        let g = Divisor::single(0, Place::Infinity, 1);
        assert!(matches!(ag_code_genus0(&ctx, &d, &g), Err(Error::Precondition(_))));
    }
}
