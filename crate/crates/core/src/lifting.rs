//! Lifting AG codes up a tower: hypothesis checks, lifted divisors and
//! codes, parameter certificates and the asymptotic rate report.

use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::codes::{build_code, dual_code, isodual_solve, min_distance, IsoDuality, LinearCode};
use crate::error::{Error, Result};
use crate::places::{rr_basis_genus0, Divisor, Divisor0};
use crate::rr::{rr_basis_ext, rr_dim, RrDim};
use crate::tower::{FunctionRep, PlaceId, Tower, TowerDescriptor, TowerDivisor, TowerName};

/// A lift of C_L(D, G) from `source` to `target`.
#[derive(Clone, Debug)]
pub struct LiftPlan<'a> {
    pub tower: &'a Tower,
    pub source: usize,
    pub target: usize,
    pub d: Vec<PlaceId>,
    pub g: TowerDivisor,
}

impl<'a> LiftPlan<'a> {
    /// A plan from level-0 data given as base places.
    pub fn from_base(
        tower: &'a Tower,
        d: &[crate::places::Place],
        g: &Divisor0,
        target: usize,
    ) -> Result<Self> {
        Ok(LiftPlan {
            tower,
            source: 0,
            target,
            d: d.iter().map(|p| tower.place_id(p)).collect::<Result<_>>()?,
            g: tower.from_base_divisor(g)?,
        })
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, id: u8) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            writeln!(f, "  ({}) {mark} {}: {}", c.id, c.name, c.detail)?;
        }
        Ok(())
    }
}

fn labels(tower: &Tower, ids: impl IntoIterator<Item = PlaceId>) -> String {
    let v: Vec<String> = ids.into_iter().map(|i| tower.label(i)).collect();
    if v.is_empty() {
        "none".into()
    } else {
        v.join(", ")
    }
}

/// Runs every hypothesis of the lifting theorem; never fails, the outcome is
/// in the report.
pub fn validate_lift(plan: &LiftPlan) -> Result<ValidationReport> {
    let t = plan.tower;
    if plan.target < plan.source {
        return Err(Error::Argument("target level below source level".into()));
    }
    if plan.target > t.depth {
        return Err(Error::AnalysisRequired(format!(
            "level {} is beyond the analyzed depth {}",
            plan.target, t.depth
        )));
    }
    if plan.g.level() != plan.source || plan.d.iter().any(|p| p.level != plan.source) {
        return Err(Error::Argument("D and G must live at the source level".into()));
    }
    let m = t.desc.extension_degree(plan.target - plan.source) as usize;
    let mut checks = Vec::new();

    let n = plan.n();
    checks.push(Check {
        id: 1,
        name: "n even",
        passed: n.is_multiple_of(2),
        detail: format!("n = {n}"),
    });

    let mut bad = Vec::new();
    for &p in &plan.d {
        let node = t.node(p)?;
        let desc = t.descendants(p, plan.target)?;
        let split = node.degree == 1
            && desc.len() == m
            && desc.iter().all(|(r, e)| *e == 1 && t.node(*r).is_ok_and(|x| x.degree == 1));
        if !split {
            bad.push(p);
        }
    }
    checks.push(Check {
        id: 2,
        name: "D rational and completely split",
        passed: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{n} places, each with {m} rational places above")
        } else {
            format!("not split: {}", labels(t, bad))
        },
    });

    // Ramified source places; the lift uses Q = Ram ∪ supp G.
    let mut ramified = Vec::new();
    for node in t.places(plan.source) {
        if t.descendants(node.id, plan.target)?.iter().any(|(_, e)| *e > 1) {
            ramified.push(node.id);
        }
    }
    let in_d: Vec<PlaceId> = ramified.iter().copied().filter(|r| plan.d.contains(r)).collect();
    checks.push(Check {
        id: 3,
        name: "unramified outside Q",
        passed: in_d.is_empty(),
        detail: if in_d.is_empty() {
            format!("Q = supp G + ramified {{{}}}", labels(t, ramified.iter().copied()))
        } else {
            format!("ramified places in D: {}", labels(t, in_d))
        },
    });

    let mut odd = Vec::new();
    for node in t.places(plan.target) {
        let d = t.different_exponent(node.id, plan.source)?;
        if d % 2 == 1 {
            odd.push(format!("{} (d = {d})", chain(t, node.id, plan.source)));
        }
    }
    checks.push(Check {
        id: 4,
        name: "even different exponents",
        passed: odd.is_empty(),
        detail: if odd.is_empty() {
            format!("all {} places of level {}", t.places(plan.target).len(), plan.target)
        } else {
            format!("odd: {}", odd.join("; "))
        },
    });

    let common: Vec<PlaceId> = plan.d.iter().copied().filter(|p| plan.g.coeff(p) != 0).collect();
    checks.push(Check {
        id: 5,
        name: "supp D and supp G disjoint",
        passed: common.is_empty(),
        detail: format!("common places: {}", labels(t, common)),
    });

    let deg = t.degree(&plan.g)?;
    checks.push(Check {
        id: 6,
        name: "deg G > 0",
        passed: deg > 0,
        detail: format!("deg G = {deg}"),
    });

    checks.push(Check {
        id: 7,
        name: "coefficient tuple nonzero",
        passed: !plan.g.is_zero(),
        detail: format!("{} nonzero coefficients", plan.g.len()),
    });
    Ok(ValidationReport { checks })
}

/// "P_0 > P_0/ram > ..." from `over` up to `id`.
fn chain(t: &Tower, id: PlaceId, over: usize) -> String {
    let mut parts = Vec::new();
    let mut cur = Some(id);
    while let Some(p) = cur {
        if p.level < over {
            break;
        }
        parts.push(t.label(p));
        cur = t.node(p).ok().and_then(|n| n.parent);
    }
    parts.reverse();
    parts.join(" > ")
}

/// (Con D as an ordered place list, Con G + ½ Diff).
pub fn lift_divisors(plan: &LiftPlan) -> Result<(Vec<PlaceId>, TowerDivisor)> {
    let report = validate_lift(plan)?;
    if !report.passed() {
        return Err(Error::LiftRefused(report.to_string()));
    }
    let t = plan.tower;
    let mut d = Vec::new();
    for &p in &plan.d {
        d.extend(t.descendants(p, plan.target)?.into_iter().map(|(r, _)| r));
    }
    let g = lifted_g(t, &plan.g, plan.source, plan.target)?;
    let clash: Vec<PlaceId> = d.iter().copied().filter(|r| g.coeff(r) != 0).collect();
    if !clash.is_empty() {
        return Err(Error::LiftRefused(format!(
            "lifted supports intersect at {}",
            labels(t, clash)
        )));
    }
    Ok((d, g))
}

fn lifted_g(t: &Tower, g: &TowerDivisor, source: usize, target: usize) -> Result<TowerDivisor> {
    let half = t.different_divisor(target, source)?.div_exact(2)?;
    t.conorm(g, target)?.add(&half)
}

#[derive(Clone, Debug)]
pub struct LiftedCode {
    pub code: LinearCode,
    pub d: Vec<PlaceId>,
    pub g: TowerDivisor,
    pub genus: i64,
    pub isoduality: IsoDuality,
}

/// Basis of L(G) for a divisor at level 0 or 1.
pub fn rr_basis_any(t: &Tower, g: &TowerDivisor) -> Result<Vec<FunctionRep>> {
    match g.level() {
        0 => {
            let mut base = Divisor::zero(0);
            for (p, c) in g.terms() {
                base.add_term(t.node(*p)?.base.clone(), c);
            }
            Ok(rr_basis_genus0(t.field(), &base)?
                .into_iter()
                .map(FunctionRep::base)
                .collect())
        }
        1 => Ok(rr_basis_ext(t, g)?.basis),
        l => Err(Error::Unsupported(format!(
            "explicit Riemann-Roch spaces stop at level 1, not {l}"
        ))),
    }
}

/// C_L(D̃, G̃) at the target level with its iso-duality witness.
pub fn lift_code(plan: &LiftPlan, seed: u64) -> Result<LiftedCode> {
    let t = plan.tower;
    let (d, g) = if plan.source == plan.target {
        (plan.d.clone(), plan.g.clone())
    } else {
        lift_divisors(plan)?
    };
    let basis = rr_basis_any(t, &g)?;
    let code = build_code(t, &d, &g, &basis)?;
    let genus = t.genus(plan.target)?;
    let n = d.len() as i64;
    if n > 2 * genus - 2 && plan.source != plan.target && 2 * code.dim() as i64 != n {
        return Err(Error::Inconsistency(format!(
            "lifted code has dimension {} instead of n/2 = {}",
            code.dim(),
            n / 2
        )));
    }
    let isoduality = isodual_solve(&code, seed);
    if plan.source != plan.target && isoduality.witness().is_none() {
        return Err(Error::Inconsistency(format!(
            "no iso-duality witness for the lifted [{}, {}] code: {:?}",
            n,
            code.dim(),
            isoduality
        )));
    }
    debug_assert_eq!(dual_code(&code).dim() + code.dim(), code.len());
    Ok(LiftedCode { code, d, g, genus, isoduality })
}

/// Designed distance n/2 − g + 1 of a lifted iso-dual code.
pub fn designed_distance(n: i64, genus: i64) -> i64 {
    n / 2 - genus + 1
}

/// Convenience: exact or bound-only distance of a lifted code.
pub fn lifted_distance(lc: &LiftedCode, budget: u64, seed: u64) -> crate::codes::Distance {
    let n = lc.code.len() as i64;
    min_distance(&lc.code, budget, designed_distance(n, lc.genus), seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GenusKind {
    Computed,
    /// The closed genus formula of the tower.
    Formula,
    /// g ≤ γ·m + 1.
    Bound,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParamCertificate {
    pub level: usize,
    pub m: u64,
    pub n: i64,
    pub k: i64,
    pub genus: i64,
    pub genus_kind: GenusKind,
    pub designed_d: i64,
    #[serde(with = "crate::codes::ratio")]
    pub rate: Ratio<i64>,
    #[serde(with = "crate::codes::ratio")]
    pub delta: Ratio<i64>,
    /// δ lower bound from the γ-bound alone: ½ − γ/n.
    #[serde(with = "crate::codes::ratio")]
    pub delta_gamma: Ratio<i64>,
    /// False when n_j > 2g_j − 2 could not be certified.
    pub unconditional: bool,
}

/// Parameters of the level-j lift of a level-0 code of length n with
/// k = n/2.
pub fn lift_certificate(
    desc: &TowerDescriptor,
    tower: Option<&Tower>,
    n: i64,
    level: usize,
) -> Result<ParamCertificate> {
    let m = desc.extension_degree(level);
    let mi = m as i64;
    let nj = n * mi;
    let gamma_bound = desc.gamma * Ratio::from_integer(mi);
    let (genus, kind) = match tower.filter(|t| t.depth >= level) {
        Some(t) => (t.genus(level)?, GenusKind::Computed),
        None => match desc.declared_genus(level) {
            Some(g) => (g as i64, GenusKind::Formula),
            None => ((gamma_bound + Ratio::one()).floor().to_integer(), GenusKind::Bound),
        },
    };
    let designed_d = match kind {
        GenusKind::Bound => (Ratio::from_integer(nj / 2) - gamma_bound).floor().to_integer(),
        _ => designed_distance(nj, genus),
    };
    let delta_gamma = Ratio::new(1, 2) - desc.gamma / Ratio::from_integer(n);
    Ok(ParamCertificate {
        level,
        m,
        n: nj,
        k: nj / 2,
        genus,
        genus_kind: kind,
        designed_d,
        rate: Ratio::new(1, 2),
        delta: Ratio::new(designed_d, nj),
        delta_gamma,
        unconditional: nj % 2 == 0 && nj > 2 * genus - 2,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub name: &'static str,
    #[serde(with = "crate::codes::ratio_opt")]
    pub value: Option<Ratio<i64>>,
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RateReport {
    pub tower: String,
    pub q: u32,
    pub field_order: u32,
    pub n: i64,
    pub deg_g: i64,
    #[serde(with = "crate::codes::ratio")]
    pub gamma: Ratio<i64>,
    pub gamma_is_bound: bool,
    pub rows: Vec<ParamCertificate>,
    #[serde(with = "crate::codes::ratio")]
    pub rate_limit: Ratio<i64>,
    #[serde(with = "crate::codes::ratio")]
    pub delta_limit: Ratio<i64>,
    pub admissible: bool,
    pub comparisons: Vec<Comparison>,
}

/// Integer square root when `v` is a perfect square.
fn exact_sqrt(v: i64) -> Option<i64> {
    let r = (v as f64).sqrt().round() as i64;
    (r * r == v).then_some(r)
}

pub fn rate_report(
    desc: &TowerDescriptor,
    tower: Option<&Tower>,
    n: i64,
    deg_g: i64,
    max_level: usize,
) -> Result<RateReport> {
    let mut rows = Vec::new();
    for level in 0..=max_level {
        let mut c = lift_certificate(desc, tower, n, level)?;
        if level == 0 {
            // genus 0: k = deg G + 1 and d ≥ n − deg G
            c.k = match rr_dim(deg_g, 0) {
                RrDim::Exact(k) | RrDim::LowerBound(k) => k,
            };
            c.designed_d = n - deg_g;
            c.rate = Ratio::new(c.k, n);
            c.delta = Ratio::new(c.designed_d, n);
        }
        rows.push(c);
    }
    let half = Ratio::new(1, 2);
    let delta_limit = half - desc.gamma / Ratio::from_integer(n);
    let admissible = desc.gamma <= Ratio::from_integer(n) * (half - delta_limit) && delta_limit > Ratio::zero();
    let order = desc.field.order() as i64;
    let q = desc.q as i64;
    let mut comparisons = Vec::new();
    match exact_sqrt(order) {
        Some(l) if l > 2 => {
            let r = Ratio::one() - Ratio::new(1, l - 1) - delta_limit;
            comparisons.push(Comparison {
                name: "tvz_rate",
                value: Some(r),
                note: format!("TVZ line R = 1 - 1/({l}-1) - delta at delta = {delta_limit}"),
            });
            let ihara = Ratio::new(1, l - 1);
            let ratio = desc.gamma / Ratio::from_integer(n);
            comparisons.push(Comparison {
                name: "ihara",
                value: Some(ihara),
                note: format!(
                    "1/(sqrt({order})-1); gamma/|split| = {ratio} {}",
                    if ratio == ihara { "meets it (optimal)" } else { "" }
                )
                .trim_end()
                .to_string(),
            });
        }
        _ => comparisons.push(Comparison {
            name: "ihara",
            value: None,
            note: format!("1/(sqrt({order})-1) is irrational"),
        }),
    }
    if desc.name == TowerName::Bgs {
        let bgs = half - Ratio::new(q + 2, 2 * q * (q * q - 1));
        comparisons.push(Comparison {
            name: "bgs_delta_bound",
            value: Some(bgs),
            note: "1/2 - (q+2)/(2q(q^2-1))".into(),
        });
        let displayed = half - Ratio::new(q, 2 * (q * q - 1));
        let from_genus = half - Ratio::new(q + 2, 2 * (q * q - 1));
        comparisons.push(Comparison {
            name: "bs2019",
            value: Some(displayed),
            note: "1/2 - q/(2(q^2-1))".into(),
        });
        comparisons.push(Comparison {
            name: "bs2019_genus_bound",
            value: Some(from_genus),
            note: if from_genus <= Ratio::zero() {
                format!("vacuous at q = {q}; this construction gives delta >= {bgs}")
            } else {
                "positive".into()
            },
        });
    }
    Ok(RateReport {
        tower: desc.name.to_string(),
        q: desc.q,
        field_order: desc.field.order(),
        n,
        deg_g,
        gamma: desc.gamma,
        gamma_is_bound: desc.gamma_is_bound,
        rows,
        rate_limit: half,
        delta_limit,
        admissible,
        comparisons,
    })
}

impl RateReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "level,m,n,k,genus,genus_kind,designed_d,R_num,R_den,delta_num,delta_den,delta_gamma_num,delta_gamma_den\n",
        );
        for r in &self.rows {
            let kind = match r.genus_kind {
                GenusKind::Computed => "computed",
                GenusKind::Formula => "formula",
                GenusKind::Bound => "bound",
            };
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.level,
                r.m,
                r.n,
                r.k,
                r.genus,
                kind,
                r.designed_d,
                r.rate.numer(),
                r.rate.denom(),
                r.delta.numer(),
                r.delta.denom(),
                r.delta_gamma.numer(),
                r.delta_gamma.denom()
            ));
        }
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComposeResult {
    pub equal: bool,
    /// (place, two-hop coefficient, one-hop coefficient) where G differs.
    pub g_diffs: Vec<(String, i64, i64)>,
    pub d_equal: bool,
}

/// Lifting i → j → k against i → k.
pub fn compose_check(
    t: &Tower,
    levels: (usize, usize, usize),
    d: &[PlaceId],
    g: &TowerDivisor,
) -> Result<ComposeResult> {
    let (i, j, k) = levels;
    if !(i <= j && j <= k) {
        return Err(Error::Argument("levels must satisfy i <= j <= k".into()));
    }
    let two_g = lifted_g(t, &lifted_g(t, g, i, j)?, j, k)?;
    let one_g = lifted_g(t, g, i, k)?;
    let d0: TowerDivisor = Divisor::from_terms(i, d.iter().map(|&p| (p, 1)));
    let two_d = t.conorm(&t.conorm(&d0, j)?, k)?;
    let one_d = t.conorm(&d0, k)?;
    let mut places: Vec<PlaceId> = two_g.support().into_iter().chain(one_g.support()).collect();
    places.sort();
    places.dedup();
    let g_diffs: Vec<(String, i64, i64)> = places
        .into_iter()
        .filter(|p| two_g.coeff(p) != one_g.coeff(p))
        .map(|p| (t.label(p), two_g.coeff(&p), one_g.coeff(&p)))
        .collect();
    let d_equal = two_d == one_d;
    Ok(ComposeResult {
        equal: d_equal && g_diffs.is_empty(),
        g_diffs,
        d_equal,
    })
}
