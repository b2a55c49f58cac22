use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::descriptor::TowerDescriptor;
use super::funcrep::FunctionRep;
use super::local::{
    base_frame, classify_step, lift_frame, ramified_uniformizer_relation, with_precision, BaseChart,
    LiftChart, LocalFrame, StepKind,
};
use crate::error::{Error, Result};
use crate::gf::{factor, Embedding, Fe, FieldCtx, Poly};
use crate::places::{principal_divisor, rational_places, Divisor, Divisor0, Place};
use crate::series::eval_ratfun;

/// Deepest level analyzed place by place.
pub const MAX_ANALYSIS_DEPTH: usize = 2;

/// A place of some tower level; indices follow the canonical order (parent
/// order, then residue root).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlaceId {
    pub level: usize,
    pub index: usize,
}

impl fmt::Display for PlaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}#{}", self.level, self.index)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Computed,
    Declared,
}

#[derive(Clone, Debug)]
enum Chart {
    Base(BaseChart),
    Lift(LiftChart),
    Unavailable,
}

#[derive(Clone, Debug)]
pub struct PlaceNode {
    pub id: PlaceId,
    pub parent: Option<PlaceId>,
    /// The level-0 place underneath.
    pub base: Place,
    pub e: u32,
    pub f: u32,
    /// Different exponent over the parent.
    pub d: u32,
    /// Degree over the constant field.
    pub degree: u32,
    pub source: Source,
    pub label: String,
    pub children: Vec<PlaceId>,
    chart: Chart,
}

pub type TowerDivisor = Divisor<PlaceId>;

/// A tower analyzed place by place up to `depth`.
#[derive(Clone, Debug)]
pub struct Tower {
    pub desc: TowerDescriptor,
    pub depth: usize,
    levels: Vec<Vec<PlaceNode>>,
    base_index: BTreeMap<Place, usize>,
}

impl Tower {
    pub fn analyze(desc: TowerDescriptor, depth: usize) -> Result<Tower> {
        if depth > MAX_ANALYSIS_DEPTH {
            return Err(Error::Config(format!(
                "analysis depth {depth} exceeds the supported {MAX_ANALYSIS_DEPTH}"
            )));
        }
        let mut tower = Tower {
            desc,
            depth,
            levels: vec![Vec::new()],
            base_index: BTreeMap::new(),
        };
        tower.build_base()?;
        for level in 1..=depth {
            tower.levels.push(Vec::new());
            for index in 0..tower.levels[level - 1].len() {
                tower.decompose(PlaceId { level: level - 1, index })?;
            }
        }
        for (&(level, index), &d) in &tower.desc.step_overrides.clone() {
            if let Some(node) = tower.levels.get_mut(level).and_then(|l| l.get_mut(index)) {
                node.d = d;
                node.source = Source::Declared;
            }
        }
        Ok(tower)
    }

    pub fn field(&self) -> &FieldCtx {
        &self.desc.field
    }

    /// Level-0 places: all rational ones, then nonrational places where the
    /// steps can ramify.
    fn build_base(&mut self) -> Result<()> {
        let ctx = self.desc.field.clone();
        let mut places = rational_places(&ctx);
        let mut extra: Vec<Place> = Vec::new();
        let x1 = FunctionRep::term(self.desc.q, self.desc.s.clone(), 1);
        let den_u = x1.apply_poly(&self.desc, self.desc.u.den())?;
        let fns = [self.desc.u.clone(), self.desc.s.clone(), den_u.norm(&self.desc)?];
        for f in fns.iter().filter(|f| !f.is_zero()) {
            for (p, _) in principal_divisor(&ctx, f)?.terms() {
                if !p.is_rational() && !extra.contains(p) {
                    extra.push(p.clone());
                }
            }
        }
        extra.sort();
        places.extend(extra);
        for (index, place) in places.into_iter().enumerate() {
            let chart = match &place {
                Place::Infinity => BaseChart::Infinity,
                Place::Finite { root: Some(a), .. } => BaseChart::Rational(*a),
                Place::Finite { poly, .. } => {
                    let (field, emb) = ctx.extension(place.degree())?;
                    let h = poly.clone();
                    let lifted = h.embed(&emb);
                    let theta = lifted.roots(&field).into_iter().next().ok_or_else(|| {
                        Error::Inconsistency(format!("{h} has no root in its residue field"))
                    })?;
                    BaseChart::Higher { field, emb, h, theta }
                }
            };
            self.base_index.insert(place.clone(), index);
            self.levels[0].push(PlaceNode {
                id: PlaceId { level: 0, index },
                parent: None,
                base: place.clone(),
                e: 1,
                f: 1,
                d: 0,
                degree: place.degree(),
                source: Source::Computed,
                label: place.label(),
                children: Vec::new(),
                chart: Chart::Base(chart),
            });
        }
        Ok(())
    }

    pub fn node(&self, id: PlaceId) -> Result<&PlaceNode> {
        self.levels
            .get(id.level)
            .and_then(|l| l.get(id.index))
            .ok_or_else(|| Error::AnalysisRequired(format!("place {id} is not analyzed")))
    }

    pub fn places(&self, level: usize) -> &[PlaceNode] {
        self.levels.get(level).map_or(&[], |l| l.as_slice())
    }

    pub fn place_id(&self, place: &Place) -> Result<PlaceId> {
        self.base_index
            .get(place)
            .map(|&index| PlaceId { level: 0, index })
            .ok_or_else(|| Error::AnalysisRequired(format!("{} is not an analyzed place", place.label())))
    }

    pub fn label(&self, id: PlaceId) -> String {
        self.node(id).map_or_else(|_| id.to_string(), |n| n.label.clone())
    }

    pub fn from_base_divisor(&self, d: &Divisor0) -> Result<TowerDivisor> {
        let mut out = Divisor::zero(0);
        for (p, c) in d.terms() {
            out.add_term(self.place_id(p)?, c);
        }
        Ok(out)
    }

    pub fn degree(&self, d: &TowerDivisor) -> Result<i64> {
        let mut deg = 0;
        for (id, c) in d.terms() {
            deg += c * self.node(*id)?.degree as i64;
        }
        Ok(deg)
    }

    /// Expansions of x_0 (and z_1) at a place of level 0 or 1.
    pub fn frame(&self, id: PlaceId, n: i64) -> Result<LocalFrame> {
        let node = self.node(id)?;
        match &node.chart {
            Chart::Base(c) => base_frame(&self.desc, c, n),
            Chart::Lift(c) => {
                let parent = self.frame(node.parent.expect("level-1 place has a parent"), n)?;
                lift_frame(&self.desc, &parent, c)
            }
            Chart::Unavailable => Err(Error::Unsupported(format!(
                "no local chart at {} (declared data only)",
                node.label
            ))),
        }
    }

    fn decompose(&mut self, id: PlaceId) -> Result<()> {
        let q = self.desc.q;
        let parent = self.node(id)?.clone();
        let child_level = id.level + 1;
        let step = if matches!(parent.chart, Chart::Unavailable) {
            None
        } else {
            Some(with_precision(|n| {
                let frame = self.frame(id, n)?;
                let arg = if id.level == 0 { frame.x.clone() } else { frame.x1(&self.desc)? };
                let u = eval_ratfun(&frame.field, &frame.emb, &self.desc.u, &arg)?;
                let step = classify_step(&frame.field, q, &u)?;
                let check = match step.kind {
                    StepKind::Ramified { m: 1 } if id.level == 0 => {
                        let rel = ramified_uniformizer_relation(&self.desc, &frame)?;
                        Some(rel.derivative(&frame.field).valuation()?)
                    }
                    _ => None,
                };
                Ok((frame, step, check))
            })?)
        };
        let mut children = Vec::new();
        match step {
            Some((frame, step, check)) => match step.kind {
                StepKind::Unramified { residue } => {
                    let k = frame.field.clone();
                    let mut coeffs = vec![Fe::ZERO; q as usize + 1];
                    coeffs[0] = k.neg(residue);
                    coeffs[1] = Fe::ONE;
                    coeffs[q as usize] = k.add(coeffs[q as usize], Fe::ONE);
                    let g = Poly::new(coeffs);
                    let fa = factor(&k, &g)?;
                    let mut found = Vec::new();
                    for (h, mult) in fa.factors {
                        if mult != 1 {
                            return Err(Error::Inconsistency(format!(
                                "z^q + z - c has a repeated factor at {}",
                                parent.label
                            )));
                        }
                        let f = h.deg_i() as u32;
                        let (field, emb_up) = if f == 1 {
                            (k.clone(), Embedding::identity(k.order()))
                        } else {
                            k.extension(f)?
                        };
                        let root = h.embed(&emb_up).roots(&field).into_iter().next().ok_or_else(|| {
                            Error::Inconsistency("irreducible factor without a root in its extension".into())
                        })?;
                        found.push((f, root, h, field, emb_up));
                    }
                    found.sort_by_key(|(f, root, ..)| (*f, root.0));
                    for (f, root, h, field, emb_up) in found {
                        let tag = if f == 1 {
                            format!("z={}", root.0)
                        } else {
                            format!("[{h}]")
                        };
                        let chart = if child_level == 1 {
                            Chart::Lift(LiftChart::Unramified { field, emb_up, root })
                        } else {
                            Chart::Unavailable
                        };
                        children.push((1, f, 0, Source::Computed, tag, chart));
                    }
                }
                StepKind::Ramified { m } => {
                    let d = (q - 1) * (m + 1);
                    if let Some(nu) = check {
                        if nu != d as i64 {
                            return Err(Error::Inconsistency(format!(
                                "different exponent at {}: formula {d}, uniformizer relation {nu}",
                                parent.label
                            )));
                        }
                    }
                    let chart = if child_level == 1 && m == 1 {
                        Chart::Lift(LiftChart::Ramified)
                    } else {
                        Chart::Unavailable
                    };
                    children.push((q, 1, d, Source::Computed, "ram".to_string(), chart));
                }
                StepKind::Stuck { .. } => {
                    children.push((q, 1, 2 * (q - 1), Source::Declared, "ram".to_string(), Chart::Unavailable));
                }
            },
            None => {
                children.push((q, 1, 2 * (q - 1), Source::Declared, "ram".to_string(), Chart::Unavailable));
            }
        }
        let total: u32 = children.iter().map(|(e, f, ..)| e * f).sum();
        if total != q {
            return Err(Error::Inconsistency(format!(
                "fundamental identity fails above {}: Σ e·f = {total}, expected {q}",
                parent.label
            )));
        }
        let mut ids = Vec::new();
        for (e, f, d, source, tag, chart) in children {
            let index = self.levels[child_level].len();
            let cid = PlaceId { level: child_level, index };
            self.levels[child_level].push(PlaceNode {
                id: cid,
                parent: Some(id),
                base: parent.base.clone(),
                e,
                f,
                d,
                degree: parent.degree * f,
                source,
                label: format!("{}/{}", parent.label, tag),
                children: Vec::new(),
                chart,
            });
            ids.push(cid);
        }
        self.levels[id.level][id.index].children = ids;
        Ok(())
    }

    /// Descendants of `id` at `level` with their ramification over `id`.
    pub fn descendants(&self, id: PlaceId, level: usize) -> Result<Vec<(PlaceId, u32)>> {
        if level < id.level {
            return Err(Error::Argument("target level below the place".into()));
        }
        if level > self.depth {
            return Err(Error::AnalysisRequired(format!(
                "level {level} is beyond the analyzed depth {}",
                self.depth
            )));
        }
        let mut cur = vec![(id, 1u32)];
        for _ in id.level..level {
            let mut next = Vec::new();
            for (p, e) in cur {
                for &c in &self.node(p)?.children {
                    next.push((c, e * self.node(c)?.e));
                }
            }
            cur = next;
        }
        Ok(cur)
    }

    /// Con(D) from the level of D up to `target`.
    pub fn conorm(&self, d: &TowerDivisor, target: usize) -> Result<TowerDivisor> {
        let mut out = Divisor::zero(target);
        for (id, c) in d.terms() {
            for (r, e) in self.descendants(*id, target)? {
                out.add_term(r, c * e as i64);
            }
        }
        Ok(out)
    }

    /// d(R | level k) by transitivity d(P|R) = e(P|Q) d(Q|R) + d(P|Q).
    pub fn different_exponent(&self, id: PlaceId, over: usize) -> Result<u32> {
        if id.level == over {
            return Ok(0);
        }
        if over == 0 && id.level >= 2 {
            if let Some(&d) = self.desc.total_overrides.get(&(id.level, id.index)) {
                return Ok(d);
            }
        }
        let node = self.node(id)?;
        let parent = node.parent.ok_or_else(|| Error::Argument("level below target".into()))?;
        Ok(node.e * self.different_exponent(parent, over)? + node.d)
    }

    /// Diff(F_level / F_over).
    pub fn different_divisor(&self, level: usize, over: usize) -> Result<TowerDivisor> {
        if level > self.depth {
            return Err(Error::AnalysisRequired(format!("level {level} is not analyzed")));
        }
        let mut out = Divisor::zero(level);
        for node in self.places(level) {
            out.add_term(node.id, self.different_exponent(node.id, over)? as i64);
        }
        Ok(out)
    }

    /// Genus of F_level by Riemann–Hurwitz over F_0.
    pub fn genus(&self, level: usize) -> Result<i64> {
        let diff = self.degree(&self.different_divisor(level, 0)?)?;
        let m = self.desc.extension_degree(level) as i64;
        let twice = -2 * m + diff + 2;
        if twice < 0 || twice % 2 != 0 {
            return Err(Error::Inconsistency(format!(
                "Riemann–Hurwitz gives 2g = {twice} at level {level}"
            )));
        }
        Ok(twice / 2)
    }

    /// Rational level-0 places splitting completely up to `depth`, and
    /// level-0 places ramified somewhere up to `depth`.
    pub fn loci_scan(&self, depth: usize) -> Result<(Vec<Place>, Vec<Place>)> {
        let mut split = Vec::new();
        let mut ram = Vec::new();
        for node in self.places(0) {
            let mut ramified = false;
            let mut all_split = node.degree == 1;
            for level in 1..=depth {
                let desc = self.descendants(node.id, level)?;
                for (id, _) in &desc {
                    let n = self.node(*id)?;
                    ramified |= n.e > 1;
                    all_split &= n.e == 1 && n.f == 1;
                }
            }
            if all_split {
                split.push(node.base.clone());
            }
            if ramified {
                ram.push(node.base.clone());
            }
        }
        Ok((split, ram))
    }

    /// Rational places splitting completely up to `depth` and outside the
    /// declared ramification locus; the default evaluation set of codes.
    pub fn evaluation_places(&self, depth: usize) -> Result<Vec<Place>> {
        let (split, _) = self.loci_scan(depth)?;
        let excluded = self.desc.declared_ramification_locus().unwrap_or_default();
        Ok(split.into_iter().filter(|p| !excluded.contains(p)).collect())
    }

    /// Machine-readable analysis summary.
    pub fn dump(&self) -> Result<TowerDump> {
        let mut levels = Vec::new();
        for level in 0..=self.depth {
            let diff = self.degree(&self.different_divisor(level, 0)?)?;
            levels.push(LevelDump {
                level,
                m: self.desc.extension_degree(level),
                genus: self.genus(level)?,
                diff_degree: diff,
                declared_genus: self.desc.declared_genus(level),
                places: self.places(level).len(),
            });
        }
        let places = (0..=self.depth)
            .flat_map(|l| self.places(l))
            .map(|n| PlaceDump {
                level: n.id.level,
                index: n.id.index,
                label: n.label.clone(),
                parent: n.parent,
                e: n.e,
                f: n.f,
                d: n.d,
                degree: n.degree,
                source: n.source,
            })
            .collect();
        let (split, ram) = self.loci_scan(self.depth)?;
        let declared_split = self.evaluation_places(self.depth)?;
        Ok(TowerDump {
            name: self.desc.name.to_string(),
            q: self.desc.q,
            constant_field: self.desc.field.order(),
            depth: self.depth,
            levels,
            places,
            split: split.iter().map(Place::label).collect(),
            declared_split: declared_split.iter().map(Place::label).collect(),
            ramified: ram.iter().map(Place::label).collect(),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelDump {
    pub level: usize,
    pub m: u64,
    pub genus: i64,
    pub diff_degree: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub declared_genus: Option<u64>,
    pub places: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PlaceDump {
    pub level: usize,
    pub index: usize,
    pub label: String,
    pub parent: Option<PlaceId>,
    pub e: u32,
    pub f: u32,
    pub d: u32,
    pub degree: u32,
    pub source: Source,
}

#[derive(Clone, Debug, Serialize)]
pub struct TowerDump {
    pub name: String,
    pub q: u32,
    pub constant_field: u32,
    pub depth: usize,
    pub levels: Vec<LevelDump>,
    pub places: Vec<PlaceDump>,
    pub split: Vec<String>,
    pub declared_split: Vec<String>,
    pub ramified: Vec<String>,
}
