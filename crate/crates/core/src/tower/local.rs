//! Local analysis of one step z^q + z = u at a place with uniformizer t.

use std::sync::Arc;

use super::descriptor::TowerDescriptor;
use crate::error::{Error, Result};
use crate::gf::{Embedding, Fe, FieldCtx, Poly};
use crate::series::{eval_poly, eval_ratfun, Series, EXACT};

/// Expansions of the tower generators at one place.
#[derive(Clone, Debug)]
pub struct LocalFrame {
    /// Residue field of the place.
    pub field: Arc<FieldCtx>,
    /// Constant field into the residue field.
    pub emb: Embedding,
    /// x_0 as a series in the local uniformizer.
    pub x: Series,
    /// The level-1 generator z_1, for places at level 1.
    pub z: Option<Series>,
}

impl LocalFrame {
    /// x_1 = z_1·s(x_0).
    pub fn x1(&self, tower: &TowerDescriptor) -> Result<Series> {
        let z = self
            .z
            .as_ref()
            .ok_or_else(|| Error::Argument("x_1 needs a level-1 frame".into()))?;
        let s = eval_ratfun(&self.field, &self.emb, &tower.s, &self.x)?;
        Ok(z.mul(&self.field, &s))
    }
}

/// How a level-0 place is charted.
#[derive(Clone, Debug)]
pub enum BaseChart {
    /// x = α + t.
    Rational(Fe),
    /// x = 1/t.
    Infinity,
    /// h(x) = t with x ≡ θ, over the residue field F_Q[x]/(h).
    Higher {
        field: Arc<FieldCtx>,
        emb: Embedding,
        h: Poly,
        theta: Fe,
    },
}

/// How a level-1 place sits over its parent.
#[derive(Clone, Debug)]
pub enum LiftChart {
    /// Same uniformizer; z ≡ root in the (possibly larger) residue field.
    Unramified {
        field: Arc<FieldCtx>,
        /// Parent residue field into this one.
        emb_up: Embedding,
        root: Fe,
    },
    /// Totally ramified with a simple reduced pole; uniformizer 1/(z - W).
    Ramified,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepKind {
    /// u is regular after reduction, with this residue.
    Unramified { residue: Fe },
    /// Reduced pole order m prime to p: totally ramified.
    Ramified { m: u32 },
    /// Reduced pole order divisible by p but not by q; no reduction applies.
    Stuck { m: u32 },
}

#[derive(Clone, Debug)]
pub struct StepLocal {
    pub kind: StepKind,
    /// Accumulated approximant W: z - W satisfies (z-W)^q + (z-W) = reduced.
    pub w: Series,
    pub reduced: Series,
}

impl StepLocal {
    pub fn ramification(&self, q: u32) -> Option<(u32, u32)> {
        match self.kind {
            StepKind::Ramified { m } => Some((q, (q - 1) * (m + 1))),
            _ => None,
        }
    }
}

fn log_p(p: u32, q: u32) -> u32 {
    let mut e = 0;
    let mut x = 1;
    while x < q {
        x *= p;
        e += 1;
    }
    e
}

/// Classifies z^q + z = u at a place with u given as a series, lowering pole
/// orders divisible by q by subtracting w^q + w with w = c^{1/q} t^{-m/q}.
pub fn classify_step(k: &FieldCtx, q: u32, u: &Series) -> Result<StepLocal> {
    let p = k.characteristic();
    let e = log_p(p, q);
    let mut w = Series::zero(EXACT);
    let mut cur = u.clone();
    loop {
        if cur.is_zero_to_prec() {
            if cur.prec() > 0 {
                return Ok(StepLocal {
                    kind: StepKind::Unramified { residue: Fe::ZERO },
                    w,
                    reduced: cur,
                });
            }
            cur.valuation()?;
        }
        let v = cur.valuation()?;
        if v >= 0 {
            let residue = cur.coeff(0)?;
            return Ok(StepLocal {
                kind: StepKind::Unramified { residue },
                w,
                reduced: cur,
            });
        }
        let m = (-v) as u32;
        if !m.is_multiple_of(p) {
            return Ok(StepLocal {
                kind: StepKind::Ramified { m },
                w,
                reduced: cur,
            });
        }
        if !m.is_multiple_of(q) {
            return Ok(StepLocal {
                kind: StepKind::Stuck { m },
                w,
                reduced: cur,
            });
        }
        let c = cur.leading()?;
        let r = k.frobenius_root(c, e);
        let term = Series::monomial(r, -((m / q) as i64), EXACT);
        cur = cur.sub(k, &term.frobenius(k, q as u64).add(k, &term));
        w = w.add(k, &term);
    }
}

/// Level-0 frame at working precision n.
pub fn base_frame(tower: &TowerDescriptor, chart: &BaseChart, n: i64) -> Result<LocalFrame> {
    let ctx = &tower.field;
    match chart {
        BaseChart::Rational(a) => Ok(LocalFrame {
            field: ctx.clone(),
            emb: Embedding::identity(ctx.order()),
            x: Series::new(0, vec![*a, Fe::ONE], n),
            z: None,
        }),
        BaseChart::Infinity => Ok(LocalFrame {
            field: ctx.clone(),
            emb: Embedding::identity(ctx.order()),
            x: Series::monomial(Fe::ONE, -1, n),
            z: None,
        }),
        BaseChart::Higher { field, emb, h, theta } => {
            let k = field.as_ref();
            let t = Series::monomial(Fe::ONE, 1, n);
            let dh = h.derivative(ctx);
            let mut x = Series::new(0, vec![*theta], n);
            for _ in 0..32 {
                let err = eval_poly(k, emb, h, &x).sub(k, &t);
                if err.is_zero_to_prec() {
                    break;
                }
                let step = err.div(k, &eval_poly(k, emb, &dh, &x))?;
                x = x.sub(k, &step).with_prec(n);
            }
            Ok(LocalFrame {
                field: field.clone(),
                emb: emb.clone(),
                x,
                z: None,
            })
        }
    }
}

/// Level-1 frame above a level-0 frame.
pub fn lift_frame(tower: &TowerDescriptor, parent: &LocalFrame, chart: &LiftChart) -> Result<LocalFrame> {
    let k = parent.field.as_ref();
    let u = eval_ratfun(k, &parent.emb, &tower.u, &parent.x)?;
    let step = classify_step(k, tower.q, &u)?;
    match chart {
        LiftChart::Unramified { field, emb_up, root } => {
            if !matches!(step.kind, StepKind::Unramified { .. }) {
                return Err(Error::Inconsistency("unramified chart at a ramified place".into()));
            }
            let kk = field.as_ref();
            let reduced = step.reduced.map(emb_up);
            let x = parent.x.map(emb_up);
            let w = step.w.map(emb_up);
            let target = reduced.prec().min(x.prec());
            // z' = reduced - z'^q converges t-adically since d/dz (z^q + z) = 1
            let mut zp = Series::new(0, vec![*root], target);
            for _ in 0..64 {
                let next = reduced.sub(kk, &zp.frobenius(kk, tower.q as u64)).with_prec(target);
                if next == zp {
                    break;
                }
                zp = next;
            }
            Ok(LocalFrame {
                field: field.clone(),
                emb: parent.emb.then(emb_up),
                x,
                z: Some(w.add(kk, &zp)),
            })
        }
        LiftChart::Ramified => {
            let StepKind::Ramified { m } = step.kind else {
                return Err(Error::Inconsistency("ramified chart at an unramified place".into()));
            };
            if m != 1 {
                return Err(Error::Unsupported(format!(
                    "local chart for reduced pole order {m} > 1"
                )));
            }
            let q = tower.q as u64;
            // With T = 1/(z - W): 1/reduced = T^q / (1 + T^{q-1}).
            let sigma_t = step.reduced.inv(k)?;
            let rel = sigma_t.prec() - 1;
            let big = rel * q as i64 + q as i64;
            let tt = Series::monomial(Fe::ONE, 1, big);
            let sigma_tt = tt
                .pow(k, q)
                .div(k, &Series::constant(Fe::ONE).add(k, &tt.pow(k, q - 1)))?;
            let t_of_tt = sigma_t.reversion(k)?.compose(k, &sigma_tt)?;
            let x = parent.x.compose(k, &t_of_tt)?;
            let z = step
                .w
                .compose(k, &t_of_tt)?
                .add(k, &Series::monomial(Fe::ONE, -1, EXACT))
                .with_prec(t_of_tt.prec());
            Ok(LocalFrame {
                field: parent.field.clone(),
                emb: parent.emb.clone(),
                x,
                z: Some(z),
            })
        }
    }
}

/// t as a series in T at a ramified level-1 place, for the different
/// cross-check d = ν_T(dt/dT).
pub fn ramified_uniformizer_relation(tower: &TowerDescriptor, parent: &LocalFrame) -> Result<Series> {
    let k = parent.field.as_ref();
    let u = eval_ratfun(k, &parent.emb, &tower.u, &parent.x)?;
    let step = classify_step(k, tower.q, &u)?;
    let q = tower.q as u64;
    let sigma_t = step.reduced.inv(k)?;
    let big = (sigma_t.prec() - 1) * q as i64 + q as i64;
    let tt = Series::monomial(Fe::ONE, 1, big);
    let sigma_tt = tt
        .pow(k, q)
        .div(k, &Series::constant(Fe::ONE).add(k, &tt.pow(k, q - 1)))?;
    sigma_t.reversion(k)?.compose(k, &sigma_tt)
}

/// Runs `f` at precision 16, 32, ... up to 256, retrying on precision errors.
pub fn with_precision<T>(mut f: impl FnMut(i64) -> Result<T>) -> Result<T> {
    let mut n = 16;
    loop {
        match f(n) {
            Err(Error::Precision { what, .. }) => {
                if n >= 256 {
                    return Err(Error::Precision { what, cap: 256 });
                }
                n *= 2;
            }
            other => return other,
        }
    }
}
