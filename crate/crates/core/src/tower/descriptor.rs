use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Fe, FieldCtx, Poly};
use crate::places::{Place, RatFun};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TowerName {
    Gs,
    Bgs,
}

impl fmt::Display for TowerName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TowerName::Gs => "gs",
            TowerName::Bgs => "bgs",
        })
    }
}

impl std::str::FromStr for TowerName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gs" => Ok(TowerName::Gs),
            "bgs" => Ok(TowerName::Bgs),
            other => Err(Error::Config(format!("unknown tower '{other}' (expected gs or bgs)"))),
        }
    }
}

/// A recursive tower x_i = z_i·s(x_{i-1}) with z_i^q + z_i = u(x_{i-1}).
///
/// For GS, s = 1 and u(X) = X^q/(1 + X^{q-1}). For BGS the defining relation
/// (1 - y)/y^q = c(x) with c = (x^q + x + 1)/x becomes z^q + z = c after
/// y = z/c, so u = c and s = 1/c.
#[derive(Clone, Debug)]
pub struct TowerDescriptor {
    pub name: TowerName,
    pub q: u32,
    pub field: Arc<FieldCtx>,
    pub u: RatFun,
    pub s: RatFun,
    /// Roots of z^q + z in the constant field.
    pub kernel: Vec<Fe>,
    /// γ(T), an upper bound for GS and the exact limit for BGS.
    pub gamma: Ratio<i64>,
    pub gamma_is_bound: bool,
    /// Different exponents d(R|parent) replacing analyzed values, keyed by
    /// (level, place index).
    pub step_overrides: BTreeMap<(usize, usize), u32>,
    /// Different exponents d(R|P_0) over the base field, keyed likewise; used
    /// by one-hop lifts in place of transitivity.
    pub total_overrides: BTreeMap<(usize, usize), u32>,
}

impl TowerDescriptor {
    pub fn constant_field_order(&self) -> u32 {
        self.field.order()
    }

    pub fn step_degree(&self) -> u32 {
        self.q
    }

    /// [F_i : F_0].
    pub fn extension_degree(&self, level: usize) -> u64 {
        (self.q as u64).pow(level as u32)
    }

    /// The closed genus formula of the GS tower, when it applies.
    pub fn declared_genus(&self, level: usize) -> Option<u64> {
        if self.name != TowerName::Gs {
            return None;
        }
        let q = self.q as u64;
        let n = level as u32;
        Some(if n % 2 == 1 {
            (q.pow(n.div_ceil(2)) - 1).pow(2)
        } else {
            (q.pow((n + 2) / 2) - 1) * (q.pow(n / 2) - 1)
        })
    }

    /// Level-0 places the literature places outside the splitting locus:
    /// for GS, P_α with α^q + α = 0 and P_∞. None when no such statement is
    /// built in.
    pub fn declared_ramification_locus(&self) -> Option<Vec<Place>> {
        match self.name {
            TowerName::Gs => {
                let mut v: Vec<Place> = self
                    .kernel
                    .iter()
                    .map(|&a| Place::rational(&self.field, a))
                    .collect();
                v.sort();
                v.push(Place::Infinity);
                Some(v)
            }
            TowerName::Bgs => None,
        }
    }

    /// Mock hook: replace the analyzed step different of one place.
    pub fn with_step_different(mut self, level: usize, index: usize, d: u32) -> Self {
        self.step_overrides.insert((level, index), d);
        self
    }

    /// Mock hook: declare the total different d(R|P_0) of one place.
    pub fn with_total_different(mut self, level: usize, index: usize, d: u32) -> Self {
        self.total_overrides.insert((level, index), d);
        self
    }
}

pub fn make_tower(name: TowerName, q: u32) -> Result<TowerDescriptor> {
    let (field, u, s) = match name {
        TowerName::Gs => {
            if !matches!(q, 2..=4) {
                return Err(Error::Config(format!(
                    "GS tower supported for q in {{2, 3, 4}}, got q = {q}"
                )));
            }
            let field = FieldCtx::of_order(q * q)?;
            let num = Poly::monomial(Fe::ONE, q as usize);
            let den = Poly::one().add(&field, &Poly::monomial(Fe::ONE, q as usize - 1));
            let u = RatFun::new(&field, num, den)?;
            (field, u, RatFun::one())
        }
        TowerName::Bgs => {
            if q % 2 == 1 {
                return Err(Error::Unsupported(format!(
                    "BGS tower needs even q: the different exponents are always even only when q is even (got q = {q})"
                )));
            }
            if q != 2 {
                return Err(Error::Config(format!(
                    "BGS tower supported for q = 2 only (F_{} is not built in)",
                    q * q * q
                )));
            }
            let field = FieldCtx::of_order(q * q * q)?;
            let num = Poly::monomial(Fe::ONE, q as usize)
                .add(&field, &Poly::x())
                .add(&field, &Poly::one());
            let u = RatFun::new(&field, num, Poly::x())?;
            let s = u.inv(&field)?;
            (field, u, s)
        }
    };
    let kernel_poly = Poly::monomial(Fe::ONE, q as usize).add(&field, &Poly::x());
    let kernel = kernel_poly.roots(&field);
    if kernel.len() != q as usize {
        return Err(Error::Inconsistency(format!(
            "z^{q} + z has {} roots in the constant field, expected {q}",
            kernel.len()
        )));
    }
    let gamma = match name {
        TowerName::Gs => Ratio::from_integer(q as i64),
        TowerName::Bgs => Ratio::new(q as i64 + 2, 2 * (q as i64 - 1)),
    };
    Ok(TowerDescriptor {
        name,
        q,
        field,
        u,
        s,
        kernel,
        gamma,
        gamma_is_bound: name == TowerName::Gs,
        step_overrides: BTreeMap::new(),
        total_overrides: BTreeMap::new(),
    })
}
