use std::collections::BTreeMap;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use super::place::Place;
use super::ratfun::RatFun;
use crate::error::{Error, Result};
use crate::gf::{factor, FieldCtx};

/// A divisor: finitely many places with nonzero integer coefficients, all at
/// one tower level.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Divisor<K: Ord> {
    level: usize,
    entries: BTreeMap<K, i64>,
}

/// Divisors on the rational function field F_q(x).
pub type Divisor0 = Divisor<Place>;

impl<K: Ord + Clone> Divisor<K> {
    pub fn zero(level: usize) -> Self {
        Divisor {
            level,
            entries: BTreeMap::new(),
        }
    }

    pub fn single(level: usize, place: K, coeff: i64) -> Self {
        let mut d = Divisor::zero(level);
        d.add_term(place, coeff);
        d
    }

    pub fn from_terms(level: usize, terms: impl IntoIterator<Item = (K, i64)>) -> Self {
        let mut d = Divisor::zero(level);
        for (p, c) in terms {
            d.add_term(p, c);
        }
        d
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Adds `coeff·place`, dropping the entry if it cancels.
    pub fn add_term(&mut self, place: K, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let slot = self.entries.entry(place.clone()).or_insert(0);
        *slot += coeff;
        if *slot == 0 {
            self.entries.remove(&place);
        }
    }

    pub fn coeff(&self, place: &K) -> i64 {
        self.entries.get(place).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&K, i64)> {
        self.entries.iter().map(|(k, &c)| (k, c))
    }

    pub fn support(&self) -> Vec<K> {
        self.entries.keys().cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn same_level(&self, other: &Self) -> Result<()> {
        if self.level != other.level {
            return Err(Error::Argument(format!(
                "divisors at different levels ({} and {})",
                self.level, other.level
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_level(other)?;
        let mut out = self.clone();
        for (p, c) in other.terms() {
            out.add_term(p.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: i64) -> Self {
        Divisor::from_terms(self.level, self.terms().map(|(p, c)| (p.clone(), k * c)))
    }

    pub fn disjoint(&self, other: &Self) -> Result<bool> {
        self.same_level(other)?;
        Ok(self.entries.keys().all(|p| !other.entries.contains_key(p)))
    }

    /// Coefficientwise `self ≥ other`.
    pub fn ge(&self, other: &Self) -> Result<bool> {
        self.same_level(other)?;
        Ok(self.sub(other)?.terms().all(|(_, c)| c >= 0))
    }

    pub fn is_effective(&self) -> bool {
        self.terms().all(|(_, c)| c >= 0)
    }

    pub fn positive_part(&self) -> Self {
        Divisor::from_terms(self.level, self.terms().filter(|(_, c)| *c > 0).map(|(p, c)| (p.clone(), c)))
    }

    /// Degree with a caller-supplied place degree.
    pub fn degree_by(&self, deg: impl Fn(&K) -> u32) -> i64 {
        self.terms().map(|(p, c)| c * deg(p) as i64).sum()
    }

    /// Every coefficient must be divisible by `k`.
    pub fn div_exact(&self, k: i64) -> Result<Self> {
        if let Some((_, c)) = self.terms().find(|(_, c)| c % k != 0) {
            return Err(Error::Inconsistency(format!("coefficient {c} is not divisible by {k}")));
        }
        Ok(Divisor::from_terms(self.level, self.terms().map(|(p, c)| (p.clone(), c / k))))
    }
}

impl Divisor<Place> {
    pub fn degree(&self) -> i64 {
        self.degree_by(Place::degree)
    }
}

#[derive(Serialize)]
struct Term<'a, K> {
    place: &'a K,
    coeff: i64,
}

/// Serialized as a list of `{place, coeff}` records in canonical order.
impl<K: Ord + Serialize> Serialize for Divisor<K> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.entries.len()))?;
        for (place, &coeff) in &self.entries {
            seq.serialize_element(&Term { place, coeff })?;
        }
        seq.end()
    }
}

/// The principal divisor (f) on F_q(x).
pub fn principal_divisor(ctx: &FieldCtx, f: &RatFun) -> Result<Divisor0> {
    if f.is_zero() {
        return Err(Error::UndefinedValuation);
    }
    let mut d = Divisor::zero(0);
    for (poly, sign) in [(f.num(), 1), (f.den(), -1)] {
        if poly.degree().unwrap_or(0) == 0 {
            continue;
        }
        for (h, m) in factor(ctx, poly)?.factors {
            d.add_term(Place::finite(ctx, h)?, sign * m as i64);
        }
    }
    d.add_term(Place::Infinity, f.valuation(ctx, &Place::Infinity)?);
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{Fe, Poly};

    #[test]
    fn degree_and_disjointness() {
        let f8 = FieldCtx::new(2, 3).unwrap();
        let d = Divisor::from_terms(0, [(Place::Infinity, 2), (Place::rational(&f8, Fe(0)), 1)]);
        assert_eq!(d.degree(), 3);
        let a = Divisor::from_terms(
            0,
            [(Place::rational(&f8, Fe(1)), 1), (Place::rational(&f8, Fe(2)), 1)],
        );
        assert!(a.disjoint(&Divisor::single(0, Place::Infinity, 2)).unwrap());
        assert!(d.scale(-1).add(&d).unwrap().is_zero());
    }

    #[test]
    fn mixed_levels_rejected() {
        let a: Divisor<u32> = Divisor::single(0, 1, 1);
        let b: Divisor<u32> = Divisor::single(1, 1, 1);
        assert!(matches!(a.add(&b), Err(Error::Argument(_))));
    }

    #[test]
    fn principal_divisor_has_degree_zero() {
        let f8 = FieldCtx::new(2, 3).unwrap();
        let f = RatFun::new(&f8, Poly::from_u32(&[1, 1, 1, 0, 5]), Poly::from_u32(&[0, 3, 1])).unwrap();
        let d = principal_divisor(&f8, &f).unwrap();
        assert_eq!(d.degree(), 0);
    }

    #[test]
    fn json_shape() {
        let d = Divisor::single(0, Place::Infinity, 2);
        assert_eq!(
            serde_json::to_string(&d).unwrap(),
            r#"[{"place":{"kind":"inf"},"coeff":2}]"#
        );
    }
}
