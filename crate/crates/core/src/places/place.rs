use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{is_irreducible, Fe, FieldCtx, Poly};

/// A place of the rational function field F_q(x): the zero of a monic
/// irreducible polynomial, or the pole of x.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Place {
    Finite {
        poly: Poly,
        /// The root for degree-one places, kept for ordering and evaluation.
        root: Option<Fe>,
    },
    Infinity,
}

impl Place {
    /// The zero P_α of x - α.
    pub fn rational(ctx: &FieldCtx, alpha: Fe) -> Place {
        Place::Finite {
            poly: Poly::linear(ctx, alpha),
            root: Some(alpha),
        }
    }

    /// Place of a monic irreducible polynomial.
    pub fn finite(ctx: &FieldCtx, poly: Poly) -> Result<Place> {
        if !poly.is_monic() || !is_irreducible(ctx, &poly) {
            return Err(Error::Argument(format!("{poly} is not monic irreducible")));
        }
        let root = (poly.degree() == Some(1)).then(|| ctx.neg(poly.coeff(0)));
        Ok(Place::Finite { poly, root })
    }

    pub fn degree(&self) -> u32 {
        match self {
            Place::Finite { poly, .. } => poly.degree().unwrap_or(0) as u32,
            Place::Infinity => 1,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.degree() == 1
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Place::Infinity)
    }

    pub fn root(&self) -> Option<Fe> {
        match self {
            Place::Finite { root, .. } => *root,
            Place::Infinity => None,
        }
    }

    pub fn poly(&self) -> Option<&Poly> {
        match self {
            Place::Finite { poly, .. } => Some(poly),
            Place::Infinity => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Place::Infinity => "P_inf".into(),
            Place::Finite { root: Some(a), .. } => format!("P_{}", a.0),
            Place::Finite { poly, .. } => format!("P[{poly}]"),
        }
    }

    pub fn to_repr(&self) -> PlaceRepr {
        match self {
            Place::Infinity => PlaceRepr::Inf,
            Place::Finite { poly, .. } => PlaceRepr::Finite { poly: poly.clone() },
        }
    }

    pub fn from_repr(ctx: &FieldCtx, repr: &PlaceRepr) -> Result<Place> {
        match repr {
            PlaceRepr::Inf => Ok(Place::Infinity),
            PlaceRepr::Finite { poly } => Place::finite(ctx, poly.clone()),
        }
    }

    fn sort_key(&self) -> (u32, bool, u32, &[Fe]) {
        match self {
            Place::Finite { poly, root } => {
                (self.degree(), false, root.map_or(0, |r| r.0), poly.coeffs())
            }
            Place::Infinity => (1, true, 0, &[]),
        }
    }
}

/// Rational places come first by root, then P_∞, then higher degree places.
impl Ord for Place {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for Place {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// JSON form: `{"kind":"finite","poly":[...]}` or `{"kind":"inf"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PlaceRepr {
    Finite { poly: Poly },
    Inf,
}

impl Serialize for Place {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_repr().serialize(s)
    }
}

/// The q + 1 rational places: P_α in ascending α, then P_∞.
pub fn rational_places(ctx: &FieldCtx) -> Vec<Place> {
    ctx.elements()
        .map(|a| Place::rational(ctx, a))
        .chain(std::iter::once(Place::Infinity))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_of_rational_places() {
        for (p, m, n) in [(2, 3, 9), (2, 4, 17), (2, 2, 5)] {
            let f = FieldCtx::new(p, m).unwrap();
            assert_eq!(rational_places(&f).len(), n);
        }
    }

    #[test]
    fn json_shape() {
        let f = FieldCtx::new(2, 3).unwrap();
        let p = Place::rational(&f, Fe(3));
        assert_eq!(
            serde_json::to_string(&p).unwrap(),
            r#"{"kind":"finite","poly":[3,1]}"#
        );
        assert_eq!(serde_json::to_string(&Place::Infinity).unwrap(), r#"{"kind":"inf"}"#);
        let back: PlaceRepr = serde_json::from_str(r#"{"kind":"finite","poly":[3,1]}"#).unwrap();
        assert_eq!(Place::from_repr(&f, &back).unwrap(), p);
    }

    #[test]
    fn ordering_rational_then_infinity_then_higher() {
        let f = FieldCtx::new(2, 3).unwrap();
        let h = Place::finite(&f, Poly::from_u32(&[1, 1, 1])).unwrap();
        let mut v = [h.clone(), Place::Infinity, Place::rational(&f, Fe(5)), Place::rational(&f, Fe(0))];
        v.sort();
        assert_eq!(v[0], Place::rational(&f, Fe(0)));
        assert_eq!(v[2], Place::Infinity);
        assert_eq!(v[3], h);
    }

    #[test]
    fn reducible_polynomial_is_not_a_place() {
        let f = FieldCtx::new(2, 3).unwrap();
        assert!(Place::finite(&f, Poly::from_u32(&[0, 0, 1])).is_err());
    }
}
