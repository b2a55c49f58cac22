//! The divisor recipe mini-language.
//!
//! `D=split:all` or `split:first:<n>` picks evaluation places from the split
//! set in canonical order; `G=<coeff>@inf,<coeff>@<alpha>,...` places
//! coefficients on P_∞ and on rational places P_α (α as its integer code).

use std::fmt;
use std::str::FromStr;

use isodual_core::gf::{Fe, FieldCtx};
use isodual_core::places::{Divisor, Divisor0, Place};
use isodual_core::Error;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum DRecipe {
    All,
    First(usize),
}

impl FromStr for DRecipe {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Config(format!("bad D recipe '{s}' (expected split:all or split:first:<n>)"));
        let rest = s.trim().strip_prefix("split:").ok_or_else(bad)?;
        if rest == "all" {
            return Ok(DRecipe::All);
        }
        let n = rest.strip_prefix("first:").ok_or_else(bad)?;
        n.parse().map(DRecipe::First).map_err(|_| bad())
    }
}

impl fmt::Display for DRecipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DRecipe::All => f.write_str("split:all"),
            DRecipe::First(n) => write!(f, "split:first:{n}"),
        }
    }
}

impl From<DRecipe> for String {
    fn from(d: DRecipe) -> String {
        d.to_string()
    }
}

impl TryFrom<String> for DRecipe {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}

impl DRecipe {
    pub fn select(&self, split: &[Place]) -> Result<Vec<Place>, Error> {
        match *self {
            DRecipe::All => Ok(split.to_vec()),
            DRecipe::First(n) if n <= split.len() => Ok(split[..n].to_vec()),
            DRecipe::First(n) => Err(Error::Config(format!(
                "asked for {n} places but only {} split",
                split.len()
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlaceSpec {
    Infinity,
    Alpha(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct GRecipe(pub Vec<(i64, PlaceSpec)>);

impl FromStr for GRecipe {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let mut terms = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let bad = || Error::Config(format!("bad G term '{part}' (expected <coeff>@inf or <coeff>@<alpha>)"));
            let (c, at) = part.split_once('@').ok_or_else(bad)?;
            let c: i64 = c.trim().parse().map_err(|_| bad())?;
            let at = at.trim();
            let place = if at.eq_ignore_ascii_case("inf") {
                PlaceSpec::Infinity
            } else {
                PlaceSpec::Alpha(at.parse().map_err(|_| bad())?)
            };
            terms.push((c, place));
        }
        if terms.is_empty() {
            return Err(Error::Config("empty G recipe".into()));
        }
        Ok(GRecipe(terms))
    }
}

impl fmt::Display for GRecipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(c, p)| match p {
                PlaceSpec::Infinity => format!("{c}@inf"),
                PlaceSpec::Alpha(a) => format!("{c}@{a}"),
            })
            .collect();
        f.write_str(&parts.join(","))
    }
}

impl From<GRecipe> for String {
    fn from(g: GRecipe) -> String {
        g.to_string()
    }
}

impl TryFrom<String> for GRecipe {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}

impl GRecipe {
    /// ½(n − 2)·P_∞.
    pub fn default_for(n: usize) -> Result<Self, Error> {
        if n % 2 == 1 || n < 2 {
            return Err(Error::Config(format!("default G needs an even n >= 2, got n = {n}")));
        }
        Ok(GRecipe(vec![((n as i64 - 2) / 2, PlaceSpec::Infinity)]))
    }

    pub fn divisor(&self, ctx: &FieldCtx) -> Result<Divisor0, Error> {
        let mut g = Divisor::zero(0);
        for &(c, p) in &self.0 {
            let place = match p {
                PlaceSpec::Infinity => Place::Infinity,
                PlaceSpec::Alpha(a) if a < ctx.order() => Place::rational(ctx, Fe(a)),
                PlaceSpec::Alpha(a) => {
                    return Err(Error::Config(format!(
                        "alpha = {a} is not an element of F_{}",
                        ctx.order()
                    )))
                }
            };
            g.add_term(place, c);
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        let d: DRecipe = "split:first:4".parse().unwrap();
        assert_eq!(d, DRecipe::First(4));
        assert_eq!(d.to_string(), "split:first:4");
        let g: GRecipe = "2@inf, -1@3".parse().unwrap();
        assert_eq!(g.0, vec![(2, PlaceSpec::Infinity), (-1, PlaceSpec::Alpha(3))]);
        assert_eq!(g.to_string(), "2@inf,-1@3");
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, "\"2@inf,-1@3\"");
        assert_eq!(serde_json::from_str::<GRecipe>(&json).unwrap(), g);
    }

    #[test]
    fn bad_recipes() {
        assert!("all".parse::<DRecipe>().is_err());
        assert!("2@".parse::<GRecipe>().is_err());
        assert!("".parse::<GRecipe>().is_err());
        assert!(GRecipe::default_for(7).is_err());
    }

    #[test]
    fn default_g() {
        assert_eq!(GRecipe::default_for(12).unwrap().to_string(), "5@inf");
    }
}
