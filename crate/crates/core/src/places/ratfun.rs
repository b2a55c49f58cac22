use std::fmt;

use serde::{Deserialize, Serialize};

use super::place::Place;
use crate::error::{Error, Result};
use crate::gf::{Fe, FieldCtx, Poly};

/// A rational function num/den in lowest terms with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl RatFun {
    pub fn new(ctx: &FieldCtx, num: Poly, den: Poly) -> Result<RatFun> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFun::zero());
        }
        let g = num.gcd(ctx, &den);
        let num = num.exact_div(ctx, &g)?;
        let den = den.exact_div(ctx, &g)?;
        let lc = ctx.inv(den.leading())?;
        Ok(RatFun {
            num: num.scale(ctx, lc),
            den: den.scale(ctx, lc),
        })
    }

    pub fn from_poly(p: Poly) -> RatFun {
        RatFun {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn constant(c: Fe) -> RatFun {
        RatFun::from_poly(Poly::constant(c))
    }

    pub fn zero() -> RatFun {
        RatFun::from_poly(Poly::zero())
    }

    pub fn one() -> RatFun {
        RatFun::from_poly(Poly::one())
    }

    pub fn x() -> RatFun {
        RatFun::from_poly(Poly::x())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, ctx: &FieldCtx, o: &RatFun) -> RatFun {
        if self.den == o.den {
            return RatFun::new(ctx, self.num.add(ctx, &o.num), self.den.clone()).unwrap();
        }
        let num = self.num.mul(ctx, &o.den).add(ctx, &o.num.mul(ctx, &self.den));
        RatFun::new(ctx, num, self.den.mul(ctx, &o.den)).unwrap()
    }

    pub fn neg(&self, ctx: &FieldCtx) -> RatFun {
        RatFun {
            num: self.num.neg(ctx),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, ctx: &FieldCtx, o: &RatFun) -> RatFun {
        self.add(ctx, &o.neg(ctx))
    }

    pub fn mul(&self, ctx: &FieldCtx, o: &RatFun) -> RatFun {
        RatFun::new(ctx, self.num.mul(ctx, &o.num), self.den.mul(ctx, &o.den)).unwrap()
    }

    pub fn scale(&self, ctx: &FieldCtx, c: Fe) -> RatFun {
        if c.is_zero() {
            return RatFun::zero();
        }
        RatFun {
            num: self.num.scale(ctx, c),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self, ctx: &FieldCtx) -> Result<RatFun> {
        RatFun::new(ctx, self.den.clone(), self.num.clone())
    }

    pub fn div(&self, ctx: &FieldCtx, o: &RatFun) -> Result<RatFun> {
        Ok(self.mul(ctx, &o.inv(ctx)?))
    }

    pub fn powi(&self, ctx: &FieldCtx, e: i64) -> Result<RatFun> {
        let base = if e < 0 { self.inv(ctx)? } else { self.clone() };
        let k = e.unsigned_abs();
        Ok(RatFun {
            num: base.num.pow(ctx, k),
            den: base.den.pow(ctx, k),
        })
    }

    /// `self(g)` for a rational function g.
    pub fn compose(&self, ctx: &FieldCtx, g: &RatFun) -> Result<RatFun> {
        let eval = |p: &Poly| -> RatFun {
            p.coeffs().iter().rev().fold(RatFun::zero(), |acc, &c| {
                acc.mul(ctx, g).add(ctx, &RatFun::constant(c))
            })
        };
        eval(&self.num).div(ctx, &eval(&self.den))
    }

    /// ν_P(self).
    pub fn valuation(&self, ctx: &FieldCtx, place: &Place) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::UndefinedValuation);
        }
        match place {
            Place::Infinity => Ok(self.den.deg_i() - self.num.deg_i()),
            Place::Finite { poly, .. } => {
                let (a, _) = self.num.split_power(ctx, poly);
                let (b, _) = self.den.split_power(ctx, poly);
                Ok(a as i64 - b as i64)
            }
        }
    }

    /// Residue-class value at a rational place; errors at a pole.
    pub fn evaluate(&self, ctx: &FieldCtx, place: &Place) -> Result<Fe> {
        if !place.is_rational() {
            return Err(Error::Evaluation(format!(
                "{} is not a rational place",
                place.label()
            )));
        }
        if self.is_zero() {
            return Ok(Fe::ZERO);
        }
        match place {
            Place::Infinity => match self.num.deg_i().cmp(&self.den.deg_i()) {
                std::cmp::Ordering::Less => Ok(Fe::ZERO),
                std::cmp::Ordering::Equal => ctx.div(self.num.leading(), self.den.leading()),
                std::cmp::Ordering::Greater => {
                    Err(Error::Evaluation(format!("{self} has a pole at P_inf")))
                }
            },
            Place::Finite { root, .. } => {
                let a = root.expect("rational place has a root");
                let d = self.den.eval(ctx, a);
                if d.is_zero() {
                    return Err(Error::Evaluation(format!("{self} has a pole at P_{}", a.0)));
                }
                ctx.div(self.num.eval(ctx, a), d)
            }
        }
    }
}
