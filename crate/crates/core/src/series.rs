//! Truncated Laurent series over a finite field with tracked absolute
//! precision.
//!
//! A series stores the coefficients of t^val, t^(val+1), ... and is known
//! modulo t^prec. Coefficients between the stored ones and `prec` are zero.
//! When no coefficient below `prec` is known to be nonzero the series is
//! "zero to precision" and has no usable valuation.

use crate::error::{Error, Result};
use crate::gf::{Embedding, Fe, FieldCtx, Poly};
use crate::places::RatFun;

/// Precision marker of exact constants.
pub const EXACT: i64 = i64::MAX / 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    val: i64,
    coeffs: Vec<Fe>,
    prec: i64,
}

impl Series {
    /// Builds `Σ coeffs[i] t^(val+i) + O(t^prec)` and normalizes.
    pub fn new(val: i64, coeffs: Vec<Fe>, prec: i64) -> Series {
        let mut s = Series { val, coeffs, prec };
        s.normalize();
        s
    }

    pub fn zero(prec: i64) -> Series {
        Series {
            val: prec,
            coeffs: Vec::new(),
            prec,
        }
    }

    pub fn constant(c: Fe) -> Series {
        Series::new(0, vec![c], EXACT)
    }

    /// `c·t^k` known to precision `prec`.
    pub fn monomial(c: Fe, k: i64, prec: i64) -> Series {
        Series::new(k, vec![c], prec)
    }

    fn normalize(&mut self) {
        if self.prec >= EXACT / 2 {
            self.prec = EXACT;
        }
        let keep = (self.prec - self.val).max(0) as usize;
        self.coeffs.truncate(keep);
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            Some(i) => {
                self.coeffs.drain(..i);
                self.val += i as i64;
                while self.coeffs.last().is_some_and(|c| c.is_zero()) {
                    self.coeffs.pop();
                }
            }
            None => {
                self.coeffs.clear();
                self.val = self.prec;
            }
        }
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// True when no coefficient below the precision is nonzero.
    pub fn is_zero_to_prec(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exact valuation; a precision error if the series is zero to precision.
    pub fn valuation(&self) -> Result<i64> {
        if self.coeffs.is_empty() {
            return Err(Error::Precision {
                what: format!("series vanishes to precision {}", self.prec),
                cap: self.prec.max(0) as usize,
            });
        }
        Ok(self.val)
    }

    /// Lower bound on the valuation, valid also for series zero to precision.
    pub fn val_bound(&self) -> i64 {
        self.val
    }

    /// Coefficient of t^k; an error when k is beyond the precision.
    pub fn coeff(&self, k: i64) -> Result<Fe> {
        if k >= self.prec {
            return Err(Error::Precision {
                what: format!("coefficient of t^{k} requested, known below t^{}", self.prec),
                cap: self.prec.max(0) as usize,
            });
        }
        if k < self.val {
            return Ok(Fe::ZERO);
        }
        Ok(self.coeffs.get((k - self.val) as usize).copied().unwrap_or(Fe::ZERO))
    }

    pub fn leading(&self) -> Result<Fe> {
        self.valuation()?;
        Ok(self.coeffs[0])
    }

    pub fn with_prec(&self, prec: i64) -> Series {
        Series::new(self.val, self.coeffs.clone(), self.prec.min(prec))
    }

    pub fn add(&self, ctx: &FieldCtx, o: &Series) -> Series {
        let prec = self.prec.min(o.prec);
        let parts = [self, o];
        let live = parts.iter().filter(|s| !s.coeffs.is_empty());
        let lo = live.clone().map(|s| s.val).min().unwrap_or(prec);
        let hi = live
            .map(|s| s.val + s.coeffs.len() as i64)
            .max()
            .unwrap_or(prec)
            .min(prec);
        if hi <= lo {
            return Series::zero(prec);
        }
        let coeffs = (lo..hi)
            .map(|k| ctx.add(self.raw(k), o.raw(k)))
            .collect();
        Series::new(lo, coeffs, prec)
    }

    fn raw(&self, k: i64) -> Fe {
        if k < self.val {
            return Fe::ZERO;
        }
        self.coeffs.get((k - self.val) as usize).copied().unwrap_or(Fe::ZERO)
    }

    pub fn neg(&self, ctx: &FieldCtx) -> Series {
        Series {
            val: self.val,
            coeffs: self.coeffs.iter().map(|&c| ctx.neg(c)).collect(),
            prec: self.prec,
        }
    }

    pub fn sub(&self, ctx: &FieldCtx, o: &Series) -> Series {
        self.add(ctx, &o.neg(ctx))
    }

    pub fn scale(&self, ctx: &FieldCtx, c: Fe) -> Series {
        Series::new(
            self.val,
            self.coeffs.iter().map(|&a| ctx.mul(a, c)).collect(),
            self.prec,
        )
    }

    /// Multiplication by t^k.
    pub fn shift(&self, k: i64) -> Series {
        Series::new(self.val + k, self.coeffs.clone(), sat(self.prec, k))
    }

    pub fn mul(&self, ctx: &FieldCtx, o: &Series) -> Series {
        let prec = sat(self.prec, o.val).min(sat(o.prec, self.val));
        let val = self.val + o.val;
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return Series::zero(prec);
        }
        let len = (self.coeffs.len() + o.coeffs.len() - 1).min((prec - val).max(0) as usize);
        let mut out = vec![Fe::ZERO; len];
        for (i, &a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate().take(len - i) {
                out[i + j] = ctx.add(out[i + j], ctx.mul(a, b));
            }
        }
        Series::new(val, out, prec)
    }

    pub fn inv(&self, ctx: &FieldCtx) -> Result<Series> {
        let v = self.valuation()?;
        if self.prec >= EXACT {
            if self.coeffs.len() == 1 {
                return Ok(Series::new(-v, vec![ctx.inv(self.coeffs[0])?], EXACT));
            }
            return Err(Error::Argument("inverse of an exact non-monomial series".into()));
        }
        let rel = (self.prec - v) as usize;
        let a0inv = ctx.inv(self.coeffs[0])?;
        let mut out = vec![Fe::ZERO; rel];
        for k in 0..rel {
            let mut acc = if k == 0 { Fe::ONE } else { Fe::ZERO };
            for i in 1..=k.min(self.coeffs.len().saturating_sub(1)) {
                acc = ctx.sub(acc, ctx.mul(self.coeffs[i], out[k - i]));
            }
            out[k] = ctx.mul(acc, a0inv);
        }
        Ok(Series::new(-v, out, self.prec - 2 * v))
    }

    pub fn div(&self, ctx: &FieldCtx, o: &Series) -> Result<Series> {
        Ok(self.mul(ctx, &o.inv(ctx)?))
    }

    pub fn pow(&self, ctx: &FieldCtx, mut e: u64) -> Series {
        let mut base = self.clone();
        let mut acc = Series::constant(Fe::ONE);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(ctx, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(ctx, &base);
            }
        }
        acc
    }

    pub fn powi(&self, ctx: &FieldCtx, e: i64) -> Result<Series> {
        if e >= 0 {
            Ok(self.pow(ctx, e as u64))
        } else {
            Ok(self.inv(ctx)?.pow(ctx, e.unsigned_abs()))
        }
    }

    /// The p^k-th power map, coefficientwise Frobenius with exponent scaling.
    pub fn frobenius(&self, ctx: &FieldCtx, q: u64) -> Series {
        let qi = q as i64;
        let mut coeffs = vec![Fe::ZERO; (self.coeffs.len().max(1) - 1) * q as usize + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i * q as usize] = ctx.pow(c, q);
        }
        if self.coeffs.is_empty() {
            coeffs.clear();
        }
        let prec = if self.prec >= EXACT {
            EXACT
        } else {
            // (a + O(t^p))^q = a^q + O(t^{pq}) in characteristic p
            self.prec * qi
        };
        Series::new(self.val * qi, coeffs, prec)
    }

    pub fn derivative(&self, ctx: &FieldCtx) -> Series {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| ctx.mul(ctx.from_int(self.val + i as i64), c))
            .collect();
        let prec = if self.prec >= EXACT { EXACT } else { self.prec - 1 };
        Series::new(self.val - 1, coeffs, prec)
    }

    /// `self(g)` for g of positive valuation.
    pub fn compose(&self, ctx: &FieldCtx, g: &Series) -> Result<Series> {
        let vg = g.valuation()?;
        if vg < 1 {
            return Err(Error::Argument("composition needs an inner series of positive valuation".into()));
        }
        if self.coeffs.is_empty() {
            return Ok(Series::zero(sat(self.prec, 0).saturating_mul(vg).min(EXACT)));
        }
        let mut acc = Series::zero(EXACT);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(ctx, g).add(ctx, &Series::constant(c));
        }
        let lead = g.powi(ctx, self.val)?;
        let tail_prec = if self.prec >= EXACT { EXACT } else { self.prec * vg };
        Ok(acc.mul(ctx, &lead).with_prec(tail_prec))
    }

    /// Compositional inverse of a series `a1 t + a2 t^2 + ...` with a1 ≠ 0,
    /// by Newton iteration.
    pub fn reversion(&self, ctx: &FieldCtx) -> Result<Series> {
        if self.valuation()? != 1 {
            return Err(Error::Argument("reversion needs valuation exactly one".into()));
        }
        let target = self.prec;
        let t = Series::monomial(Fe::ONE, 1, target);
        let a1inv = ctx.inv(self.coeffs[0])?;
        let mut r = t.scale(ctx, a1inv);
        let ds = self.derivative(ctx);
        for _ in 0..64 {
            let err = self.compose(ctx, &r)?.sub(ctx, &t);
            if err.is_zero_to_prec() && err.prec() >= target.min(r.prec()) && r.prec() >= target {
                break;
            }
            let step = err.div(ctx, &ds.compose(ctx, &r)?)?;
            let next = r.sub(ctx, &step);
            let next = next.with_prec(target);
            if next == r {
                break;
            }
            r = next;
        }
        Ok(r)
    }

    pub fn map(&self, emb: &Embedding) -> Series {
        Series {
            val: self.val,
            coeffs: self.coeffs.iter().map(|&c| emb.apply(c)).collect(),
            prec: self.prec,
        }
    }

    /// The principal part `Σ_{k<0} a_k t^k` as an exact series.
    pub fn principal_part(&self) -> Series {
        let n = (-self.val).max(0) as usize;
        Series::new(self.val, self.coeffs.iter().take(n).copied().collect(), EXACT)
    }
}

fn sat(a: i64, b: i64) -> i64 {
    a.saturating_add(b).min(EXACT)
}

/// Evaluates a polynomial with coefficients mapped through `emb` at `x`.
pub fn eval_poly(ctx: &FieldCtx, emb: &Embedding, p: &Poly, x: &Series) -> Series {
    let mut acc = Series::zero(EXACT);
    for &c in p.coeffs().iter().rev() {
        acc = acc.mul(ctx, x).add(ctx, &Series::constant(emb.apply(c)));
    }
    acc
}

pub fn eval_ratfun(ctx: &FieldCtx, emb: &Embedding, f: &RatFun, x: &Series) -> Result<Series> {
    let num = eval_poly(ctx, emb, f.num(), x);
    if f.den().is_one() {
        return Ok(num);
    }
    num.div(ctx, &eval_poly(ctx, emb, f.den(), x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f8() -> std::sync::Arc<FieldCtx> {
        FieldCtx::new(2, 3).unwrap()
    }

    #[test]
    fn geometric_inverse() {
        let k = f8();
        // 1 + t known to t^8 has inverse 1 + t + ... + t^7 in characteristic 2
        let s = Series::new(0, vec![Fe(1), Fe(1)], 8);
        let inv = s.inv(&k).unwrap();
        assert_eq!(inv.prec(), 8);
        for i in 0..8 {
            assert_eq!(inv.coeff(i).unwrap(), Fe(1));
        }
        assert!(inv.coeff(8).is_err());
    }

    #[test]
    fn precision_of_products() {
        let k = f8();
        let a = Series::new(-2, vec![Fe(3)], 5);
        let b = Series::new(1, vec![Fe(2), Fe(1)], 6);
        let c = a.mul(&k, &b);
        assert_eq!(c.valuation().unwrap(), -1);
        assert_eq!(c.prec(), 4);
    }

    #[test]
    fn reversion_roundtrip() {
        let k = f8();
        let s = Series::new(1, vec![Fe(3), Fe(5), Fe(0), Fe(7), Fe(1)], 20);
        let r = s.reversion(&k).unwrap();
        let id = s.compose(&k, &r).unwrap();
        assert_eq!(id.valuation().unwrap(), 1);
        for i in 1..id.prec() {
            assert_eq!(id.coeff(i).unwrap(), if i == 1 { Fe(1) } else { Fe(0) });
        }
        assert!(id.prec() >= 19);
    }

    #[test]
    fn valuation_of_rational_function() {
        let k = f8();
        let emb = Embedding::identity(8);
        // (x^2 + x + 1)/x at x = t has valuation -1
        let f = RatFun::new(&k, Poly::from_u32(&[1, 1, 1]), Poly::x()).unwrap();
        let x = Series::new(1, vec![Fe(1)], 16);
        let s = eval_ratfun(&k, &emb, &f, &x).unwrap();
        assert_eq!(s.valuation().unwrap(), -1);
        // at infinity x = 1/t: also -1
        let x = Series::new(-1, vec![Fe(1)], 16);
        assert_eq!(eval_ratfun(&k, &emb, &f, &x).unwrap().valuation().unwrap(), -1);
    }

    #[test]
    fn frobenius_matches_power() {
        let k = FieldCtx::new(2, 4).unwrap();
        let s = Series::new(-1, vec![Fe(3), Fe(7), Fe(9)], 10);
        let pow = s.pow(&k, 4);
        assert_eq!(s.frobenius(&k, 4).with_prec(pow.prec()), pow);
    }

    #[test]
    fn zero_to_precision_has_no_valuation() {
        let s = Series::new(0, vec![Fe(0), Fe(0)], 2);
        assert!(s.is_zero_to_prec());
        assert!(matches!(s.valuation(), Err(Error::Precision { .. })));
    }
}
