use std::fmt;

use serde::{Deserialize, Serialize};

use super::field::{Embedding, Fe, FieldCtx};
use crate::error::{Error, Result};

/// Univariate polynomial, coefficients lowest degree first. The top
/// coefficient is nonzero unless the polynomial is zero (empty vector).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    coeffs: Vec<Fe>,
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c.0) {
                (0, v) => write!(f, "{v}")?,
                (1, 1) => write!(f, "x")?,
                (1, v) => write!(f, "{v}x")?,
                (k, 1) => write!(f, "x^{k}")?,
                (k, v) => write!(f, "{v}x^{k}")?,
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<Fe>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_u32(coeffs: &[u32]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Fe(c)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![Fe::ONE] }
    }

    pub fn constant(c: Fe) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `c·x^k`.
    pub fn monomial(c: Fe, k: usize) -> Self {
        let mut v = vec![Fe::ZERO; k + 1];
        v[k] = c;
        Poly::new(v)
    }

    pub fn x() -> Self {
        Poly::monomial(Fe::ONE, 1)
    }

    /// `x - a`.
    pub fn linear(ctx: &FieldCtx, a: Fe) -> Self {
        Poly::new(vec![ctx.neg(a), Fe::ONE])
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs.get(i).copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [Fe::ONE]
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the convention deg 0 = -1.
    pub fn deg_i(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn leading(&self) -> Fe {
        self.coeffs.last().copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Fe::ONE
    }

    pub fn add(&self, ctx: &FieldCtx, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| ctx.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, ctx: &FieldCtx, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| ctx.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn neg(&self, ctx: &FieldCtx) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| ctx.neg(c)).collect())
    }

    pub fn scale(&self, ctx: &FieldCtx, c: Fe) -> Poly {
        Poly::new(self.coeffs.iter().map(|&a| ctx.mul(a, c)).collect())
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Fe::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = ctx.add(out[i + j], ctx.mul(a, b));
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, ctx: &FieldCtx, mut e: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(ctx, &base);
            }
            base = base.mul(ctx, &base);
            e >>= 1;
        }
        acc
    }

    /// Euclidean division `(quotient, remainder)`.
    pub fn divmod(&self, ctx: &FieldCtx, divisor: &Poly) -> Result<(Poly, Poly)> {
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = ctx.inv(divisor.leading())?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quo = vec![Fe::ZERO; rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = rem[k];
            if c.is_zero() {
                continue;
            }
            let f = ctx.mul(c, lead_inv);
            quo[k - dd] = f;
            for (i, &d) in divisor.coeffs.iter().enumerate() {
                rem[k - dd + i] = ctx.sub(rem[k - dd + i], ctx.mul(f, d));
            }
        }
        rem.truncate(dd);
        Ok((Poly::new(quo), Poly::new(rem)))
    }

    pub fn rem(&self, ctx: &FieldCtx, divisor: &Poly) -> Result<Poly> {
        Ok(self.divmod(ctx, divisor)?.1)
    }

    /// Exact quotient; errors if the division leaves a remainder.
    pub fn exact_div(&self, ctx: &FieldCtx, divisor: &Poly) -> Result<Poly> {
        let (q, r) = self.divmod(ctx, divisor)?;
        if !r.is_zero() {
            return Err(Error::Inconsistency(format!("{divisor} does not divide {self}")));
        }
        Ok(q)
    }

    pub fn monic(&self, ctx: &FieldCtx) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = ctx.inv(self.leading()).expect("nonzero leading coefficient");
        self.scale(ctx, inv)
    }

    /// Monic greatest common divisor (zero only when both inputs are zero).
    pub fn gcd(&self, ctx: &FieldCtx, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(ctx, &b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic(ctx)
    }

    pub fn eval(&self, ctx: &FieldCtx, x: Fe) -> Fe {
        self.coeffs
            .iter()
            .rev()
            .fold(Fe::ZERO, |acc, &c| ctx.add(ctx.mul(acc, x), c))
    }

    pub fn derivative(&self, ctx: &FieldCtx) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| ctx.mul(ctx.from_int(i as i64), c))
                .collect(),
        )
    }

    /// `self(inner)`.
    pub fn compose(&self, ctx: &FieldCtx, inner: &Poly) -> Poly {
        self.coeffs.iter().rev().fold(Poly::zero(), |acc, &c| {
            acc.mul(ctx, inner).add(ctx, &Poly::constant(c))
        })
    }

    /// `self^e mod modulus`.
    pub fn pow_mod(&self, ctx: &FieldCtx, mut e: u64, modulus: &Poly) -> Result<Poly> {
        let mut base = self.rem(ctx, modulus)?;
        let mut acc = Poly::one().rem(ctx, modulus)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(ctx, &base).rem(ctx, modulus)?;
            }
            base = base.mul(ctx, &base).rem(ctx, modulus)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Maps coefficients through a field embedding.
    pub fn embed(&self, emb: &Embedding) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| emb.apply(c)).collect())
    }

    /// Roots in the coefficient field by exhaustive search.
    pub fn roots(&self, ctx: &FieldCtx) -> Vec<Fe> {
        ctx.elements().filter(|&a| self.eval(ctx, a).is_zero()).collect()
    }

    /// Multiplicity of `factor` (non-constant) in `self` (nonzero), with the cofactor.
    pub fn split_power(&self, ctx: &FieldCtx, factor: &Poly) -> (u32, Poly) {
        let mut k = 0;
        let mut cur = self.clone();
        loop {
            let (q, r) = cur.divmod(ctx, factor).expect("non-constant factor");
            if !r.is_zero() || cur.is_zero() {
                return (k, cur);
            }
            cur = q;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldCtx;

    #[test]
    fn gcd_over_f2() {
        let f2 = FieldCtx::new(2, 1).unwrap();
        let a = Poly::from_u32(&[1, 0, 1]);
        let b = Poly::from_u32(&[1, 1]);
        assert_eq!(a.gcd(&f2, &b), Poly::from_u32(&[1, 1]));
    }

    #[test]
    fn eval_in_f8() {
        let f8 = FieldCtx::new(2, 3).unwrap();
        let p = Poly::from_u32(&[1, 1, 1]);
        // 1 + 1 + 1 = 1 in characteristic 2
        assert_eq!(p.eval(&f8, Fe::ONE), Fe::ONE);
    }

    #[test]
    fn multiply_by_zero() {
        let f8 = FieldCtx::new(2, 3).unwrap();
        let p = Poly::from_u32(&[3, 5, 1]);
        assert!(p.mul(&f8, &Poly::zero()).is_zero());
    }

    #[test]
    fn divmod_by_zero_errors() {
        let f8 = FieldCtx::new(2, 3).unwrap();
        assert!(matches!(
            Poly::one().divmod(&f8, &Poly::zero()),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn divmod_reconstructs() {
        let f9 = FieldCtx::new(3, 2).unwrap();
        let a = Poly::from_u32(&[1, 2, 3, 4, 5, 6]);
        let b = Poly::from_u32(&[7, 0, 2]);
        let (q, r) = a.divmod(&f9, &b).unwrap();
        assert_eq!(q.mul(&f9, &b).add(&f9, &r), a);
        assert!(r.deg_i() < b.deg_i());
    }

    #[test]
    fn derivative_char_two() {
        let f2 = FieldCtx::new(2, 1).unwrap();
        // d/dx (x^3 + x^2 + x) = 3x^2 + 2x + 1 = x^2 + 1
        let p = Poly::from_u32(&[0, 1, 1, 1]);
        assert_eq!(p.derivative(&f2), Poly::from_u32(&[1, 0, 1]));
    }
}
