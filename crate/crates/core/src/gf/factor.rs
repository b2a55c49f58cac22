//! Factorization over F_q: square-free decomposition, distinct-degree
//! splitting through gcd(x^{q^i} - x, f), then equal-degree splitting.
//! Linear factors are found by exhaustive root search, higher equal-degree
//! blocks by Cantor–Zassenhaus with a fixed seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::{Fe, FieldCtx};
use super::poly::Poly;
use crate::error::{Error, Result};

const SPLIT_SEED: u64 = 0x1503_2024;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    /// Leading coefficient of the input.
    pub unit: Fe,
    /// Monic irreducible factors with multiplicities, sorted.
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    pub fn expand(&self, ctx: &FieldCtx) -> Poly {
        self.factors
            .iter()
            .fold(Poly::constant(self.unit), |acc, (f, m)| acc.mul(ctx, &f.pow(ctx, *m as u64)))
    }

    pub fn is_irreducible(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }
}

pub fn factor(ctx: &FieldCtx, f: &Poly) -> Result<Factorization> {
    if f.is_zero() {
        return Err(Error::Argument("cannot factor the zero polynomial".into()));
    }
    let unit = f.leading();
    let monic = f.monic(ctx);
    let mut rng = ChaCha8Rng::seed_from_u64(SPLIT_SEED);
    let mut factors = Vec::new();
    for (sqf, mult) in squarefree(ctx, &monic) {
        for (block, d) in distinct_degree(ctx, &sqf) {
            for irr in equal_degree(ctx, &block, d, &mut rng) {
                factors.push((irr, mult));
            }
        }
    }
    factors.sort_by(|a, b| {
        (a.0.degree(), a.0.coeffs()).cmp(&(b.0.degree(), b.0.coeffs()))
    });
    // merge duplicates that can arise from the p-th root recursion
    let mut merged: Vec<(Poly, u32)> = Vec::new();
    for (p, m) in factors {
        match merged.last_mut() {
            Some((lp, lm)) if *lp == p => *lm += m,
            _ => merged.push((p, m)),
        }
    }
    Ok(Factorization { unit, factors: merged })
}

pub fn is_irreducible(ctx: &FieldCtx, f: &Poly) -> bool {
    f.degree().is_some_and(|d| d >= 1) && factor(ctx, f).map(|fa| fa.is_irreducible()).unwrap_or(false)
}

/// Square-free decomposition of a monic polynomial in characteristic p.
fn squarefree(ctx: &FieldCtx, f: &Poly) -> Vec<(Poly, u32)> {
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let fp = f.derivative(ctx);
    let mut c = f.gcd(ctx, &fp);
    let mut w = f.exact_div(ctx, &c).expect("gcd divides");
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(ctx, &c);
        let fac = w.exact_div(ctx, &y).expect("gcd divides");
        if !fac.is_one() {
            out.push((fac, i));
        }
        w = y.clone();
        c = c.exact_div(ctx, &y).expect("gcd divides");
        i += 1;
    }
    if !c.is_one() {
        let p = ctx.characteristic() as usize;
        let root = Poly::new(
            (0..=c.degree().unwrap() / p)
                .map(|j| ctx.frobenius_root(c.coeff(j * p), 1))
                .collect(),
        );
        for (g, m) in squarefree(ctx, &root) {
            out.push((g, m * p as u32));
        }
    }
    out
}

/// Splits a square-free monic polynomial into blocks whose irreducible
/// factors share a degree.
fn distinct_degree(ctx: &FieldCtx, f: &Poly) -> Vec<(Poly, usize)> {
    let q = ctx.order() as u64;
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = Poly::x();
    let mut h = x.clone();
    let mut d = 0;
    while rest.degree().unwrap_or(0) >= 2 * (d + 1) {
        d += 1;
        h = h.pow_mod(ctx, q, &rest).expect("nonzero modulus");
        let g = h.sub(ctx, &x).gcd(ctx, &rest);
        if !g.is_one() {
            out.push((g.clone(), d));
            rest = rest.exact_div(ctx, &g).expect("gcd divides");
            h = h.rem(ctx, &rest).expect("nonzero modulus");
        }
    }
    if let Some(deg) = rest.degree() {
        if deg > 0 {
            out.push((rest, deg));
        }
    }
    out
}

fn equal_degree(ctx: &FieldCtx, f: &Poly, d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    let n = f.degree().unwrap_or(0);
    if n == d {
        return vec![f.clone()];
    }
    if d == 1 {
        return f.roots(ctx).into_iter().map(|r| Poly::linear(ctx, r)).collect();
    }
    loop {
        let a = Poly::new((0..n).map(|_| Fe(rng.gen_range(0..ctx.order()))).collect());
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let g = a.gcd(ctx, f);
        let candidate = if !g.is_one() {
            g
        } else {
            splitting_map(ctx, &a, f, d).gcd(ctx, f)
        };
        let cd = candidate.degree().unwrap_or(0);
        if cd > 0 && cd < n {
            let other = f.exact_div(ctx, &candidate).expect("gcd divides");
            let mut out = equal_degree(ctx, &candidate, d, rng);
            out.extend(equal_degree(ctx, &other, d, rng));
            return out;
        }
    }
}

/// Odd characteristic: a^((q^d - 1)/2) - 1. Characteristic 2: the absolute
/// trace a + a^2 + ... + a^(2^(kd - 1)).
fn splitting_map(ctx: &FieldCtx, a: &Poly, f: &Poly, d: usize) -> Poly {
    let q = ctx.order() as u64;
    if ctx.characteristic() == 2 {
        let steps = ctx.degree() as usize * d;
        let mut acc = Poly::zero();
        let mut cur = a.rem(ctx, f).unwrap();
        for _ in 0..steps {
            acc = acc.add(ctx, &cur);
            cur = cur.mul(ctx, &cur).rem(ctx, f).unwrap();
        }
        acc
    } else {
        // a^(1 + q + ... + q^(d-1)) then ^((q-1)/2)
        let mut cur = a.rem(ctx, f).unwrap();
        let mut acc = cur.clone();
        for _ in 1..d {
            cur = cur.pow_mod(ctx, q, f).unwrap();
            acc = acc.mul(ctx, &cur).rem(ctx, f).unwrap();
        }
        acc.pow_mod(ctx, (q - 1) / 2, f).unwrap().sub(ctx, &Poly::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f8_quadratic_splits() {
        let f8 = FieldCtx::new(2, 3).unwrap();
        // z^2 + z + 6
        let f = Poly::from_u32(&[6, 1, 1]);
        let fa = factor(&f8, &f).unwrap();
        assert_eq!(
            fa.factors,
            vec![(Poly::from_u32(&[2, 1]), 1), (Poly::from_u32(&[3, 1]), 1)]
        );
        // oracle: expand back, and 3^2 + 3 = 6
        assert_eq!(fa.expand(&f8), f);
        assert_eq!(f8.add(f8.mul(Fe(3), Fe(3)), Fe(3)), Fe(6));
    }

    #[test]
    fn f2_irreducible_quadratic() {
        let f2 = FieldCtx::new(2, 1).unwrap();
        assert!(is_irreducible(&f2, &Poly::from_u32(&[1, 1, 1])));
    }

    #[test]
    fn f4_splits_x2_x_1() {
        let f4 = FieldCtx::new(2, 2).unwrap();
        let f = Poly::from_u32(&[1, 1, 1]);
        let fa = factor(&f4, &f).unwrap();
        assert_eq!(fa.factors.len(), 2);
        // roots are the two elements outside F_2
        for (lin, _) in &fa.factors {
            let root = lin.coeff(0);
            assert!(root.0 >= 2);
            assert!(f.eval(&f4, root).is_zero());
        }
    }

    #[test]
    fn zero_polynomial_rejected() {
        let f2 = FieldCtx::new(2, 1).unwrap();
        assert!(matches!(factor(&f2, &Poly::zero()), Err(Error::Argument(_))));
    }

    #[test]
    fn repeated_factors_and_pth_powers() {
        let f9 = FieldCtx::new(3, 2).unwrap();
        // (x + 1)^3 (x^2 + 1)^2 (x + 2)
        let a = Poly::from_u32(&[1, 1]).pow(&f9, 3);
        let b = Poly::from_u32(&[1, 0, 1]).pow(&f9, 2);
        let c = Poly::from_u32(&[2, 1]);
        let f = a.mul(&f9, &b).mul(&f9, &c).scale(&f9, Fe(5));
        let fa = factor(&f9, &f).unwrap();
        assert_eq!(fa.expand(&f9), f);
        assert_eq!(fa.unit, Fe(5));
    }
}
