use super::divisor::Divisor0;
use super::place::Place;
use super::ratfun::RatFun;
use crate::error::Result;
use crate::gf::{FieldCtx, Poly};

/// Basis of L(G) on F_q(x).
///
/// With H the product of h_P^{a_P} over positive finite coefficients and M
/// the product of h_P^{-a_P} over negative ones, L(G) consists of M·g/H with
/// deg g ≤ deg G, so the basis is M·x^i/H for 0 ≤ i ≤ deg G.
pub fn rr_basis_genus0(ctx: &FieldCtx, g: &Divisor0) -> Result<Vec<RatFun>> {
    let deg = g.degree();
    if deg < 0 {
        return Ok(Vec::new());
    }
    let mut h = Poly::one();
    let mut m = Poly::one();
    for (place, a) in g.terms() {
        if let Place::Finite { poly, .. } = place {
            let power = poly.pow(ctx, a.unsigned_abs());
            if a > 0 {
                h = h.mul(ctx, &power);
            } else {
                m = m.mul(ctx, &power);
            }
        }
    }
    (0..=deg as usize)
        .map(|i| RatFun::new(ctx, m.mul(ctx, &Poly::monomial(crate::gf::Fe::ONE, i)), h.clone()))
        .collect()
}

/// Coefficientwise membership test (f) ≥ −G over every place where either
/// side can be nonzero.
pub fn in_riemann_roch_space(ctx: &FieldCtx, f: &RatFun, g: &Divisor0) -> Result<bool> {
    if f.is_zero() {
        return Ok(true);
    }
    let div = super::divisor::principal_divisor(ctx, f)?;
    Ok(div.add(g)?.is_effective())
}
