use serde::Serialize;

use super::descriptor::TowerDescriptor;
use crate::error::{Error, Result};
use crate::gf::{Fe, FieldCtx, Poly};
use crate::places::RatFun;
use crate::series::{eval_ratfun, Series};

/// A function of F_1 = F_0[z]/(z^q + z - u(x)) as Σ f_j(x) z^j, j < q.
/// Level-0 functions have a single coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FunctionRep {
    pub level: usize,
    pub coeffs: Vec<RatFun>,
}

impl FunctionRep {
    pub fn base(f: RatFun) -> Self {
        FunctionRep {
            level: 0,
            coeffs: vec![f],
        }
    }

    /// f(x)·z^j at level 1.
    pub fn term(q: u32, f: RatFun, j: usize) -> Self {
        let mut coeffs = vec![RatFun::zero(); q as usize];
        coeffs[j] = f;
        FunctionRep { level: 1, coeffs }
    }

    pub fn constant_level1(q: u32, c: RatFun) -> Self {
        FunctionRep::term(q, c, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(RatFun::is_zero)
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.level != o.level || self.coeffs.len() != o.coeffs.len() {
            return Err(Error::Argument("function representations at different levels".into()));
        }
        Ok(())
    }

    pub fn add(&self, ctx: &FieldCtx, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(FunctionRep {
            level: self.level,
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.add(ctx, b)).collect(),
        })
    }

    pub fn scale(&self, ctx: &FieldCtx, c: &RatFun) -> Self {
        FunctionRep {
            level: self.level,
            coeffs: self.coeffs.iter().map(|a| a.mul(ctx, c)).collect(),
        }
    }

    /// Product modulo z^q + z - u.
    pub fn mul(&self, tower: &TowerDescriptor, o: &Self) -> Result<Self> {
        self.check(o)?;
        let ctx = &tower.field;
        let n = self.coeffs.len();
        if n == 1 {
            return Ok(FunctionRep::base(self.coeffs[0].mul(ctx, &o.coeffs[0])));
        }
        let mut wide = vec![RatFun::zero(); 2 * n - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                wide[i + j] = wide[i + j].add(ctx, &a.mul(ctx, b));
            }
        }
        // z^k = z^{k-q}(u - z)
        for k in (n..2 * n - 1).rev() {
            let c = std::mem::replace(&mut wide[k], RatFun::zero());
            if c.is_zero() {
                continue;
            }
            wide[k - n] = wide[k - n].add(ctx, &c.mul(ctx, &tower.u));
            wide[k - n + 1] = wide[k - n + 1].sub(ctx, &c);
        }
        wide.truncate(n);
        Ok(FunctionRep {
            level: 1,
            coeffs: wide,
        })
    }

    /// The conjugate under z ↦ z + v for v in the kernel of z^q + z.
    pub fn conjugate(&self, ctx: &FieldCtx, v: Fe) -> Self {
        let n = self.coeffs.len();
        let mut out = vec![RatFun::zero(); n];
        // (z + v)^j = Σ binom(j, i) v^{j-i} z^i
        for (j, f) in self.coeffs.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            for (i, slot) in out.iter_mut().enumerate().take(j + 1) {
                let b = binomial_mod(j as u64, i as u64, ctx.characteristic() as u64);
                if b == 0 {
                    continue;
                }
                let c = ctx.mul(ctx.from_int(b as i64), ctx.pow(v, (j - i) as u64));
                *slot = slot.add(ctx, &f.scale(ctx, c));
            }
        }
        FunctionRep {
            level: self.level,
            coeffs: out,
        }
    }

    /// N_{F_1/F_0}, the product of all conjugates.
    pub fn norm(&self, tower: &TowerDescriptor) -> Result<RatFun> {
        if self.level == 0 {
            return Ok(self.coeffs[0].clone());
        }
        let ctx = &tower.field;
        let mut acc = FunctionRep::constant_level1(tower.q, RatFun::one());
        for &v in &tower.kernel {
            acc = acc.mul(tower, &self.conjugate(ctx, v))?;
        }
        if acc.coeffs[1..].iter().any(|c| !c.is_zero()) {
            return Err(Error::Inconsistency("norm is not in the base field".into()));
        }
        Ok(acc.coeffs[0].clone())
    }

    /// p(self) for a polynomial over the constant field.
    pub fn apply_poly(&self, tower: &TowerDescriptor, p: &Poly) -> Result<Self> {
        let n = self.coeffs.len();
        let constant = |c: Fe| {
            let mut coeffs = vec![RatFun::zero(); n];
            coeffs[0] = RatFun::constant(c);
            FunctionRep {
                level: self.level,
                coeffs,
            }
        };
        let mut acc = constant(Fe::ZERO);
        for &c in p.coeffs().iter().rev() {
            acc = acc.mul(tower, self)?.add(&tower.field, &constant(c))?;
        }
        Ok(acc)
    }

    /// Expansion given series for x and (at level 1) z in the same
    /// uniformizer.
    pub fn series(
        &self,
        ctx: &FieldCtx,
        emb: &crate::gf::Embedding,
        x: &Series,
        z: Option<&Series>,
    ) -> Result<Series> {
        let mut acc = Series::zero(crate::series::EXACT);
        let mut zpow = Series::constant(Fe::ONE);
        for (j, f) in self.coeffs.iter().enumerate() {
            if j > 0 {
                let z = z.ok_or_else(|| Error::Argument("level-1 function needs a z expansion".into()))?;
                zpow = zpow.mul(ctx, z);
            }
            if f.is_zero() {
                continue;
            }
            acc = acc.add(ctx, &eval_ratfun(ctx, emb, f, x)?.mul(ctx, &zpow));
        }
        Ok(acc)
    }
}

/// Binomial coefficient modulo a prime p, by Lucas' theorem.
fn binomial_mod(mut n: u64, mut k: u64, p: u64) -> u64 {
    let mut acc = 1;
    while n > 0 || k > 0 {
        let (a, b) = (n % p, k % p);
        if b > a {
            return 0;
        }
        let mut c = 1u64;
        for i in 0..b {
            c = c * (a - i) / (i + 1);
        }
        acc = acc * (c % p) % p;
        n /= p;
        k /= p;
    }
    acc
}
