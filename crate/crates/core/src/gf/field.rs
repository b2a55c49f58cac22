use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of a small finite field, stored as the little-endian base-p
/// digit encoding of its polynomial-basis coordinates.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Fe(pub u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Built-in moduli. Every field the toolkit exposes by name comes from here so
/// that generator matrices are reproducible bit for bit.
const MODULI: &[(u32, u32, &[u32])] = &[
    (2, 1, &[0, 1]),
    (3, 1, &[0, 1]),
    (5, 1, &[0, 1]),
    (7, 1, &[0, 1]),
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (3, 2, &[1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
];

/// Largest field the internal residue-field builder will construct.
const MAX_ORDER: u64 = 1 << 16;

enum Addition {
    Xor,
    Table(Vec<u16>),
    Digits,
}

/// Arithmetic context for F_{p^m} = F_p[w]/(modulus).
pub struct FieldCtx {
    p: u32,
    degree: u32,
    order: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    addition: Addition,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}(modulus={:?})", self.order, self.modulus)
    }
}

/// An injective field homomorphism given as a lookup table on the source
/// encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    table: Vec<Fe>,
}

impl Embedding {
    pub fn identity(order: u32) -> Self {
        Embedding {
            table: (0..order).map(Fe).collect(),
        }
    }

    pub fn apply(&self, a: Fe) -> Fe {
        self.table[a.0 as usize]
    }

    pub fn source_order(&self) -> u32 {
        self.table.len() as u32
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Embedding) -> Embedding {
        Embedding {
            table: self.table.iter().map(|&a| other.apply(a)).collect(),
        }
    }
}

impl FieldCtx {
    /// Builds one of the built-in fields.
    pub fn new(p: u32, m: u32) -> Result<Arc<FieldCtx>> {
        let modulus = MODULI
            .iter()
            .find(|(tp, tm, _)| *tp == p && *tm == m)
            .map(|(_, _, md)| md.to_vec())
            .ok_or_else(|| {
                Error::Config(format!(
                    "no built-in modulus for F_{{{p}^{m}}}; supported: F_2, F_3, F_5, F_7, F_4, F_8, F_9, F_16"
                ))
            })?;
        Ok(Arc::new(Self::with_modulus(p, modulus)?))
    }

    /// Field for `q` elements from the built-in table.
    pub fn of_order(q: u32) -> Result<Arc<FieldCtx>> {
        for &(p, m, _) in MODULI {
            if p.pow(m) == q {
                return Self::new(p, m);
            }
        }
        Err(Error::Config(format!("no built-in field with {q} elements")))
    }

    /// Builds F_p[w]/(modulus) after checking the modulus is monic and
    /// irreducible by exhaustive trial division.
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<FieldCtx> {
        if !is_small_prime(p) {
            return Err(Error::Config(format!("characteristic {p} is not a supported prime")));
        }
        let degree = modulus.len().saturating_sub(1) as u32;
        if degree == 0 || *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::Config(format!("modulus {modulus:?} is not monic over F_{p}")));
        }
        let order64 = (p as u64).pow(degree);
        if order64 > MAX_ORDER {
            return Err(Error::Config(format!("field of order {order64} is too large")));
        }
        if !fp_is_irreducible(p, &modulus) {
            return Err(Error::Config(format!("modulus {modulus:?} is reducible over F_{p}")));
        }
        let order = order64 as u32;
        let slow = SlowMul { p, modulus: &modulus };

        // Search for a primitive element and fill the exp/log tables.
        let n = (order - 1) as usize;
        let mut exp = vec![0u32; 2 * n.max(1)];
        let mut log = vec![0u32; order as usize];
        let mut found = false;
        for g in 1..order {
            let mut x = 1u32;
            let mut k = 0usize;
            loop {
                exp[k] = x;
                k += 1;
                x = slow.mul(x, g);
                if x == 1 || k > n {
                    break;
                }
            }
            if k == n {
                found = true;
                break;
            }
        }
        debug_assert!(found || order == 2);
        if order == 2 {
            exp[0] = 1;
        }
        for i in 0..n {
            log[exp[i] as usize] = i as u32;
            exp[i + n] = exp[i];
        }

        let neg = (0..order)
            .map(|a| {
                let d = digits(a, p, degree);
                from_digits(&d.iter().map(|&x| (p - x) % p).collect::<Vec<_>>(), p)
            })
            .collect();

        let addition = if p == 2 {
            Addition::Xor
        } else if order <= 729 {
            let mut t = vec![0u16; (order * order) as usize];
            for a in 0..order {
                let da = digits(a, p, degree);
                for b in 0..order {
                    let db = digits(b, p, degree);
                    let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                    t[(a * order + b) as usize] = from_digits(&s, p) as u16;
                }
            }
            Addition::Table(t)
        } else {
            Addition::Digits
        };

        Ok(FieldCtx {
            p,
            degree,
            order,
            modulus,
            exp,
            log,
            neg,
            addition,
        })
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    /// Extension degree over the prime field.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn elem(&self, v: u32) -> Fe {
        assert!(v < self.order, "element {v} out of range for F_{}", self.order);
        Fe(v)
    }

    pub fn contains(&self, a: Fe) -> bool {
        a.0 < self.order
    }

    /// All elements in ascending encoding.
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.order).map(Fe)
    }

    /// The primitive element used for the log tables.
    pub fn generator(&self) -> Fe {
        Fe(self.exp[if self.order == 2 { 0 } else { 1 }])
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        match &self.addition {
            Addition::Xor => Fe(a.0 ^ b.0),
            Addition::Table(t) => Fe(t[(a.0 * self.order + b.0) as usize] as u32),
            Addition::Digits => {
                let da = digits(a.0, self.p, self.degree);
                let db = digits(b.0, self.p, self.degree);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
                Fe(from_digits(&s, self.p))
            }
        }
    }

    pub fn neg(&self, a: Fe) -> Fe {
        Fe(self.neg[a.0 as usize])
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        let s = self.log[a.0 as usize] + self.log[b.0 as usize];
        Fe(self.exp[s as usize])
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let n = self.order - 1;
        let l = self.log[a.0 as usize];
        Ok(Fe(self.exp[((n - l) % n) as usize]))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return Fe::ONE;
        }
        if a.0 == 0 {
            return Fe::ZERO;
        }
        let n = (self.order - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        Fe(self.exp[((l * (e % n)) % n) as usize])
    }

    /// Integer power allowing negative exponents.
    pub fn powi(&self, a: Fe, e: i64) -> Result<Fe> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(self.inv(a)?, e.unsigned_abs()))
        }
    }

    /// Image of a prime-field integer.
    pub fn from_int(&self, c: i64) -> Fe {
        Fe(c.rem_euclid(self.p as i64) as u32)
    }

    /// The unique `r` with `r^(p^k) = a`.
    pub fn frobenius_root(&self, a: Fe, k: u32) -> Fe {
        let k = k % self.degree;
        let e = (self.p as u64).pow((self.degree - k) % self.degree);
        self.pow(a, e)
    }

    /// Trace from this field down to its subfield with p^sub_degree elements.
    pub fn trace(&self, a: Fe, sub_degree: u32) -> Result<Fe> {
        if sub_degree == 0 || !self.degree.is_multiple_of(sub_degree) {
            return Err(Error::Argument(format!(
                "subfield degree {sub_degree} does not divide {}",
                self.degree
            )));
        }
        let step = (self.p as u64).pow(sub_degree);
        let mut acc = Fe::ZERO;
        let mut x = a;
        for _ in 0..self.degree / sub_degree {
            acc = self.add(acc, x);
            x = self.pow(x, step);
        }
        Ok(acc)
    }

    /// Builds the degree-`f` extension of this field. The new modulus is the
    /// smallest monic irreducible polynomial over F_p of the combined degree,
    /// and the embedding sends `w` to the smallest root of this field's modulus.
    pub fn extension(&self, f: u32) -> Result<(Arc<FieldCtx>, Embedding)> {
        if f == 0 {
            return Err(Error::Argument("extension degree 0".into()));
        }
        if f == 1 {
            let same = FieldCtx::with_modulus(self.p, self.modulus.clone())?;
            return Ok((Arc::new(same), Embedding::identity(self.order)));
        }
        let big_degree = self.degree * f;
        if (self.p as u64).pow(big_degree) > MAX_ORDER {
            return Err(Error::Unsupported(format!(
                "residue field F_{{{}^{}}} exceeds the supported size",
                self.p, big_degree
            )));
        }
        let modulus = smallest_irreducible(self.p, big_degree);
        let big = Arc::new(FieldCtx::with_modulus(self.p, modulus)?);
        // Find a root of our modulus in the big field.
        let root = big
            .elements()
            .find(|&r| {
                let mut acc = Fe::ZERO;
                for &c in self.modulus.iter().rev() {
                    acc = big.add(big.mul(acc, r), Fe(c));
                }
                acc.is_zero()
            })
            .ok_or_else(|| Error::Inconsistency("no root of the base modulus in extension".into()))?;
        let table = self
            .elements()
            .map(|a| {
                let d = digits(a.0, self.p, self.degree);
                let mut acc = Fe::ZERO;
                for &c in d.iter().rev() {
                    acc = big.add(big.mul(acc, root), Fe(c));
                }
                acc
            })
            .collect();
        Ok((big, Embedding { table }))
    }

    /// Embedding of this field's subfield F_{p^sub} given by a smaller
    /// context `sub`, found by matching a root of `sub`'s modulus.
    pub fn embedding_from(&self, sub: &FieldCtx) -> Result<Embedding> {
        if sub.p != self.p || !self.degree.is_multiple_of(sub.degree) {
            return Err(Error::Argument("not a subfield".into()));
        }
        let root = self
            .elements()
            .find(|&r| {
                let mut acc = Fe::ZERO;
                for &c in sub.modulus.iter().rev() {
                    acc = self.add(self.mul(acc, r), Fe(c));
                }
                acc.is_zero()
            })
            .ok_or_else(|| Error::Inconsistency("subfield modulus has no root".into()))?;
        let table = sub
            .elements()
            .map(|a| {
                let d = digits(a.0, sub.p, sub.degree);
                let mut acc = Fe::ZERO;
                for &c in d.iter().rev() {
                    acc = self.add(self.mul(acc, root), Fe(c));
                }
                acc
            })
            .collect();
        Ok(Embedding { table })
    }
}

fn is_small_prime(p: u32) -> bool {
    matches!(p, 2 | 3 | 5 | 7)
}

fn digits(mut a: u32, p: u32, n: u32) -> Vec<u32> {
    let mut d = Vec::with_capacity(n as usize);
    for _ in 0..n {
        d.push(a % p);
        a /= p;
    }
    d
}

fn from_digits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

struct SlowMul<'a> {
    p: u32,
    modulus: &'a [u32],
}

impl SlowMul<'_> {
    fn mul(&self, a: u32, b: u32) -> u32 {
        let n = self.modulus.len() - 1;
        let da = digits(a, self.p, n as u32);
        let db = digits(b, self.p, n as u32);
        let mut prod = vec![0u32; 2 * n];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        for k in (n..2 * n).rev() {
            let c = prod[k];
            if c != 0 {
                for (i, &m) in self.modulus.iter().enumerate() {
                    let idx = k - n + i;
                    prod[idx] = (prod[idx] + self.p * self.p - c * m % self.p) % self.p;
                }
            }
        }
        from_digits(&prod[..n], self.p)
    }
}

/// Remainder of `a` modulo monic `m` over F_p, raw coefficient vectors.
fn fp_rem(p: u32, a: &[u32], m: &[u32]) -> Vec<u32> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if c != 0 {
            for (i, &mi) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p * p - c * mi % p) % p;
            }
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

/// Exhaustive irreducibility test: no monic factor of degree ≤ n/2.
fn fp_is_irreducible(p: u32, f: &[u32]) -> bool {
    let n = f.len() - 1;
    if n == 1 {
        return true;
    }
    for d in 1..=n / 2 {
        let count = p.pow(d as u32);
        for low in 0..count {
            let mut cand = digits(low, p, d as u32);
            cand.push(1);
            if fp_rem(p, f, &cand).is_empty() {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, n: u32) -> Vec<u32> {
    let count = p.pow(n);
    for low in 0..count {
        let mut cand = digits(low, p, n);
        cand.push(1);
        if fp_is_irreducible(p, &cand) {
            return cand;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Log/antilog oracle: powers of w built by shifting and reducing.
    fn antilog_by_shifting(p: u32, modulus: &[u32]) -> Vec<u32> {
        let n = modulus.len() - 1;
        let q = p.pow(n as u32);
        let mut out = vec![];
        let mut cur = vec![0u32; n];
        cur[0] = 1;
        for _ in 0..q {
            out.push(from_digits(&cur, p));
            // multiply by w
            let top = cur[n - 1];
            for i in (1..n).rev() {
                cur[i] = cur[i - 1];
            }
            cur[0] = 0;
            for i in 0..n {
                cur[i] = (cur[i] + p * p - top * modulus[i] % p) % p;
            }
        }
        out
    }

    #[test]
    fn f8_products_match_shift_oracle() {
        let f = FieldCtx::new(2, 3).unwrap();
        let powers = antilog_by_shifting(2, &[1, 1, 0, 1]);
        // w = 2, w^2 = 4, w^3 must equal the oracle's third power
        assert_eq!(powers[3], 3);
        assert_eq!(f.mul(Fe(2), Fe(4)), Fe(powers[3]));
        for i in 0..7 {
            for j in 0..7 {
                assert_eq!(f.mul(Fe(powers[i]), Fe(powers[j])), Fe(powers[(i + j) % 7]));
            }
        }
    }

    #[test]
    fn f16_products_match_shift_oracle() {
        let f = FieldCtx::new(2, 4).unwrap();
        let powers = antilog_by_shifting(2, &[1, 1, 0, 0, 1]);
        assert_eq!(powers[4], 3);
        assert_eq!(f.mul(Fe(8), Fe(2)), Fe(3));
        for i in 0..15 {
            for j in 0..15 {
                assert_eq!(f.mul(Fe(powers[i]), Fe(powers[j])), Fe(powers[(i + j) % 15]));
            }
        }
    }

    #[test]
    fn unsupported_pair_is_configuration_error() {
        let err = FieldCtx::new(2, 5).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(FieldCtx::new(11, 1).is_err());
    }

    #[test]
    fn reducible_modulus_rejected() {
        // w^2 + 1 = (w + 1)^2 over F_2
        assert!(FieldCtx::with_modulus(2, vec![1, 0, 1]).is_err());
        // w^2 + 1 is irreducible over F_3
        assert!(FieldCtx::with_modulus(3, vec![1, 0, 1]).is_ok());
    }

    #[test]
    fn inverse_of_one_and_zero() {
        for (p, m) in [(2, 2), (2, 3), (3, 2), (2, 4), (5, 1), (7, 1)] {
            let f = FieldCtx::new(p, m).unwrap();
            assert_eq!(f.inv(Fe::ONE).unwrap(), Fe::ONE);
            assert!(matches!(f.inv(Fe::ZERO), Err(Error::DivisionByZero)));
        }
    }

    #[test]
    fn trace_f8_to_f2() {
        let f = FieldCtx::new(2, 3).unwrap();
        // brute-force Frobenius orbit sums
        let orbit = |a: Fe| {
            let a2 = f.mul(a, a);
            let a4 = f.mul(a2, a2);
            f.add(f.add(a, a2), a4)
        };
        assert_eq!(orbit(Fe(2)), Fe(0));
        assert_eq!(f.trace(Fe(2), 1).unwrap(), Fe(0));
        assert_eq!(f.trace(Fe(1), 1).unwrap(), Fe(1));
        assert_eq!(orbit(Fe(6)), Fe(0));
        assert_eq!(f.trace(Fe(6), 1).unwrap(), Fe(0));
        assert!(f.trace(Fe(1), 2).is_err());
    }

    #[test]
    fn enumerate_is_ascending_and_complete() {
        let f8 = FieldCtx::new(2, 3).unwrap();
        assert_eq!(f8.elements().map(|e| e.0).collect::<Vec<_>>(), (0..8).collect::<Vec<_>>());
        assert_eq!(FieldCtx::new(2, 4).unwrap().elements().count(), 16);
        let f4 = FieldCtx::new(2, 2).unwrap();
        assert_eq!(f4.elements().map(|e| e.0).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn extension_embeds_homomorphically() {
        let f8 = FieldCtx::new(2, 3).unwrap();
        let (f64_, emb) = f8.extension(2).unwrap();
        assert_eq!(f64_.order(), 64);
        for a in f8.elements() {
            for b in f8.elements() {
                assert_eq!(emb.apply(f8.mul(a, b)), f64_.mul(emb.apply(a), emb.apply(b)));
                assert_eq!(emb.apply(f8.add(a, b)), f64_.add(emb.apply(a), emb.apply(b)));
            }
        }
        let f9 = FieldCtx::new(3, 2).unwrap();
        let (f729, emb9) = f9.extension(3).unwrap();
        assert_eq!(f729.order(), 729);
        for a in f9.elements() {
            for b in f9.elements() {
                assert_eq!(emb9.apply(f9.mul(a, b)), f729.mul(emb9.apply(a), emb9.apply(b)));
                assert_eq!(emb9.apply(f9.add(a, b)), f729.add(emb9.apply(a), emb9.apply(b)));
            }
        }
    }

    #[test]
    fn frobenius_root_inverts_power() {
        let f = FieldCtx::new(2, 4).unwrap();
        for a in f.elements() {
            let r = f.frobenius_root(a, 2);
            assert_eq!(f.pow(r, 4), a);
        }
    }
}
