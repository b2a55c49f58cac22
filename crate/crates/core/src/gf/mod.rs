//! Small finite fields F_{p^m} and polynomials over them.

mod factor;
mod field;
mod poly;

pub use factor::{factor, is_irreducible, Factorization};
pub use field::{Embedding, Fe, FieldCtx};
pub use poly::Poly;
