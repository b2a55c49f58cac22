//! Exact construction and verification of iso-dual AG-codes on the rational
//! function field and their liftings through recursive towers.

pub mod error;
pub mod gf;
pub mod lifting;
pub mod linalg;
pub mod places;
pub mod codes;
pub mod rr;
pub mod series;
pub mod tower;

pub use error::{Error, Result};
