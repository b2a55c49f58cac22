//! Places, valuations, divisors and Riemann–Roch spaces on F_q(x).

mod divisor;
mod place;
mod ratfun;
mod riemann_roch;

pub use divisor::{principal_divisor, Divisor, Divisor0};
pub use place::{rational_places, Place, PlaceRepr};
pub use ratfun::RatFun;
pub use riemann_roch::{in_riemann_roch_space, rr_basis_genus0};
