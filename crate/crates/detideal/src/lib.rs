//! Exact arithmetic for determinantal ideals: membership, degeneration-based
//! reductions, algebraic branching programs and related derandomization tools.

#![allow(clippy::needless_range_loop)] // matrix code indexes rows and columns together

pub mod abp;
pub mod acceptance;
pub mod degeneration;
pub mod error;
pub mod hasse;
pub mod ips;
pub mod laurent;
pub mod linalg;
pub mod oracle;
pub mod order;
pub mod pfaffian;
pub mod pit;
pub mod poly;
pub mod random;
pub mod scalar;
pub mod straighten;
pub mod tableaux;

pub use error::{Error, Result};
pub use laurent::Laurent;
pub use poly::{EpsScalar, Family, Monomial, Poly, Polynomial, VarId};
pub use scalar::{Domain, Rat, Ring};

/// Polynomials with plain rational coefficients.
pub type QPoly = Polynomial<Rat>;
