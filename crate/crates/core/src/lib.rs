//! Telescopers for differential forms whose coefficients satisfy a
//! rectangular system of linear PDEs with rational-function coefficients.
//!
//! The crate builds, from the bottom up:
//! exact multivariate arithmetic over Q ([`poly`], [`rational`]),
//! operators in one derivation over Q(t, x1..xn) and in the full Weyl
//! algebra ([`ore`]), D-finite function elements ([`dfinite`]),
//! a Lipshitz-style ansatz engine for annihilating operators ([`ansatz`]),
//! differential forms and the parametrized exactness recursion
//! ([`forms`], [`poincare`]), separability tests for operators with a
//! parameter ([`separability`]), and a user-facing pipeline with a text
//! parser, JSON interchange and a CLI ([`frontend`]).

pub mod ansatz;
pub mod dfinite;
pub mod error;
pub mod forms;
pub mod frontend;
pub mod linalg;
pub mod ore;
pub mod poincare;
pub mod poly;
pub mod rational;
pub mod separability;
pub mod unipoly;

pub use error::{Error, Result};
pub use ore::OreOperator;
pub use poly::MultiPoly;
pub use rational::RationalFunction;
