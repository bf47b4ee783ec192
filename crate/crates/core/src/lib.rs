//! Exact operator algebra for so(N)/sp(N) spin Calogero, Sutherland and
//! confined Calogero models.
//!
//! Arithmetic, operators and Lie tables are generic over [`Scalar`]; the
//! aliases below fix the scalar to exact rationals. The [`verify`] module
//! runs on [`Rational`] only.

pub mod arith;
pub mod dense;
pub mod lie;
pub mod models;
pub mod operator;
pub mod scalar;
pub mod spin_ops;
pub mod verify;

pub use scalar::{parse_rational, Rational, Scalar};

/// Polynomial over the rationals.
pub type RationalPoly = arith::Poly<Rational>;
/// Rational function over the rationals.
pub type RationalFunc = arith::RatFunc<Rational>;
/// Differential spin operator with rational coefficients.
pub type RationalOperator = operator::Operator<Rational>;
/// Structure constants and metric over the rationals.
pub type RationalTables = lie::LieTables<Rational>;
/// Model specification with rational couplings.
pub type RationalModelSpec = models::ModelSpec<Rational>;

/// Version string embedded in every report.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
