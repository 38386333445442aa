//! Exact multivariate polynomial and rational-function arithmetic,
//! formal differentiation, evaluation, and exact linear-algebra rank.

pub mod matrix;
pub mod parse;
pub mod poly;
pub mod rational;
pub mod scalar;

pub use matrix::exact_rank;
pub use parse::parse_poly;
pub use poly::{MultiPoly, DEFAULT_DEGREE_CAP};
pub use rational::{rat_combine, rat_combine_capped, RationalFunc};
pub use scalar::{
    parse_scalar, scalar_frac, scalar_from_f64, scalar_int, scalar_to_f64, scalar_to_string,
    Scalar,
};
