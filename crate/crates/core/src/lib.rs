//! Constructive factorizations of weighted Lebesgue, Cesàro and Copson
//! spaces on `(0, ∞)`, with the weight-class constants that bound them.
//!
//! Everything works on piecewise-constant functions over a finite grid.
//! Integrals against power weights are exact where a closed form exists and
//! use per-cell Gauss–Legendre quadrature otherwise.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod factorize;
pub mod grid;
pub mod level;
pub mod norms;
pub mod quadrature;
pub mod sample;
pub mod sweep;
pub mod verify;
pub mod wclass;
pub mod weights;

pub use error::{Error, Result};
pub use factorize::{
    factorize_cesaro, factorize_cesaro_l1, factorize_copson, factorize_copson_l1,
    factorize_lebesgue, FactorizationReport, Space, DEFAULT_SLACK, LEBESGUE_SLACK,
};
pub use grid::{combine, Combine, CumulativeFunction, Grid, StepFunction};
pub use level::{concave_majorant_oracle, level_function, LevelDecomposition, LevelInterval};
pub use norms::{
    cesaro_norm, copson_norm, dp_norm, gp_norm, gp_norm_on_support, gstar_norm, hardy_p, hardy_q,
    lp_norm,
};
pub use quadrature::QuadratureSpec;
pub use wclass::{
    dual_class_constants, dual_l1_class_constants, hardy_class_constants, hardy_factor,
    hardy_l1_class_constants, ClassConstants, ClassKind,
};
pub use weights::{conjugate_exponent, Weight};
