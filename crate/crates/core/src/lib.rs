//! Gauges (convex distance functions) in the plane: evaluation, symplectic
//! duals, orthogonality maps and asymmetry constants, with exact algorithms
//! on polygons and sampled ones on rounded polygons.

// `!(a < b)` is used on purpose where NaN must count as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymmetry;
pub mod cli;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod gauge;
pub mod generators;
pub mod geometry;
pub mod oracle;
pub mod orthogonality;

pub use asymmetry::{
    c_hat_out, c_in, c_out, constant_with, f_hat_out, f_in, f_out, find_common_orthogonal,
    find_common_orthogonal_inner, AsymmetryReport, ConstantOptions, Which,
};
pub use error::{GeomError, Result};
pub use exec::Exec;
pub use gauge::{dual_gauge_eval, gauge_eval, GaugeContext};
pub use geometry::{Body, ConvexPolygon, Mat2, RoundedPolygon, SymplecticForm, Vec2};
