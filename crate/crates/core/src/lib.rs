//! Global non-oscillation of linear ODEs with polynomial coefficients: Fuchs analysis,
//! exponential-polynomial zero bounds, concave-majorant box covers and a zero counter.

// Negated comparisons are used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod poly;
pub mod roots;
pub mod tolerances;

pub use error::{Error, Result};
pub use poly::{Complex, Polynomial};
pub use roots::{common_roots, poly_roots, Root, RootSet};
pub use tolerances::Tolerances;
pub mod path;
pub use path::{shortest_path_length, PathLength};
pub mod fuchs;
pub mod ode;
pub mod exppoly;
pub mod majorant;
pub mod report;
pub mod verify;

pub use report::{analyze, AnalysisReport};
