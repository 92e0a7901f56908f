//! Numerical verification of non-Berwaldian Landsberg metrics.
//!
//! The crate is layered bottom-up:
//!
//! - [`jet`]: truncated multivariate Taylor arithmetic (forward-mode AD to
//!   order 5 in the fiber variables and order 1 in the base variables).
//! - [`geometry`]: metric tensor, geodesic spray, Berwald and Landsberg
//!   tensors and the horizontal differential of an arbitrary Finsler function.
//! - [`alphabeta`]: the (α,β)-metric spray formula over a conformally flat
//!   Riemannian background `α = f(x¹)·√((y¹)² + c_λμ y^λ y^μ)`, `β = f(x¹)·y¹`.
//! - [`catalog`]: the four Landsberg classes, the Shen and Asanov families and
//!   the worked examples, each with its closed-form spray.
//! - [`verify`]: seeded sampling, residual aggregation and verdicts.
//! - [`expr`]: the expression language used to supply `f(x¹)`.

pub mod alphabeta;
pub mod catalog;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod jet;
pub mod linalg;
pub mod verify;

pub use alphabeta::{PhiFunction, QuadraticForm, RiemannSetup, ScalarFunction};
pub use catalog::{build_finsler, CatalogMetric, ClassId, ClassParams, ClosedFormSpray, MetricClassSpec};
pub use error::{Error, Result};
pub use expr::{parse_expr, Expr, ParseError};
pub use geometry::{ChartPoint, Direction, FinslerField, GeodesicSpray, PointTensors, SprayField};
pub use jet::{Caps, Group, MultiIndex, TaylorValue};
pub use verify::{classify, ClassificationReport, SamplePlan, ToleranceProfile, Verdict};
