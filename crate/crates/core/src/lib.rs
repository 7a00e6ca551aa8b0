//! Symbolic-numeric exterior calculus on coordinate charts.

pub mod chains;
pub mod chart;
pub mod error;
pub mod expr;
pub mod finite_topology;
pub mod forms;
pub mod linalg;
pub mod pfaff;
pub mod systems;
pub mod thermo;

pub use chart::Chart;
pub use error::{Error, Result};
pub use expr::{parse_expr, Exclusion, Params, SamplingBox, ScalarExpr, ZeroTest, ZeroVerdict};
pub use forms::{DifferentialForm, FormVerdict, VectorField};
