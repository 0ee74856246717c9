//! Exact segmented isotonic regression.
//!
//! Given points `(p_i, x_i)`, find the non-increasing step function with at
//! most `K` steps (optionally each at least `step_min` long) that minimizes
//! the squared, absolute or pinball error. The fit is computed as a
//! resource-constrained shortest path over the sorted price coordinates,
//! accelerated by an isotonic-regression-plus-clustering upper bound and
//! isotonic or cardinality-constrained lower bounds.
//!
//! ```
//! use stepfit::{solve, Dataset, DuplicatePolicy, FitConfig};
//!
//! let data = Dataset::from_rows(
//!     [(1.0, 4.0), (2.0, 4.0), (3.0, 2.0), (4.0, 2.0), (5.0, 1.0)],
//!     DuplicatePolicy::Reject,
//! )?;
//! let fit = solve(&data, &FitConfig::new(2))?;
//! assert_eq!(fit.curve.values()[0], 4.0);
//! assert!((fit.objective - 2.0 / 3.0).abs() < 1e-12);
//! # Ok::<(), stepfit::Error>(())
//! ```

pub mod cli;
pub mod clustering;
pub mod config;
pub mod cost;
pub mod curve;
pub mod data;
pub mod datagen;
pub mod error;
pub mod isotonic;
pub mod oracle;
mod order;
pub mod report;
pub mod solver;

pub use clustering::{adjacency_cluster, build_upper_bound, AdjacentPartition};
pub use config::FitConfig;
pub use cost::{CostModel, CostTables};
pub use curve::{curve_error, Block, StepCurve};
pub use data::{DataPoint, Dataset, DuplicatePolicy};
pub use datagen::{generate, true_curve, GenConfig, Sampling};
pub use error::{Error, Result};
pub use isotonic::{pava_fit, suffix_lb_table, IsotonicFit};
pub use oracle::{brute_force, OracleResult};
pub use report::FitReport;
pub use solver::{
    cardinality_sp_lb, dominates, fit, gap, solve, try_relaxed_first, BoundsReport, FitResult,
    SearchStats, Status, Strategy,
};
