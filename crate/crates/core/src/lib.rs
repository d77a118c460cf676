//! Angle sums of random polytopes: exact and quadrature-backed evaluation
//! of expected face numbers, Grassmann-angle sums, conic-intrinsic-volume
//! sums and internal/external angle sums for Gaussian polytopes, convex
//! hulls of exchangeable random walks, and Gaussian projections of
//! polyhedral fixtures, together with the Monte Carlo machinery to verify
//! every one of them by simulation.
//!
//! ```
//! use polyangles::harness::{run_experiment, ExperimentConfig, Model, Quantity};
//!
//! // The planar walk hull has exactly 2 H_n expected vertices; simulate
//! // a few hundred walks and compare.
//! let row = run_experiment(&ExperimentConfig {
//!     model: Model::Walk,
//!     n: 8,
//!     d: 2,
//!     j: 0,
//!     k: None,
//!     quantity: Quantity::FCount,
//!     trials: 400,
//!     samples_per_angle: 1,
//!     seed: 7,
//!     tol: 1e-10,
//! })
//! .unwrap();
//! assert_eq!(row.theory.exact_string(), "761/140"); // 2 H_8
//! assert!(row.z.unwrap().abs() < 4.0);
//! ```

pub mod combinatorics;
pub mod cones;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod lp;
pub mod models;
pub mod quad;
pub mod rng;
pub mod simplex_angles;
pub mod theory;
pub mod util;

pub use cones::{AngleEstimate, SubspaceBasis};
pub use error::{Error, Result};
pub use geometry::{Face, Facet, PolyCone, Polytope};
pub use harness::{ComparisonRow, ExperimentConfig, Model, Quantity};
pub use models::{Fixture, WalkIncrementModel};
pub use rng::RngSeed;
pub use simplex_angles::{AngleKind, AngleSumValue, ComplexPhiValue};
pub use theory::TheoryValue;
