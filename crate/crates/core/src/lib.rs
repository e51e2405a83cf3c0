//! Calculus of variations on time scales.
//!
//! ```
//! use tscv::lagrangian::Lagrangian;
//! use tscv::timescale::TimeScale;
//! use tscv::variational::{functional, VariationalProblem};
//! use tscv::weierstrass::{classify_candidate, AnalysisOptions, Verdict};
//!
//! # fn main() -> tscv::Result<()> {
//! let p = VariationalProblem::new(
//!     TimeScale::harmonic(50)?, 0.0, 1.0,
//!     Lagrangian::parse("r^2 - r^4")?, 0.0, 0.0,
//! )?;
//! let zero = p.zero_trajectory();
//! assert_eq!(functional(&p, &zero)?, 0.0);
//! let report = classify_candidate(&p, &zero, None, &AnalysisOptions::default())?;
//! assert_eq!(report.verdict, Verdict::HypothesisNotMet);
//! # Ok(())
//! # }
//! ```

pub mod calculus;
pub mod commands;
pub mod error;
pub mod lagrangian;
pub mod problem;
pub mod report;
pub mod repro;
pub mod timescale;
pub mod variational;
pub mod weierstrass;

pub use calculus::{DerivativeKind, DerivativeValue, GridFunction};
pub use error::{Error, Result};
pub use lagrangian::{Lagrangian, Partials};
pub use timescale::{PointClass, ScalePoint, Segment, Side, TimeScale};
pub use variational::{Trajectory, VariationalProblem};
pub use weierstrass::{AnalysisReport, ExcessSample, Verdict};
