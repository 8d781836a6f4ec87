//! Sub-dividing genetic method for box-constrained global optimization.
//!
//! Phase 1 ([`subdivision`]) labels the corners of a dyadic grid and keeps
//! bisecting a completely labeled cell. Phase 2 ([`refinement`]) starts from
//! the best corner of that cell and improves it with ray and rotational
//! mutation plus midpoint crossover. [`engine::solve`] runs both.
//!
//! ```
//! use sgm::{default_config, make_objective, solve};
//!
//! let obj = make_objective("F1").unwrap();
//! let run = solve(&obj, &default_config(&obj)).unwrap();
//! assert!(run.best_value < 1e-6);
//! ```

pub mod baselines;
pub mod config;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod objective;
pub mod refinement;
pub mod result;
pub mod rng;
pub mod subdivision;
pub mod testbed;

pub use config::{Labeling, Sense, SgmConfig};
pub use engine::{default_config, solve, SolverHandle};
pub use error::{Result, SgmError};
pub use geometry::{BoxDomain, Point};
pub use objective::{counted_eval, EvalCounter, Evaluator, Objective, ObjectiveFn};
pub use result::{RunResult, TracePoint};
pub use rng::RngStream;
pub use testbed::make_objective;
