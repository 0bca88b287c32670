//! Derivative-free trust-region optimization for heterogeneous multiobjective
//! problems with expensive and cheap objectives.
//!
//! ```
//! use pareto_trm::{run, AlgoConfig, FeasibleSet, MOProblem, Objective};
//!
//! let prob = MOProblem::new(
//!     FeasibleSet::unit_box(2),
//!     vec![
//!         Objective::expensive("f1", |x: &[f64]| (x[0] - 0.2).powi(2) + x[1] * x[1]),
//!         Objective::cheap("f2", |x: &[f64]| (x[0] - 0.8).powi(2) + x[1] * x[1]),
//!     ],
//! )?;
//! let report = run(&prob, &AlgoConfig::default(), &[0.5, 0.9], 0)?;
//! assert!(report.total_expensive_evals > 0);
//! # Ok::<(), pareto_trm::Error>(())
//! ```

pub mod criticality;
pub mod driver;
pub mod error;
pub mod problem;
pub mod sampling;
pub mod subsolvers;
pub mod steps;
pub mod surrogates;
pub mod testbed;

pub use error::{Error, Result};
pub use problem::{Bounds, Entry, EvaluationDatabase, FeasibleSet, MOProblem, Objective, Regime};
pub use driver::{run, run_with_database, Acceptance, AlgoConfig, RunReport, StopReason};
pub use steps::{StepConfig, StepKind};
pub use surrogates::{ModelKind, ModelSpec, RbfKernel, ShapeParameter};
pub use testbed::{make_problem, solution_quality, ExpensivePattern, Family, TestProblemSpec};
