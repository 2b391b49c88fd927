//! Safe active learning of event-trigger parameters.
//!
//! Given a closed loop with a fixed state-feedback gain, [`explorer::explore`]
//! finds the set of trigger parameters `θ = (ε₀, ε∞)` whose episodes satisfy a
//! convergence and a safety specification, sampling only parameters that are
//! certified safe by a Gaussian-process confidence bound.
// `!(x > 0.0)` style checks are deliberate throughout: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod explorer;
pub mod gp;
pub mod indices;
pub mod num_fmt;
pub mod plant;
pub mod theta;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use explorer::{
    explore, explore_observed, random_search_baseline, BaselineRecord, ExplorationOutcome,
    GridSets, IterationRecord, RunStatus,
};
pub use gp::{Dataset, GpModel, KernelSpec};
pub use indices::{convergence_index, observe, safety_index, ConvergenceSpec, SafetySpec};
pub use plant::{run_episode, ControllerSpec, EtmSpec, PlantSpec, SimSettings, Trajectory};
pub use theta::{ParamBox, ThetaPoint};
