//! Core library for speed-scaling-aware task selection in shared
//! human-robot workspaces.
//!
//! A collaborative robot that shares floor space with a person is slowed
//! down by a safety function: the closer the person, the lower the speed
//! scaling, down to a full stop. Which task the robot picks next therefore
//! changes how much slowdown it suffers. This crate provides the pieces to
//! study that effect end to end:
//!
//! - [`safety`]: the staircase scaling function and windowed analysis of
//!   logged scaling traces;
//! - [`sim`]: a deterministic discrete-time simulator of a pick-and-place
//!   workcell with a moving human, producing logs in a stable CSV format;
//! - [`learn`]: estimating the number of scaling plateaus from data and
//!   training a neural predictor of the windowed mean scaling;
//! - [`plan`]: greedy and Monte Carlo action selection on top of a trained
//!   predictor, plus random / round-robin / reactive baselines;
//! - [`config`]: TOML scenario descriptions shared by all tools.
//!
//! The commonly used types are re-exported at the crate root.

pub mod config;
pub mod error;
pub mod geom;
pub mod learn;
pub mod plan;
pub mod process;
pub mod safety;
pub mod sim;

pub use config::{
    ActionId, ActionKind, DwellTimes, GoalDistribution, GoalId, McConfig, RobotAction, SlotId,
    Variant, WorkspaceConfig,
};
pub use error::{Error, Result};
pub use geom::Vec3;
pub use learn::{
    estimate_k, load_model, save_model, train, Dataset, KEstimate, ScalingPredictor, TrainConfig,
    TrainOutcome,
};
pub use plan::{
    greedy_select, monte_carlo_select, GreedyPolicy, MonteCarloParams, MonteCarloPolicy,
    PlannerContext, RandomPolicy, ReactivePolicy, RoundRobinPolicy, ScalingOracle,
    SelectionPolicy,
};
pub use process::ProcessState;
pub use safety::{ScalingTrace, StaircaseSafety};
pub use sim::{
    build_training_set, run_episode, run_episodes, EpisodeLimit, EpisodeResult, LogRecord,
    RunOptions, TaskMetric, TrainingRow,
};
