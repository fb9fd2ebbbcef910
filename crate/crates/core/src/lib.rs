//! Graph-based gait synthesis for discretized multi-limb robots.
//!
//! The pipeline: discretize each robot subsystem into a handful of behaviors
//! ([`state_space`]), model robot-environment interaction as a directed graph
//! over the resulting states with learned displacement rewards per transition
//! ([`graph`], [`rewards`]), enumerate all simple cycles as the linear basis
//! of periodic control patterns ([`cycles`]), pick optimal nonnegative integer
//! combinations of cycles by exact integer linear programming ([`planner`]),
//! and predict the resulting planar motion under the small-angle and full
//! SE(2) models ([`rollout`]).
//!
//! Faults are handled structurally: disabling the nodes of an inoperable
//! subsystem and re-planning on the reduced graph reuses the learned rewards
//! unchanged.

pub mod cycles;
pub mod data;
pub mod error;
pub mod graph;
pub mod planner;
pub mod quant;
pub mod rewards;
pub mod rollout;
pub mod state_space;

pub use cycles::{
    cycle_incidence, cycle_reward, enumerate_simple_cycles, enumerate_simple_cycles_capped,
    CycleBasis, SimpleCycle, DEFAULT_CYCLE_CAP,
};
pub use error::{Error, Result};
pub use graph::{Arc, ArcId, RewardVector, TransitionGraph};
pub use planner::{
    brute_force_gait, enumerate_optimal_gaits, load_arc_durations, solve_gait, verify_solution,
    Axis, Circulation, DriftBound, GaitProblem, GaitSolution, GaitStatus, ProblemFile, Sense,
    SolutionFile, SolverConfig, TimeBudget,
};
pub use quant::Quantizer;
pub use rewards::{
    aggregate_observations, load_observations, load_reward_table, save_reward_table,
    ObservationRecord, RewardTable,
};
pub use rollout::{
    integrate_linear, integrate_linear_trace, integrate_se2, sequence_circulation,
    write_trace_csv, Pose, TraceStep, Walk,
};
pub use state_space::{NodeId, RobotSpec, State, SubsystemSpec};
