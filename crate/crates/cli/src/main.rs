//! `gaitgraph`: learn transition rewards, build the state-transition graph,
//! enumerate simple cycles, plan optimal gaits, simulate subsystem faults,
//! and roll out pose predictions.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 infeasible or not
//! executable, 4 resource limit.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

mod commands;
mod persist;

#[derive(Parser)]
#[command(
    name = "gaitgraph",
    version,
    about = "Graph-based gait synthesis for discretized multi-limb robots"
)]
pub struct Cli {
    /// Robot spec JSON ({"subsystems": [{"name", "behaviors"}, ...]})
    #[arg(long, global = true, value_name = "FILE")]
    pub spec: Option<PathBuf>,

    /// Reward table CSV (default: `<out>/rewards.csv`)
    #[arg(long, global = true, value_name = "FILE")]
    pub rewards: Option<PathBuf>,

    /// Directory for output artifacts
    #[arg(long, global = true, default_value = "out", value_name = "DIR")]
    pub out: PathBuf,

    /// Rational grid denominator for exact planning arithmetic
    #[arg(long, global = true, default_value_t = 4)]
    pub denominator: u32,

    /// Ceiling on the number of enumerated simple cycles
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub cycle_cap: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Learn transition rewards from observation logs
    Rewards {
        #[command(subcommand)]
        command: RewardsCommand,
    },
    /// Build and export the state-transition graph
    Graph {
        #[command(subcommand)]
        command: GraphCommand,
    },
    /// Enumerate simple cycles (the gait basis)
    Cycles {
        #[command(subcommand)]
        command: CyclesCommand,
    },
    /// Simulate subsystem faults by isolating graph nodes
    Fault {
        #[command(subcommand)]
        command: FaultCommand,
    },
    /// Plan optimal gaits and roll out pose predictions
    Gait {
        #[command(subcommand)]
        command: GaitCommand,
    },
}

#[derive(Subcommand)]
pub enum RewardsCommand {
    /// Aggregate a JSON Lines observation log into a reward table CSV
    Learn {
        /// Observation log (one JSON object per line)
        observations: PathBuf,
        /// Surface name recorded in diagnostics
        #[arg(long)]
        surface: Option<String>,
    },
}

#[derive(Subcommand)]
pub enum GraphCommand {
    /// Build the complete transition graph from --spec and --rewards
    Build {
        /// Also export the graph in DOT format
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
        /// Disable arcs whose rewards are all below DX,DY,DTHETA in absolute
        /// value
        #[arg(long, value_name = "DX,DY,DTHETA")]
        prune: Option<String>,
    },
}

#[derive(Subcommand)]
pub enum CyclesCommand {
    /// Enumerate all simple cycles of the enabled graph
    Enumerate,
}

#[derive(Subcommand)]
pub enum FaultCommand {
    /// Disable every state in which a subsystem is not stuck at the given
    /// behavior, persisting the reduced graph for later plan calls
    Disable {
        /// 1-based subsystem index
        #[arg(long)]
        subsystem: usize,
        /// Behavior the subsystem is stuck at
        #[arg(long)]
        stuck: u32,
    },
}

#[derive(Subcommand)]
pub enum GaitCommand {
    /// Solve the gait optimization problem described by a problem JSON file
    Plan {
        problem: PathBuf,
        /// Also enumerate equal-cost optimal circulations
        #[arg(long)]
        all_optima: bool,
        /// Upper bound on enumerated optima
        #[arg(long, default_value_t = 10)]
        max_optima: usize,
    },
    /// Sequence a solved circulation from a start state and write the pose
    /// trace
    Rollout {
        solution: PathBuf,
        /// Start state as a behavior string (e.g. 000)
        #[arg(long)]
        start: String,
        /// Compose displacements through the accumulated heading instead of
        /// summing them
        #[arg(long)]
        se2: bool,
    },
}

fn main() -> ExitCode {
    // die quietly when stdout is a closed pipe (e.g. piped into `head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
