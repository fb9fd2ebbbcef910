//! Subcommand implementations. Every command works on explicit files under
//! the output directory; identical inputs produce byte-identical artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use gaitgraph::{
    aggregate_observations, enumerate_optimal_gaits, enumerate_simple_cycles_capped,
    integrate_linear_trace, integrate_se2, load_arc_durations, load_observations,
    load_reward_table, save_reward_table, sequence_circulation, solve_gait, verify_solution,
    write_trace_csv, CycleBasis, Error, GaitSolution, GaitStatus, Pose, ProblemFile, RewardTable,
    RewardVector, RobotSpec, SimpleCycle, SolutionFile, SolverConfig, TransitionGraph,
};

use crate::persist;
use crate::{Cli, Command, CyclesCommand, FaultCommand, GaitCommand, GraphCommand, RewardsCommand};

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::NotExecutable(_) | Error::EmptyBasis => 3,
        Error::ResourceLimit { .. } => 4,
        _ => 2,
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure::new(exit_code_for(&err), err.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn fail_at(path: &Path, err: Error) -> Failure {
    Failure::new(exit_code_for(&err), format!("{}: {err}", path.display()))
}

fn verbose() -> bool {
    std::env::var("GAITGRAPH_VERBOSE")
        .map(|v| v == "1" || v.eq_ignore_ascii_case("true"))
        .unwrap_or(false)
}

struct Workspace {
    spec_path: Option<PathBuf>,
    rewards_path: PathBuf,
    out_dir: PathBuf,
    denominator: u32,
    cycle_cap: usize,
}

impl Workspace {
    fn new(cli: &Cli) -> Self {
        let rewards_path = cli
            .rewards
            .clone()
            .unwrap_or_else(|| cli.out.join("rewards.csv"));
        Self {
            spec_path: cli.spec.clone(),
            rewards_path,
            out_dir: cli.out.clone(),
            denominator: cli.denominator,
            cycle_cap: cli.cycle_cap,
        }
    }

    fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            denominator: self.denominator,
            ..SolverConfig::default()
        }
    }

    fn graph_path(&self) -> PathBuf {
        self.out_dir.join("graph.json")
    }

    fn ensure_out_dir(&self) -> CmdResult {
        fs::create_dir_all(&self.out_dir)
            .map_err(|e| Failure::new(2, format!("{}: {e}", self.out_dir.display())))
    }

    fn read(&self, path: &Path) -> Result<String, Failure> {
        fs::read_to_string(path).map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))
    }

    fn write(&self, path: &Path, contents: &str) -> CmdResult {
        fs::write(path, contents).map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))
    }

    fn load_spec(&self) -> Result<RobotSpec, Failure> {
        let path = self.spec_path.as_ref().ok_or_else(|| {
            Failure::new(
                2,
                "no robot spec: pass --spec <FILE> (or run `graph build` first so graph.json exists)",
            )
        })?;
        RobotSpec::from_json(&self.read(path)?).map_err(|e| fail_at(path, e))
    }

    fn load_table(&self, spec: &RobotSpec) -> Result<RewardTable, Failure> {
        let text = self.read(&self.rewards_path)?;
        let load =
            load_reward_table(text.as_bytes(), spec).map_err(|e| fail_at(&self.rewards_path, e))?;
        if !load.duplicates.is_empty() {
            eprintln!(
                "warning: {} duplicate transition row(s) in {}; last occurrence wins",
                load.duplicates.len(),
                self.rewards_path.display()
            );
        }
        Ok(load.table)
    }

    /// The persisted graph if `graph.json` exists, otherwise a fresh build
    /// from --spec and --rewards.
    fn load_or_build_graph(&self) -> Result<TransitionGraph, Failure> {
        let path = self.graph_path();
        if path.exists() {
            let file = persist::from_json(&self.read(&path)?).map_err(|e| fail_at(&path, e))?;
            persist::graph_from_file(&file).map_err(|e| fail_at(&path, e))
        } else {
            let spec = self.load_spec()?;
            let table = self.load_table(&spec)?;
            build_graph(&spec, &table)
        }
    }

    fn save_graph(&self, graph: &TransitionGraph) -> CmdResult {
        self.ensure_out_dir()?;
        let file = persist::graph_to_file(graph);
        self.write(&self.graph_path(), &persist::to_json(&file))
    }

    fn enumerate(&self, graph: &TransitionGraph) -> Result<CycleBasis, Failure> {
        enumerate_simple_cycles_capped(graph, self.cycle_cap).map_err(Failure::from)
    }
}

fn build_graph(spec: &RobotSpec, table: &RewardTable) -> Result<TransitionGraph, Failure> {
    let graph = TransitionGraph::complete(spec, table)?;
    let missing = table.missing_pairs(spec);
    if !missing.is_empty() {
        eprintln!(
            "warning: {} transition(s) missing from the reward table default to zero reward",
            missing.len()
        );
        if verbose() {
            for (from, to) in &missing {
                eprintln!("  defaulted: {from} -> {to}");
            }
        }
    }
    Ok(graph)
}

fn render_cycle(graph: &TransitionGraph, cycle: &SimpleCycle) -> String {
    let spec = graph.spec();
    let mut states: Vec<String> = cycle
        .nodes()
        .iter()
        .map(|&n| spec.decode(n).expect("basis node in range").to_string())
        .collect();
    states.push(states[0].clone());
    states.join(" → ")
}

fn render_solution(graph: &TransitionGraph, basis: &CycleBasis, solution: &GaitSolution) -> String {
    if solution.circulation.is_empty() {
        return "  (empty circulation)".to_string();
    }
    solution
        .circulation
        .iter()
        .map(|(idx, count)| {
            let cycle = basis.cycle(idx).expect("solution index in basis");
            format!("  {count} × {}", render_cycle(graph, cycle))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn run(cli: Cli) -> CmdResult {
    let ws = Workspace::new(&cli);
    match &cli.command {
        Command::Rewards { command } => match command {
            RewardsCommand::Learn { observations, surface } => {
                rewards_learn(&ws, observations, surface.as_deref())
            }
        },
        Command::Graph { command } => match command {
            GraphCommand::Build { dot, prune } => graph_build(&ws, dot.as_deref(), prune.as_deref()),
        },
        Command::Cycles { command } => match command {
            CyclesCommand::Enumerate => cycles_enumerate(&ws),
        },
        Command::Fault { command } => match command {
            FaultCommand::Disable { subsystem, stuck } => fault_disable(&ws, *subsystem, *stuck),
        },
        Command::Gait { command } => match command {
            GaitCommand::Plan {
                problem,
                all_optima,
                max_optima,
            } => gait_plan(&ws, problem, *all_optima, *max_optima),
            GaitCommand::Rollout { solution, start, se2 } => {
                gait_rollout(&ws, solution, start, *se2)
            }
        },
    }
}

fn rewards_learn(ws: &Workspace, observations: &Path, surface: Option<&str>) -> CmdResult {
    let spec = ws.load_spec()?;
    let text = ws.read(observations)?;
    let records =
        load_observations(text.as_bytes(), &spec).map_err(|e| fail_at(observations, e))?;
    let mut table = aggregate_observations(&records).map_err(|e| fail_at(observations, e))?;
    if let Some(surface) = surface {
        table = table.with_surface(surface);
    }
    if let Some(parent) = ws.rewards_path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| Failure::new(2, format!("{}: {e}", parent.display())))?;
        }
    }
    let mut buf = Vec::new();
    save_reward_table(&table, &mut buf).map_err(Failure::from)?;
    ws.write(&ws.rewards_path, &String::from_utf8(buf).expect("csv is utf-8"))?;
    println!(
        "learned {} transition reward(s) from {} observation(s) -> {}",
        table.len(),
        records.len(),
        ws.rewards_path.display()
    );
    Ok(())
}

fn parse_prune_threshold(text: &str) -> Result<RewardVector, Failure> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(Failure::new(
            1,
            format!("--prune expects DX,DY,DTHETA, got {text:?}"),
        ));
    }
    let mut values = [0.0f64; 3];
    for (slot, part) in values.iter_mut().zip(&parts) {
        *slot = part.trim().parse().map_err(|_| {
            Failure::new(1, format!("--prune component {part:?} is not a number"))
        })?;
        if !(slot.is_finite() && *slot >= 0.0) {
            return Err(Failure::new(
                1,
                format!("--prune component {part:?} must be a nonnegative number"),
            ));
        }
    }
    Ok(RewardVector::new(values[0], values[1], values[2]))
}

fn graph_build(ws: &Workspace, dot: Option<&Path>, prune: Option<&str>) -> CmdResult {
    let spec = ws.load_spec()?;
    let table = ws.load_table(&spec)?;
    let mut graph = build_graph(&spec, &table)?;
    if let Some(threshold) = prune {
        let threshold = parse_prune_threshold(threshold)?;
        graph = graph.prune_arcs(&threshold);
    }
    ws.save_graph(&graph)?;
    if let Some(dot_path) = dot {
        ws.write(dot_path, &graph.to_dot())?;
    }
    println!(
        "graph: {} node(s), {} arc(s) ({} enabled) -> {}",
        graph.node_count(),
        graph.arc_count(),
        graph.enabled_arc_count(),
        ws.graph_path().display()
    );
    Ok(())
}

fn cycles_enumerate(ws: &Workspace) -> CmdResult {
    let graph = ws.load_or_build_graph()?;
    let basis = ws.enumerate(&graph)?;
    ws.ensure_out_dir()?;
    let path = ws.out_dir.join("cycles.json");
    ws.write(&path, &basis.to_json())?;
    println!("enumerated {} simple cycle(s) -> {}", basis.len(), path.display());
    Ok(())
}

fn fault_disable(ws: &Workspace, subsystem: usize, stuck: u32) -> CmdResult {
    let graph = ws.load_or_build_graph()?;
    let faulty = graph.disable_subsystem(subsystem, stuck).map_err(Failure::from)?;
    ws.save_graph(&faulty)?;
    let disabled: Vec<String> = faulty.disabled_nodes().iter().map(|n| n.to_string()).collect();
    println!(
        "subsystem {subsystem} stuck at {stuck}: disabled node(s) {} -> {}",
        disabled.join(", "),
        ws.graph_path().display()
    );
    Ok(())
}

fn gait_plan(ws: &Workspace, problem_path: &Path, all_optima: bool, max_optima: usize) -> CmdResult {
    let graph = ws.load_or_build_graph()?;
    let basis = ws.enumerate(&graph)?;
    let file = ProblemFile::from_json(&ws.read(problem_path)?)
        .map_err(|e| fail_at(problem_path, e))?;
    let durations = match &file.time {
        Some(spec) => {
            let base = problem_path.parent().unwrap_or(Path::new("."));
            let path = base.join(&spec.arc_durations_ref);
            let text = ws.read(&path)?;
            let load =
                load_arc_durations(text.as_bytes(), &graph).map_err(|e| fail_at(&path, e))?;
            if load.missing > 0 {
                eprintln!(
                    "warning: {} arc(s) missing from {} default to zero seconds",
                    load.missing,
                    path.display()
                );
            }
            Some(load.arc_seconds)
        }
        None => None,
    };
    let problem = file
        .resolve(&graph, durations)
        .map_err(|e| fail_at(problem_path, e))?;
    let config = ws.solver_config();
    let solution = solve_gait(&problem, &basis, &config).map_err(Failure::from)?;
    if solution.status == GaitStatus::Optimal {
        verify_solution(&problem, &basis, &graph, &solution, &config).map_err(Failure::from)?;
    }

    ws.ensure_out_dir()?;
    let solution_path = ws.out_dir.join("solution.json");
    ws.write(&solution_path, &SolutionFile::from_solution(&solution).to_json())?;
    println!(
        "J = {}, len = {}, status = {:?} -> {}",
        solution.reward,
        solution.length,
        solution.status,
        solution_path.display()
    );
    println!("{}", render_solution(&graph, &basis, &solution));

    if all_optima {
        let optima =
            enumerate_optimal_gaits(&problem, &basis, max_optima, &config).map_err(Failure::from)?;
        let files: Vec<SolutionFile> = optima.iter().map(SolutionFile::from_solution).collect();
        let mut text = serde_json::to_string_pretty(&files).expect("solutions serialize");
        text.push('\n');
        let optima_path = ws.out_dir.join("optima.json");
        ws.write(&optima_path, &text)?;
        println!(
            "{} optimal circulation(s) -> {}",
            optima.len(),
            optima_path.display()
        );
        for (i, alt) in optima.iter().enumerate() {
            println!("optimum {} (J = {}):", i + 1, alt.reward);
            println!("{}", render_solution(&graph, &basis, alt));
        }
    }

    match solution.status {
        GaitStatus::Optimal => Ok(()),
        GaitStatus::Infeasible => Err(Failure::new(
            3,
            "no circulation improves on standing still under these constraints",
        )),
        GaitStatus::ResourceLimit => Err(Failure::new(
            4,
            "search node budget exhausted; solution.json holds the best incumbent",
        )),
    }
}

fn gait_rollout(ws: &Workspace, solution_path: &Path, start: &str, se2: bool) -> CmdResult {
    let graph = ws.load_or_build_graph()?;
    let basis = ws.enumerate(&graph)?;
    let file = SolutionFile::from_json(&ws.read(solution_path)?)
        .map_err(|e| fail_at(solution_path, e))?;
    let solution = file.into_solution();
    let spec = graph.spec();
    let start_state = spec.parse_state(start).map_err(Failure::from)?;
    let start_node = spec.encode(&start_state).map_err(Failure::from)?;
    let walk = sequence_circulation(&solution.circulation, &basis, &graph, start_node)
        .map_err(Failure::from)?;
    let (pose, trace) = if se2 {
        integrate_se2(&walk, graph.rewards(), Pose::ORIGIN).map_err(Failure::from)?
    } else {
        integrate_linear_trace(&walk, graph.rewards()).map_err(Failure::from)?
    };
    ws.ensure_out_dir()?;
    let trace_path = ws.out_dir.join("trace.csv");
    let mut buf = Vec::new();
    write_trace_csv(&trace, &graph, &mut buf).map_err(Failure::from)?;
    ws.write(&trace_path, &String::from_utf8(buf).expect("csv is utf-8"))?;
    let model = if se2 { "se2" } else { "linear" };
    println!(
        "{} transition(s) from {start}, {model} model: final pose [{}, {}, {}] -> {}",
        walk.len(),
        pose.x,
        pose.y,
        pose.theta,
        trace_path.display()
    );
    Ok(())
}
