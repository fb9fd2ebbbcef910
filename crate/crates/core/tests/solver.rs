//! Planner behavior on the bundled tabletop data plus randomized
//! oracle-equivalence checks against the exhaustive solver.

use gaitgraph::{
    brute_force_gait, cycle_incidence, cycle_reward, enumerate_optimal_gaits,
    enumerate_simple_cycles, solve_gait, verify_solution, Axis, CycleBasis, DriftBound,
    GaitProblem, GaitStatus, NodeId, RewardTable, RewardVector, RobotSpec, Sense, SolverConfig,
    TransitionGraph,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tabletop() -> (TransitionGraph, CycleBasis) {
    let graph = gaitgraph::data::tabletop_graph();
    let basis = enumerate_simple_cycles(&graph).unwrap();
    (graph, basis)
}

fn fault_graph() -> TransitionGraph {
    gaitgraph::data::tabletop_graph()
        .disable_subsystem(2, 0)
        .unwrap()
}

fn forward_x(l_max: u32) -> GaitProblem {
    GaitProblem::new(
        Axis::X,
        Sense::Maximize,
        [DriftBound::symmetric(1.0), DriftBound::symmetric(5.0)],
        l_max,
    )
    .unwrap()
}

fn cycle_nodes(graph: &TransitionGraph, states: &[&str]) -> Vec<NodeId> {
    let spec = graph.spec();
    states
        .iter()
        .map(|s| spec.encode(&spec.parse_state(s).unwrap()).unwrap())
        .collect()
}

#[test]
fn forward_translation_beats_the_two_cycle_witness() {
    let (graph, basis) = tabletop();
    let problem = forward_x(15);
    let config = SolverConfig::default();

    // witness: two repetitions of 000 -> 001 -> 111 -> 100 -> 000
    let witness_nodes = cycle_nodes(&graph, &["000", "001", "111", "100"]);
    let incidence = cycle_incidence(&witness_nodes, &graph).unwrap();
    let witness = cycle_reward(graph.rewards(), &incidence).unwrap();
    assert_eq!(witness, RewardVector::new(8.5, 0.5, 0.0));

    let solution = solve_gait(&problem, &basis, &config).unwrap();
    assert_eq!(solution.status, GaitStatus::Optimal);
    assert!(
        solution.reward.dx >= 2.0 * witness.dx,
        "optimum {} must match or beat the witness {}",
        solution.reward.dx,
        2.0 * witness.dx
    );
    assert!(solution.length <= 15);
    verify_solution(&problem, &basis, &graph, &solution, &config).unwrap();
}

#[test]
fn backward_translation_beats_the_witness() {
    let (graph, basis) = tabletop();
    let problem = GaitProblem::new(
        Axis::X,
        Sense::Minimize,
        [DriftBound::symmetric(1.0), DriftBound::symmetric(5.0)],
        15,
    )
    .unwrap();
    let config = SolverConfig::default();

    // witness: 000 -> 100 -> 110 -> 001 -> 000 with reward [-6, 0, 2]
    let witness_nodes = cycle_nodes(&graph, &["000", "100", "110", "001"]);
    let incidence = cycle_incidence(&witness_nodes, &graph).unwrap();
    let witness = cycle_reward(graph.rewards(), &incidence).unwrap();
    assert_eq!(witness, RewardVector::new(-6.0, 0.0, 2.0));

    let solution = solve_gait(&problem, &basis, &config).unwrap();
    assert_eq!(solution.status, GaitStatus::Optimal);
    assert!(solution.reward.dx <= witness.dx);
    verify_solution(&problem, &basis, &graph, &solution, &config).unwrap();
}

#[test]
fn fault_graph_equal_cost_sequences() {
    let graph = fault_graph();
    let basis = enumerate_simple_cycles(&graph).unwrap();
    let config = SolverConfig::default();

    // the two equal-cost cycles after losing subsystem 2
    let a = cycle_nodes(&graph, &["000", "001", "101", "100"]);
    let b = cycle_nodes(&graph, &["000", "001", "101"]);
    for nodes in [&a, &b] {
        let incidence = cycle_incidence(nodes, &graph).unwrap();
        let reward = cycle_reward(graph.rewards(), &incidence).unwrap();
        assert_eq!(reward, RewardVector::new(1.0, 0.0, -1.0));
    }

    // with a budget of 4 transitions both cycles are exactly the optima
    let optima = enumerate_optimal_gaits(&forward_x(4), &basis, 5, &config).unwrap();
    assert_eq!(optima.len(), 2);
    let mut supports: Vec<Vec<Vec<u32>>> = optima
        .iter()
        .map(|sol| {
            sol.circulation
                .iter()
                .map(|(idx, count)| {
                    assert_eq!(count, 1);
                    basis
                        .cycle(idx)
                        .unwrap()
                        .nodes()
                        .iter()
                        .map(|n| n.get())
                        .collect()
                })
                .collect()
        })
        .collect();
    supports.sort();
    assert_eq!(
        supports,
        vec![vec![vec![1, 2, 6]], vec![vec![1, 2, 6, 5]]]
    );
    for sol in &optima {
        assert_eq!(sol.reward, RewardVector::new(1.0, 0.0, -1.0));
        verify_solution(&forward_x(4), &basis, &graph, sol, &config).unwrap();
    }

    // at the full budget the short cycle dominates: 5 repetitions
    let solution = solve_gait(&forward_x(15), &basis, &config).unwrap();
    assert_eq!(solution.reward, RewardVector::new(5.0, 0.0, -5.0));
    assert_eq!(solution.length, 15);
    verify_solution(&forward_x(15), &basis, &graph, &solution, &config).unwrap();
}

#[test]
fn fault_graph_brute_force_agrees() {
    let graph = fault_graph();
    let basis = enumerate_simple_cycles(&graph).unwrap();
    assert_eq!(basis.len(), 20);
    let config = SolverConfig::default();
    let restricted = basis.filtered(|_, c| c.len() <= 4);
    let problem = forward_x(12);
    let solved = solve_gait(&problem, &restricted, &config).unwrap();
    let brute = brute_force_gait(&problem, &restricted, &config).unwrap();
    assert_eq!(solved, brute);
    assert_eq!(solved.reward.dx, 4.0);
}

// --- randomized oracle equivalence -----------------------------------------

fn random_instance(rng: &mut ChaCha8Rng) -> (TransitionGraph, CycleBasis, GaitProblem) {
    loop {
        let n: u32 = rng.gen_range(2..=5);
        let spec = RobotSpec::uniform(1, n).unwrap();
        let states: Vec<_> = spec.states().collect();
        let mut table = RewardTable::empty();
        for from in &states {
            for to in &states {
                if from != to {
                    let quarter = |rng: &mut ChaCha8Rng| f64::from(rng.gen_range(-16..=16)) / 4.0;
                    table.insert(
                        from.clone(),
                        to.clone(),
                        RewardVector::new(quarter(rng), quarter(rng), quarter(rng)),
                    );
                }
            }
        }
        let mut graph = TransitionGraph::complete(&spec, &table).unwrap();
        if n == 5 {
            // keep the basis under the brute-force guard
            let drop: Vec<_> = graph
                .arcs()
                .iter()
                .map(|a| a.id)
                .filter(|_| rng.gen_bool(0.45))
                .collect();
            graph = graph.disable_arcs(&drop);
        }
        let basis = enumerate_simple_cycles(&graph).unwrap();
        if basis.is_empty() || basis.len() > 64 {
            continue;
        }
        let axis = [Axis::X, Axis::Y, Axis::Theta][rng.gen_range(0..3)];
        let sense = if rng.gen_bool(0.5) {
            Sense::Maximize
        } else {
            Sense::Minimize
        };
        let bound = |rng: &mut ChaCha8Rng| DriftBound {
            lo: -f64::from(rng.gen_range(0..=12)) / 4.0,
            hi: f64::from(rng.gen_range(0..=12)) / 4.0,
        };
        let l_max = rng.gen_range(2..=8);
        let problem = GaitProblem::new(axis, sense, [bound(rng), bound(rng)], l_max).unwrap();
        return (graph, basis, problem);
    }
}

#[test]
fn solver_matches_brute_force_on_randomized_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x600D_5EED);
    let config = SolverConfig::default();
    for case in 0..120 {
        let (graph, basis, problem) = random_instance(&mut rng);
        let solved = solve_gait(&problem, &basis, &config).unwrap();
        let brute = brute_force_gait(&problem, &basis, &config).unwrap();
        assert_eq!(
            solved, brute,
            "case {case}: solver and oracle disagree on {problem:?}"
        );
        verify_solution(&problem, &basis, &graph, &solved, &config).unwrap();
        verify_solution(&problem, &basis, &graph, &brute, &config).unwrap();

        // disabling the column prefilter must not change anything
        let unfiltered = SolverConfig {
            prefilter: false,
            ..config
        };
        let plain = solve_gait(&problem, &basis, &unfiltered).unwrap();
        assert_eq!(plain, solved, "case {case}: prefilter changed the answer");
    }
}

/// Large randomized campaign including time budgets and home nodes; run
/// explicitly with `cargo test -p gaitgraph --test solver -- --ignored`.
/// GAITGRAPH_STRESS_CASES overrides the instance count.
#[test]
#[ignore]
fn stress_solver_matches_brute_force_with_all_features() {
    let cases: u64 = std::env::var("GAITGRAPH_STRESS_CASES")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(2000);
    let mut rng = ChaCha8Rng::seed_from_u64(0xFEED_F00D);
    let config = SolverConfig::default();
    for case in 0..cases {
        let (graph, basis, mut problem) = random_instance(&mut rng);
        if rng.gen_bool(0.3) {
            let seconds: Vec<f64> = (0..graph.arc_count())
                .map(|_| f64::from(rng.gen_range(0..=8)) / 4.0)
                .collect();
            let t_max = f64::from(rng.gen_range(0..=80)) / 4.0;
            problem = problem.with_time(seconds, t_max).unwrap();
        }
        if rng.gen_bool(0.3) {
            let node = NodeId::new(rng.gen_range(1..=graph.node_count() as u32));
            problem = problem.with_home(node);
        }
        let solved = solve_gait(&problem, &basis, &config).unwrap();
        let brute = brute_force_gait(&problem, &basis, &config).unwrap();
        assert_eq!(solved, brute, "case {case}: {problem:?}");
        verify_solution(&problem, &basis, &graph, &solved, &config).unwrap();
        let plain = SolverConfig { prefilter: false, ..config };
        assert_eq!(
            solve_gait(&problem, &basis, &plain).unwrap(),
            solved,
            "case {case}: prefilter changed the answer"
        );
    }
}

#[test]
fn optimum_is_monotone_in_budget_and_drift() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0B00_B135);
    let config = SolverConfig::default();
    for _ in 0..25 {
        let (_, basis, problem) = random_instance(&mut rng);
        if problem.sense != Sense::Maximize {
            continue;
        }
        let base = solve_gait(&problem, &basis, &config).unwrap();
        let objective = |s: &gaitgraph::GaitSolution| problem.axis.component(&s.reward);

        let mut longer = problem.clone();
        longer.l_max += 2;
        let more = solve_gait(&longer, &basis, &config).unwrap();
        assert!(objective(&more) >= objective(&base));

        let mut wider = problem.clone();
        wider.drift = [
            DriftBound {
                lo: problem.drift[0].lo - 1.0,
                hi: problem.drift[0].hi + 1.0,
            },
            DriftBound {
                lo: problem.drift[1].lo - 1.0,
                hi: problem.drift[1].hi + 1.0,
            },
        ];
        let freer = solve_gait(&wider, &basis, &config).unwrap();
        assert!(objective(&freer) >= objective(&base));
    }
}

#[test]
fn scaling_rewards_scales_the_optimum_and_keeps_the_optima() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xCAFE);
    let config = SolverConfig::default();
    for _ in 0..20 {
        let (graph, basis, problem) = random_instance(&mut rng);
        // scale every reward (and the drift window) by 2
        let spec = graph.spec().clone();
        let mut table = RewardTable::empty();
        for arc in graph.enabled_arcs() {
            let r = graph.reward(arc.id).unwrap();
            table.insert(
                spec.decode(arc.from).unwrap(),
                spec.decode(arc.to).unwrap(),
                RewardVector::new(2.0 * r.dx, 2.0 * r.dy, 2.0 * r.dtheta),
            );
        }
        let scaled_graph = {
            let complete = TransitionGraph::complete(&spec, &table).unwrap();
            let disabled: Vec<_> = graph.disabled_arcs();
            complete.disable_arcs(&disabled)
        };
        let scaled_basis = enumerate_simple_cycles(&scaled_graph).unwrap();
        let mut scaled_problem = problem.clone();
        scaled_problem.drift = [
            DriftBound {
                lo: 2.0 * problem.drift[0].lo,
                hi: 2.0 * problem.drift[0].hi,
            },
            DriftBound {
                lo: 2.0 * problem.drift[1].lo,
                hi: 2.0 * problem.drift[1].hi,
            },
        ];

        let base = enumerate_optimal_gaits(&problem, &basis, 25, &config).unwrap();
        let scaled = enumerate_optimal_gaits(&scaled_problem, &scaled_basis, 25, &config).unwrap();
        assert_eq!(base.len(), scaled.len());
        for (a, b) in base.iter().zip(&scaled) {
            assert_eq!(a.circulation, b.circulation);
            assert_eq!(
                2.0 * problem.axis.component(&a.reward),
                problem.axis.component(&b.reward)
            );
        }
    }
}

#[test]
fn dropping_inert_columns_keeps_the_objective() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD00F);
    let config = SolverConfig::default();
    let mut exercised = 0;
    for _ in 0..30 {
        // sparse tables leave many zero-reward arcs, so inert cycles appear
        let n: u32 = rng.gen_range(3..=4);
        let spec = RobotSpec::uniform(1, n).unwrap();
        let states: Vec<_> = spec.states().collect();
        let mut table = RewardTable::empty();
        for from in &states {
            for to in &states {
                if from != to && rng.gen_bool(0.5) {
                    let mut quarter = || f64::from(rng.gen_range(-16..=16)) / 4.0;
                    table.insert(
                        from.clone(),
                        to.clone(),
                        RewardVector::new(quarter(), quarter(), quarter()),
                    );
                }
            }
        }
        let graph = TransitionGraph::complete(&spec, &table).unwrap();
        let basis = enumerate_simple_cycles(&graph).unwrap();
        let problem = GaitProblem::new(
            [Axis::X, Axis::Y, Axis::Theta][rng.gen_range(0..3)],
            if rng.gen_bool(0.5) { Sense::Maximize } else { Sense::Minimize },
            [DriftBound::symmetric(1.0), DriftBound::symmetric(5.0)],
            rng.gen_range(4..=8),
        )
        .unwrap();
        let [a1, a2] = problem.axis.others();
        let inert = |reward: &RewardVector| {
            problem.axis.component(reward) == 0.0
                && a1.component(reward) == 0.0
                && a2.component(reward) == 0.0
        };
        let filtered = basis.filtered(|i, _| !inert(&basis.reward(i).unwrap()));
        if filtered.len() == basis.len() || filtered.is_empty() {
            continue;
        }
        exercised += 1;
        let full = solve_gait(&problem, &basis, &config).unwrap();
        let slim = solve_gait(&problem, &filtered, &config).unwrap();
        assert_eq!(
            problem.axis.component(&full.reward),
            problem.axis.component(&slim.reward)
        );
    }
    assert!(exercised > 0, "no instance had inert columns");
}
