//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (run with `-- --nocapture` to see them).
//!
//! Criteria, with their runtime ceilings where stated:
//!   1. state-space counts (n=4; n=8 with P=56), < 1 s
//!   2. simple-cycle counts on complete digraphs n=2..=8 match the closed
//!      form and a brute-force DFS oracle for n <= 5, < 10 s at n=8
//!   3. reference-gait cycle rewards from the bundled table, exact
//!   4. two equal-cost fault-mode circulations, both reference sequences
//!   5. solver vs exhaustive oracle on >= 100 randomized instances, < 60 s
//!   6. full-graph +X optimization beats the doubled witness cycle, < 120 s
//!   7. rollout consistency (linear = gait reward; SE(2) vs oracle)
//!   8. learning round trip reproduces the bundled table exactly
//!   9. fault-tolerant re-plan end to end through the CLI, exit 0

mod util;

use std::fs;
use std::time::{Duration, Instant};

use gaitgraph::{
    aggregate_observations, brute_force_gait, cycle_incidence, cycle_reward,
    enumerate_optimal_gaits, enumerate_simple_cycles, integrate_linear, integrate_se2,
    load_observations, load_reward_table, save_reward_table, sequence_circulation, solve_gait,
    verify_solution, Axis, Circulation, CycleBasis, DriftBound, GaitProblem, GaitStatus, NodeId,
    Pose, RewardTable, RewardVector, RobotSpec, Sense, SolverConfig, TransitionGraph,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use util::{assert_exit, data_dir, run};

fn report(criterion: u32, label: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("[acceptance] criterion {criterion} ({label}): {verdict} — {detail}");
    assert!(pass, "criterion {criterion} ({label}) failed: {detail}");
}

fn within(elapsed: Duration, ceiling_s: u64) -> bool {
    elapsed <= Duration::from_secs(ceiling_s)
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

fn node_seq(graph: &TransitionGraph, states: &[&str]) -> Vec<NodeId> {
    let spec = graph.spec();
    states
        .iter()
        .map(|s| spec.encode(&spec.parse_state(s).unwrap()).unwrap())
        .collect()
}

fn reward_of_sequence(graph: &TransitionGraph, states: &[&str]) -> RewardVector {
    let incidence = cycle_incidence(&node_seq(graph, states), graph).unwrap();
    cycle_reward(graph.rewards(), &incidence).unwrap()
}

#[test]
fn criterion_1_state_space_counts() {
    let start = Instant::now();
    let two_limb = RobotSpec::uniform(2, 2).unwrap();
    let n4 = two_limb.state_count();
    let three_limb = gaitgraph::data::three_limb_robot();
    let n8 = three_limb.state_count();
    let graph = gaitgraph::data::tabletop_graph();
    let p56 = graph.arc_count();
    let elapsed = start.elapsed();
    report(
        1,
        "state-space counts",
        n4 == 4 && n8 == 8 && p56 == 56 && within(elapsed, 1),
        &format!("n(2,2)={n4}, n(3,2)={n8}, P={p56}, {elapsed:?}"),
    );
}

/// Independent oracle: all subsets, all rotations fixed at the smallest node,
/// arcs checked one by one.
fn dfs_oracle_count(graph: &TransitionGraph) -> usize {
    fn permutations(items: &[NodeId]) -> Vec<Vec<NodeId>> {
        if items.is_empty() {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for (i, &x) in items.iter().enumerate() {
            let mut rest = items.to_vec();
            rest.remove(i);
            for mut tail in permutations(&rest) {
                tail.insert(0, x);
                out.push(tail);
            }
        }
        out
    }
    let nodes = graph.enabled_nodes();
    let mut count = 0;
    for mask in 1u32..(1 << nodes.len()) {
        let subset: Vec<NodeId> = nodes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &n)| n)
            .collect();
        if subset.len() < 2 {
            continue;
        }
        for perm in permutations(&subset[1..]) {
            let mut seq = vec![subset[0]];
            seq.extend(perm);
            let closed = (0..seq.len()).all(|i| {
                graph
                    .arc_between(seq[i], seq[(i + 1) % seq.len()])
                    .map(|a| graph.is_arc_enabled(a))
                    .unwrap_or(false)
            });
            if closed {
                count += 1;
            }
        }
    }
    count
}

#[test]
fn criterion_2_cycle_enumeration_counts() {
    let closed_form = |n: u64| -> u64 { gaitgraph::cycles::complete_digraph_cycle_count(n) };
    assert_eq!(
        (2..=8u64).map(closed_form).collect::<Vec<_>>(),
        vec![1, 5, 20, 84, 409, 2365, 16064]
    );
    let mut detail = String::new();
    let mut ok = true;
    let mut n8_elapsed = Duration::ZERO;
    for n in 2..=8u32 {
        let spec = RobotSpec::uniform(1, n).unwrap();
        let graph = TransitionGraph::complete(&spec, &RewardTable::empty()).unwrap();
        let start = Instant::now();
        let basis = enumerate_simple_cycles(&graph).unwrap();
        let elapsed = start.elapsed();
        if n == 8 {
            n8_elapsed = elapsed;
        }
        let expected = closed_form(n.into());
        ok &= basis.len() as u64 == expected;
        if n <= 5 {
            ok &= basis.len() == dfs_oracle_count(&graph);
        }
        detail.push_str(&format!("K({n})={} ", basis.len()));
    }
    ok &= within(n8_elapsed, 10);
    detail.push_str(&format!("(n=8 in {n8_elapsed:?})"));
    report(2, "cycle enumeration", ok, &detail);
}

#[test]
fn criterion_3_reference_gait_arithmetic() {
    let graph = gaitgraph::data::tabletop_graph();
    let fault = graph.disable_subsystem(2, 0).unwrap();
    let cases: [(&TransitionGraph, &[&str], RewardVector); 5] = [
        (&graph, &["000", "001", "111", "100"], RewardVector::new(8.5, 0.5, 0.0)),
        (&graph, &["111", "101", "110"], RewardVector::new(6.5, 0.0, 2.0)),
        (&graph, &["000", "100", "110", "001"], RewardVector::new(-6.0, 0.0, 2.0)),
        (&graph, &["100", "110", "101"], RewardVector::new(-5.0, 0.0, 2.0)),
        (&fault, &["000", "001", "101", "100"], RewardVector::new(1.0, 0.0, -1.0)),
    ];
    let mut ok = true;
    for (g, states, expected) in &cases {
        ok &= reward_of_sequence(g, states) == *expected;
    }
    // the second fault-mode sequence shares the same cost
    ok &= reward_of_sequence(&fault, &["000", "001", "101"]) == RewardVector::new(1.0, 0.0, -1.0);
    report(
        3,
        "reference-gait arithmetic",
        ok,
        "all six sequence rewards match exactly",
    );
}

#[test]
fn criterion_4_equal_cost_fault_gaits() {
    let fault = gaitgraph::data::tabletop_graph().disable_subsystem(2, 0).unwrap();
    let basis = enumerate_simple_cycles(&fault).unwrap();
    let optima = enumerate_optimal_gaits(&forward_x(4), &basis, 5, &SolverConfig::default()).unwrap();
    let mut ok = optima.len() >= 2;
    let objective: Vec<f64> = optima.iter().map(|s| s.reward.dx).collect();
    ok &= objective.windows(2).all(|w| w[0] == w[1]);
    let mut supports: Vec<Vec<Vec<u32>>> = optima
        .iter()
        .map(|sol| {
            sol.circulation
                .iter()
                .map(|(idx, _)| {
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
    // 000 -> 001 -> 101 (N1, N2, N6) and 000 -> 001 -> 101 -> 100 (N1, N2, N6, N5)
    ok &= supports == vec![vec![vec![1, 2, 6]], vec![vec![1, 2, 6, 5]]];
    report(
        4,
        "equal-cost fault gaits",
        ok,
        &format!("{} optima at J^x = {}", optima.len(), objective.first().copied().unwrap_or(f64::NAN)),
    );
}

fn random_instance(rng: &mut ChaCha8Rng) -> (CycleBasis, GaitProblem) {
    loop {
        let n: u32 = rng.gen_range(2..=5);
        let spec = RobotSpec::uniform(1, n).unwrap();
        let states: Vec<_> = spec.states().collect();
        let mut table = RewardTable::empty();
        for from in &states {
            for to in &states {
                if from != to {
                    let mut quarter = || f64::from(rng.gen_range(-16..=16)) / 4.0;
                    table.insert(
                        from.clone(),
                        to.clone(),
                        RewardVector::new(quarter(), quarter(), quarter()),
                    );
                }
            }
        }
        let mut graph = TransitionGraph::complete(&spec, &table).unwrap();
        if n == 5 {
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
        let bound = |rng: &mut ChaCha8Rng| DriftBound {
            lo: -f64::from(rng.gen_range(0..=12)) / 4.0,
            hi: f64::from(rng.gen_range(0..=12)) / 4.0,
        };
        let problem = GaitProblem::new(
            [Axis::X, Axis::Y, Axis::Theta][rng.gen_range(0..3)],
            if rng.gen_bool(0.5) { Sense::Maximize } else { Sense::Minimize },
            [bound(rng), bound(rng)],
            rng.gen_range(2..=8),
        )
        .unwrap();
        return (basis, problem);
    }
}

#[test]
fn criterion_5_ilp_exactness_against_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC3_97A2);
    let config = SolverConfig::default();
    let instances = 110;
    for case in 0..instances {
        let (basis, problem) = random_instance(&mut rng);
        let solved = solve_gait(&problem, &basis, &config).unwrap();
        let brute = brute_force_gait(&problem, &basis, &config).unwrap();
        let a = problem.axis.component(&solved.reward);
        let b = problem.axis.component(&brute.reward);
        assert_eq!(a, b, "case {case}: objectives diverge for {problem:?}");
        assert_eq!(solved, brute, "case {case}: tie-breaking diverges");
    }
    let elapsed = start.elapsed();
    report(
        5,
        "ILP exactness",
        within(elapsed, 60),
        &format!("{instances} randomized instances, exact match, {elapsed:?}"),
    );
}

#[test]
fn criterion_6_full_graph_forward_optimization() {
    let start = Instant::now();
    let graph = gaitgraph::data::tabletop_graph();
    let basis = enumerate_simple_cycles(&graph).unwrap();
    let problem = forward_x(15);
    let config = SolverConfig::default();
    let solution = solve_gait(&problem, &basis, &config).unwrap();
    let mut ok = solution.status == GaitStatus::Optimal && solution.reward.dx >= 17.0;
    // independent re-verification from the raw reward matrix
    ok &= verify_solution(&problem, &basis, &graph, &solution, &config).is_ok();
    let elapsed = start.elapsed();
    ok &= within(elapsed, 120);
    report(
        6,
        "full-graph +X optimization",
        ok,
        &format!("J^x = {}, len = {}, {elapsed:?}", solution.reward.dx, solution.length),
    );
}

#[test]
fn criterion_7_rollout_consistency() {
    let graph = gaitgraph::data::tabletop_graph();
    let basis = enumerate_simple_cycles(&graph).unwrap();
    let mut ok = true;

    // (a) linear integration of sequenced circulations equals the gait reward
    for axis in [Axis::X, Axis::Y, Axis::Theta] {
        let problem = GaitProblem::new(
            axis,
            Sense::Maximize,
            [DriftBound::symmetric(2.0), DriftBound::symmetric(10.0)],
            10,
        )
        .unwrap()
        .with_home(NodeId::new(1));
        let solution = solve_gait(&problem, &basis, &SolverConfig::default()).unwrap();
        if solution.status != GaitStatus::Optimal {
            continue;
        }
        let walk =
            sequence_circulation(&solution.circulation, &basis, &graph, NodeId::new(1)).unwrap();
        let pose = integrate_linear(&walk, graph.rewards()).unwrap();
        ok &= (pose.x, pose.y, pose.theta)
            == (solution.reward.dx, solution.reward.dy, solution.reward.dtheta);
    }

    // (b) SE(2) equals linear when every rotation reward is zero
    let spec = graph.spec().clone();
    let mut flat = RewardTable::empty();
    for (from, to, r) in gaitgraph::data::tabletop_rewards().entries() {
        flat.insert(from.clone(), to.clone(), RewardVector::new(r.dx, r.dy, 0.0));
    }
    let flat_graph = TransitionGraph::complete(&spec, &flat).unwrap();
    let flat_basis = enumerate_simple_cycles(&flat_graph).unwrap();
    let idx = flat_basis
        .cycles()
        .iter()
        .position(|c| c.nodes().iter().map(|n| n.get()).collect::<Vec<_>>() == vec![1, 2, 8, 5])
        .unwrap();
    let walk = sequence_circulation(
        &Circulation::from_pairs([(idx as u32, 2)]),
        &flat_basis,
        &flat_graph,
        NodeId::new(1),
    )
    .unwrap();
    let linear = integrate_linear(&walk, flat_graph.rewards()).unwrap();
    let (se2, _) = integrate_se2(&walk, flat_graph.rewards(), Pose::ORIGIN).unwrap();
    ok &= se2 == linear;

    // (c) SE(2) for the reference backward walk matches the step-by-step
    // rotation-matrix oracle within 1e-3
    let walk_nodes = node_seq(&graph, &["000", "100", "110", "001", "000"]);
    let steps: Vec<[f64; 3]> = walk_nodes
        .windows(2)
        .map(|w| {
            let arc = graph.arc_between(w[0], w[1]).unwrap();
            graph.reward(arc).unwrap().as_array()
        })
        .collect();
    let mut oracle = [0.0f64; 3];
    for s in &steps {
        let h = oracle[2].to_radians();
        let rot = [[h.cos(), -h.sin()], [h.sin(), h.cos()]];
        oracle[0] += rot[0][0] * s[0] + rot[0][1] * s[1];
        oracle[1] += rot[1][0] * s[0] + rot[1][1] * s[1];
        oracle[2] += s[2];
    }
    let idx = basis
        .cycles()
        .iter()
        .position(|c| c.nodes() == &walk_nodes[..4])
        .unwrap();
    let walk = sequence_circulation(
        &Circulation::from_pairs([(idx as u32, 1)]),
        &basis,
        &graph,
        NodeId::new(1),
    )
    .unwrap();
    let (se2, _) = integrate_se2(&walk, graph.rewards(), Pose::ORIGIN).unwrap();
    ok &= (se2.x - oracle[0]).abs() < 1e-3
        && (se2.y - oracle[1]).abs() < 1e-3
        && (se2.theta - oracle[2]).abs() < 1e-3;
    report(
        7,
        "rollout consistency",
        ok,
        &format!(
            "SE(2) backward walk [{:.4}, {:.4}, {:.1}] vs oracle [{:.4}, {:.4}, {:.1}]",
            se2.x, se2.y, se2.theta, oracle[0], oracle[1], oracle[2]
        ),
    );
}

#[test]
fn criterion_8_learning_round_trip() {
    let spec = gaitgraph::data::three_limb_robot();
    let bundled = gaitgraph::data::tabletop_rewards();

    // the bundled observation log is a synthetic log whose weighted means
    // equal the table rows
    let text = fs::read_to_string(data_dir().join("observations_tabletop.jsonl")).unwrap();
    let records = load_observations(text.as_bytes(), &spec).unwrap();
    let learned = aggregate_observations(&records).unwrap();
    let mut ok = learned.len() == bundled.len();
    for (from, to, expected) in bundled.entries() {
        ok &= learned.get(from, to) == Some(expected);
    }

    // save + reload reproduces it exactly
    let mut buf = Vec::new();
    save_reward_table(&learned, &mut buf).unwrap();
    let reloaded = load_reward_table(buf.as_slice(), &spec).unwrap().table;
    ok &= reloaded.len() == bundled.len();
    for (from, to, expected) in bundled.entries() {
        ok &= reloaded.get(from, to) == Some(expected);
    }
    report(
        8,
        "learning round trip",
        ok,
        "aggregate → save → reload equals the bundled table exactly",
    );
}

#[test]
fn criterion_9_fault_workflow_via_cli() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out_s = out.to_str().unwrap();
    let data = data_dir();
    let spec = data.join("three_limb_robot.json");

    let output = run(&[
        "--spec", spec.to_str().unwrap(),
        "--rewards", data.join("appendixB_tabletop.csv").to_str().unwrap(),
        "--out", out_s,
        "graph", "build",
    ]);
    assert_exit(&output, 0);
    let output = run(&["--out", out_s, "fault", "disable", "--subsystem", "2", "--stuck", "0"]);
    assert_exit(&output, 0);
    let output = run(&["--out", out_s, "cycles", "enumerate"]);
    assert_exit(&output, 0);
    let output = run(&[
        "--out", out_s,
        "gait", "plan", data.join("problems/forward_x.json").to_str().unwrap(),
    ]);
    assert_exit(&output, 0);

    // no selected cycle may touch a node of the failed subsystem
    let cycles: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("cycles.json")).unwrap()).unwrap();
    let solution: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("solution.json")).unwrap()).unwrap();
    let mut ok = solution["status"] == "optimal";
    let banned = [3u64, 4, 7, 8];
    let mut used_cycles = 0;
    for (idx, count) in solution["coefficients"].as_object().unwrap() {
        assert!(count.as_u64().unwrap() > 0);
        let cycle = &cycles.as_array().unwrap()[idx.parse::<usize>().unwrap()];
        used_cycles += 1;
        for node in cycle["nodes"].as_array().unwrap() {
            ok &= !banned.contains(&node.as_u64().unwrap());
        }
    }
    ok &= used_cycles > 0;
    report(
        9,
        "fault-tolerant re-plan via CLI",
        ok,
        &format!(
            "replanned gait J^x = {} avoiding N3/N4/N7/N8",
            solution["reward"][0]
        ),
    );
}
