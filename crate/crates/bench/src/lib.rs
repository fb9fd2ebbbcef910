//! Shared fixtures for the criterion benchmarks.

use gaitgraph::{enumerate_simple_cycles, CycleBasis, TransitionGraph};

/// Tabletop graph and its full cycle basis for the three-limb robot.
pub fn tabletop_fixture() -> (TransitionGraph, CycleBasis) {
    let graph = gaitgraph::data::tabletop_graph();
    let basis = enumerate_simple_cycles(&graph).expect("basis fits default cap");
    (graph, basis)
}
