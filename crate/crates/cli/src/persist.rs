//! On-disk graph state: `graph.json` written by `graph build` and edited by
//! `fault disable`, so later plan/rollout calls see the same graph without
//! hidden session state.

use serde::{Deserialize, Serialize};

use gaitgraph::{
    ArcId, Error, NodeId, Result, RewardTable, RewardVector, RobotSpec, TransitionGraph,
};

#[derive(Serialize, Deserialize)]
pub struct GraphFile {
    pub spec: RobotSpec,
    pub arcs: Vec<ArcEntry>,
    pub disabled_nodes: Vec<u32>,
    pub disabled_arcs: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
pub struct ArcEntry {
    pub id: u32,
    pub from: u32,
    pub to: u32,
    pub reward: RewardVector,
}

pub fn graph_to_file(graph: &TransitionGraph) -> GraphFile {
    GraphFile {
        spec: graph.spec().clone(),
        arcs: graph
            .arcs()
            .iter()
            .map(|arc| ArcEntry {
                id: arc.id.get(),
                from: arc.from.get(),
                to: arc.to.get(),
                reward: graph.reward(arc.id).expect("arc reward"),
            })
            .collect(),
        disabled_nodes: graph.disabled_nodes().iter().map(|n| n.get()).collect(),
        disabled_arcs: graph.disabled_arcs().iter().map(|a| a.get()).collect(),
    }
}

pub fn graph_from_file(file: &GraphFile) -> Result<TransitionGraph> {
    let mut table = RewardTable::empty();
    for entry in &file.arcs {
        let from = file.spec.decode(NodeId::new(entry.from))?;
        let to = file.spec.decode(NodeId::new(entry.to))?;
        table.insert(from, to, entry.reward);
    }
    let graph = TransitionGraph::complete(&file.spec, &table)?;
    if file.arcs.len() != graph.arc_count() {
        return Err(Error::InvalidTable(format!(
            "graph file lists {} arcs, spec implies {}",
            file.arcs.len(),
            graph.arc_count()
        )));
    }
    for entry in &file.arcs {
        let expected = graph
            .arc_between(NodeId::new(entry.from), NodeId::new(entry.to))
            .map(ArcId::get);
        if expected != Some(entry.id) {
            return Err(Error::InvalidTable(format!(
                "graph file arc {} -> {} carries id {}, canonical order says {:?}",
                entry.from, entry.to, entry.id, expected
            )));
        }
    }
    let disabled_nodes: Vec<NodeId> = file.disabled_nodes.iter().map(|&n| NodeId::new(n)).collect();
    let disabled_arcs: Vec<ArcId> = file.disabled_arcs.iter().map(|&a| ArcId::new(a)).collect();
    Ok(graph
        .disable_nodes(&disabled_nodes)
        .disable_arcs(&disabled_arcs))
}

pub fn to_json(file: &GraphFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("graph file serializes");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<GraphFile> {
    Ok(serde_json::from_str(text)?)
}
