//! Simple-cycle enumeration: the linear basis for locomotion gaits.
//!
//! Enumeration uses the start-anchored blocking search of Johnson's
//! elementary-circuits algorithm: for each node s in ascending order, search
//! the subgraph induced by nodes >= s for cycles through s, with blocked
//! sets and unblock lists keeping the search output-sensitive. Every cycle is
//! found exactly once and already in canonical rotation (its smallest node
//! first). The final basis is sorted by length, then by node sequence, so
//! enumeration order is deterministic and cycle indices are stable.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ArcId, RewardVector, TransitionGraph};
use crate::state_space::NodeId;

/// Default ceiling on the number of enumerated cycles.
pub const DEFAULT_CYCLE_CAP: usize = 1_000_000;

/// A closed node sequence with no repeated nodes; the first node is the
/// smallest and is implicitly repeated at the end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleCycle {
    nodes: Vec<NodeId>,
    arcs: Vec<ArcId>,
}

impl SimpleCycle {
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn arcs(&self) -> &[ArcId] {
        &self.arcs
    }

    /// Number of arcs (equals the number of distinct nodes).
    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn contains_node(&self, node: NodeId) -> bool {
        self.nodes.contains(&node)
    }

    /// 0/1 arc-incidence vector of length `arc_count`.
    pub fn incidence(&self, arc_count: usize) -> Vec<bool> {
        let mut v = vec![false; arc_count];
        for arc in &self.arcs {
            v[arc.column()] = true;
        }
        v
    }
}

/// All simple cycles of a graph plus their reward vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleBasis {
    cycles: Vec<SimpleCycle>,
    rewards: Vec<RewardVector>,
}

impl CycleBasis {
    /// Number of cycles K.
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn cycles(&self) -> &[SimpleCycle] {
        &self.cycles
    }

    pub fn cycle(&self, index: usize) -> Option<&SimpleCycle> {
        self.cycles.get(index)
    }

    /// Cycle rewards J_i, one column per cycle.
    pub fn rewards(&self) -> &[RewardVector] {
        &self.rewards
    }

    pub fn reward(&self, index: usize) -> Option<RewardVector> {
        self.rewards.get(index).copied()
    }

    /// Basis restricted to the cycles `keep` accepts; preserves order (and
    /// therefore renumbers cycle indices).
    pub fn filtered(&self, mut keep: impl FnMut(usize, &SimpleCycle) -> bool) -> CycleBasis {
        let mut cycles = Vec::new();
        let mut rewards = Vec::new();
        for (i, (cycle, &reward)) in self.cycles.iter().zip(&self.rewards).enumerate() {
            if keep(i, cycle) {
                cycles.push(cycle.clone());
                rewards.push(reward);
            }
        }
        CycleBasis { cycles, rewards }
    }

    /// JSON export: an array of `{nodes, length, reward}` objects.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct CycleJson<'a> {
            nodes: &'a [NodeId],
            length: usize,
            reward: RewardVector,
        }
        let items: Vec<CycleJson> = self
            .cycles
            .iter()
            .zip(&self.rewards)
            .map(|(c, &reward)| CycleJson {
                nodes: c.nodes(),
                length: c.len(),
                reward,
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&items).expect("basis serializes");
        s.push('\n');
        s
    }
}

/// Enumerate all simple cycles of the enabled subgraph with the default cap.
pub fn enumerate_simple_cycles(graph: &TransitionGraph) -> Result<CycleBasis> {
    enumerate_simple_cycles_capped(graph, DEFAULT_CYCLE_CAP)
}

/// Enumerate all simple cycles of the enabled subgraph. Exceeding `cap`
/// cycles is an error reporting the partial count, never silent truncation.
pub fn enumerate_simple_cycles_capped(graph: &TransitionGraph, cap: usize) -> Result<CycleBasis> {
    let nodes = graph.enabled_nodes();
    let count = nodes.len();
    let index_of = |node: NodeId| nodes.binary_search(&node).expect("enabled node");

    // adjacency over enabled arcs, targets ascending
    let mut adj: Vec<Vec<(usize, ArcId)>> = vec![Vec::new(); count];
    for arc in graph.enabled_arcs() {
        adj[index_of(arc.from)].push((index_of(arc.to), arc.id));
    }
    for list in &mut adj {
        list.sort_unstable();
    }

    let mut search = CycleSearch {
        adj: &adj,
        blocked: vec![false; count],
        unblock_list: vec![Vec::new(); count],
        node_path: Vec::new(),
        arc_path: Vec::new(),
        start: 0,
        cap,
        found: Vec::new(),
    };
    for start in 0..count {
        search.start = start;
        for i in start..count {
            search.blocked[i] = false;
            search.unblock_list[i].clear();
        }
        search.circuit(start)?;
    }

    let mut cycles: Vec<SimpleCycle> = search
        .found
        .into_iter()
        .map(|(node_idxs, arcs)| SimpleCycle {
            nodes: node_idxs.into_iter().map(|i| nodes[i]).collect(),
            arcs,
        })
        .collect();
    cycles.sort_by(|a, b| (a.len(), a.nodes()).cmp(&(b.len(), b.nodes())));

    let matrix = graph.rewards();
    let rewards = cycles
        .iter()
        .map(|c| {
            let mut sum = RewardVector::ZERO;
            for arc in c.arcs() {
                sum += matrix[arc.column()];
            }
            sum
        })
        .collect();
    Ok(CycleBasis { cycles, rewards })
}

struct CycleSearch<'a> {
    adj: &'a [Vec<(usize, ArcId)>],
    blocked: Vec<bool>,
    unblock_list: Vec<Vec<usize>>,
    node_path: Vec<usize>,
    arc_path: Vec<ArcId>,
    start: usize,
    cap: usize,
    found: Vec<(Vec<usize>, Vec<ArcId>)>,
}

impl CycleSearch<'_> {
    // Returns whether a cycle was closed somewhere below `v`.
    fn circuit(&mut self, v: usize) -> Result<bool> {
        let mut found_here = false;
        self.node_path.push(v);
        self.blocked[v] = true;
        for i in 0..self.adj[v].len() {
            let (w, arc) = self.adj[v][i];
            if w < self.start {
                continue;
            }
            if w == self.start {
                if self.found.len() == self.cap {
                    return Err(Error::ResourceLimit {
                        what: "cycle count",
                        limit: self.cap as u64,
                        reached: self.cap as u64,
                    });
                }
                let mut arcs = self.arc_path.clone();
                arcs.push(arc);
                self.found.push((self.node_path.clone(), arcs));
                found_here = true;
            } else if !self.blocked[w] {
                self.arc_path.push(arc);
                let nested = self.circuit(w)?;
                self.arc_path.pop();
                found_here |= nested;
            }
        }
        if found_here {
            self.unblock(v);
        } else {
            for &(w, _) in &self.adj[v] {
                if w >= self.start && !self.unblock_list[w].contains(&v) {
                    self.unblock_list[w].push(v);
                }
            }
        }
        self.node_path.pop();
        Ok(found_here)
    }

    fn unblock(&mut self, v: usize) {
        self.blocked[v] = false;
        let waiting = std::mem::take(&mut self.unblock_list[v]);
        for w in waiting {
            if self.blocked[w] {
                self.unblock(w);
            }
        }
    }
}

/// 0/1 incidence vector of a node sequence interpreted as a simple cycle
/// (the closing arc back to the first node is implied). Errors on repeated
/// nodes and on missing or disabled arcs.
pub fn cycle_incidence(nodes: &[NodeId], graph: &TransitionGraph) -> Result<Vec<bool>> {
    if nodes.len() < 2 {
        return Err(Error::InvalidCycle(format!(
            "a cycle needs at least 2 nodes, got {}",
            nodes.len()
        )));
    }
    let mut seen = std::collections::BTreeSet::new();
    for node in nodes {
        if !seen.insert(node) {
            return Err(Error::InvalidCycle(format!("repeated node {node}")));
        }
    }
    let mut incidence = vec![false; graph.arc_count()];
    for i in 0..nodes.len() {
        let from = nodes[i];
        let to = nodes[(i + 1) % nodes.len()];
        let arc = graph
            .arc_between(from, to)
            .filter(|&id| graph.is_arc_enabled(id))
            .ok_or_else(|| {
                Error::InvalidCycle(format!("no enabled arc {from} -> {to}"))
            })?;
        incidence[arc.column()] = true;
    }
    Ok(incidence)
}

/// Cycle reward J = R c: the sum of the reward columns selected by the
/// incidence vector.
pub fn cycle_reward(matrix: &[RewardVector], incidence: &[bool]) -> Result<RewardVector> {
    if matrix.len() != incidence.len() {
        return Err(Error::DimensionMismatch {
            expected: matrix.len(),
            got: incidence.len(),
        });
    }
    let mut sum = RewardVector::ZERO;
    for (reward, &used) in matrix.iter().zip(incidence) {
        if used {
            sum += *reward;
        }
    }
    Ok(sum)
}

/// Number of simple cycles of the complete digraph on n nodes:
/// sum over k=2..=n of C(n, k) * (k-1)!.
pub fn complete_digraph_cycle_count(n: u64) -> u64 {
    let mut total = 0u64;
    for k in 2..=n {
        let mut choose = 1u64;
        for i in 0..k {
            choose = choose * (n - i) / (i + 1);
        }
        let mut fact = 1u64;
        for i in 2..k {
            fact *= i;
        }
        total += choose * fact;
    }
    total
}
