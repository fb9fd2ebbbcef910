//! Directed state-transition graph with reward-vector arc weights.
//!
//! A complete graph on n states has P = n(n-1) arcs, numbered 1..=P in
//! lexicographic (from, to) order. Graphs are immutable snapshots: pruning
//! and fault isolation return edited copies, which keeps pre- and post-fault
//! plans comparable.

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::rewards::RewardTable;
use crate::state_space::{NodeId, RobotSpec};

/// Largest supported arc count for a freshly built complete graph.
const MAX_ARCS: u64 = 4_000_000;

/// Planar displacement (length units) and rotation (degrees) produced by one
/// state transition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RewardVector {
    pub dx: f64,
    pub dy: f64,
    pub dtheta: f64,
}

impl RewardVector {
    pub const ZERO: RewardVector = RewardVector {
        dx: 0.0,
        dy: 0.0,
        dtheta: 0.0,
    };

    pub fn new(dx: f64, dy: f64, dtheta: f64) -> Self {
        Self { dx, dy, dtheta }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.dx, self.dy, self.dtheta]
    }

    pub fn is_finite(&self) -> bool {
        self.dx.is_finite() && self.dy.is_finite() && self.dtheta.is_finite()
    }
}

impl std::ops::Add for RewardVector {
    type Output = RewardVector;
    fn add(self, rhs: RewardVector) -> RewardVector {
        RewardVector::new(self.dx + rhs.dx, self.dy + rhs.dy, self.dtheta + rhs.dtheta)
    }
}

impl std::ops::AddAssign for RewardVector {
    fn add_assign(&mut self, rhs: RewardVector) {
        self.dx += rhs.dx;
        self.dy += rhs.dy;
        self.dtheta += rhs.dtheta;
    }
}

impl fmt::Display for RewardVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.dx, self.dy, self.dtheta)
    }
}

// Serialized as the 3-array [dx, dy, dtheta] in every file format.
impl Serialize for RewardVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut tup = serializer.serialize_tuple(3)?;
        tup.serialize_element(&self.dx)?;
        tup.serialize_element(&self.dy)?;
        tup.serialize_element(&self.dtheta)?;
        tup.end()
    }
}

impl<'de> Deserialize<'de> for RewardVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = RewardVector;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a [dx, dy, dtheta] array")
            }
            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<RewardVector, A::Error> {
                let dx = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let dy = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(1, &self))?;
                let dtheta =
                    seq.next_element()?.ok_or_else(|| de::Error::invalid_length(2, &self))?;
                if seq.next_element::<f64>()?.is_some() {
                    return Err(de::Error::invalid_length(4, &self));
                }
                Ok(RewardVector::new(dx, dy, dtheta))
            }
        }
        deserializer.deserialize_tuple(3, V)
    }
}

/// 1-based arc index into the canonical (from, to)-lexicographic ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArcId(u32);

impl ArcId {
    pub fn new(index: u32) -> Self {
        ArcId(index)
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Zero-based column index into the reward matrix.
    pub fn column(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{}", self.0)
    }
}

/// Directed arc between two distinct nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arc {
    pub id: ArcId,
    pub from: NodeId,
    pub to: NodeId,
}

/// Immutable transition graph: every ordered node pair is an arc; pruning and
/// fault isolation toggle arcs/nodes off rather than removing them, so arc
/// ids and the reward matrix layout stay stable across edits.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionGraph {
    spec: RobotSpec,
    arcs: Vec<Arc>,
    rewards: Vec<RewardVector>,
    node_enabled: Vec<bool>,
    arc_enabled: Vec<bool>,
}

impl TransitionGraph {
    /// Build the complete graph over all states of `spec`, taking arc rewards
    /// from `table`. Ordered pairs missing from the table default to the zero
    /// reward; [`RewardTable::missing_pairs`] lists them for diagnostics.
    pub fn complete(spec: &RobotSpec, table: &RewardTable) -> Result<Self> {
        table.check_states(spec)?;
        let n = spec.state_count();
        let p = n * (n - 1);
        if p > MAX_ARCS {
            return Err(Error::ResourceLimit {
                what: "arc count",
                limit: MAX_ARCS,
                reached: p,
            });
        }
        let n = n as u32;
        let states: Vec<_> = spec.states().collect();
        let mut arcs = Vec::with_capacity(p as usize);
        let mut rewards = Vec::with_capacity(p as usize);
        for u in 1..=n {
            for v in 1..=n {
                if u == v {
                    continue;
                }
                let id = ArcId::new(arcs.len() as u32 + 1);
                arcs.push(Arc {
                    id,
                    from: NodeId::new(u),
                    to: NodeId::new(v),
                });
                let reward = table
                    .get(&states[u as usize - 1], &states[v as usize - 1])
                    .unwrap_or(RewardVector::ZERO);
                rewards.push(reward);
            }
        }
        Ok(Self {
            spec: spec.clone(),
            node_enabled: vec![true; n as usize],
            arc_enabled: vec![true; arcs.len()],
            arcs,
            rewards,
        })
    }

    pub fn spec(&self) -> &RobotSpec {
        &self.spec
    }

    pub fn node_count(&self) -> usize {
        self.node_enabled.len()
    }

    /// Total arc count P (enabled or not); the reward matrix has P columns.
    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: ArcId) -> Option<&Arc> {
        self.arcs.get(id.get() as usize - 1)
    }

    /// Reward matrix as one column per arc, column k-1 belonging to arc k.
    pub fn rewards(&self) -> &[RewardVector] {
        &self.rewards
    }

    pub fn reward(&self, id: ArcId) -> Option<RewardVector> {
        self.rewards.get(id.column()).copied()
    }

    /// Structural arc lookup; the arc may still be disabled.
    pub fn arc_between(&self, from: NodeId, to: NodeId) -> Option<ArcId> {
        let n = self.node_count() as u32;
        let (u, v) = (from.get(), to.get());
        if u == 0 || v == 0 || u > n || v > n || u == v {
            return None;
        }
        let within = if v < u { v - 1 } else { v - 2 };
        Some(ArcId::new((u - 1) * (n - 1) + within + 1))
    }

    pub fn is_node_enabled(&self, node: NodeId) -> bool {
        let i = node.get();
        i >= 1 && self.node_enabled.get(i as usize - 1).copied().unwrap_or(false)
    }

    pub fn is_arc_enabled(&self, id: ArcId) -> bool {
        let i = id.get();
        i >= 1 && self.arc_enabled.get(i as usize - 1).copied().unwrap_or(false)
    }

    pub fn enabled_nodes(&self) -> Vec<NodeId> {
        (1..=self.node_count() as u32)
            .map(NodeId::new)
            .filter(|&n| self.is_node_enabled(n))
            .collect()
    }

    pub fn disabled_nodes(&self) -> Vec<NodeId> {
        (1..=self.node_count() as u32)
            .map(NodeId::new)
            .filter(|&n| !self.is_node_enabled(n))
            .collect()
    }

    pub fn enabled_arcs(&self) -> impl Iterator<Item = &Arc> {
        self.arcs.iter().filter(|a| self.is_arc_enabled(a.id))
    }

    pub fn enabled_arc_count(&self) -> usize {
        self.arc_enabled.iter().filter(|&&e| e).count()
    }

    pub fn disabled_arcs(&self) -> Vec<ArcId> {
        self.arcs
            .iter()
            .filter(|a| !self.is_arc_enabled(a.id))
            .map(|a| a.id)
            .collect()
    }

    /// Disable every arc whose reward is componentwise below `threshold`
    /// in absolute value (|dx| < t.dx AND |dy| < t.dy AND |dtheta| < t.dtheta).
    /// The comparison is strict, so a zero threshold disables nothing.
    pub fn prune_arcs(&self, threshold: &RewardVector) -> Self {
        let mut out = self.clone();
        for arc in &self.arcs {
            let r = self.rewards[arc.id.column()];
            if r.dx.abs() < threshold.dx
                && r.dy.abs() < threshold.dy
                && r.dtheta.abs() < threshold.dtheta
            {
                out.arc_enabled[arc.id.column()] = false;
            }
        }
        out
    }

    /// Fault isolation: disable every node whose state does not have
    /// `subsystem` (1-based) stuck at behavior `stuck`, along with all arcs
    /// incident to a disabled node.
    pub fn disable_subsystem(&self, subsystem: usize, stuck: u32) -> Result<Self> {
        let m = self.spec.subsystem_count();
        if subsystem == 0 || subsystem > m {
            return Err(Error::InvalidSpec(format!(
                "subsystem {subsystem} out of range 1..={m}"
            )));
        }
        let behaviors = self.spec.subsystems()[subsystem - 1].behaviors;
        if stuck >= behaviors {
            return Err(Error::InvalidSpec(format!(
                "stuck behavior {stuck} out of range 0..{behaviors} for subsystem {subsystem}"
            )));
        }
        let disable: Vec<NodeId> = (1..=self.node_count() as u32)
            .map(NodeId::new)
            .filter(|&node| {
                let state = self.spec.decode(node).expect("index in range");
                state.values()[subsystem - 1] != stuck
            })
            .collect();
        Ok(self.disable_nodes(&disable))
    }

    /// Disable the given nodes and every arc incident to them.
    pub fn disable_nodes(&self, nodes: &[NodeId]) -> Self {
        let mut out = self.clone();
        for &node in nodes {
            let i = node.get();
            if i >= 1 && (i as usize) <= out.node_enabled.len() {
                out.node_enabled[i as usize - 1] = false;
            }
        }
        for arc in &out.arcs {
            if !out.is_node_enabled(arc.from) || !out.is_node_enabled(arc.to) {
                out.arc_enabled[arc.id.column()] = false;
            }
        }
        out
    }

    /// Disable a single arc, leaving its endpoints enabled.
    pub fn disable_arc(&self, id: ArcId) -> Self {
        let mut out = self.clone();
        if id.get() >= 1 && (id.get() as usize) <= out.arc_enabled.len() {
            out.arc_enabled[id.column()] = false;
        }
        out
    }

    pub fn disable_arcs(&self, ids: &[ArcId]) -> Self {
        let mut out = self.clone();
        for id in ids {
            if id.get() >= 1 && (id.get() as usize) <= out.arc_enabled.len() {
                out.arc_enabled[id.column()] = false;
            }
        }
        out
    }

    /// DOT rendering: node labels are behavior strings, arc labels reward
    /// triples. Disabled nodes are drawn dotted; disabled arcs are omitted.
    pub fn write_dot<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "digraph gait {{")?;
        writeln!(w, "  rankdir=LR;")?;
        for i in 1..=self.node_count() as u32 {
            let node = NodeId::new(i);
            let state = self.spec.decode(node).expect("index in range");
            if self.is_node_enabled(node) {
                writeln!(w, "  \"{state}\" [shape=circle];")?;
            } else {
                writeln!(w, "  \"{state}\" [shape=circle, style=dotted];")?;
            }
        }
        for arc in self.enabled_arcs() {
            let from = self.spec.decode(arc.from).expect("index in range");
            let to = self.spec.decode(arc.to).expect("index in range");
            let reward = self.rewards[arc.id.column()];
            writeln!(w, "  \"{from}\" -> \"{to}\" [label=\"{reward}\"];")?;
        }
        writeln!(w, "}}")?;
        Ok(())
    }

    pub fn to_dot(&self) -> String {
        let mut buf = Vec::new();
        self.write_dot(&mut buf).expect("write to vec");
        String::from_utf8(buf).expect("dot is utf-8")
    }
}
