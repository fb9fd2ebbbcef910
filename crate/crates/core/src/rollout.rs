//! Turning circulations into executable walks and predicting the resulting
//! planar pose.
//!
//! A circulation fixes a multiset of arcs but no order. Sequencing performs a
//! Hierholzer-style traversal of that multiset from a start node, which
//! succeeds exactly when the selected arcs form one connected, balanced
//! component containing the start (circulations are balanced by
//! construction). Disconnected selections are refused rather than silently
//! bridged, since inserting unplanned transitions would change the gait's
//! reward.
//!
//! Pose integration comes in two flavors: the linear model simply sums arc
//! rewards, while SE(2) composition rotates each translation through the
//! heading accumulated so far (translation applies at the pre-transition
//! heading, rotation after). Angles are degrees at the interface and radians
//! only inside the trigonometry. Headings accumulate without wrapping so that
//! closed-walk headings equal the plain sum of rotation rewards;
//! [`Pose::normalized`] maps into (-180, 180] for display.

use std::io::Write;

use crate::error::{Error, Result};
use crate::graph::{ArcId, RewardVector, TransitionGraph};
use crate::planner::Circulation;
use crate::cycles::CycleBasis;
use crate::state_space::NodeId;

/// Planar pose: position in length units, heading in degrees.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose {
    pub const ORIGIN: Pose = Pose {
        x: 0.0,
        y: 0.0,
        theta: 0.0,
    };

    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self { x, y, theta }
    }

    /// Same pose with the heading wrapped into (-180, 180].
    pub fn normalized(self) -> Self {
        let mut theta = self.theta % 360.0;
        if theta <= -180.0 {
            theta += 360.0;
        } else if theta > 180.0 {
            theta -= 360.0;
        }
        Pose { theta, ..self }
    }
}

/// A node sequence joined by enabled arcs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Walk {
    nodes: Vec<NodeId>,
    arcs: Vec<ArcId>,
}

impl Walk {
    /// A walk standing still at one node.
    pub fn single(node: NodeId) -> Self {
        Self {
            nodes: vec![node],
            arcs: Vec::new(),
        }
    }

    /// Walk along the given node sequence; every consecutive pair must be
    /// joined by an enabled arc. Unlike cycles, walks may revisit nodes and
    /// need not return to the start.
    pub fn from_nodes(nodes: &[NodeId], graph: &TransitionGraph) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidCycle("a walk needs at least one node".into()));
        }
        let mut arcs = Vec::with_capacity(nodes.len() - 1);
        for pair in nodes.windows(2) {
            let arc = graph
                .arc_between(pair[0], pair[1])
                .filter(|&id| graph.is_arc_enabled(id))
                .ok_or_else(|| {
                    Error::InvalidCycle(format!("no enabled arc {} -> {}", pair[0], pair[1]))
                })?;
            arcs.push(arc);
        }
        Ok(Self {
            nodes: nodes.to_vec(),
            arcs,
        })
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn arcs(&self) -> &[ArcId] {
        &self.arcs
    }

    /// Number of transitions.
    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }
}

/// Pose after each transition of a walk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceStep {
    pub step: u32,
    pub from: NodeId,
    pub to: NodeId,
    pub pose: Pose,
}

/// Order the arc multiset of a circulation into a closed walk from `start`.
pub fn sequence_circulation(
    circulation: &Circulation,
    basis: &CycleBasis,
    graph: &TransitionGraph,
    start: NodeId,
) -> Result<Walk> {
    if circulation.is_empty() {
        return Err(Error::NotExecutable(
            "the circulation is empty; there is nothing to sequence".into(),
        ));
    }
    if !graph.is_node_enabled(start) {
        return Err(Error::NotExecutable(format!(
            "start node {start} is disabled"
        )));
    }

    // multiset of required arcs, per-node out-queues in ascending arc order
    let node_count = graph.node_count();
    let mut out: Vec<Vec<(ArcId, u32)>> = vec![Vec::new(); node_count];
    let mut total_arcs: u64 = 0;
    for (idx, count) in circulation.iter() {
        let cycle = basis.cycle(idx).ok_or(Error::DimensionMismatch {
            expected: basis.len(),
            got: idx + 1,
        })?;
        for &arc_id in cycle.arcs() {
            if !graph.is_arc_enabled(arc_id) {
                return Err(Error::NotExecutable(format!(
                    "selected arc {arc_id} is disabled"
                )));
            }
            let arc = graph.arc(arc_id).expect("basis arc exists");
            let queue = &mut out[arc.from.get() as usize - 1];
            match queue.iter_mut().find(|(id, _)| *id == arc_id) {
                Some((_, c)) => *c += count,
                None => queue.push((arc_id, count)),
            }
            total_arcs += u64::from(count);
        }
    }
    for queue in &mut out {
        queue.sort_unstable_by_key(|&(id, _)| id);
    }
    if out[start.get() as usize - 1].is_empty() {
        return Err(Error::NotExecutable(format!(
            "start node {start} lies on none of the selected cycles"
        )));
    }

    // Hierholzer: greedy walk with backtracking, consuming smallest arc ids
    // first for deterministic output.
    let mut stack: Vec<(NodeId, Option<ArcId>)> = vec![(start, None)];
    let mut circuit: Vec<(NodeId, Option<ArcId>)> = Vec::new();
    let mut consumed: u64 = 0;
    while let Some(&(node, via)) = stack.last() {
        let queue = &mut out[node.get() as usize - 1];
        match queue.iter_mut().find(|(_, c)| *c > 0) {
            Some((arc_id, c)) => {
                *c -= 1;
                consumed += 1;
                let next = graph.arc(*arc_id).expect("arc exists").to;
                stack.push((next, Some(*arc_id)));
            }
            None => {
                circuit.push((node, via));
                stack.pop();
            }
        }
    }
    circuit.reverse();

    if consumed < total_arcs {
        let components = leftover_components(graph, &out);
        return Err(Error::NotExecutable(format!(
            "the selected cycles do not form a connected arc multiset reachable from {start}; \
             unreached component(s): {components}"
        )));
    }

    let nodes: Vec<NodeId> = circuit.iter().map(|&(n, _)| n).collect();
    let arcs: Vec<ArcId> = circuit.iter().filter_map(|&(_, a)| a).collect();
    debug_assert_eq!(nodes.len(), arcs.len() + 1);
    Ok(Walk { nodes, arcs })
}

fn leftover_components(graph: &TransitionGraph, out: &[Vec<(ArcId, u32)>]) -> String {
    // union-find over endpoints of unconsumed arcs
    let mut parent: Vec<usize> = (0..out.len()).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    let mut involved = vec![false; out.len()];
    for queue in out {
        for &(arc_id, count) in queue {
            if count == 0 {
                continue;
            }
            let arc = graph.arc(arc_id).expect("arc exists");
            let (a, b) = (arc.from.get() as usize - 1, arc.to.get() as usize - 1);
            involved[a] = true;
            involved[b] = true;
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<String>> = Default::default();
    for (i, &used) in involved.iter().enumerate() {
        if used {
            let root = find(&mut parent, i);
            groups
                .entry(root)
                .or_default()
                .push(NodeId::new(i as u32 + 1).to_string());
        }
    }
    groups
        .values()
        .map(|nodes| format!("{{{}}}", nodes.join(", ")))
        .collect::<Vec<_>>()
        .join(", ")
}

fn arc_reward(rewards: &[RewardVector], arc: ArcId) -> Result<RewardVector> {
    rewards
        .get(arc.column())
        .copied()
        .ok_or(Error::DimensionMismatch {
            expected: arc.get() as usize,
            got: rewards.len(),
        })
}

/// Small-angle model: the componentwise sum of traversed arc rewards,
/// independent of traversal order.
pub fn integrate_linear(walk: &Walk, rewards: &[RewardVector]) -> Result<Pose> {
    let mut sum = RewardVector::ZERO;
    for &arc in walk.arcs() {
        sum += arc_reward(rewards, arc)?;
    }
    Ok(Pose::new(sum.dx, sum.dy, sum.dtheta))
}

/// Linear model with the pose after every transition.
pub fn integrate_linear_trace(
    walk: &Walk,
    rewards: &[RewardVector],
) -> Result<(Pose, Vec<TraceStep>)> {
    let mut pose = Pose::ORIGIN;
    let mut trace = Vec::with_capacity(walk.len());
    for (i, &arc) in walk.arcs().iter().enumerate() {
        let r = arc_reward(rewards, arc)?;
        pose.x += r.dx;
        pose.y += r.dy;
        pose.theta += r.dtheta;
        trace.push(TraceStep {
            step: i as u32 + 1,
            from: walk.nodes()[i],
            to: walk.nodes()[i + 1],
            pose,
        });
    }
    Ok((pose, trace))
}

/// SE(2) composition from `start_pose`: each translation is rotated through
/// the heading before the transition, then the rotation reward is added to
/// the heading.
pub fn integrate_se2(
    walk: &Walk,
    rewards: &[RewardVector],
    start_pose: Pose,
) -> Result<(Pose, Vec<TraceStep>)> {
    let mut pose = start_pose;
    let mut trace = Vec::with_capacity(walk.len());
    for (i, &arc) in walk.arcs().iter().enumerate() {
        let r = arc_reward(rewards, arc)?;
        let heading = pose.theta.to_radians();
        let (sin, cos) = heading.sin_cos();
        pose.x += r.dx * cos - r.dy * sin;
        pose.y += r.dx * sin + r.dy * cos;
        pose.theta += r.dtheta;
        trace.push(TraceStep {
            step: i as u32 + 1,
            from: walk.nodes()[i],
            to: walk.nodes()[i + 1],
            pose,
        });
    }
    Ok((pose, trace))
}

/// Trace CSV: `step,from,to,x,y,theta` with states as behavior strings.
pub fn write_trace_csv<W: Write>(
    trace: &[TraceStep],
    graph: &TransitionGraph,
    writer: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["step", "from", "to", "x", "y", "theta"])?;
    let spec = graph.spec();
    for step in trace {
        w.write_record([
            step.step.to_string(),
            spec.decode(step.from)?.to_string(),
            spec.decode(step.to)?.to_string(),
            step.pose.x.to_string(),
            step.pose.y.to_string(),
            step.pose.theta.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
