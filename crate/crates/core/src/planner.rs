//! Exact gait optimization over the simple-cycle basis.
//!
//! A gait (circulation) is a nonnegative integer combination of simple
//! cycles. The planner optimizes one reward axis subject to drift intervals
//! on the other two axes, a bound on the number of state transitions, and an
//! optional weighted time budget. Rewards are snapped to a rational grid
//! (default quarters) and the search works in scaled integers, so optimal
//! values and cost ties are exact.
//!
//! Solving runs in two phases. A best-first branch-and-bound over column
//! multisets in objective-density order establishes the optimal value; the
//! admissible bound is the partial objective plus the remaining transition
//! budget times the best remaining positive density, with drift constraints
//! relaxed. A second depth-first pass then enumerates the optimal coefficient
//! vectors in lexicographic order, which makes the reported solution (the
//! lexicographically smallest optimum) and the order of alternate optima
//! deterministic.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;
use std::io::Read;

use crate::cycles::{cycle_incidence, CycleBasis};
use crate::error::{Error, Result};
use crate::graph::{RewardVector, TransitionGraph};
use crate::quant::{Quantizer, DEFAULT_DENOMINATOR};
use crate::state_space::NodeId;

/// Reward axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Theta,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Theta => 2,
        }
    }

    /// The two non-objective axes, in x < y < theta order.
    pub fn others(self) -> [Axis; 2] {
        match self {
            Axis::X => [Axis::Y, Axis::Theta],
            Axis::Y => [Axis::X, Axis::Theta],
            Axis::Theta => [Axis::X, Axis::Y],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Theta => "theta",
        }
    }

    pub fn component(self, r: &RewardVector) -> f64 {
        r.as_array()[self.index()]
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Maximize,
    Minimize,
}

/// Allowed residual interval [lo, hi] for a non-objective axis; must
/// contain zero so that the empty circulation stays feasible.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriftBound {
    pub lo: f64,
    pub hi: f64,
}

impl DriftBound {
    /// Symmetric bound [-eps, +eps].
    pub fn symmetric(eps: f64) -> Self {
        Self { lo: -eps, hi: eps }
    }
}

/// Per-arc transition durations and a total gait time budget.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeBudget {
    /// Seconds per arc, indexed by arc id - 1; length must cover every arc
    /// referenced by the basis.
    pub arc_seconds: Vec<f64>,
    pub t_max: f64,
}

/// One gait-optimization problem over a cycle basis.
#[derive(Clone, Debug, PartialEq)]
pub struct GaitProblem {
    pub axis: Axis,
    pub sense: Sense,
    /// Drift intervals for `axis.others()`, in that order.
    pub drift: [DriftBound; 2],
    /// Maximum number of state transitions in the gait.
    pub l_max: u32,
    pub time: Option<TimeBudget>,
    /// If set, only cycles containing this node are eligible.
    pub home: Option<NodeId>,
}

impl GaitProblem {
    pub fn new(axis: Axis, sense: Sense, drift: [DriftBound; 2], l_max: u32) -> Result<Self> {
        let problem = Self {
            axis,
            sense,
            drift,
            l_max,
            time: None,
            home: None,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn with_time(mut self, arc_seconds: Vec<f64>, t_max: f64) -> Result<Self> {
        self.time = Some(TimeBudget { arc_seconds, t_max });
        self.validate()?;
        Ok(self)
    }

    pub fn with_home(mut self, home: NodeId) -> Self {
        self.home = Some(home);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.l_max < 2 {
            return Err(Error::InvalidProblem(format!(
                "l_max is {}, but no cycle is shorter than 2 transitions",
                self.l_max
            )));
        }
        for (axis, bound) in self.axis.others().iter().zip(&self.drift) {
            if !(bound.lo.is_finite() && bound.hi.is_finite()) {
                return Err(Error::InvalidProblem(format!(
                    "drift bound for {axis} is not finite"
                )));
            }
            if bound.lo > 0.0 || bound.hi < 0.0 {
                return Err(Error::InvalidProblem(format!(
                    "drift interval [{}, {}] for {axis} must contain 0",
                    bound.lo, bound.hi
                )));
            }
        }
        if let Some(tb) = &self.time {
            if !(tb.t_max.is_finite() && tb.t_max >= 0.0) {
                return Err(Error::InvalidProblem(format!(
                    "t_max {} must be a nonnegative number",
                    tb.t_max
                )));
            }
            if let Some(bad) = tb.arc_seconds.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
                return Err(Error::InvalidProblem(format!(
                    "arc duration {bad} must be a nonnegative number"
                )));
            }
        }
        Ok(())
    }
}

/// Nonnegative integer cycle coefficients, stored sparsely.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Circulation {
    coeffs: Vec<(u32, u32)>,
}

impl Circulation {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Build from (cycle index, count) pairs; zero counts are dropped and
    /// duplicate indices merged.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut map: BTreeMap<u32, u32> = BTreeMap::new();
        for (idx, count) in pairs {
            if count > 0 {
                *map.entry(idx).or_insert(0) += count;
            }
        }
        Self {
            coeffs: map.into_iter().collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.coeffs.iter().map(|&(i, c)| (i as usize, c))
    }

    pub fn coefficient(&self, cycle: usize) -> u32 {
        self.coeffs
            .binary_search_by_key(&(cycle as u32), |&(i, _)| i)
            .map(|pos| self.coeffs[pos].1)
            .unwrap_or(0)
    }

    /// Total number of state transitions.
    pub fn length_in(&self, basis: &CycleBasis) -> Result<u32> {
        let mut total = 0u32;
        for (idx, count) in self.iter() {
            let cycle = basis.cycle(idx).ok_or(Error::DimensionMismatch {
                expected: basis.len(),
                got: idx + 1,
            })?;
            total += count * cycle.len() as u32;
        }
        Ok(total)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaitStatus {
    Optimal,
    /// No circulation improves on standing still; the empty circulation with
    /// zero reward is reported.
    Infeasible,
    ResourceLimit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaitSolution {
    pub circulation: Circulation,
    pub reward: RewardVector,
    pub length: u32,
    pub status: GaitStatus,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Rational grid denominator for exact arithmetic.
    pub denominator: u32,
    /// Search-node budget; exceeding it yields status `ResourceLimit` with
    /// the best incumbent found.
    pub max_nodes: u64,
    /// Drop columns whose solo drift provably cannot be compensated within
    /// the budget. Never changes the optimum; exists to shrink the search.
    pub prefilter: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            denominator: DEFAULT_DENOMINATOR,
            max_nodes: 5_000_000,
            prefilter: true,
        }
    }
}

const TIME_SCALE: u32 = 1_000_000; // microseconds

#[derive(Clone, Debug)]
struct Column {
    cycle: u32,
    len: u32,
    reward: [i64; 3],
    obj: i64,
    d1: i64,
    d2: i64,
    time: i64,
}

#[derive(Debug)]
struct ScaledInstance {
    cols: Vec<Column>,
    budget_len: u32,
    budget_time: Option<i64>,
    d1: (i64, i64),
    d2: (i64, i64),
    quant: Quantizer,
}

#[derive(Clone, Copy, Default)]
struct Acc {
    obj: i64,
    d1: i64,
    d2: i64,
    reward: [i64; 3],
    len: u32,
    time: i64,
}

impl Acc {
    fn plus(self, col: &Column, count: u32) -> Acc {
        let c = i64::from(count);
        Acc {
            obj: self.obj + c * col.obj,
            d1: self.d1 + c * col.d1,
            d2: self.d2 + c * col.d2,
            reward: [
                self.reward[0] + c * col.reward[0],
                self.reward[1] + c * col.reward[1],
                self.reward[2] + c * col.reward[2],
            ],
            len: self.len + count * col.len,
            time: self.time + c * col.time,
        }
    }
}

impl ScaledInstance {
    fn build(
        problem: &GaitProblem,
        basis: &CycleBasis,
        config: &SolverConfig,
        prefilter: bool,
    ) -> Result<Self> {
        problem.validate()?;
        if basis.is_empty() {
            return Err(Error::EmptyBasis);
        }
        let quant = Quantizer::new(config.denominator)?;
        let time_quant = Quantizer::new(TIME_SCALE).expect("fixed scale");
        let sign = match problem.sense {
            Sense::Maximize => 1i64,
            Sense::Minimize => -1i64,
        };
        let [a1, a2] = problem.axis.others();
        let budget_time = problem
            .time
            .as_ref()
            .map(|tb| time_quant.floor_bound(tb.t_max));

        let mut cols = Vec::new();
        for (i, (cycle, reward)) in basis.cycles().iter().zip(basis.rewards()).enumerate() {
            let len = cycle.len() as u32;
            if len > problem.l_max {
                continue;
            }
            if let Some(home) = problem.home {
                if !cycle.contains_node(home) {
                    continue;
                }
            }
            let time = match &problem.time {
                Some(tb) => {
                    let mut t = 0i64;
                    for arc in cycle.arcs() {
                        let seconds = *tb.arc_seconds.get(arc.column()).ok_or(
                            Error::DimensionMismatch {
                                expected: arc.get() as usize,
                                got: tb.arc_seconds.len(),
                            },
                        )?;
                        t += time_quant.scale(seconds);
                    }
                    t
                }
                None => 0,
            };
            if let Some(bt) = budget_time {
                if time > bt {
                    continue;
                }
            }
            let r = quant.scale_vector(reward);
            cols.push(Column {
                cycle: i as u32,
                len,
                reward: r,
                obj: sign * r[problem.axis.index()],
                d1: r[a1.index()],
                d2: r[a2.index()],
                time,
            });
        }
        let mut inst = ScaledInstance {
            cols,
            budget_len: problem.l_max,
            budget_time,
            d1: (
                quant.ceil_bound(problem.drift[0].lo),
                quant.floor_bound(problem.drift[0].hi),
            ),
            d2: (
                quant.ceil_bound(problem.drift[1].lo),
                quant.floor_bound(problem.drift[1].hi),
            ),
            quant,
        };
        if prefilter {
            inst.prefilter();
        }
        Ok(inst)
    }

    fn drift_ok(&self, acc: &Acc) -> bool {
        acc.d1 >= self.d1.0 && acc.d1 <= self.d1.1 && acc.d2 >= self.d2.0 && acc.d2 <= self.d2.1
    }

    fn max_count(&self, acc: &Acc, col: &Column) -> u32 {
        if col.len == 0 || col.len > self.budget_len - acc.len {
            return 0;
        }
        let mut max_c = (self.budget_len - acc.len) / col.len;
        if let Some(bt) = self.budget_time {
            if col.time > 0 {
                let by_time = ((bt - acc.time) / col.time).min(i64::from(u32::MAX));
                max_c = max_c.min(by_time as u32);
            }
        }
        max_c
    }

    /// Drop columns whose solo drift on either axis exceeds what the drift
    /// window plus a full budget of the best opposite-drift density could
    /// absorb. Such columns cannot appear in any feasible circulation.
    fn prefilter(&mut self) {
        fn best_density<'a>(
            cols: impl Iterator<Item = &'a Column>,
            value: impl Fn(&Column) -> i64,
        ) -> Option<(i64, u32)> {
            let mut best: Option<(i64, u32)> = None;
            for col in cols {
                let p = value(col);
                if p <= 0 {
                    continue;
                }
                best = Some(match best {
                    None => (p, col.len),
                    Some((bp, bl)) => {
                        if i128::from(p) * i128::from(bl) > i128::from(bp) * i128::from(col.len) {
                            (p, col.len)
                        } else {
                            (bp, bl)
                        }
                    }
                });
            }
            best
        }
        fn survivable(
            drift: i64,
            allow: i64,
            budget: u32,
            opposite: Option<(i64, u32)>,
        ) -> bool {
            let magnitude = drift.abs();
            match opposite {
                Some((p, l)) => {
                    i128::from(magnitude) * i128::from(l)
                        <= i128::from(allow) * i128::from(l) + i128::from(budget) * i128::from(p)
                }
                None => magnitude <= allow,
            }
        }

        let neg1 = best_density(self.cols.iter(), |c| -c.d1);
        let pos1 = best_density(self.cols.iter(), |c| c.d1);
        let neg2 = best_density(self.cols.iter(), |c| -c.d2);
        let pos2 = best_density(self.cols.iter(), |c| c.d2);
        let allow1 = self.d1.1 - self.d1.0;
        let allow2 = self.d2.1 - self.d2.0;
        let budget = self.budget_len;
        self.cols.retain(|c| {
            let ok1 = if c.d1 > 0 {
                survivable(c.d1, allow1, budget, neg1)
            } else {
                survivable(c.d1, allow1, budget, pos1)
            };
            let ok2 = if c.d2 > 0 {
                survivable(c.d2, allow2, budget, neg2)
            } else {
                survivable(c.d2, allow2, budget, pos2)
            };
            ok1 && ok2
        });
    }
}

struct BnbNode {
    bound: i64,
    acc: Acc,
    next: u32,
    counts: Vec<(u32, u32)>,
}

impl BnbNode {
    fn key(&self) -> (i64, i64, u32) {
        (self.bound, self.acc.obj, self.next)
    }
}

impl PartialEq for BnbNode {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}
impl Eq for BnbNode {}
impl PartialOrd for BnbNode {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for BnbNode {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

/// Phase 1: certified optimal objective value (scaled) via best-first
/// branch-and-bound. Returns the value, a witness in instance-column
/// coordinates, and whether the search completed within the node budget.
fn optimal_value(inst: &ScaledInstance, max_nodes: u64) -> (i64, Vec<(u32, u32)>, bool) {
    let mut order: Vec<u32> = (0..inst.cols.len() as u32).collect();
    order.sort_by(|&a, &b| {
        let ca = &inst.cols[a as usize];
        let cb = &inst.cols[b as usize];
        let lhs = i128::from(ca.obj) * i128::from(cb.len);
        let rhs = i128::from(cb.obj) * i128::from(ca.len);
        rhs.cmp(&lhs).then(a.cmp(&b))
    });
    let dcol = |pos: usize| &inst.cols[order[pos] as usize];
    // columns are density-sorted, so the best remaining positive density at
    // position `pos` is the column at `pos` itself (or nothing)
    let extra = |rem_len: u32, pos: usize| -> i64 {
        if pos >= order.len() {
            return 0;
        }
        let c = dcol(pos);
        if c.obj > 0 {
            ((i128::from(rem_len) * i128::from(c.obj)) / i128::from(c.len)) as i64
        } else {
            0
        }
    };

    let mut incumbent: i64 = 0; // the empty circulation is always feasible
    let mut incumbent_counts: Vec<(u32, u32)> = Vec::new();
    let finish = |v: i64, counts: Vec<(u32, u32)>, complete: bool| {
        let mapped = counts
            .into_iter()
            .map(|(pos, c)| (order[pos as usize], c))
            .collect();
        (v, mapped, complete)
    };

    let root_bound = extra(inst.budget_len, 0);
    if root_bound <= 0 {
        return (0, Vec::new(), true);
    }
    let mut heap = BinaryHeap::new();
    heap.push(BnbNode {
        bound: root_bound,
        acc: Acc::default(),
        next: 0,
        counts: Vec::new(),
    });
    let mut created: u64 = 1;
    while let Some(node) = heap.pop() {
        if node.bound <= incumbent {
            return finish(incumbent, incumbent_counts, true);
        }
        for pos in node.next as usize..order.len() {
            let col = dcol(pos);
            if inst.max_count(&node.acc, col) == 0 {
                continue;
            }
            created += 1;
            if created > max_nodes {
                return finish(incumbent, incumbent_counts, false);
            }
            let acc = node.acc.plus(col, 1);
            let bound = acc.obj + extra(inst.budget_len - acc.len, pos);
            let improves = inst.drift_ok(&acc) && acc.obj > incumbent;
            if improves {
                incumbent = acc.obj;
            }
            if improves || bound > incumbent {
                let mut counts = node.counts.clone();
                match counts.last_mut() {
                    Some(last) if last.0 == pos as u32 => last.1 += 1,
                    _ => counts.push((pos as u32, 1)),
                }
                if improves {
                    incumbent_counts = counts.clone();
                }
                if bound > incumbent {
                    heap.push(BnbNode {
                        bound,
                        acc,
                        next: pos as u32,
                        counts,
                    });
                }
            }
        }
    }
    finish(incumbent, incumbent_counts, true)
}

struct OptimaSearch<'a> {
    inst: &'a ScaledInstance,
    vstar: i64,
    max_count: usize,
    max_nodes: u64,
    suffix: Vec<Option<(i64, u32)>>,
    counts: Vec<(u32, u32)>,
    out: Vec<Vec<(u32, u32)>>,
    used: u64,
}

impl OptimaSearch<'_> {
    fn extra(&self, rem: u32, suffix: Option<(i64, u32)>) -> i64 {
        match suffix {
            Some((p, l)) => ((i128::from(rem) * i128::from(p)) / i128::from(l)) as i64,
            None => 0,
        }
    }

    // Emits coefficient vectors with objective exactly vstar in lexicographic
    // order: the all-zero completion of a prefix comes first, then children
    // by descending first-nonzero column, counts ascending.
    fn walk(&mut self, next: usize, acc: Acc) -> Result<bool> {
        self.used += 1;
        if self.used > self.max_nodes {
            return Err(Error::ResourceLimit {
                what: "search nodes",
                limit: self.max_nodes,
                reached: self.used,
            });
        }
        if acc.obj == self.vstar && self.inst.drift_ok(&acc) {
            self.out.push(self.counts.clone());
            if self.out.len() >= self.max_count {
                return Ok(false);
            }
        }
        for j in (next..self.inst.cols.len()).rev() {
            let col = &self.inst.cols[j];
            let max_c = self.inst.max_count(&acc, col);
            if max_c == 0 {
                continue;
            }
            let suffix_after = self.suffix[j + 1];
            for c in 1..=max_c {
                let child = acc.plus(col, c);
                let bound = child.obj + self.extra(self.inst.budget_len - child.len, suffix_after);
                if bound < self.vstar {
                    continue;
                }
                self.counts.push((j as u32, c));
                let keep_going = self.walk(j + 1, child)?;
                self.counts.pop();
                if !keep_going {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Phase 2: optimal coefficient vectors in lexicographic order, up to
/// `max_count`, in instance-column coordinates.
fn enumerate_at_value(
    inst: &ScaledInstance,
    vstar: i64,
    max_count: usize,
    max_nodes: u64,
) -> Result<Vec<Vec<(u32, u32)>>> {
    let k = inst.cols.len();
    let mut suffix: Vec<Option<(i64, u32)>> = vec![None; k + 1];
    for i in (0..k).rev() {
        let c = &inst.cols[i];
        let here = (c.obj > 0).then_some((c.obj, c.len));
        suffix[i] = match (here, suffix[i + 1]) {
            (None, s) => s,
            (h, None) => h,
            (Some((p1, l1)), Some((p2, l2))) => {
                if i128::from(p1) * i128::from(l2) >= i128::from(p2) * i128::from(l1) {
                    Some((p1, l1))
                } else {
                    Some((p2, l2))
                }
            }
        };
    }
    let mut search = OptimaSearch {
        inst,
        vstar,
        max_count,
        max_nodes,
        suffix,
        counts: Vec::new(),
        out: Vec::new(),
        used: 0,
    };
    search.walk(0, Acc::default())?;
    Ok(search.out)
}

fn solution_from_counts(
    inst: &ScaledInstance,
    counts: &[(u32, u32)],
    status: GaitStatus,
) -> GaitSolution {
    let mut acc = Acc::default();
    let mut pairs = Vec::with_capacity(counts.len());
    for &(ci, c) in counts {
        let col = &inst.cols[ci as usize];
        acc = acc.plus(col, c);
        pairs.push((col.cycle, c));
    }
    GaitSolution {
        circulation: Circulation::from_pairs(pairs),
        reward: inst.quant.unscale_vector(acc.reward),
        length: acc.len,
        status,
    }
}

/// Exact optimum of the gait ILP. Returns the lexicographically smallest
/// optimal coefficient vector; status is `Infeasible` when no circulation
/// beats standing still (the empty circulation is then reported), and
/// `ResourceLimit` with the best incumbent when the node budget runs out.
pub fn solve_gait(
    problem: &GaitProblem,
    basis: &CycleBasis,
    config: &SolverConfig,
) -> Result<GaitSolution> {
    let inst = ScaledInstance::build(problem, basis, config, config.prefilter)?;
    let (vstar, witness, complete) = optimal_value(&inst, config.max_nodes);
    if !complete {
        return Ok(solution_from_counts(&inst, &witness, GaitStatus::ResourceLimit));
    }
    if vstar == 0 {
        return Ok(GaitSolution {
            circulation: Circulation::empty(),
            reward: RewardVector::ZERO,
            length: 0,
            status: GaitStatus::Infeasible,
        });
    }
    match enumerate_at_value(&inst, vstar, 1, config.max_nodes) {
        Ok(solutions) => {
            let counts = solutions.first().expect("phase-1 value is attainable");
            Ok(solution_from_counts(&inst, counts, GaitStatus::Optimal))
        }
        Err(Error::ResourceLimit { .. }) => {
            Ok(solution_from_counts(&inst, &witness, GaitStatus::ResourceLimit))
        }
        Err(e) => Err(e),
    }
}

/// Up to `max_count` distinct circulations achieving the optimal objective,
/// in lexicographic coefficient order (the first equals `solve_gait`'s
/// answer). Empty when the optimum is the empty circulation.
pub fn enumerate_optimal_gaits(
    problem: &GaitProblem,
    basis: &CycleBasis,
    max_count: usize,
    config: &SolverConfig,
) -> Result<Vec<GaitSolution>> {
    if max_count == 0 {
        return Ok(Vec::new());
    }
    let inst = ScaledInstance::build(problem, basis, config, config.prefilter)?;
    let (vstar, _, complete) = optimal_value(&inst, config.max_nodes);
    if !complete {
        return Err(Error::ResourceLimit {
            what: "search nodes",
            limit: config.max_nodes,
            reached: config.max_nodes,
        });
    }
    if vstar == 0 {
        return Ok(Vec::new());
    }
    let all = enumerate_at_value(&inst, vstar, max_count, config.max_nodes)?;
    Ok(all
        .iter()
        .map(|counts| solution_from_counts(&inst, counts, GaitStatus::Optimal))
        .collect())
}

const BRUTE_MAX_COLUMNS: usize = 64;
const BRUTE_MAX_LENGTH: u32 = 12;

/// Independent oracle: exhaustive enumeration of every coefficient vector
/// within the length budget. Same contract as [`solve_gait`], guarded to
/// small instances.
pub fn brute_force_gait(
    problem: &GaitProblem,
    basis: &CycleBasis,
    config: &SolverConfig,
) -> Result<GaitSolution> {
    if basis.len() > BRUTE_MAX_COLUMNS {
        return Err(Error::ResourceLimit {
            what: "brute-force basis size",
            limit: BRUTE_MAX_COLUMNS as u64,
            reached: basis.len() as u64,
        });
    }
    if problem.l_max > BRUTE_MAX_LENGTH {
        return Err(Error::ResourceLimit {
            what: "brute-force length budget",
            limit: u64::from(BRUTE_MAX_LENGTH),
            reached: u64::from(problem.l_max),
        });
    }
    let inst = ScaledInstance::build(problem, basis, config, false)?;

    struct Best {
        obj: i64,
        counts: Vec<u32>,
    }
    // Enumerates complete coefficient vectors in lexicographic order; strict
    // improvement keeps the first (lex-smallest) vector per objective value.
    fn explore(inst: &ScaledInstance, i: usize, acc: Acc, counts: &mut Vec<u32>, best: &mut Option<Best>) {
        if i == inst.cols.len() {
            if inst.drift_ok(&acc) {
                let better = match best {
                    None => true,
                    Some(b) => acc.obj > b.obj,
                };
                if better {
                    *best = Some(Best {
                        obj: acc.obj,
                        counts: counts.clone(),
                    });
                }
            }
            return;
        }
        let col = &inst.cols[i];
        let max_c = inst.max_count(&acc, col);
        for c in 0..=max_c {
            counts[i] = c;
            explore(inst, i + 1, acc.plus(col, c), counts, best);
        }
        counts[i] = 0;
    }

    let mut counts = vec![0u32; inst.cols.len()];
    let mut best = None;
    explore(&inst, 0, Acc::default(), &mut counts, &mut best);
    let best = best.expect("the empty circulation is always feasible");
    let pairs: Vec<(u32, u32)> = best
        .counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| (i as u32, c))
        .collect();
    let status = if pairs.is_empty() {
        GaitStatus::Infeasible
    } else {
        GaitStatus::Optimal
    };
    Ok(solution_from_counts(&inst, &pairs, status))
}

/// Re-check a solution against the problem with independent arithmetic: the
/// per-cycle rewards are recomputed from the raw reward matrix via freshly
/// validated incidence vectors, never from the basis' cached rewards.
pub fn verify_solution(
    problem: &GaitProblem,
    basis: &CycleBasis,
    graph: &TransitionGraph,
    solution: &GaitSolution,
    config: &SolverConfig,
) -> Result<()> {
    problem.validate()?;
    let quant = Quantizer::new(config.denominator)?;
    let time_quant = Quantizer::new(TIME_SCALE).expect("fixed scale");
    let matrix: Vec<[i64; 3]> = graph.rewards().iter().map(|r| quant.scale_vector(r)).collect();

    let mut total = [0i64; 3];
    let mut length: u64 = 0;
    let mut time: i64 = 0;
    for (idx, count) in solution.circulation.iter() {
        let cycle = basis.cycle(idx).ok_or_else(|| {
            Error::SolutionInvalid(format!("cycle index {idx} outside basis of {}", basis.len()))
        })?;
        let incidence = cycle_incidence(cycle.nodes(), graph)?;
        let mut cycle_reward = [0i64; 3];
        let mut cycle_len = 0u64;
        let mut cycle_time = 0i64;
        for (k, &used) in incidence.iter().enumerate() {
            if used {
                for a in 0..3 {
                    cycle_reward[a] += matrix[k][a];
                }
                cycle_len += 1;
                if let Some(tb) = &problem.time {
                    let seconds = *tb.arc_seconds.get(k).ok_or(Error::DimensionMismatch {
                        expected: k + 1,
                        got: tb.arc_seconds.len(),
                    })?;
                    cycle_time += time_quant.scale(seconds);
                }
            }
        }
        for a in 0..3 {
            total[a] += i64::from(count) * cycle_reward[a];
        }
        length += u64::from(count) * cycle_len;
        time += i64::from(count) * cycle_time;
        if let Some(home) = problem.home {
            if !cycle.contains_node(home) {
                return Err(Error::SolutionInvalid(format!(
                    "cycle {idx} does not contain home node {home}"
                )));
            }
        }
    }

    let claimed = quant.scale_vector(&solution.reward);
    if claimed != total {
        return Err(Error::SolutionInvalid(format!(
            "claimed reward {:?} != recomputed {:?} (scaled)",
            claimed, total
        )));
    }
    if u64::from(solution.length) != length {
        return Err(Error::SolutionInvalid(format!(
            "claimed length {} != recomputed {length}",
            solution.length
        )));
    }
    if length > u64::from(problem.l_max) {
        return Err(Error::SolutionInvalid(format!(
            "length {length} exceeds budget {}",
            problem.l_max
        )));
    }
    let [a1, a2] = problem.axis.others();
    for (axis, bound) in [a1, a2].iter().zip(&problem.drift) {
        let value = total[axis.index()];
        let lo = quant.ceil_bound(bound.lo);
        let hi = quant.floor_bound(bound.hi);
        if value < lo || value > hi {
            return Err(Error::SolutionInvalid(format!(
                "drift {} on {axis} outside [{}, {}] (scaled)",
                value, lo, hi
            )));
        }
    }
    if let Some(tb) = &problem.time {
        if time > time_quant.floor_bound(tb.t_max) {
            return Err(Error::SolutionInvalid(format!(
                "gait time exceeds budget {}s",
                tb.t_max
            )));
        }
    }
    match solution.status {
        GaitStatus::Infeasible if !solution.circulation.is_empty() => Err(Error::SolutionInvalid(
            "infeasible status with a nonempty circulation".into(),
        )),
        GaitStatus::Optimal if solution.circulation.is_empty() => Err(Error::SolutionInvalid(
            "optimal status with an empty circulation".into(),
        )),
        _ => Ok(()),
    }
}

// ---------------------------------------------------------------------------
// file formats

/// Problem file: `{objective: {axis, sense}, drift: {<axis>: [lo, hi]}, l_max,
/// time?: {t_max, arc_durations_ref}, home?}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProblemFile {
    pub objective: ObjectiveSpec,
    pub drift: BTreeMap<String, [f64; 2]>,
    pub l_max: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub home: Option<String>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub axis: Axis,
    pub sense: Sense,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TimeSpec {
    pub t_max: f64,
    /// Path of the per-arc durations CSV, resolved relative to the problem
    /// file by the caller.
    pub arc_durations_ref: String,
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("problem serializes");
        s.push('\n');
        s
    }

    /// Turn the file into a problem over `graph`'s node space. When the file
    /// has a `time` section the caller must supply the loaded per-arc
    /// durations.
    pub fn resolve(
        &self,
        graph: &TransitionGraph,
        arc_seconds: Option<Vec<f64>>,
    ) -> Result<GaitProblem> {
        let axes = self.objective.axis.others();
        let mut drift = [DriftBound::symmetric(0.0); 2];
        for (slot, axis) in drift.iter_mut().zip(axes) {
            let [lo, hi] = self.drift.get(axis.name()).copied().ok_or_else(|| {
                Error::InvalidProblem(format!("missing drift bound for axis {axis}"))
            })?;
            *slot = DriftBound { lo, hi };
        }
        for key in self.drift.keys() {
            if !axes.iter().any(|a| a.name() == key) {
                return Err(Error::InvalidProblem(format!(
                    "drift bound for {key:?} does not match a non-objective axis"
                )));
            }
        }
        let mut problem = GaitProblem::new(
            self.objective.axis,
            self.objective.sense,
            drift,
            self.l_max,
        )?;
        if let Some(spec) = &self.time {
            let seconds = arc_seconds.ok_or_else(|| {
                Error::InvalidProblem("time budget present but no arc durations supplied".into())
            })?;
            if seconds.len() != graph.arc_count() {
                return Err(Error::DimensionMismatch {
                    expected: graph.arc_count(),
                    got: seconds.len(),
                });
            }
            problem = problem.with_time(seconds, spec.t_max)?;
        }
        if let Some(home) = &self.home {
            let state = graph.spec().parse_state(home)?;
            problem = problem.with_home(graph.spec().encode(&state)?);
        }
        Ok(problem)
    }
}

/// Per-arc durations CSV: header `from,to,seconds`; missing pairs default to
/// zero seconds and are counted.
pub struct DurationsLoad {
    pub arc_seconds: Vec<f64>,
    pub missing: usize,
}

pub fn load_arc_durations<R: Read>(reader: R, graph: &TransitionGraph) -> Result<DurationsLoad> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut seconds = vec![0.0f64; graph.arc_count()];
    let mut provided = vec![false; graph.arc_count()];
    for (i, row) in csv_reader.records().enumerate() {
        let line = i as u64 + 2;
        let row = row?;
        if row.len() != 3 {
            return Err(Error::Malformed {
                line,
                reason: format!("expected 3 fields, got {}", row.len()),
            });
        }
        let spec = graph.spec();
        let from = spec.encode(&spec.parse_state(&row[0]).map_err(|e| Error::Malformed {
            line,
            reason: e.to_string(),
        })?)?;
        let to = spec.encode(&spec.parse_state(&row[1]).map_err(|e| Error::Malformed {
            line,
            reason: e.to_string(),
        })?)?;
        let value: f64 = row[2].parse().map_err(|_| Error::Malformed {
            line,
            reason: format!("field 'seconds': {:?} is not a number", &row[2]),
        })?;
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::Malformed {
                line,
                reason: format!("duration {value} must be nonnegative"),
            });
        }
        let arc = graph.arc_between(from, to).ok_or(Error::Malformed {
            line,
            reason: format!("no arc {from} -> {to}"),
        })?;
        seconds[arc.column()] = value;
        provided[arc.column()] = true;
    }
    let missing = provided.iter().filter(|&&p| !p).count();
    Ok(DurationsLoad {
        arc_seconds: seconds,
        missing,
    })
}

/// Solution file: `{coefficients: {cycle_index: count}, reward, length,
/// status}` with sparse 0-based cycle indices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionFile {
    pub coefficients: BTreeMap<u32, u32>,
    pub reward: RewardVector,
    pub length: u32,
    pub status: GaitStatus,
}

impl SolutionFile {
    pub fn from_solution(solution: &GaitSolution) -> Self {
        Self {
            coefficients: solution
                .circulation
                .iter()
                .map(|(i, c)| (i as u32, c))
                .collect(),
            reward: solution.reward,
            length: solution.length,
            status: solution.status,
        }
    }

    pub fn into_solution(self) -> GaitSolution {
        GaitSolution {
            circulation: Circulation::from_pairs(self.coefficients),
            reward: self.reward,
            length: self.length,
            status: self.status,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("solution serializes");
        s.push('\n');
        s
    }
}
