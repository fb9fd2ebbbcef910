//! Discrete robot states and their mapping onto graph node indices.
//!
//! A robot is an ordered list of subsystems, each with a finite number of
//! discrete behaviors. A state assigns one behavior to every subsystem.
//! States are numbered 1..=n in mixed-radix order with subsystem 1 most
//! significant, so for a three-limb binary robot the behavior string "110"
//! is node 7 and "000" is node 1.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// One independently controlled robot part and its discrete behavior count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsystemSpec {
    pub name: String,
    /// Number of discrete behaviors, at least 2.
    pub behaviors: u32,
}

/// Ordered list of subsystems; fixes the robot's state space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawRobotSpec")]
pub struct RobotSpec {
    subsystems: Vec<SubsystemSpec>,
}

#[derive(Deserialize)]
struct RawRobotSpec {
    subsystems: Vec<SubsystemSpec>,
}

impl TryFrom<RawRobotSpec> for RobotSpec {
    type Error = Error;
    fn try_from(raw: RawRobotSpec) -> Result<Self> {
        RobotSpec::new(raw.subsystems)
    }
}

impl RobotSpec {
    pub fn new(subsystems: Vec<SubsystemSpec>) -> Result<Self> {
        if subsystems.is_empty() {
            return Err(Error::InvalidSpec("at least one subsystem required".into()));
        }
        let mut n: u64 = 1;
        for (i, sub) in subsystems.iter().enumerate() {
            if sub.behaviors < 2 {
                return Err(Error::InvalidSpec(format!(
                    "subsystem {} ({:?}) has {} behaviors, need at least 2",
                    i + 1,
                    sub.name,
                    sub.behaviors
                )));
            }
            n = n.checked_mul(u64::from(sub.behaviors)).ok_or_else(|| {
                Error::InvalidSpec("state count overflows u64".into())
            })?;
            if n > u64::from(u32::MAX) {
                return Err(Error::InvalidSpec(format!(
                    "state count {n} exceeds the supported maximum {}",
                    u32::MAX
                )));
            }
        }
        Ok(Self { subsystems })
    }

    /// Robot with `m` identical subsystems of `behaviors` behaviors each,
    /// named `limb1..limbm`.
    pub fn uniform(m: usize, behaviors: u32) -> Result<Self> {
        Self::new(
            (1..=m)
                .map(|i| SubsystemSpec {
                    name: format!("limb{i}"),
                    behaviors,
                })
                .collect(),
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("spec serializes");
        s.push('\n');
        s
    }

    pub fn subsystems(&self) -> &[SubsystemSpec] {
        &self.subsystems
    }

    pub fn subsystem_count(&self) -> usize {
        self.subsystems.len()
    }

    /// Total number of states: the product of the behavior counts.
    pub fn state_count(&self) -> u64 {
        self.subsystems
            .iter()
            .map(|s| u64::from(s.behaviors))
            .product()
    }

    /// Node index of a state: 1 + its mixed-radix value with subsystem 1
    /// most significant.
    pub fn encode(&self, state: &State) -> Result<NodeId> {
        self.check_state(state)?;
        let mut value: u64 = 0;
        for (sub, &b) in self.subsystems.iter().zip(state.values()) {
            value = value * u64::from(sub.behaviors) + u64::from(b);
        }
        Ok(NodeId::new(value as u32 + 1))
    }

    /// Exact inverse of [`RobotSpec::encode`].
    pub fn decode(&self, node: NodeId) -> Result<State> {
        let n = self.state_count();
        if node.get() == 0 || u64::from(node.get()) > n {
            return Err(Error::NodeOutOfRange {
                index: node.get(),
                max: n,
            });
        }
        let mut value = u64::from(node.get()) - 1;
        let mut values = vec![0u32; self.subsystems.len()];
        for (j, sub) in self.subsystems.iter().enumerate().rev() {
            let radix = u64::from(sub.behaviors);
            values[j] = (value % radix) as u32;
            value /= radix;
        }
        Ok(State(values))
    }

    /// All states in node order.
    pub fn states(&self) -> impl Iterator<Item = State> + '_ {
        (1..=self.state_count()).map(move |i| {
            self.decode(NodeId::new(i as u32)).expect("index in range")
        })
    }

    /// Parse a behavior digit string such as "110".
    ///
    /// Requires every subsystem to have at most 10 behaviors, which is what
    /// the digit-string interchange format can express.
    pub fn parse_state(&self, text: &str) -> Result<State> {
        let digits: Vec<char> = text.chars().collect();
        if digits.len() != self.subsystems.len() {
            return Err(Error::InvalidState {
                state: text.to_string(),
                reason: format!(
                    "expected {} behavior digits, got {}",
                    self.subsystems.len(),
                    digits.len()
                ),
            });
        }
        let mut values = Vec::with_capacity(digits.len());
        for (j, (c, sub)) in digits.iter().zip(&self.subsystems).enumerate() {
            if sub.behaviors > 10 {
                return Err(Error::InvalidState {
                    state: text.to_string(),
                    reason: format!(
                        "subsystem {} has {} behaviors; digit strings support at most 10",
                        j + 1,
                        sub.behaviors
                    ),
                });
            }
            let d = c.to_digit(10).ok_or_else(|| Error::InvalidState {
                state: text.to_string(),
                reason: format!("character {c:?} is not a digit"),
            })?;
            if d >= sub.behaviors {
                return Err(Error::InvalidState {
                    state: text.to_string(),
                    reason: format!(
                        "behavior {} out of range 0..{} for subsystem {}",
                        d,
                        sub.behaviors,
                        j + 1
                    ),
                });
            }
            values.push(d);
        }
        Ok(State(values))
    }

    fn check_state(&self, state: &State) -> Result<()> {
        if state.values().len() != self.subsystems.len() {
            return Err(Error::InvalidState {
                state: state.to_string(),
                reason: format!(
                    "expected {} behaviors, got {}",
                    self.subsystems.len(),
                    state.values().len()
                ),
            });
        }
        for (j, (&b, sub)) in state.values().iter().zip(&self.subsystems).enumerate() {
            if b >= sub.behaviors {
                return Err(Error::InvalidState {
                    state: state.to_string(),
                    reason: format!(
                        "behavior {} out of range 0..{} for subsystem {}",
                        b,
                        sub.behaviors,
                        j + 1
                    ),
                });
            }
        }
        Ok(())
    }
}

/// One behavior per subsystem, subsystem 1 first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State(Vec<u32>);

impl State {
    /// Build a state validated against `spec`.
    pub fn new(spec: &RobotSpec, values: Vec<u32>) -> Result<Self> {
        let state = State(values);
        spec.check_state(&state)?;
        Ok(state)
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&v| v <= 9) {
            for v in &self.0 {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
            write!(f, "({})", parts.join("."))
        }
    }
}

/// 1-based graph node index; node i corresponds to the state whose
/// mixed-radix value is i - 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(u32);

impl NodeId {
    pub fn new(index: u32) -> Self {
        NodeId(index)
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N{}", self.0)
    }
}
