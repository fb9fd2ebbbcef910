//! Reward learning: aggregates per-transition displacement observations into
//! a surface-specific reward table, and persists tables as CSV.
//!
//! States cross the file boundary as behavior digit strings ("110"), never as
//! node indices, so reward files are portable across robot specs with the
//! same subsystem layout.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::graph::RewardVector;
use crate::state_space::{RobotSpec, State};

/// One measured state transition: the displacement it produced and an
/// optional aggregation weight (default 1).
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationRecord {
    pub from: State,
    pub to: State,
    pub dx: f64,
    pub dy: f64,
    pub dtheta: f64,
    pub weight: f64,
}

impl ObservationRecord {
    fn check(&self) -> Result<()> {
        if self.from == self.to {
            return Err(Error::InvalidTable(format!(
                "observation maps state {} to itself",
                self.from
            )));
        }
        if !(self.weight.is_finite() && self.weight >= 0.0) {
            return Err(Error::InvalidTable(format!(
                "observation {} -> {} has invalid weight {}",
                self.from, self.to, self.weight
            )));
        }
        if ![self.dx, self.dy, self.dtheta].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidTable(format!(
                "observation {} -> {} has non-finite displacement",
                self.from, self.to
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
struct TableEntry {
    reward: RewardVector,
    observations: u32,
}

/// Learned map from ordered state pairs to reward vectors.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct RewardTable {
    surface: Option<String>,
    entries: BTreeMap<(State, State), TableEntry>,
}

impl RewardTable {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn with_surface(mut self, surface: impl Into<String>) -> Self {
        self.surface = Some(surface.into());
        self
    }

    pub fn surface(&self) -> Option<&str> {
        self.surface.as_deref()
    }

    /// Insert or replace an entry (observation count 0 = not derived from
    /// an observation log).
    pub fn insert(&mut self, from: State, to: State, reward: RewardVector) {
        self.entries.insert(
            (from, to),
            TableEntry {
                reward,
                observations: 0,
            },
        );
    }

    pub fn get(&self, from: &State, to: &State) -> Option<RewardVector> {
        self.entries
            .get(&(from.clone(), to.clone()))
            .map(|e| e.reward)
    }

    pub fn observations(&self, from: &State, to: &State) -> Option<u32> {
        self.entries
            .get(&(from.clone(), to.clone()))
            .map(|e| e.observations)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&State, &State, RewardVector)> {
        self.entries.iter().map(|((f, t), e)| (f, t, e.reward))
    }

    /// Ordered pairs of distinct states of `spec` that have no entry; these
    /// default to the zero reward when a graph is built.
    pub fn missing_pairs(&self, spec: &RobotSpec) -> Vec<(State, State)> {
        let states: Vec<State> = spec.states().collect();
        let mut missing = Vec::new();
        for from in &states {
            for to in &states {
                if from != to && self.get(from, to).is_none() {
                    missing.push((from.clone(), to.clone()));
                }
            }
        }
        missing
    }

    /// Validate that every entry's states belong to `spec`.
    pub fn check_states(&self, spec: &RobotSpec) -> Result<()> {
        for (from, to) in self.entries.keys() {
            for state in [from, to] {
                State::new(spec, state.values().to_vec()).map_err(|e| {
                    Error::InvalidTable(format!("state {state} not in robot spec: {e}"))
                })?;
            }
        }
        Ok(())
    }
}

/// Weighted mean of the observed displacements per ordered state pair.
/// Transitions with no records are absent from the table.
pub fn aggregate_observations(records: &[ObservationRecord]) -> Result<RewardTable> {
    struct Acc {
        sum: [f64; 3],
        weight: f64,
        count: u32,
    }
    let mut groups: BTreeMap<(State, State), Acc> = BTreeMap::new();
    for record in records {
        record.check()?;
        let acc = groups
            .entry((record.from.clone(), record.to.clone()))
            .or_insert(Acc {
                sum: [0.0; 3],
                weight: 0.0,
                count: 0,
            });
        acc.sum[0] += record.weight * record.dx;
        acc.sum[1] += record.weight * record.dy;
        acc.sum[2] += record.weight * record.dtheta;
        acc.weight += record.weight;
        acc.count += 1;
    }
    let mut table = RewardTable::empty();
    for ((from, to), acc) in groups {
        if acc.weight <= 0.0 {
            return Err(Error::DegenerateWeight {
                from: from.to_string(),
                to: to.to_string(),
            });
        }
        table.entries.insert(
            (from, to),
            TableEntry {
                reward: RewardVector::new(
                    acc.sum[0] / acc.weight,
                    acc.sum[1] / acc.weight,
                    acc.sum[2] / acc.weight,
                ),
                observations: acc.count,
            },
        );
    }
    Ok(table)
}

/// A loaded table plus any duplicate rows that were overwritten (last wins).
#[derive(Debug)]
pub struct TableLoad {
    pub table: RewardTable,
    pub duplicates: Vec<(State, State)>,
}

const CSV_HEADER: [&str; 5] = ["from", "to", "dx", "dy", "dtheta"];

/// Parse a reward table from CSV with header `from,to,dx,dy,dtheta`.
/// States are validated against `spec`; duplicate (from, to) rows are
/// last-wins and reported. An empty input yields an empty table.
pub fn load_reward_table<R: Read>(reader: R, spec: &RobotSpec) -> Result<TableLoad> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut table = RewardTable::empty();
    let mut duplicates = Vec::new();

    match csv_reader.headers() {
        Ok(headers) if headers.is_empty() || headers.iter().all(|h| h.is_empty()) => {
            return Ok(TableLoad { table, duplicates });
        }
        Ok(headers) => {
            let got: Vec<&str> = headers.iter().collect();
            if got != CSV_HEADER {
                return Err(Error::Malformed {
                    line: 1,
                    reason: format!(
                        "expected header {:?}, got {:?}",
                        CSV_HEADER.join(","),
                        got.join(",")
                    ),
                });
            }
        }
        Err(e) if matches!(e.kind(), csv::ErrorKind::Io(io) if io.kind() == std::io::ErrorKind::UnexpectedEof) => {
            return Ok(TableLoad { table, duplicates });
        }
        Err(e) => return Err(e.into()),
    }

    for (i, row) in csv_reader.records().enumerate() {
        let line = i as u64 + 2;
        let row = row?;
        if row.len() != 5 {
            return Err(Error::Malformed {
                line,
                reason: format!("expected 5 fields, got {}", row.len()),
            });
        }
        let from = spec.parse_state(&row[0]).map_err(|e| Error::Malformed {
            line,
            reason: format!("field 'from': {e}"),
        })?;
        let to = spec.parse_state(&row[1]).map_err(|e| Error::Malformed {
            line,
            reason: format!("field 'to': {e}"),
        })?;
        if from == to {
            return Err(Error::Malformed {
                line,
                reason: format!("transition {from} -> {to} is a self-loop"),
            });
        }
        let mut values = [0.0f64; 3];
        for (slot, (value, name)) in values
            .iter_mut()
            .zip(row.iter().skip(2).zip(&CSV_HEADER[2..]))
        {
            *slot = value.parse::<f64>().map_err(|_| Error::Malformed {
                line,
                reason: format!("field '{name}': {value:?} is not a number"),
            })?;
            if !slot.is_finite() {
                return Err(Error::Malformed {
                    line,
                    reason: format!("field '{name}': {value:?} is not finite"),
                });
            }
        }
        if table.get(&from, &to).is_some() {
            duplicates.push((from.clone(), to.clone()));
        }
        table.insert(from, to, RewardVector::new(values[0], values[1], values[2]));
    }
    Ok(TableLoad { table, duplicates })
}

/// Write a reward table as CSV, rows sorted by (from, to). Values use the
/// shortest round-trip float form, so save followed by load is lossless.
pub fn save_reward_table<W: Write>(table: &RewardTable, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for (from, to, reward) in table.entries() {
        w.write_record([
            from.to_string(),
            to.to_string(),
            reward.dx.to_string(),
            reward.dy.to_string(),
            reward.dtheta.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct ObservationLine {
    from: String,
    to: String,
    dx: f64,
    dy: f64,
    dtheta: f64,
    weight: Option<f64>,
    #[serde(default)]
    #[allow(dead_code)]
    trial: Option<serde_json::Value>,
}

/// Parse a JSON Lines observation log: one object per line with keys
/// `from`, `to`, `dx`, `dy`, `dtheta`, optional `weight` and `trial`.
pub fn load_observations<R: Read>(mut reader: R, spec: &RobotSpec) -> Result<Vec<ObservationRecord>> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i as u64 + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: ObservationLine =
            serde_json::from_str(line).map_err(|e| Error::Malformed {
                line: line_no,
                reason: e.to_string(),
            })?;
        let from = spec.parse_state(&parsed.from).map_err(|e| Error::Malformed {
            line: line_no,
            reason: format!("field 'from': {e}"),
        })?;
        let to = spec.parse_state(&parsed.to).map_err(|e| Error::Malformed {
            line: line_no,
            reason: format!("field 'to': {e}"),
        })?;
        let record = ObservationRecord {
            from,
            to,
            dx: parsed.dx,
            dy: parsed.dy,
            dtheta: parsed.dtheta,
            weight: parsed.weight.unwrap_or(1.0),
        };
        record.check().map_err(|e| Error::Malformed {
            line: line_no,
            reason: e.to_string(),
        })?;
        records.push(record);
    }
    Ok(records)
}
