use std::collections::HashMap;
use std::fmt::Write as _;

use crate::sim::{ActionMask, ActionSpec, LocationCode, Observation};

use super::TrainError;

/// One agent transition between two of its decision points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub obs: Observation,
    pub action: ActionSpec,
    pub reward: f64,
    pub next_obs: Observation,
    pub next_mask: ActionMask,
    pub terminal: bool,
}

/// Action-value approximator shared by every truck.
pub trait QFunction: Send {
    fn predict(&self, obs: &Observation) -> [f64; ActionSpec::COUNT];

    /// Moves `Q(obs, action)` toward each target.
    fn update(&mut self, batch: &[Transition], targets: &[f64], learning_rate: f64);
}

/// `r` when terminal, else `r + gamma * max` over the legal next actions.
pub fn td_target(q: &impl QFunction, t: &Transition, gamma: f64) -> f64 {
    if t.terminal || t.next_mask.is_empty() {
        return t.reward;
    }
    let values = q.predict(&t.next_obs);
    let best = t
        .next_mask
        .iter()
        .map(|a| values[a.index()])
        .fold(f64::NEG_INFINITY, f64::max);
    t.reward + gamma * best
}

const PROGRESS_BINS: f64 = 4.0;

/// Discretised observation used as the table key.
pub fn observation_key(obs: &Observation) -> u32 {
    let loc = match obs.location {
        LocationCode::Inactive => 0,
        LocationCode::AtHub => 1,
        LocationCode::OnEdge => 2,
        LocationCode::Finished => 3,
    };
    let progress = ((obs.route_progress * PROGRESS_BINS).floor().max(0.0) as u32).min(3);
    let delay = if obs.delay_minutes <= 0.0 {
        0
    } else if obs.slack_minutes >= 0.0 {
        1
    } else {
        2
    };
    let cap = |n: usize| n.min(3) as u32;
    let fields = [
        loc,
        progress,
        delay,
        cap(obs.platoon_size),
        cap(obs.hub_count),
        cap(obs.edge_nearby_count),
        cap(obs.shared_next_edge_count),
    ];
    fields.iter().fold(0, |k, f| k * 4 + f)
}

/// Tabular reference approximator over [`observation_key`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TabularQ {
    table: HashMap<u32, [f64; ActionSpec::COUNT]>,
}

pub const QTABLE_HEADER: &str = "pcrd-qtable v1";

impl TabularQ {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn get(&self, key: u32) -> [f64; ActionSpec::COUNT] {
        self.table.get(&key).copied().unwrap_or_default()
    }

    /// Text layout: header line, then `key q_wait q_low q_med q_high` sorted by key.
    pub fn to_text(&self) -> String {
        let mut keys: Vec<_> = self.table.keys().copied().collect();
        keys.sort_unstable();
        let mut out = format!("{QTABLE_HEADER}\n");
        for k in keys {
            let v = self.table[&k];
            let _ = writeln!(out, "{k} {:e} {:e} {:e} {:e}", v[0], v[1], v[2], v[3]);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, TrainError> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(QTABLE_HEADER) {
            return Err(TrainError::Format(format!("missing '{QTABLE_HEADER}' header")));
        }
        let mut table = HashMap::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = || TrainError::Format(format!("line {}: malformed row", i + 2));
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 1 + ActionSpec::COUNT {
                return Err(bad());
            }
            let key: u32 = parts[0].parse().map_err(|_| bad())?;
            let mut v = [0.0; ActionSpec::COUNT];
            for (slot, p) in v.iter_mut().zip(&parts[1..]) {
                *slot = p.parse().map_err(|_| bad())?;
            }
            table.insert(key, v);
        }
        Ok(Self { table })
    }
}

impl QFunction for TabularQ {
    fn predict(&self, obs: &Observation) -> [f64; ActionSpec::COUNT] {
        self.get(observation_key(obs))
    }

    fn update(&mut self, batch: &[Transition], targets: &[f64], learning_rate: f64) {
        for (t, target) in batch.iter().zip(targets) {
            let q = &mut self.table.entry(observation_key(&t.obs)).or_default()[t.action.index()];
            *q += learning_rate * (target - *q);
        }
    }
}
