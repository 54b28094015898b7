use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::features::{observe, snapshot, Occupancy};
use super::{
    action_mask, compute_objective, update_platoons, ActionMask, ActionSpec, EnvConfig, Location,
    Observation, ObjectiveTotals, PlatoonId, PlatoonLedger, SimError, StepTrace, TruckState,
};
use crate::dsl::{FeatureMap, RewardProgram};
use crate::network::{FreightTask, HubId, TransportGraph};

/// One line of the optional trajectory log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub step: u32,
    pub truck_id: u32,
    pub action: ActionSpec,
    pub location: Location,
    /// Platoon the truck travelled in during this step.
    pub platoon_id: Option<PlatoonId>,
    pub delay_before: f64,
    pub delay_after: f64,
}

impl std::fmt::Display for TrajectoryRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let platoon = self.platoon_id.map_or_else(|| "-".to_string(), |p| format!("p{p}"));
        write!(
            f,
            "{} {} {} {} {} {}",
            self.step, self.truck_id, self.action, self.location, platoon, self.delay_after
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    pub d_p: f64,
    pub d_total: f64,
    pub t_d: f64,
    /// Objective so far; `None` while its denominators are still zero.
    pub running_j: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub observations: Vec<Observation>,
    /// Reward per truck slot; zero for trucks that did not act.
    pub rewards: Vec<f64>,
    /// Whether each truck acted in the step just executed.
    pub acted: Vec<bool>,
    pub done: Vec<bool>,
    pub episode_done: bool,
    pub info: StepInfo,
}

/// Everything needed to build fresh environments: shared graph, fixed missions, config.
#[derive(Debug, Clone)]
pub struct EnvFactory {
    pub graph: Arc<TransportGraph>,
    pub missions: Arc<Vec<FreightTask>>,
    pub config: EnvConfig,
}

impl EnvFactory {
    pub fn new(graph: TransportGraph, missions: Vec<FreightTask>, config: EnvConfig) -> Self {
        Self {
            graph: Arc::new(graph),
            missions: Arc::new(missions),
            config,
        }
    }

    pub fn make(&self) -> Result<PlatoonEnv, SimError> {
        PlatoonEnv::new(self.graph.clone(), self.missions.clone(), self.config)
    }

    pub fn truck_count(&self) -> usize {
        self.missions.len()
    }
}

/// The Dec-POMDP environment. Transitions are deterministic given the joint action.
#[derive(Debug, Clone)]
pub struct PlatoonEnv {
    graph: Arc<TransportGraph>,
    missions: Arc<Vec<FreightTask>>,
    config: EnvConfig,
    trucks: Vec<TruckState>,
    ledger: PlatoonLedger,
    traces: Vec<StepTrace>,
    step: u32,
    d_p: f64,
    log: Option<Vec<TrajectoryRecord>>,
}

impl PlatoonEnv {
    pub fn new(
        graph: Arc<TransportGraph>,
        missions: Arc<Vec<FreightTask>>,
        config: EnvConfig,
    ) -> Result<Self, SimError> {
        config.validate()?;
        if missions.is_empty() {
            return Err(SimError::Mission("no missions".into()));
        }
        let mut env = Self {
            graph,
            missions,
            config,
            trucks: Vec::new(),
            ledger: PlatoonLedger::new(),
            traces: Vec::new(),
            step: 1,
            d_p: 0.0,
            log: None,
        };
        env.reset()?;
        Ok(env)
    }

    /// Starts a new episode: every truck parked at its origin, inactive until its start step.
    pub fn reset(&mut self) -> Result<Vec<Observation>, SimError> {
        self.trucks = self
            .missions
            .iter()
            .map(|m| TruckState::new(m, &self.graph, &self.config))
            .collect::<Result<_, _>>()?;
        self.ledger = PlatoonLedger::new();
        self.traces = vec![StepTrace::default(); self.trucks.len()];
        self.step = 1;
        self.d_p = 0.0;
        if let Some(log) = self.log.as_mut() {
            log.clear();
        }
        Ok(self.observations())
    }

    pub fn enable_log(&mut self) {
        self.log.get_or_insert_with(Vec::new);
    }

    pub fn log(&self) -> &[TrajectoryRecord] {
        self.log.as_deref().unwrap_or(&[])
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn graph(&self) -> &TransportGraph {
        &self.graph
    }

    pub fn trucks(&self) -> &[TruckState] {
        &self.trucks
    }

    pub fn ledger(&self) -> &PlatoonLedger {
        &self.ledger
    }

    pub fn truck_count(&self) -> usize {
        self.trucks.len()
    }

    /// The step that the next call to [`step`](Self::step) executes (1-based).
    pub fn current_step(&self) -> u32 {
        self.step
    }

    pub fn is_done(&self) -> bool {
        self.step > self.config.horizon_steps() || self.trucks.iter().all(|t| t.finished)
    }

    pub fn needs_action(&self, slot: usize) -> bool {
        self.trucks[slot].needs_action(self.step)
    }

    pub fn mask(&self, slot: usize) -> ActionMask {
        let t = &self.trucks[slot];
        if t.needs_action(self.step) {
            action_mask(t, &self.config)
        } else {
            ActionMask::EMPTY
        }
    }

    pub fn observations(&self) -> Vec<Observation> {
        let occ = Occupancy::build(&self.trucks, self.step);
        (0..self.trucks.len())
            .map(|slot| {
                let size = self.trucks[slot].platoon_id.map_or(0, |p| self.ledger.size_of(p));
                observe(&self.trucks, slot, &occ, size, &self.config, self.step)
            })
            .collect()
    }

    pub fn totals(&self) -> ObjectiveTotals {
        ObjectiveTotals {
            d_p: self.d_p,
            d_total: self.trucks.iter().map(|t| t.traveled_km).sum(),
            t_d: self.trucks.iter().map(|t| t.delay_minutes).sum(),
            t_total: self
                .trucks
                .iter()
                .map(|t| self.config.medium_trip_minutes(t.route_km()))
                .sum(),
        }
    }

    pub fn objective(&self) -> Result<f64, SimError> {
        compute_objective(&self.totals(), &self.config)
    }

    /// Executes one step of length `dt`. `actions` is indexed by truck slot;
    /// trucks that are inactive or finished may pass `None`.
    pub fn step(
        &mut self,
        actions: &[Option<ActionSpec>],
        program: &RewardProgram,
    ) -> Result<StepOutcome, SimError> {
        if self.is_done() {
            return Err(SimError::EpisodeOver);
        }
        if actions.len() != self.trucks.len() {
            return Err(SimError::ActionCount {
                expected: self.trucks.len(),
                got: actions.len(),
            });
        }
        let t = self.step;
        let mut acted: Vec<Option<ActionSpec>> = vec![None; self.trucks.len()];
        for (slot, truck) in self.trucks.iter().enumerate() {
            if !truck.needs_action(t) {
                continue;
            }
            let action = actions[slot].ok_or(SimError::MissingAction {
                truck_id: truck.truck_id,
            })?;
            if !action_mask(truck, &self.config).contains(action) {
                return Err(SimError::IllegalAction {
                    truck_id: truck.truck_id,
                    action,
                    step: t,
                });
            }
            acted[slot] = Some(action);
        }

        let delay_before: Vec<f64> = self.trucks.iter().map(|tr| tr.delay_minutes).collect();
        let traveled_before: Vec<f64> = self.trucks.iter().map(|tr| tr.traveled_km).collect();
        let mut departures: Vec<Option<(HubId, HubId)>> = vec![None; self.trucks.len()];
        for (slot, action) in acted.iter().enumerate() {
            let Some(action) = *action else { continue };
            let truck = &mut self.trucks[slot];
            match action {
                ActionSpec::Wait => truck.delay_minutes += self.config.dt(),
                speed => {
                    if truck.is_at_hub() {
                        departures[slot] = truck.next_edge();
                    }
                    truck.advance(self.config.step_km(speed.speed_kmh(&self.config)), t);
                    match speed {
                        ActionSpec::SpeedLow => truck.delay_minutes += self.config.low_speed_penalty(),
                        ActionSpec::SpeedHigh => {
                            truck.delay_minutes =
                                (truck.delay_minutes - self.config.high_speed_recovery()).max(0.0)
                        }
                        _ => {}
                    }
                }
            }
        }

        update_platoons(&mut self.trucks, &acted, &departures, &mut self.ledger, &self.config, t);
        debug_assert_eq!(self.ledger.check(&self.trucks), Ok(()));

        for (slot, action) in acted.iter().enumerate() {
            let truck = &mut self.trucks[slot];
            let step_km = truck.traveled_km - traveled_before[slot];
            let platoon_size = truck.platoon_id.map_or(0, |p| self.ledger.size_of(p));
            let step_platoon_km = if platoon_size >= 2 { step_km } else { 0.0 };
            truck.platoon_km += step_platoon_km;
            self.d_p += step_platoon_km;
            self.traces[slot] = StepTrace {
                action: *action,
                speed_kmh: action.map_or(0.0, |a| a.speed_kmh(&self.config)),
                step_km,
                step_platoon_km,
                platoon_size,
            };
            if let (Some(log), Some(action)) = (self.log.as_mut(), action) {
                log.push(TrajectoryRecord {
                    step: t,
                    truck_id: truck.truck_id,
                    action: *action,
                    location: truck.location,
                    platoon_id: truck.platoon_id,
                    delay_before: delay_before[slot],
                    delay_after: truck.delay_minutes,
                });
            }
        }
        self.ledger.dissolve_at_hubs(&mut self.trucks);

        let occ = Occupancy::build(&self.trucks, t);
        let mut rewards = vec![0.0; self.trucks.len()];
        for (slot, action) in acted.iter().enumerate() {
            if action.is_none() {
                continue;
            }
            let features = snapshot(&self.trucks, slot, &self.traces[slot], &occ, &self.config, t);
            rewards[slot] = program.evaluate(&features).map_err(|error| SimError::RewardRuntime {
                truck_id: self.trucks[slot].truck_id,
                step: t,
                error,
            })?;
        }

        self.step += 1;
        let totals = self.totals();
        Ok(StepOutcome {
            observations: self.observations(),
            rewards,
            acted: acted.iter().map(Option::is_some).collect(),
            done: self.trucks.iter().map(|tr| tr.finished).collect(),
            episode_done: self.is_done(),
            info: StepInfo {
                d_p: totals.d_p,
                d_total: totals.d_total,
                t_d: totals.t_d,
                running_j: compute_objective(&totals, &self.config).ok(),
            },
        })
    }

    /// Feature values of a truck as of the last executed step.
    pub fn feature_snapshot(&self, slot: usize) -> FeatureMap {
        let step = self.step.saturating_sub(1);
        let occ = Occupancy::build(&self.trucks, step);
        snapshot(&self.trucks, slot, &self.traces[slot], &occ, &self.config, step)
    }
}
