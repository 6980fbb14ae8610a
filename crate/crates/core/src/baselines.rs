//! Comparison planners and the [`PlannerKind`] factory.
//!
//! | kind             | search        | on environment change        |
//! |------------------|---------------|------------------------------|
//! | `lidos`          | MMO + NSGA-II | re-measure, keep population  |
//! | `lidos_sta`      | MMO + NSGA-II | restart from random plans    |
//! | `pseudo_dynamic` | SOGA          | re-measure, keep population  |
//! | `stationary`     | SOGA          | restart from random plans    |

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mmo::ScoredPlan;
use crate::planner::{derive_seed, Lidos, Planner, PlannerParams, PlannerState};
use crate::twin::CyberTwin;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlannerKind {
    Lidos,
    LidosSta,
    PseudoDynamic,
    Stationary,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 4] = [
        PlannerKind::Lidos,
        PlannerKind::LidosSta,
        PlannerKind::PseudoDynamic,
        PlannerKind::Stationary,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            PlannerKind::Lidos => "lidos",
            PlannerKind::LidosSta => "lidos_sta",
            PlannerKind::PseudoDynamic => "pseudo_dynamic",
            PlannerKind::Stationary => "stationary",
        }
    }

    /// Whether the planner throws its population away on a change.
    pub fn restarts_on_change(self) -> bool {
        matches!(self, PlannerKind::LidosSta | PlannerKind::Stationary)
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for PlannerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PlannerKind::ALL
            .into_iter()
            .find(|k| k.tag() == s.trim())
            .ok_or_else(|| Error::UnknownPlanner(s.to_string()))
    }
}

/// Builds the planner for `kind`. All kinds share operators and parameters.
pub fn make_planner(kind: PlannerKind, params: PlannerParams, seed: u64) -> Result<Box<dyn Planner>> {
    Ok(match kind {
        PlannerKind::Lidos => Box::new(Lidos::new(params, seed)?),
        PlannerKind::LidosSta => Box::new(Lidos::stationary(params, seed)?),
        PlannerKind::PseudoDynamic => Box::new(Soga::new(params, seed)?),
        PlannerKind::Stationary => Box::new(Soga::stationary(params, seed)?),
    })
}

/// Throws the population away and draws a fresh random one under the
/// twin's current environment. The generator is reseeded from
/// `(base_seed, epoch)`, so a restart is reproducible on its own.
pub fn restart(state: &mut PlannerState, twin: &mut CyberTwin, population_size: usize) -> Result<()> {
    let seed = derive_seed(state.base_seed, &[b"restart", &state.epoch.to_le_bytes()]);
    state.rng = ChaCha8Rng::seed_from_u64(seed);
    state.random_population(twin, population_size)
}

/// One generation of the single-objective GA: binary tournament on `ft`,
/// uniform crossover, boundary mutation, generational replacement keeping
/// the single best parent if no child beats it.
pub fn soga_step(state: &mut PlannerState, twin: &mut CyberTwin, params: &PlannerParams) -> Result<()> {
    let mut offspring = state.breed(twin, params, |s, a, b| {
        s.population[a].ft < s.population[b].ft
    })?;
    let elite = best_index(&state.population);
    let best_child = best_index(&offspring);
    if state.population[elite].ft < offspring[best_child].ft {
        let worst = offspring
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.ft.total_cmp(&b.1.ft))
            .map(|(i, _)| i)
            .expect("non-empty offspring");
        offspring[worst] = state.population[elite].clone();
    }
    state.population = offspring;
    state.maybe_adapt(twin, params.k);
    Ok(())
}

fn best_index(pool: &[ScoredPlan]) -> usize {
    pool.iter()
        .enumerate()
        .min_by(|a, b| a.1.ft.total_cmp(&b.1.ft))
        .map(|(i, _)| i)
        .expect("non-empty pool")
}

/// Single-objective genetic algorithm planner.
#[derive(Debug, Clone)]
pub struct Soga {
    params: PlannerParams,
    state: PlannerState,
    restart_on_change: bool,
}

impl Soga {
    /// Runs continuously across changes, re-measuring its population.
    pub fn new(params: PlannerParams, seed: u64) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            state: PlannerState::new(seed),
            restart_on_change: false,
        })
    }

    /// Restarts from random plans at every change.
    pub fn stationary(params: PlannerParams, seed: u64) -> Result<Self> {
        let mut s = Self::new(params, seed)?;
        s.restart_on_change = true;
        Ok(s)
    }
}

impl Planner for Soga {
    fn kind(&self) -> PlannerKind {
        if self.restart_on_change {
            PlannerKind::Stationary
        } else {
            PlannerKind::PseudoDynamic
        }
    }

    fn params(&self) -> &PlannerParams {
        &self.params
    }

    fn state(&self) -> &PlannerState {
        &self.state
    }

    fn init_run(&mut self, twin: &mut CyberTwin) -> Result<()> {
        self.state.leg_start = twin.counter();
        self.state.random_population(twin, self.params.population_size)
    }

    fn step_generation(&mut self, twin: &mut CyberTwin) -> Result<()> {
        soga_step(&mut self.state, twin, &self.params)
    }

    fn on_environment_change(&mut self, twin: &mut CyberTwin, env_id: &str) -> Result<()> {
        self.state.begin_epoch(twin, env_id)?;
        if self.restart_on_change {
            restart(&mut self.state, twin, self.params.population_size)
        } else {
            self.state.remeasure_population(twin)
        }
    }
}
