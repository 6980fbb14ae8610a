//! Lifelong planning for self-adaptive systems over measured configuration
//! spaces.
//!
//! A [`CyberTwin`] answers performance queries from recorded measurement
//! tables, one per environment. Planners search the configuration space
//! through it, send adaptation plans to the running system, and carry their
//! population across environment changes. [`Lidos`] searches with a
//! two-objective transform that rewards plans whose neighbours differ from
//! them; the [`baselines`] module holds the comparison planners, and
//! [`harness`] runs whole scenarios and summarizes them.
//!
//! ```
//! use std::sync::Arc;
//! use lidos::{synth_landscape, CyberTwin, LandscapeParams, LegStop, Lidos, Planner, PlannerParams};
//!
//! let data = synth_landscape(&LandscapeParams::default())?.into_twin_data()?;
//! let mut twin = CyberTwin::new(Arc::new(data));
//! let mut planner = Lidos::new(PlannerParams::default(), 42)?;
//! planner.init_run(&mut twin)?;
//! planner.run_scenario_leg(&mut twin, LegStop::Budget(300))?;
//! println!("best so far: {}", planner.best_plan().unwrap().plan);
//! # Ok::<(), lidos::Error>(())
//! ```

pub mod baselines;
pub mod error;
pub mod harness;
pub mod mmo;
pub mod planner;
pub mod space;
pub mod stats;
pub mod twin;

pub use baselines::{make_planner, PlannerKind, Soga};
pub use error::{Error, Result};
pub use harness::{
    emit_trajectories, run_scenario, run_scenario_with_data, summarize_bundle, ResultBundle,
    ScenarioSpec,
};
pub use mmo::{environmental_selection, nondominated_sort, score_pool, ScoredPlan};
pub use planner::{Adaptation, LegStop, Lidos, Planner, PlannerParams, RunTrace, TraceEvent};
pub use space::{AdaptationPlan, ConfigSpace, OptionSpec};
pub use stats::{a12, scott_knott, wilcoxon_rank_sum, EffectSize, RankTable, SampleGroup};
pub use twin::{
    synth_landscape, CyberTwin, Direction, Environment, LandscapeParams, MeasurementTable, TwinData,
};
