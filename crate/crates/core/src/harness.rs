//! Scenario runner and result files.
//!
//! A scenario manifest (TOML) declares the environments with their
//! measurement CSVs, the ordered legs of the run, and which planners to
//! compare:
//!
//! ```toml
//! system = "storm"
//! planners = ["lidos", "lidos_sta", "pseudo_dynamic", "stationary"]
//! repetitions = 50          # default 50
//! k = 150                   # default 150
//! base_seed = 7             # default 0
//! trajectory_stride = 15    # default 15
//! population_size = 20      # default 20
//! crossover_rate = 0.9      # default 0.9
//! mutation_rate = 0.1       # default 0.1
//!
//! [[environments]]
//! id = "rolling_count"
//! dataset = "rolling_count.csv"   # relative to the manifest
//! direction = "maximize"
//! units = "msgs/min"
//!
//! [[legs]]
//! env = "rolling_count"
//! budget = 150
//! ```
//!
//! Every run writes `traces.csv` with one row per genuine measurement:
//! `planner,rep,measurement_index,env,ft,best_ft,adaptation_sent,env_change`.
//! Summaries are recomputed from that file alone (plus the manifest copy).

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{make_planner, PlannerKind};
use crate::error::{io_err, Error, Result};
use crate::planner::{derive_seed, LegStop, PlannerParams, RunTrace, TraceEvent};
use crate::space::AdaptationPlan;
use crate::stats::{
    a12, scott_knott, speedup, summarize, wilcoxon_rank_sum, EffectSize, RankTable, SampleGroup,
    Summary, ALPHA,
};
use crate::twin::{Direction, Environment, TwinData};

pub const TRACES_FILE: &str = "traces.csv";
pub const SCENARIO_FILE: &str = "scenario.toml";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const PAIRWISE_FILE: &str = "pairwise.csv";
pub const RANKS_FILE: &str = "ranks.csv";
pub const SPEEDUPS_FILE: &str = "speedups.csv";
pub const TRAJECTORIES_FILE: &str = "trajectories.csv";
pub const REPORT_FILE: &str = "report.txt";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSpec {
    pub id: String,
    pub dataset: PathBuf,
    pub direction: Direction,
    #[serde(default)]
    pub units: String,
}

impl EnvironmentSpec {
    pub fn environment(&self) -> Environment {
        Environment::new(&self.id, self.direction).with_units(&self.units)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegSpec {
    pub env: String,
    pub budget: u64,
}

fn default_planners() -> Vec<PlannerKind> {
    PlannerKind::ALL.to_vec()
}
fn default_repetitions() -> usize {
    50
}
fn default_k() -> u64 {
    150
}
fn default_stride() -> u64 {
    15
}
fn default_population() -> usize {
    20
}
fn default_crossover() -> f64 {
    0.9
}
fn default_mutation() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub system: String,
    #[serde(default = "default_planners")]
    pub planners: Vec<PlannerKind>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default = "default_k")]
    pub k: u64,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_stride")]
    pub trajectory_stride: u64,
    #[serde(default = "default_population")]
    pub population_size: usize,
    #[serde(default = "default_crossover")]
    pub crossover_rate: f64,
    #[serde(default = "default_mutation")]
    pub mutation_rate: f64,
    pub environments: Vec<EnvironmentSpec>,
    pub legs: Vec<LegSpec>,
}

impl ScenarioSpec {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Reads a manifest and resolves dataset paths against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let mut spec = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for env in &mut spec.environments {
            if env.dataset.is_relative() {
                env.dataset = base.join(&env.dataset);
            }
        }
        Ok(spec)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn params(&self) -> PlannerParams {
        PlannerParams {
            population_size: self.population_size,
            crossover_rate: self.crossover_rate,
            mutation_rate: self.mutation_rate,
            k: self.k,
            ..PlannerParams::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Scenario(m));
        self.params().validate()?;
        if self.environments.is_empty() {
            return bad("no environments declared".into());
        }
        let mut ids = HashSet::new();
        for e in &self.environments {
            if !ids.insert(e.id.as_str()) {
                return Err(Error::DuplicateEnvironment(e.id.clone()));
            }
        }
        if self.legs.len() < 2 {
            return bad(format!("need at least 2 legs, got {}", self.legs.len()));
        }
        for leg in &self.legs {
            if !ids.contains(leg.env.as_str()) {
                return Err(Error::UnknownEnvironment(leg.env.clone()));
            }
            if leg.budget < self.population_size as u64 {
                return bad(format!(
                    "leg budget {} is below the population size {}",
                    leg.budget, self.population_size
                ));
            }
        }
        if self.planners.is_empty() {
            return bad("no planners selected".into());
        }
        if self.repetitions == 0 {
            return bad("repetitions must be positive".into());
        }
        if self.trajectory_stride == 0 {
            return bad("trajectory stride must be positive".into());
        }
        Ok(())
    }

    fn environment(&self, id: &str) -> Option<&EnvironmentSpec> {
        self.environments.iter().find(|e| e.id == id)
    }

    /// Direction of the final leg, which the final-value statistics use.
    pub fn final_direction(&self) -> Direction {
        self.legs
            .last()
            .and_then(|l| self.environment(&l.env))
            .map(|e| e.direction)
            .unwrap_or_default()
    }

    fn final_units(&self) -> &str {
        self.legs
            .last()
            .and_then(|l| self.environment(&l.env))
            .map(|e| e.units.as_str())
            .unwrap_or("")
    }

    /// Labels for the planner list; repeated kinds get `#2`, `#3`, ...
    pub fn planner_labels(&self) -> Vec<String> {
        let mut seen: BTreeMap<PlannerKind, usize> = BTreeMap::new();
        self.planners
            .iter()
            .map(|k| {
                let n = seen.entry(*k).or_insert(0);
                *n += 1;
                if *n == 1 {
                    k.tag().to_string()
                } else {
                    format!("{}#{n}", k.tag())
                }
            })
            .collect()
    }

    pub fn load_data(&self) -> Result<TwinData> {
        let files: Vec<(PathBuf, Environment)> = self
            .environments
            .iter()
            .map(|e| (e.dataset.clone(), e.environment()))
            .collect();
        TwinData::load(&files)
    }
}

/// All runs of one planner.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannerRuns {
    pub label: String,
    pub kind: PlannerKind,
    pub traces: Vec<RunTrace>,
    /// Twin measurement counter at the end of each repetition.
    pub counters: Vec<u64>,
}

impl PlannerRuns {
    /// Best value of the final epoch per repetition, original units.
    pub fn finals(&self) -> Vec<f64> {
        self.traces.iter().filter_map(RunTrace::final_best).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultBundle {
    pub spec: ScenarioSpec,
    pub runs: Vec<PlannerRuns>,
}

/// Seed of one repetition of one planner.
pub fn repetition_seed(base_seed: u64, kind: PlannerKind, rep: usize) -> u64 {
    derive_seed(base_seed, &[kind.tag().as_bytes(), &(rep as u64).to_le_bytes()])
}

/// Loads the datasets named by `spec` and runs it.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<ResultBundle> {
    spec.validate()?;
    let data = Arc::new(spec.load_data()?);
    run_scenario_with_data(spec, data)
}

/// Runs every planner for every repetition over already loaded data.
/// Repetitions run in parallel; results keep planner and repetition order.
pub fn run_scenario_with_data(spec: &ScenarioSpec, data: Arc<TwinData>) -> Result<ResultBundle> {
    spec.validate()?;
    for leg in &spec.legs {
        let table = data
            .table(&leg.env)
            .ok_or_else(|| Error::UnknownEnvironment(leg.env.clone()))?;
        let declared = spec.environment(&leg.env).expect("validated");
        if table.environment().direction != declared.direction {
            return Err(Error::Scenario(format!(
                "environment `{}` direction differs from its dataset",
                leg.env
            )));
        }
    }
    let params = spec.params();
    let jobs: Vec<(usize, usize)> = (0..spec.planners.len())
        .flat_map(|p| (0..spec.repetitions).map(move |r| (p, r)))
        .collect();
    let results: Vec<Result<(RunTrace, u64)>> = jobs
        .par_iter()
        .map(|&(p, rep)| {
            let kind = spec.planners[p];
            let mut twin = crate::twin::CyberTwin::new(data.clone());
            let mut planner = make_planner(kind, params.clone(), repetition_seed(spec.base_seed, kind, rep))?;
            let first = &spec.legs[0];
            twin.set_environment(&first.env)?;
            planner.init_run(&mut twin)?;
            planner.run_scenario_leg(&mut twin, LegStop::Budget(first.budget))?;
            for leg in &spec.legs[1..] {
                planner.on_environment_change(&mut twin, &leg.env)?;
                planner.run_scenario_leg(&mut twin, LegStop::Budget(leg.budget))?;
            }
            Ok((planner.state().trace.clone(), twin.counter()))
        })
        .collect();

    let labels = spec.planner_labels();
    let mut runs: Vec<PlannerRuns> = spec
        .planners
        .iter()
        .zip(labels)
        .map(|(&kind, label)| PlannerRuns {
            label,
            kind,
            traces: Vec::with_capacity(spec.repetitions),
            counters: Vec::with_capacity(spec.repetitions),
        })
        .collect();
    for ((p, _), res) in jobs.into_iter().zip(results) {
        let (trace, counter) = res?;
        runs[p].traces.push(trace);
        runs[p].counters.push(counter);
    }
    Ok(ResultBundle {
        spec: spec.clone(),
        runs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerSummary {
    pub label: String,
    pub median: f64,
    pub iqr: f64,
}

/// Reference planner versus one other planner on final values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseRow {
    pub reference: String,
    pub other: String,
    /// Probability the reference is better.
    pub a12: f64,
    pub p_value: f64,
    pub effect: EffectSize,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedupRow {
    pub baseline: String,
    pub median: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BundleSummary {
    pub direction: Direction,
    pub units: String,
    pub reference: String,
    pub planners: Vec<PlannerSummary>,
    pub pairwise: Vec<PairwiseRow>,
    pub ranks: Option<RankTable>,
    pub speedups: Vec<SpeedupRow>,
}

/// Pairwise tests of the reference planner (`lidos` when present, else the
/// first) against each other planner, Scott-Knott ranks over all planners,
/// and post-change speedups of the reference over each other planner.
pub fn summarize_bundle(bundle: &ResultBundle) -> Result<BundleSummary> {
    let direction = bundle.spec.final_direction();
    let reference = bundle
        .runs
        .iter()
        .position(|r| r.kind == PlannerKind::Lidos)
        .unwrap_or(0);
    let finals: Vec<Vec<f64>> = bundle.runs.iter().map(PlannerRuns::finals).collect();

    let planners = bundle
        .runs
        .iter()
        .zip(&finals)
        .map(|(r, f)| {
            let Summary { median, iqr } = summarize(f)?;
            Ok(PlannerSummary {
                label: r.label.clone(),
                median,
                iqr,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let ref_label = bundle.runs[reference].label.clone();
    let mut pairwise = Vec::new();
    let mut speedups = Vec::new();
    let change = bundle.spec.legs.len() - 1;
    for (i, run) in bundle.runs.iter().enumerate() {
        if i == reference {
            continue;
        }
        let a = a12(&finals[reference], &finals[i], direction);
        let p = wilcoxon_rank_sum(&finals[reference], &finals[i])?;
        let effect = EffectSize::classify(a);
        pairwise.push(PairwiseRow {
            reference: ref_label.clone(),
            other: run.label.clone(),
            a12: a,
            p_value: p,
            effect,
            significant: p < ALPHA && effect != EffectSize::Negligible,
        });
        let values = run
            .traces
            .iter()
            .zip(&bundle.runs[reference].traces)
            .map(|(base, lidos)| speedup(base, lidos, change))
            .collect::<Result<Vec<_>>>()?;
        let median = crate::stats::percentile(&values, 0.5);
        speedups.push(SpeedupRow {
            baseline: run.label.clone(),
            median,
            values,
        });
    }

    let ranks = if bundle.runs.len() >= 2 {
        let groups = bundle
            .runs
            .iter()
            .zip(&finals)
            .map(|(r, f)| SampleGroup::new(&r.label, f.clone(), direction))
            .collect::<Result<Vec<_>>>()?;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(bundle.spec.base_seed, &[b"scott_knott"]));
        Some(scott_knott(&groups, &mut rng)?)
    } else {
        None
    };

    Ok(BundleSummary {
        direction,
        units: bundle.spec.final_units().to_string(),
        reference: ref_label,
        planners,
        pairwise,
        ranks,
        speedups,
    })
}

/// Median and IQR of best-so-far values across repetitions at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub planner: String,
    pub epoch: usize,
    pub env: String,
    /// Nominal measurement count: earlier legs' budgets plus the offset into
    /// this epoch.
    pub measurement: u64,
    pub median_best_ft: f64,
    pub iqr_best_ft: f64,
    /// First row after an environment change.
    pub env_change: bool,
}

/// Samples every planner's best-so-far value at each multiple of `stride`
/// within each epoch. Repetitions that stopped early contribute their last
/// value.
pub fn emit_trajectories(bundle: &ResultBundle, stride: u64) -> Result<Vec<TrajectoryRow>> {
    if stride == 0 {
        return Err(Error::InvalidParameter("stride must be positive".into()));
    }
    let mut rows = Vec::new();
    for run in &bundle.runs {
        let epochs: Vec<Vec<&[TraceEvent]>> = run.traces.iter().map(RunTrace::epochs).collect();
        let mut offset = 0;
        for (e, leg) in bundle.spec.legs.iter().enumerate() {
            let mut first = true;
            let mut m = stride;
            while m <= leg.budget {
                let values: Vec<f64> = epochs
                    .iter()
                    .filter_map(|ep| ep.get(e))
                    .filter(|seg| !seg.is_empty())
                    .map(|seg| seg[(m as usize).min(seg.len()) - 1].best_ft)
                    .collect();
                if !values.is_empty() {
                    let s = summarize(&values)?;
                    rows.push(TrajectoryRow {
                        planner: run.label.clone(),
                        epoch: e,
                        env: leg.env.clone(),
                        measurement: offset + m,
                        median_best_ft: s.median,
                        iqr_best_ft: s.iqr,
                        env_change: e > 0 && first,
                    });
                    first = false;
                }
                m += stride;
            }
            offset += leg.budget;
        }
    }
    Ok(rows)
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// Serializes every trace in the bundle.
pub fn traces_csv(bundle: &ResultBundle) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "planner",
        "rep",
        "measurement_index",
        "env",
        "ft",
        "best_ft",
        "adaptation_sent",
        "env_change",
    ])?;
    for run in &bundle.runs {
        for (rep, trace) in run.traces.iter().enumerate() {
            for e in &trace.events {
                w.write_record([
                    run.label.as_str(),
                    &rep.to_string(),
                    &e.measurement_index.to_string(),
                    &e.env,
                    &e.ft.to_string(),
                    &e.best_ft.to_string(),
                    flag(e.adaptation_sent),
                    flag(e.env_change),
                ])?;
            }
        }
    }
    w.into_inner()
        .map_err(|e| Error::Trace(format!("flushing traces: {e}")))
}

#[derive(Debug, Deserialize)]
struct TraceRow {
    planner: String,
    rep: usize,
    measurement_index: u64,
    env: String,
    ft: f64,
    best_ft: f64,
    adaptation_sent: u8,
    env_change: u8,
}

/// Rebuilds a bundle from a traces CSV and the manifest that produced it.
/// Plans are not stored in the CSV and come back empty; adaptation records
/// are rebuilt from the flags.
pub fn read_traces(spec: &ScenarioSpec, csv_bytes: &[u8]) -> Result<ResultBundle> {
    let labels = spec.planner_labels();
    let mut runs: Vec<PlannerRuns> = spec
        .planners
        .iter()
        .zip(&labels)
        .map(|(&kind, label)| PlannerRuns {
            label: label.clone(),
            kind,
            traces: vec![RunTrace::default(); spec.repetitions],
            counters: vec![0; spec.repetitions],
        })
        .collect();
    let mut rdr = csv::Reader::from_reader(csv_bytes);
    for row in rdr.deserialize::<TraceRow>() {
        let row = row?;
        let p = labels
            .iter()
            .position(|l| *l == row.planner)
            .ok_or_else(|| Error::Trace(format!("planner `{}` not in scenario", row.planner)))?;
        if row.rep >= spec.repetitions {
            return Err(Error::Trace(format!("repetition {} out of range", row.rep)));
        }
        let env = spec
            .environment(&row.env)
            .ok_or_else(|| Error::UnknownEnvironment(row.env.clone()))?;
        let trace = &mut runs[p].traces[row.rep];
        if trace
            .events
            .last()
            .is_some_and(|e| e.measurement_index >= row.measurement_index)
        {
            return Err(Error::Trace(format!(
                "measurement indices out of order for {} rep {}",
                row.planner, row.rep
            )));
        }
        if row.adaptation_sent != 0 {
            trace.adaptations.push(crate::planner::Adaptation {
                measurement_index: row.measurement_index,
                plan: AdaptationPlan::new(Vec::new()),
                ft: row.best_ft,
                env: row.env.clone(),
            });
        }
        trace.events.push(TraceEvent {
            measurement_index: row.measurement_index,
            plan: AdaptationPlan::new(Vec::new()),
            ft: row.ft,
            best_ft: row.best_ft,
            env: row.env,
            direction: env.direction,
            adaptation_sent: row.adaptation_sent != 0,
            env_change: row.env_change != 0,
        });
        runs[p].counters[row.rep] = row.measurement_index;
    }
    Ok(ResultBundle {
        spec: spec.clone(),
        runs,
    })
}

fn csv_bytes<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner()
        .map_err(|e| Error::Trace(format!("flushing csv: {e}")))
}

#[derive(Serialize)]
struct SummaryRecord<'a> {
    planner: &'a str,
    median: f64,
    iqr: f64,
    rank: Option<usize>,
}

#[derive(Serialize)]
struct RankRecord<'a> {
    rank: usize,
    planner: &'a str,
    median: f64,
    iqr: f64,
}

#[derive(Serialize)]
struct SpeedupRecord<'a> {
    baseline: &'a str,
    rep: usize,
    speedup: f64,
}

/// Human-readable rendering of a summary.
pub fn render_report(bundle: &ResultBundle, summary: &BundleSummary) -> String {
    let mut out = String::new();
    let spec = &bundle.spec;
    let legs: Vec<&str> = spec.legs.iter().map(|l| l.env.as_str()).collect();
    let _ = writeln!(
        out,
        "{}: {} ({} repetitions, k = {}, {})",
        spec.system,
        legs.join(" -> "),
        spec.repetitions,
        spec.k,
        summary.direction.as_str()
    );
    let units = if summary.units.is_empty() {
        String::new()
    } else {
        format!(" [{}]", summary.units)
    };
    let _ = writeln!(out, "\nfinal best value{units}");
    let _ = writeln!(out, "{:<16} {:>6} {:>14} {:>14}", "planner", "rank", "median", "iqr");
    for p in &summary.planners {
        let rank = summary
            .ranks
            .as_ref()
            .and_then(|r| r.rank_of(&p.label))
            .map(|r| r.to_string())
            .unwrap_or_else(|| "-".into());
        let _ = writeln!(out, "{:<16} {:>6} {:>14.4} {:>14.4}", p.label, rank, p.median, p.iqr);
    }
    if !summary.pairwise.is_empty() {
        let _ = writeln!(out, "\n{} versus", summary.reference);
        for row in &summary.pairwise {
            let _ = writeln!(
                out,
                "  {:<16} A12 = {:.2} ({:?}), p = {:.4}{}",
                row.other,
                row.a12,
                row.effect,
                row.p_value,
                if row.significant { "  *" } else { "" }
            );
        }
    }
    if !summary.speedups.is_empty() {
        let _ = writeln!(out, "\npost-change speedup of {} (median over repetitions)", summary.reference);
        for s in &summary.speedups {
            let _ = writeln!(out, "  over {:<16} {:.2}x", s.baseline, s.median);
        }
    }
    out
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    std::fs::rename(&tmp, path).map_err(io_err(path))
}

/// Writes the manifest copy and the trace file of a bundle.
pub fn write_run(bundle: &ResultBundle, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    write_atomic(&dir.join(SCENARIO_FILE), bundle.spec.to_toml()?.as_bytes())?;
    write_atomic(&dir.join(TRACES_FILE), &traces_csv(bundle)?)
}

/// Reads back what [`write_run`] wrote.
pub fn read_run(dir: &Path) -> Result<ResultBundle> {
    let spec_path = dir.join(SCENARIO_FILE);
    let text = std::fs::read_to_string(&spec_path).map_err(io_err(&spec_path))?;
    let spec = ScenarioSpec::parse(&text)?;
    let traces_path = dir.join(TRACES_FILE);
    let bytes = std::fs::read(&traces_path).map_err(io_err(&traces_path))?;
    read_traces(&spec, &bytes)
}

/// Writes summary, pairwise, rank, speedup and report files.
pub fn write_summary(bundle: &ResultBundle, summary: &BundleSummary, dir: &Path) -> Result<()> {
    let rank_of = |label: &str| summary.ranks.as_ref().and_then(|r| r.rank_of(label));
    write_atomic(
        &dir.join(SUMMARY_FILE),
        &csv_bytes(summary.planners.iter().map(|p| SummaryRecord {
            planner: &p.label,
            median: p.median,
            iqr: p.iqr,
            rank: rank_of(&p.label),
        }))?,
    )?;
    write_atomic(&dir.join(PAIRWISE_FILE), &csv_bytes(&summary.pairwise)?)?;
    let ranks: Vec<RankRecord> = summary
        .ranks
        .iter()
        .flat_map(|t| &t.entries)
        .map(|e| RankRecord {
            rank: e.rank,
            planner: &e.label,
            median: e.median,
            iqr: e.iqr,
        })
        .collect();
    write_atomic(&dir.join(RANKS_FILE), &csv_bytes(ranks)?)?;
    let speedups: Vec<SpeedupRecord> = summary
        .speedups
        .iter()
        .flat_map(|s| {
            s.values.iter().enumerate().map(|(rep, &v)| SpeedupRecord {
                baseline: &s.baseline,
                rep,
                speedup: v,
            })
        })
        .collect();
    write_atomic(&dir.join(SPEEDUPS_FILE), &csv_bytes(speedups)?)?;
    write_atomic(&dir.join(REPORT_FILE), render_report(bundle, summary).as_bytes())
}

pub fn write_trajectories(rows: &[TrajectoryRow], dir: &Path) -> Result<()> {
    write_atomic(&dir.join(TRAJECTORIES_FILE), &csv_bytes(rows)?)
}

/// A two-leg scenario over a synthetic landscape (`A` then `B`), with the
/// default planner parameters.
pub fn synthetic_scenario(system: &str, budget: u64, repetitions: usize, base_seed: u64) -> ScenarioSpec {
    ScenarioSpec {
        system: system.to_string(),
        planners: default_planners(),
        repetitions,
        k: default_k(),
        base_seed,
        trajectory_stride: default_stride(),
        population_size: default_population(),
        crossover_rate: default_crossover(),
        mutation_rate: default_mutation(),
        environments: ["A", "B"]
            .iter()
            .map(|id| EnvironmentSpec {
                id: id.to_string(),
                dataset: PathBuf::from(format!("env_{}.csv", id.to_ascii_lowercase())),
                direction: Direction::Minimize,
                units: String::new(),
            })
            .collect(),
        legs: ["A", "B"]
            .iter()
            .map(|id| LegSpec {
                env: id.to_string(),
                budget,
            })
            .collect(),
    }
}
