//! Dataset-backed measurement oracle.
//!
//! A [`CyberTwin`] answers "what is the performance of plan `x` under the
//! current environment" from per-environment [`MeasurementTable`]s. It
//! caches what has been measured since the environment last became current
//! and counts every genuine (uncached) measurement.
//!
//! Values inside the planner stack are always in minimization form. A
//! [`Direction::Maximize`] environment is negated on the way out of
//! [`CyberTwin::measure`]; tables and traces keep the original units.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{io_err, Error, Result};
use crate::space::{AdaptationPlan, ConfigSpace, OptionSpec};

/// Name of the performance column in measurement CSVs.
pub const PERFORMANCE_COLUMN: &str = "performance";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Minimize,
    Maximize,
}

impl Direction {
    /// Converts a value in original units to minimization form.
    pub fn canonical(self, raw: f64) -> f64 {
        match self {
            Direction::Minimize => raw,
            Direction::Maximize => -raw,
        }
    }

    /// Inverse of [`Direction::canonical`].
    pub fn raw(self, canonical: f64) -> f64 {
        self.canonical(canonical)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Minimize => "minimize",
            Direction::Maximize => "maximize",
        }
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "minimize" | "min" => Ok(Direction::Minimize),
            "maximize" | "max" => Ok(Direction::Maximize),
            other => Err(Error::InvalidParameter(format!("unknown direction `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Environment {
    pub id: String,
    pub direction: Direction,
    #[serde(default)]
    pub units: String,
}

impl Environment {
    pub fn new(id: impl Into<String>, direction: Direction) -> Self {
        Self {
            id: id.into(),
            direction,
            units: String::new(),
        }
    }

    pub fn with_units(mut self, units: impl Into<String>) -> Self {
        self.units = units.into();
        self
    }
}

/// Plan → performance (original units) for one environment.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementTable {
    environment: Environment,
    rows: BTreeMap<AdaptationPlan, f64>,
}

impl MeasurementTable {
    /// Builds a table, rejecting non-finite values and conflicting duplicates.
    /// Exact duplicate rows collapse into one.
    pub fn new(
        environment: Environment,
        rows: impl IntoIterator<Item = (AdaptationPlan, f64)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (plan, value) in rows {
            if !value.is_finite() {
                return Err(Error::Dataset(format!(
                    "non-finite performance for plan {:?}",
                    plan.values()
                )));
            }
            if let Some(prev) = map.insert(plan.clone(), value) {
                if prev != value {
                    return Err(Error::Dataset(format!(
                        "plan {:?} has conflicting measurements {prev} and {value}",
                        plan.values()
                    )));
                }
            }
        }
        Ok(Self {
            environment,
            rows: map,
        })
    }

    /// Reads a measurement CSV (`opt1,...,optN,performance`). The implied
    /// space has one option per non-performance column with the sorted
    /// distinct values seen in that column.
    pub fn from_csv_reader<R: Read>(
        reader: R,
        environment: Environment,
    ) -> Result<(ConfigSpace, Self)> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let perf_col = headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(PERFORMANCE_COLUMN))
            .ok_or_else(|| Error::Dataset("missing `performance` column".into()))?;
        let option_cols: Vec<usize> = (0..headers.len()).filter(|&c| c != perf_col).collect();
        if option_cols.is_empty() {
            return Err(Error::Dataset("no option columns".into()));
        }

        let mut rows = Vec::new();
        let mut domains: Vec<Vec<i64>> = vec![Vec::new(); option_cols.len()];
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            let row = line + 2;
            let mut values = Vec::with_capacity(option_cols.len());
            for (k, &c) in option_cols.iter().enumerate() {
                let cell = record.get(c).unwrap_or("");
                let v = parse_option_value(cell).ok_or_else(|| {
                    Error::Dataset(format!(
                        "row {row}: `{cell}` in column `{}` is not an integer",
                        &headers[c]
                    ))
                })?;
                domains[k].push(v);
                values.push(v);
            }
            let cell = record.get(perf_col).unwrap_or("");
            let perf: f64 = cell.parse().map_err(|_| {
                Error::Dataset(format!("row {row}: performance `{cell}` is not numeric"))
            })?;
            rows.push((AdaptationPlan::new(values), perf));
        }

        let options = option_cols
            .iter()
            .zip(domains)
            .map(|(&c, mut d)| {
                d.sort_unstable();
                d.dedup();
                if d.is_empty() {
                    return Err(Error::Dataset("dataset has no rows".into()));
                }
                OptionSpec::new(&headers[c], d)
            })
            .collect::<Result<Vec<_>>>()?;
        let space = ConfigSpace::new(options)?;
        Ok((space, Self::new(environment, rows)?))
    }

    pub fn load(path: impl AsRef<Path>, environment: Environment) -> Result<(ConfigSpace, Self)> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(io_err(path))?;
        Self::from_csv_reader(std::io::BufReader::new(file), environment)
    }

    /// Writes the table in the measurement CSV format.
    pub fn write_csv<W: Write>(&self, space: &ConfigSpace, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = space.options().iter().map(|o| o.name()).collect();
        header.push(PERFORMANCE_COLUMN);
        w.write_record(&header)?;
        for (plan, value) in &self.rows {
            let mut rec: Vec<String> = plan.values().iter().map(i64::to_string).collect();
            rec.push(value.to_string());
            w.write_record(&rec)?;
        }
        w.flush().map_err(io_err("<csv>"))?;
        Ok(())
    }

    pub fn environment(&self) -> &Environment {
        &self.environment
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Value in original units.
    pub fn get(&self, plan: &AdaptationPlan) -> Option<f64> {
        self.rows.get(plan).copied()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&AdaptationPlan, f64)> {
        self.rows.iter().map(|(p, &v)| (p, v))
    }

    /// The plan with the best value under the table's direction; ties go to
    /// the lexicographically lowest plan.
    pub fn best(&self) -> Option<(&AdaptationPlan, f64)> {
        let dir = self.environment.direction;
        self.rows()
            .min_by(|a, b| dir.canonical(a.1).total_cmp(&dir.canonical(b.1)))
    }
}

fn parse_option_value(cell: &str) -> Option<i64> {
    if let Ok(v) = cell.parse::<i64>() {
        return Some(v);
    }
    let f: f64 = cell.parse().ok()?;
    (f.fract() == 0.0 && f.abs() < 9.0e15).then_some(f as i64)
}

/// Immutable measurement data shared by every twin built over it.
#[derive(Debug)]
pub struct TwinData {
    space: ConfigSpace,
    tables: Vec<MeasurementTable>,
    index: HashMap<String, usize>,
    // every environment has this exact key set, in ascending order
    plans: Vec<AdaptationPlan>,
}

impl TwinData {
    /// Validates that every table covers exactly the same plans, all valid in
    /// `space`, and that environment ids are unique.
    pub fn new(space: ConfigSpace, tables: Vec<MeasurementTable>) -> Result<Self> {
        let first = tables
            .first()
            .ok_or_else(|| Error::Dataset("no measurement tables".into()))?;
        if first.is_empty() {
            return Err(Error::Dataset(format!(
                "environment `{}` has no measurements",
                first.environment.id
            )));
        }
        let mut index = HashMap::new();
        for (i, t) in tables.iter().enumerate() {
            if index.insert(t.environment.id.clone(), i).is_some() {
                return Err(Error::DuplicateEnvironment(t.environment.id.clone()));
            }
            if let Some(bad) = t.rows.keys().find(|p| !space.is_valid(p)) {
                return Err(Error::InvalidPlan(bad.values().to_vec()));
            }
            if t.rows.len() != first.rows.len()
                || !t.rows.keys().zip(first.rows.keys()).all(|(a, b)| a == b)
            {
                return Err(Error::Dataset(format!(
                    "environments `{}` and `{}` measure different plan sets",
                    first.environment.id, t.environment.id
                )));
            }
        }
        let plans: Vec<AdaptationPlan> = first.rows.keys().cloned().collect();
        Ok(Self {
            space,
            tables,
            index,
            plans,
        })
    }

    /// Loads one CSV per environment and checks they imply the same space.
    pub fn load<P: AsRef<Path>>(files: &[(P, Environment)]) -> Result<Self> {
        let mut space: Option<ConfigSpace> = None;
        let mut tables = Vec::with_capacity(files.len());
        for (path, env) in files {
            let (s, t) = MeasurementTable::load(path, env.clone())?;
            match &space {
                None => space = Some(s),
                Some(prev) if *prev != s => {
                    return Err(Error::Dataset(format!(
                        "{}: options or domains differ from the first dataset",
                        path.as_ref().display()
                    )))
                }
                Some(_) => {}
            }
            tables.push(t);
        }
        let space = space.ok_or_else(|| Error::Dataset("no measurement tables".into()))?;
        Self::new(space, tables)
    }

    pub fn space(&self) -> &ConfigSpace {
        &self.space
    }

    pub fn tables(&self) -> &[MeasurementTable] {
        &self.tables
    }

    pub fn table(&self, env_id: &str) -> Option<&MeasurementTable> {
        self.index.get(env_id).map(|&i| &self.tables[i])
    }

    /// Every measured plan, ascending.
    pub fn plans(&self) -> &[AdaptationPlan] {
        &self.plans
    }

    pub fn contains(&self, plan: &AdaptationPlan) -> bool {
        self.plans.binary_search(plan).is_ok()
    }

    /// The measured plan nearest to `plan` by normalized distance; ties go to
    /// the lexicographically lowest plan. Measured plans map to themselves.
    pub fn nearest_measured(&self, plan: &AdaptationPlan) -> AdaptationPlan {
        if self.contains(plan) {
            return plan.clone();
        }
        let mut best = (f64::INFINITY, 0usize);
        // plans are ascending, so strict `<` keeps the lowest on ties
        for (i, c) in self.plans.iter().enumerate() {
            let d = self.space.squared_distance(c, plan);
            if d < best.0 {
                best = (d, i);
            }
        }
        self.plans[best.1].clone()
    }
}

/// Result of a single [`CyberTwin::measure`] call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    /// Minimization-form value.
    pub ft: f64,
    /// Value in the environment's original units.
    pub raw: f64,
    /// `true` when this was a cache miss and advanced the counter.
    pub fresh: bool,
}

/// Per-run measurement oracle over shared [`TwinData`].
#[derive(Debug, Clone)]
pub struct CyberTwin {
    data: Arc<TwinData>,
    current: usize,
    cache: HashSet<AdaptationPlan>,
    counter: u64,
}

impl CyberTwin {
    /// Starts in the first environment with an empty cache.
    pub fn new(data: Arc<TwinData>) -> Self {
        Self {
            data,
            current: 0,
            cache: HashSet::new(),
            counter: 0,
        }
    }

    pub fn data(&self) -> &Arc<TwinData> {
        &self.data
    }

    pub fn space(&self) -> &ConfigSpace {
        &self.data.space
    }

    pub fn environment(&self) -> &Environment {
        &self.data.tables[self.current].environment
    }

    /// Genuine measurements made over the twin's lifetime.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn is_cached(&self, plan: &AdaptationPlan) -> bool {
        self.cache.contains(plan)
    }

    pub fn measure(&mut self, plan: &AdaptationPlan) -> Result<Measurement> {
        let table = &self.data.tables[self.current];
        let raw = table.get(plan).ok_or_else(|| {
            Error::Unmeasured(plan.values().to_vec(), table.environment.id.clone())
        })?;
        let fresh = self.cache.insert(plan.clone());
        if fresh {
            self.counter += 1;
        }
        Ok(Measurement {
            ft: table.environment.direction.canonical(raw),
            raw,
            fresh,
        })
    }

    /// Switches environment and clears its cache, even when `env_id` is
    /// already current. The counter is left alone.
    pub fn set_environment(&mut self, env_id: &str) -> Result<()> {
        let idx = *self
            .data
            .index
            .get(env_id)
            .ok_or_else(|| Error::UnknownEnvironment(env_id.to_string()))?;
        self.current = idx;
        self.cache.clear();
        Ok(())
    }

    /// Fraction of the current environment's plans measured this epoch.
    pub fn coverage(&self) -> f64 {
        self.cache.len() as f64 / self.data.tables[self.current].len() as f64
    }

    pub fn nearest_measured(&self, plan: &AdaptationPlan) -> AdaptationPlan {
        self.data.nearest_measured(plan)
    }
}

/// Parameters for [`synth_landscape`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeParams {
    pub n_options: usize,
    pub domain_size: usize,
    pub n_peaks: usize,
    /// Environment B's peak heights are environment A's rotated by this many
    /// positions; must not be a multiple of `n_peaks`.
    pub peak_shift: usize,
    pub noise_seed: u64,
}

impl Default for LandscapeParams {
    fn default() -> Self {
        Self {
            n_options: 6,
            domain_size: 6,
            n_peaks: 2,
            peak_shift: 1,
            noise_seed: 1,
        }
    }
}

/// Two environments over one fully enumerated space.
#[derive(Debug, Clone)]
pub struct SyntheticLandscape {
    pub space: ConfigSpace,
    pub env_a: MeasurementTable,
    pub env_b: MeasurementTable,
    /// Peak centres, in the order heights are assigned in environment A.
    pub peaks: Vec<AdaptationPlan>,
}

impl SyntheticLandscape {
    pub fn into_twin_data(self) -> Result<TwinData> {
        TwinData::new(self.space, vec![self.env_a, self.env_b])
    }
}

const BASELINE: f64 = 100.0;
const PEAK_DEPTH: f64 = 40.0;
const RUGGEDNESS: f64 = 4.0;
// basin width relative to sqrt(n_options / n_peaks), in normalized units
const BASIN_WIDTH: f64 = 0.1;
// heights of the shallowest and deepest peak differ by this fraction
const HEIGHT_SPREAD: f64 = 0.1;
const SYNTH_ATTEMPTS: u64 = 64;

/// Generates a pair of minimization landscapes that share their peak
/// locations and ruggedness but permute peak heights, so environment A's
/// global optimum is a strictly local (non-global) optimum of environment B.
pub fn synth_landscape(params: &LandscapeParams) -> Result<SyntheticLandscape> {
    let LandscapeParams {
        n_options,
        domain_size,
        n_peaks,
        peak_shift,
        noise_seed,
    } = *params;
    if n_options == 0 || domain_size == 0 {
        return Err(Error::Landscape("need at least one option and one value".into()));
    }
    if n_peaks < 2 {
        return Err(Error::Landscape("need at least 2 peaks".into()));
    }
    if peak_shift % n_peaks == 0 {
        return Err(Error::Landscape(format!(
            "peak_shift {peak_shift} leaves heights unchanged for {n_peaks} peaks"
        )));
    }
    let size = (domain_size as u128)
        .checked_pow(n_options as u32)
        .filter(|&s| s <= 2_000_000)
        .ok_or_else(|| Error::Landscape("space too large to enumerate".into()))?
        as usize;
    if n_peaks > size {
        return Err(Error::Landscape(format!(
            "{n_peaks} peaks requested in a space of {size} plans"
        )));
    }

    let options = (0..n_options)
        .map(|i| OptionSpec::new(format!("x{i}"), (0..domain_size as i64).collect()))
        .collect::<Result<Vec<_>>>()?;
    let space = ConfigSpace::new(options)?;
    let all: Vec<AdaptationPlan> = (0..size)
        .map(|mut idx| {
            let mut v = vec![0i64; n_options];
            for slot in v.iter_mut().rev() {
                *slot = (idx % domain_size) as i64;
                idx /= domain_size;
            }
            AdaptationPlan::new(v)
        })
        .collect();

    for attempt in 0..SYNTH_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(noise_seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9)));
        if let Some(land) = try_landscape(&space, &all, params, &mut rng)? {
            return Ok(land);
        }
    }
    Err(Error::Landscape(
        "could not place peaks satisfying the shared-optimum property; enlarge the space".into(),
    ))
}

fn try_landscape(
    space: &ConfigSpace,
    all: &[AdaptationPlan],
    params: &LandscapeParams,
    rng: &mut ChaCha8Rng,
) -> Result<Option<SyntheticLandscape>> {
    let n_peaks = params.n_peaks;
    let width = BASIN_WIDTH * (space.len() as f64).sqrt() / (n_peaks as f64).sqrt();

    // peaks must sit at least two basin widths apart
    let mut order: Vec<usize> = (0..all.len()).collect();
    order.shuffle(rng);
    let mut peaks: Vec<AdaptationPlan> = Vec::with_capacity(n_peaks);
    for &i in &order {
        let p = &all[i];
        if peaks
            .iter()
            .all(|q| space.distance_unchecked(p, q) >= 2.0 * width.min(0.5))
        {
            peaks.push(p.clone());
            if peaks.len() == n_peaks {
                break;
            }
        }
    }
    if peaks.len() < n_peaks {
        return Ok(None);
    }

    // A's heights descend from 1.0 to 0.9; B rotates them
    let heights_a: Vec<f64> = (0..n_peaks)
        .map(|i| 1.0 - HEIGHT_SPREAD * i as f64 / (n_peaks - 1) as f64)
        .collect();
    let heights_b: Vec<f64> = (0..n_peaks)
        .map(|i| heights_a[(i + params.peak_shift) % n_peaks])
        .collect();

    let noise: Vec<f64> = all.iter().map(|_| rng.random::<f64>()).collect();
    let value = |plan: &AdaptationPlan, i: usize, heights: &[f64]| {
        let basins: f64 = peaks
            .iter()
            .zip(heights)
            .map(|(c, h)| {
                let d = space.distance_unchecked(plan, c);
                h * (-(d * d) / (2.0 * width * width)).exp()
            })
            .sum();
        let v = BASELINE - PEAK_DEPTH * basins + RUGGEDNESS * noise[i];
        // keep values on a fixed decimal grid so CSV round-trips are exact
        (v * 1e6).round() / 1e6
    };
    let env_a = MeasurementTable::new(
        Environment::new("A", Direction::Minimize),
        all.iter().enumerate().map(|(i, p)| (p.clone(), value(p, i, &heights_a))),
    )?;
    let env_b = MeasurementTable::new(
        Environment::new("B", Direction::Minimize),
        all.iter().enumerate().map(|(i, p)| (p.clone(), value(p, i, &heights_b))),
    )?;

    let (best_a, _) = env_a.best().expect("non-empty");
    let (best_b, _) = env_b.best().expect("non-empty");
    let best_a = best_a.clone();
    if best_a == *best_b || !is_local_optimum(space, &env_b, &best_a)? {
        return Ok(None);
    }
    Ok(Some(SyntheticLandscape {
        space: space.clone(),
        env_a,
        env_b,
        peaks,
    }))
}

/// `true` when every one-step neighbour of `plan` is strictly worse.
pub fn is_local_optimum(
    space: &ConfigSpace,
    table: &MeasurementTable,
    plan: &AdaptationPlan,
) -> Result<bool> {
    let dir = table.environment.direction;
    let here = table
        .get(plan)
        .map(|v| dir.canonical(v))
        .ok_or_else(|| Error::Unmeasured(plan.values().to_vec(), table.environment.id.clone()))?;
    Ok(space.neighbors(plan)?.iter().all(|q| {
        table
            .get(q)
            .map(|v| dir.canonical(v) > here)
            .unwrap_or(true)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_data() -> Arc<TwinData> {
        let csv_a = "a,b,performance\n0,1,7.0\n0,2,3.5\n1,1,2.0\n1,2,9.0\n0,3,1.0\n1,3,4.0\n";
        let csv_b = "a,b,performance\n0,1,1.0\n0,2,2.0\n1,1,3.0\n1,2,4.0\n0,3,5.0\n1,3,6.0\n";
        let (s, a) =
            MeasurementTable::from_csv_reader(csv_a.as_bytes(), Environment::new("A", Direction::Minimize)).unwrap();
        let (_, b) =
            MeasurementTable::from_csv_reader(csv_b.as_bytes(), Environment::new("B", Direction::Maximize)).unwrap();
        Arc::new(TwinData::new(s, vec![a, b]).unwrap())
    }

    #[test]
    fn load_implies_space() {
        let data = tiny_data();
        assert_eq!(data.space().len(), 2);
        assert_eq!(data.space().options()[1].domain(), &[1, 2, 3]);
        assert_eq!(data.tables()[0].len(), 6);
    }

    #[test]
    fn load_two_rows() {
        let csv = "x,performance\n0,1.5\n1,2.5\n";
        let (s, t) = MeasurementTable::from_csv_reader(csv.as_bytes(), Environment::new("e", Direction::Minimize)).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(s.size(), 2);
    }

    #[test]
    fn load_errors() {
        let env = || Environment::new("e", Direction::Minimize);
        let conflict = "x,performance\n0,1.5\n0,2.5\n";
        assert!(matches!(
            MeasurementTable::from_csv_reader(conflict.as_bytes(), env()),
            Err(Error::Dataset(_))
        ));
        let same = "x,performance\n0,1.5\n0,1.5\n";
        assert_eq!(MeasurementTable::from_csv_reader(same.as_bytes(), env()).unwrap().1.len(), 1);
        let text = "x,performance\nfoo,1.5\n";
        assert!(MeasurementTable::from_csv_reader(text.as_bytes(), env()).is_err());
        let text = "x,performance\n1,fast\n";
        assert!(MeasurementTable::from_csv_reader(text.as_bytes(), env()).is_err());
        let text = "x,y\n1,2\n";
        assert!(matches!(
            MeasurementTable::from_csv_reader(text.as_bytes(), env()),
            Err(Error::Dataset(m)) if m.contains("performance")
        ));
    }

    #[test]
    fn mismatched_environments_rejected() {
        let (s, a) = MeasurementTable::from_csv_reader(
            "x,performance\n0,1\n1,2\n".as_bytes(),
            Environment::new("A", Direction::Minimize),
        )
        .unwrap();
        let (_, b) = MeasurementTable::from_csv_reader(
            "x,performance\n0,1\n".as_bytes(),
            Environment::new("B", Direction::Minimize),
        )
        .unwrap();
        assert!(TwinData::new(s.clone(), vec![a.clone(), b]).is_err());
        assert!(matches!(
            TwinData::new(s, vec![a.clone(), a]),
            Err(Error::DuplicateEnvironment(_))
        ));
    }

    #[test]
    fn measure_caches_within_epoch() {
        let mut twin = CyberTwin::new(tiny_data());
        let p: AdaptationPlan = vec![0, 1].into();
        let m1 = twin.measure(&p).unwrap();
        assert_eq!((m1.ft, m1.fresh), (7.0, true));
        let m2 = twin.measure(&p).unwrap();
        assert_eq!((m2.ft, m2.fresh), (7.0, false));
        assert_eq!(twin.counter(), 1);
    }

    #[test]
    fn change_forces_remeasurement() {
        let mut twin = CyberTwin::new(tiny_data());
        let p: AdaptationPlan = vec![0, 1].into();
        twin.measure(&p).unwrap();
        twin.set_environment("B").unwrap();
        let m = twin.measure(&p).unwrap();
        assert!(m.fresh);
        assert_eq!(m.raw, 1.0);
        assert_eq!(m.ft, -1.0, "maximize is negated");
        assert_eq!(twin.counter(), 2);
    }

    #[test]
    fn same_environment_change_still_clears() {
        let mut twin = CyberTwin::new(tiny_data());
        let p: AdaptationPlan = vec![1, 1].into();
        twin.measure(&p).unwrap();
        twin.set_environment("A").unwrap();
        assert!(!twin.is_cached(&p));
        assert!(twin.measure(&p).unwrap().fresh);
        assert_eq!(twin.counter(), 2);
        assert!(matches!(
            twin.set_environment("nope"),
            Err(Error::UnknownEnvironment(_))
        ));
    }

    #[test]
    fn coverage_tracks_epoch() {
        let data = tiny_data();
        let mut twin = CyberTwin::new(data.clone());
        assert_eq!(twin.coverage(), 0.0);
        for p in data.plans().iter().take(3) {
            twin.measure(p).unwrap();
        }
        assert_eq!(twin.coverage(), 0.5);
        for p in data.plans() {
            twin.measure(p).unwrap();
        }
        assert_eq!(twin.coverage(), 1.0);
        twin.set_environment("B").unwrap();
        assert_eq!(twin.coverage(), 0.0);
    }

    #[test]
    fn synthetic_single_row_table() {
        let t = MeasurementTable::new(
            Environment::new("e", Direction::Minimize),
            [(AdaptationPlan::new(vec![0]), 7.0)],
        )
        .unwrap();
        let space = ConfigSpace::parse("x: 0").unwrap();
        let mut twin = CyberTwin::new(Arc::new(TwinData::new(space, vec![t]).unwrap()));
        assert_eq!(twin.measure(&vec![0].into()).unwrap().ft, 7.0);
        assert!(matches!(
            twin.measure(&vec![1].into()),
            Err(Error::Unmeasured(..))
        ));
    }

    #[test]
    fn nearest_measured_prefers_lowest_on_ties() {
        let space = ConfigSpace::parse("a: 0,1,2").unwrap();
        let t = MeasurementTable::new(
            Environment::new("e", Direction::Minimize),
            [(vec![0].into(), 1.0), (vec![2].into(), 2.0)],
        )
        .unwrap();
        let data = TwinData::new(space, vec![t]).unwrap();
        assert_eq!(data.nearest_measured(&vec![1].into()).values(), &[0]);
        assert_eq!(data.nearest_measured(&vec![2].into()).values(), &[2]);
    }

    #[test]
    fn csv_round_trip() {
        let data = tiny_data();
        let mut buf = Vec::new();
        data.tables()[1].write_csv(data.space(), &mut buf).unwrap();
        let (s, t) =
            MeasurementTable::from_csv_reader(buf.as_slice(), data.tables()[1].environment().clone()).unwrap();
        assert_eq!(&s, data.space());
        assert_eq!(&t, &data.tables()[1]);
    }

    #[test]
    fn synth_shares_optimum_as_local() {
        let params = LandscapeParams {
            n_options: 3,
            domain_size: 6,
            n_peaks: 2,
            peak_shift: 1,
            noise_seed: 3,
        };
        let land = synth_landscape(&params).unwrap();
        assert_eq!(land.env_a.len(), 216);
        let (best_a, _) = land.env_a.best().unwrap();
        let (best_b, _) = land.env_b.best().unwrap();
        assert_ne!(best_a, best_b);
        // brute-force neighbourhood scan, independent of is_local_optimum
        let vb = land.env_b.get(best_a).unwrap();
        for (q, v) in land.env_b.rows() {
            let diff: Vec<i64> = q
                .values()
                .iter()
                .zip(best_a.values())
                .map(|(a, b)| (a - b).abs())
                .collect();
            if diff.iter().sum::<i64>() == 1 {
                assert!(v > vb, "neighbour {:?} not worse", q.values());
            }
        }
    }

    #[test]
    fn synth_is_deterministic() {
        let p = LandscapeParams::default();
        let a = synth_landscape(&p).unwrap();
        let b = synth_landscape(&p).unwrap();
        assert_eq!(a.env_a, b.env_a);
        assert_eq!(a.env_b, b.env_b);
    }

    #[test]
    fn synth_rejects_bad_params() {
        let base = LandscapeParams {
            n_options: 1,
            domain_size: 3,
            n_peaks: 4,
            peak_shift: 1,
            noise_seed: 0,
        };
        assert!(matches!(synth_landscape(&base), Err(Error::Landscape(_))));
        let p = LandscapeParams { n_peaks: 1, ..base.clone() };
        assert!(synth_landscape(&p).is_err());
        let p = LandscapeParams { n_peaks: 2, peak_shift: 2, ..base };
        assert!(synth_landscape(&p).is_err());
    }
}
