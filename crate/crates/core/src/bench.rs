//! Experiment driver: sweeps over maps, agent counts, privacy levels, FoV
//! radii, solvers and seeds; one CSV record per run, plus summary tables
//! and cactus-chart data.
//!
//! A suite is described by a TOML file; map and scenario paths are
//! relative to that file:
//!
//! ```toml
//! agents = [10]
//! k = [1, 2, 3]
//! fov_radius = [1]
//! solvers = ["pibt", "lacam"]
//! seeds = [0, 1, 2]
//! expansions = 10000
//! ppfpp = true
//!
//! [[maps]]
//! map = "random-32-32-20.map"
//! scen = "random-32-32-20-random-1.scen"
//! ```

use std::fmt;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::audit::metrics;
use crate::grid::{load_scenario, GridWorld, MapError, ScenarioEntry, ScenarioError};
use crate::pipeline::{fpp_solve, Budget, PipelineError, PrivacyProblem};
use crate::safezone::{ppfpp, PpfppConfig};
use crate::search::SolverKind;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapSpec {
    pub map: PathBuf,
    pub scen: PathBuf,
    /// Defaults to the map file stem.
    #[serde(default)]
    pub name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub maps: Vec<MapSpec>,
    pub agents: Vec<usize>,
    pub k: Vec<usize>,
    pub fov_radius: Vec<u32>,
    #[serde(default = "default_solvers")]
    pub solvers: Vec<SolverKind>,
    pub seeds: Vec<u64>,
    /// LaCAM* node-expansion budget; ignored when `time_budget_ms` is set.
    #[serde(default = "default_expansions")]
    pub expansions: usize,
    /// Wall-clock budget for LaCAM*. Runs become timing-dependent.
    #[serde(default)]
    pub time_budget_ms: Option<u64>,
    #[serde(default = "default_true")]
    pub ppfpp: bool,
    /// Record wall-clock times. Off by default so that CSVs are
    /// byte-reproducible.
    #[serde(default)]
    pub timings: bool,
}

fn default_solvers() -> Vec<SolverKind> {
    vec![SolverKind::Pibt]
}

fn default_expansions() -> usize {
    10_000
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("config field `{0}` must not be empty")]
    Empty(&'static str),
    #[error("privacy level k must be at least 1")]
    InvalidK,
    #[error("file not found: {0}")]
    Missing(PathBuf),
    #[error("map {path}: {source}")]
    Map { path: PathBuf, source: MapError },
    #[error("scenario {path}: {source}")]
    Scenario { path: PathBuf, source: ScenarioError },
}

impl SuiteConfig {
    /// Parses a config; relative paths are resolved against `base_dir`.
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let mut config: SuiteConfig = toml::from_str(text)?;
        for spec in &mut config.maps {
            spec.map = base_dir.join(&spec.map);
            spec.scen = base_dir.join(&spec.scen);
        }
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text, path.parent().unwrap_or(Path::new(".")))
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let lists = [
            ("maps", self.maps.is_empty()),
            ("agents", self.agents.is_empty()),
            ("k", self.k.is_empty()),
            ("fov_radius", self.fov_radius.is_empty()),
            ("solvers", self.solvers.is_empty()),
            ("seeds", self.seeds.is_empty()),
        ];
        if let Some((name, _)) = lists.iter().find(|(_, empty)| *empty) {
            return Err(ConfigError::Empty(name));
        }
        if self.k.contains(&0) {
            return Err(ConfigError::InvalidK);
        }
        for spec in &self.maps {
            for path in [&spec.map, &spec.scen] {
                if !path.is_file() {
                    return Err(ConfigError::Missing(path.clone()));
                }
            }
        }
        Ok(())
    }

    fn budget(&self) -> Budget {
        match self.time_budget_ms {
            Some(ms) => Budget::WallClock(Duration::from_millis(ms)),
            None => Budget::Expansions(self.expansions),
        }
    }
}

/// A map with its scenario rows, ready for runs.
#[derive(Debug, Clone)]
pub struct LoadedMap {
    pub name: String,
    pub world: GridWorld,
    pub entries: Vec<ScenarioEntry>,
}

/// Loads every map and scenario of the suite up front.
pub fn load_maps(config: &SuiteConfig) -> Result<Vec<LoadedMap>, ConfigError> {
    config
        .maps
        .iter()
        .map(|spec| {
            let world = GridWorld::load_map(&spec.map).map_err(|source| ConfigError::Map {
                path: spec.map.clone(),
                source,
            })?;
            let entries = load_scenario(&spec.scen, &world).map_err(|source| ConfigError::Scenario {
                path: spec.scen.clone(),
                source,
            })?;
            let name = spec.name.clone().unwrap_or_else(|| world.name().to_string());
            Ok(LoadedMap { name, world, entries })
        })
        .collect()
}

/// Picks `n` scenario rows in a seeded random order, skipping rows whose
/// start or goal is within `radius` of an already chosen start or goal.
/// The same `(entries, n, seed, radius)` always gives the same instance.
pub fn select_instance(world: &GridWorld, entries: &[ScenarioEntry], n: usize, seed: u64, radius: u32) -> Option<Vec<ScenarioEntry>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2);
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.shuffle(&mut rng);
    let mut chosen: Vec<ScenarioEntry> = Vec::with_capacity(n);
    for i in order {
        if chosen.len() == n {
            break;
        }
        let e = entries[i];
        let clash = chosen
            .iter()
            .any(|c| world.in_fov(c.start, e.start, radius) || world.in_fov(c.goal, e.goal, radius));
        if !clash {
            chosen.push(e);
        }
    }
    (chosen.len() == n).then_some(chosen)
}

/// One run. Measures that do not apply are NaN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub map: String,
    pub n: usize,
    pub k: usize,
    pub r: u32,
    pub solver: SolverKind,
    pub seed: u64,
    pub solved: bool,
    pub status: String,
    pub soc: f64,
    pub rsoc_before: f64,
    pub rsoc_after: f64,
    pub improvement_pct: f64,
    pub makespan: f64,
    pub solve_time: f64,
    pub ppfpp_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Setting {
    pub map: usize,
    pub n: usize,
    pub k: usize,
    pub r: u32,
    pub solver: SolverKind,
    pub seed: u64,
}

/// All settings in config order: map, N, k, r, solver, seed.
pub fn settings(config: &SuiteConfig) -> Vec<Setting> {
    let mut out = Vec::new();
    for map in 0..config.maps.len() {
        for &n in &config.agents {
            for &k in &config.k {
                for &r in &config.fov_radius {
                    for &solver in &config.solvers {
                        for &seed in &config.seeds {
                            out.push(Setting {
                                map,
                                n,
                                k,
                                r,
                                solver,
                                seed,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

/// Runs every setting on the current rayon pool. Records come back in
/// config order regardless of completion order; failures become
/// `solved = false` records.
pub fn run_suite(config: &SuiteConfig) -> Result<Vec<RunRecord>, ConfigError> {
    let maps = load_maps(config)?;
    let max_r = config.fov_radius.iter().copied().max().unwrap_or(0);
    Ok(settings(config)
        .par_iter()
        .map(|s| run_setting(config, &maps[s.map], s, max_r))
        .collect())
}

fn run_setting(config: &SuiteConfig, map: &LoadedMap, s: &Setting, max_r: u32) -> RunRecord {
    let mut record = RunRecord {
        map: map.name.clone(),
        n: s.n,
        k: s.k,
        r: s.r,
        solver: s.solver,
        seed: s.seed,
        solved: false,
        status: String::new(),
        soc: f64::NAN,
        rsoc_before: f64::NAN,
        rsoc_after: f64::NAN,
        improvement_pct: f64::NAN,
        makespan: f64::NAN,
        solve_time: f64::NAN,
        ppfpp_time: f64::NAN,
    };
    // The real instance depends on (map, N, seed) only, so k and r sweeps
    // compare like with like.
    let Some(entries) = select_instance(&map.world, &map.entries, s.n, s.seed, max_r) else {
        record.status = "instance_unavailable".into();
        return record;
    };
    let problem = PrivacyProblem::new(&map.world, entries, s.k, s.r)
        .with_solver(s.solver)
        .with_seed(s.seed)
        .with_budget(config.budget());

    let clock = Instant::now();
    let solved = fpp_solve(&problem);
    let solve_time = clock.elapsed().as_secs_f64();
    if config.timings {
        record.solve_time = solve_time;
    }
    let out = match solved {
        Ok(out) => out,
        Err(PipelineError::Dispatch(e)) => {
            record.status = format!("dispatch: {e}");
            return record;
        }
        Err(PipelineError::Solve { failure, .. }) => {
            record.status = failure.reason.to_string();
            return record;
        }
    };
    let m = metrics(&out.full_plan, &out.groups).expect("solver plans end at goals");
    record.solved = true;
    record.status = "solved".into();
    record.soc = m.soc as f64;
    record.rsoc_before = m.rsoc as f64;
    record.makespan = m.makespan as f64;

    if config.ppfpp && s.r > 0 {
        let clock = Instant::now();
        let refined = ppfpp(&map.world, &out.full_plan, &out.groups, s.r, &PpfppConfig::new(s.seed));
        let elapsed = clock.elapsed().as_secs_f64();
        match refined {
            Ok(p) => {
                record.rsoc_after = p.after.rsoc as f64;
                record.improvement_pct = p.improvement_pct();
                if config.timings {
                    record.ppfpp_time = elapsed;
                }
            }
            Err(e) => record.status = format!("solved; ppfpp: {e}"),
        }
    }
    record
}

#[derive(Debug, Error)]
pub enum CsvError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("missing or unsupported schema line (expected `# schema_version={SCHEMA_VERSION}`)")]
    Schema,
}

/// Writes `# schema_version=1`, a header row and one row per record.
pub fn write_csv<W: Write>(mut out: W, records: &[RunRecord]) -> Result<(), CsvError> {
    writeln!(out, "# schema_version={SCHEMA_VERSION}")?;
    let mut writer = csv::Writer::from_writer(out);
    for record in records {
        writer.serialize(record)?;
    }
    if records.is_empty() {
        writer.write_record(RECORD_FIELDS)?;
    }
    writer.flush()?;
    Ok(())
}

const RECORD_FIELDS: [&str; 15] = [
    "map",
    "n",
    "k",
    "r",
    "solver",
    "seed",
    "solved",
    "status",
    "soc",
    "rsoc_before",
    "rsoc_after",
    "improvement_pct",
    "makespan",
    "solve_time",
    "ppfpp_time",
];

pub fn read_csv<R: BufRead>(mut input: R) -> Result<Vec<RunRecord>, CsvError> {
    let mut first = String::new();
    input.read_line(&mut first)?;
    if first.trim() != format!("# schema_version={SCHEMA_VERSION}") {
        return Err(CsvError::Schema);
    }
    let mut reader = csv::Reader::from_reader(input);
    Ok(reader.deserialize().collect::<Result<_, _>>()?)
}

/// mean ± sample std, max and median.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub mean: f64,
    pub std: f64,
    pub max: f64,
    pub median: f64,
}

impl Stats {
    /// `None` for an empty sample. The std of a single value is 0.
    pub fn of(values: &[f64]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 {
            sorted[mid]
        } else {
            (sorted[mid - 1] + sorted[mid]) / 2.0
        };
        Some(Stats {
            mean,
            std,
            max: sorted[sorted.len() - 1],
            median,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub map: String,
    pub k: usize,
    pub improvement: Stats,
    pub solved: usize,
    pub runs: usize,
    /// NaN when timings were not recorded.
    pub mean_ppfpp_time: f64,
    pub mean_makespan: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
    /// One line per omitted (map, k) group.
    pub notes: Vec<String>,
}

fn mean_of(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.filter(|v| !v.is_nan()).fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        f64::NAN
    } else {
        sum / count as f64
    }
}

/// Improvement statistics per (map, k), in order of first appearance.
/// Groups without a single post-processed run are omitted with a note.
pub fn summarize(records: &[RunRecord]) -> Summary {
    let mut keys: Vec<(&str, usize)> = Vec::new();
    for r in records {
        if !keys.contains(&(r.map.as_str(), r.k)) {
            keys.push((r.map.as_str(), r.k));
        }
    }
    let mut summary = Summary::default();
    for (map, k) in keys {
        let group: Vec<&RunRecord> = records.iter().filter(|r| r.map == map && r.k == k).collect();
        let improvements: Vec<f64> = group
            .iter()
            .filter(|r| r.solved && !r.improvement_pct.is_nan())
            .map(|r| r.improvement_pct)
            .collect();
        let Some(improvement) = Stats::of(&improvements) else {
            summary.notes.push(format!("{map} k={k}: no post-processed runs, row omitted"));
            continue;
        };
        let solved: Vec<&&RunRecord> = group.iter().filter(|r| r.solved).collect();
        summary.rows.push(SummaryRow {
            map: map.to_string(),
            k,
            improvement,
            solved: solved.len(),
            runs: group.len(),
            mean_ppfpp_time: mean_of(solved.iter().map(|r| r.ppfpp_time)),
            mean_makespan: mean_of(solved.iter().map(|r| r.makespan)),
        });
    }
    summary
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<20} {:>3} {:>16} {:>7} {:>7} {:>9} {:>11} {:>9}",
            "map", "k", "improv% mean±std", "max", "median", "solved", "ppfpp_time", "makespan"
        )?;
        for row in &self.rows {
            writeln!(
                f,
                "{:<20} {:>3} {:>16} {:>7.2} {:>7.2} {:>9} {:>11.4} {:>9.2}",
                row.map,
                row.k,
                format!("{:.2} ± {:.2}", row.improvement.mean, row.improvement.std),
                row.improvement.max,
                row.improvement.median,
                format!("{}/{}", row.solved, row.runs),
                row.mean_ppfpp_time,
                row.mean_makespan,
            )?;
        }
        for note in &self.notes {
            writeln!(f, "note: {note}")?;
        }
        Ok(())
    }
}

/// Which setting a cactus curve varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupBy {
    K,
    R,
}

/// Sorted RSoC values of the solved runs of one setting.
#[derive(Debug, Clone, PartialEq)]
pub struct CactusSeries {
    pub map: String,
    pub solver: SolverKind,
    /// The value of k or r, depending on the grouping.
    pub value: u64,
    pub rsoc: Vec<f64>,
}

/// One series per (map, solver, k or r), in order of first appearance;
/// settings with no solved run get an empty series.
pub fn cactus_data(records: &[RunRecord], group_by: GroupBy) -> Vec<CactusSeries> {
    let mut out: Vec<CactusSeries> = Vec::new();
    for r in records {
        let value = match group_by {
            GroupBy::K => r.k as u64,
            GroupBy::R => r.r as u64,
        };
        let idx = match out.iter().position(|s| s.map == r.map && s.solver == r.solver && s.value == value) {
            Some(i) => i,
            None => {
                out.push(CactusSeries {
                    map: r.map.clone(),
                    solver: r.solver,
                    value,
                    rsoc: Vec::new(),
                });
                out.len() - 1
            }
        };
        if r.solved {
            out[idx].rsoc.push(r.rsoc_before);
        }
    }
    for s in &mut out {
        s.rsoc.sort_by(f64::total_cmp);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(map: &str, k: usize, solved: bool, improvement: f64) -> RunRecord {
        RunRecord {
            map: map.into(),
            n: 4,
            k,
            r: 1,
            solver: SolverKind::Pibt,
            seed: 0,
            solved,
            status: if solved { "solved".into() } else { "horizon exhausted".into() },
            soc: 10.0,
            rsoc_before: 10.0,
            rsoc_after: 10.0,
            improvement_pct: improvement,
            makespan: 5.0,
            solve_time: f64::NAN,
            ppfpp_time: f64::NAN,
        }
    }

    #[test]
    fn stats_by_hand() {
        let s = Stats::of(&[0.0, 1.0, 2.0]).unwrap();
        assert_eq!((s.mean, s.std, s.max, s.median), (1.0, 1.0, 2.0, 1.0));
        let s = Stats::of(&[5.0]).unwrap();
        assert_eq!((s.mean, s.std, s.max, s.median), (5.0, 0.0, 5.0, 5.0));
        let s = Stats::of(&[0.0, 0.0, 0.0]).unwrap();
        assert_eq!((s.mean, s.std, s.max, s.median), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(Stats::of(&[1.0, 4.0, 2.0, 3.0]).unwrap().median, 2.5);
        assert!(Stats::of(&[]).is_none());
    }

    #[test]
    fn summary_groups_and_omits() {
        let records = vec![
            record("a", 2, true, 0.0),
            record("a", 2, true, 1.0),
            record("a", 2, true, 2.0),
            record("a", 2, false, f64::NAN),
            record("a", 3, false, f64::NAN),
        ];
        let summary = summarize(&records);
        assert_eq!(summary.rows.len(), 1);
        let row = &summary.rows[0];
        assert_eq!((row.k, row.solved, row.runs), (2, 3, 4));
        assert_eq!(row.improvement.mean, 1.0);
        assert_eq!(row.mean_makespan, 5.0);
        assert!(row.mean_ppfpp_time.is_nan());
        assert_eq!(summary.notes.len(), 1);
        assert!(summary.notes[0].contains("k=3"));
        let text = summary.to_string();
        assert!(text.contains("1.00 ± 1.00"), "{text}");
    }

    #[test]
    fn cactus_sorted_and_keeps_empty_settings() {
        let mut records = vec![
            record("a", 1, true, 0.0),
            record("a", 1, true, 0.0),
            record("a", 2, false, f64::NAN),
        ];
        records[0].rsoc_before = 30.0;
        records[1].rsoc_before = 12.0;
        let series = cactus_data(&records, GroupBy::K);
        assert_eq!(series.len(), 2);
        assert_eq!(series[0].rsoc, vec![12.0, 30.0]);
        assert!(series[1].rsoc.is_empty());
        let by_r = cactus_data(&records, GroupBy::R);
        assert_eq!(by_r.len(), 1);
        assert_eq!(by_r[0].rsoc.len(), 2);
    }

    #[test]
    fn csv_round_trip_with_nan() {
        let records = vec![record("a", 2, true, 12.5), record("b", 3, false, f64::NAN)];
        let mut buf = Vec::new();
        write_csv(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# schema_version=1\nmap,n,k,r,solver,seed,solved,status,"));
        let back = read_csv(io::Cursor::new(buf.clone())).unwrap();
        assert_eq!(back.len(), 2);
        let mut again = Vec::new();
        write_csv(&mut again, &back).unwrap();
        assert_eq!(again, buf);
        assert_eq!(back[0].improvement_pct, 12.5);
        assert!(back[1].improvement_pct.is_nan());
        assert_eq!(back[1].solver, SolverKind::Pibt);
        assert!(matches!(read_csv(io::Cursor::new(b"map,n\n".to_vec())), Err(CsvError::Schema)));
    }

    #[test]
    fn selection_is_deterministic_and_spread() {
        let w = GridWorld::open(12, 12);
        let verts: Vec<_> = w.vertices().collect();
        let entries: Vec<ScenarioEntry> = (0..60)
            .map(|i| ScenarioEntry {
                start: verts[(i * 7) % verts.len()],
                goal: verts[(i * 13 + 5) % verts.len()],
            })
            .collect();
        let a = select_instance(&w, &entries, 6, 3, 1).unwrap();
        assert_eq!(Some(a.clone()), select_instance(&w, &entries, 6, 3, 1));
        for (i, x) in a.iter().enumerate() {
            for y in &a[i + 1..] {
                assert!(!w.in_fov(x.start, y.start, 1) && !w.in_fov(x.goal, y.goal, 1));
            }
        }
        assert_eq!(select_instance(&w, &entries[..3], 6, 3, 1), None);
    }

    #[test]
    fn config_errors() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
        let ok = "agents=[4]\nk=[2]\nfov_radius=[1]\nseeds=[0]\n[[maps]]\nmap='empty-16-16.map'\nscen='empty-16-16-random-1.scen'\n";
        let config = SuiteConfig::from_toml(ok, &dir).unwrap();
        assert_eq!(config.solvers, vec![SolverKind::Pibt]);
        assert!(config.ppfpp && !config.timings);
        let missing = ok.replace("empty-16-16.map", "nope.map");
        assert!(matches!(SuiteConfig::from_toml(&missing, &dir), Err(ConfigError::Missing(_))));
        let empty = ok.replace("k=[2]", "k=[]");
        assert!(matches!(SuiteConfig::from_toml(&empty, &dir), Err(ConfigError::Empty("k"))));
        assert!(matches!(SuiteConfig::from_toml("agents=", &dir), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn one_map_two_k_three_seeds() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
        let text =
            "agents=[4]\nk=[1,2]\nfov_radius=[1]\nseeds=[0,1,2]\n[[maps]]\nmap='empty-16-16.map'\nscen='empty-16-16-random-1.scen'\n";
        let config = SuiteConfig::from_toml(text, &dir).unwrap();
        let records = run_suite(&config).unwrap();
        assert_eq!(records.len(), 6);
        let order: Vec<(usize, u64)> = records.iter().map(|r| (r.k, r.seed)).collect();
        assert_eq!(order, vec![(1, 0), (1, 1), (1, 2), (2, 0), (2, 1), (2, 2)]);
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_csv(&mut a, &records).unwrap();
        write_csv(&mut b, &run_suite(&config).unwrap()).unwrap();
        assert_eq!(a, b);
        for r in records.iter().filter(|r| r.solved) {
            assert!(r.rsoc_after <= r.rsoc_before);
        }
    }
}
