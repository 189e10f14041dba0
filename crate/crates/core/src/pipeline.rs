//! kPP / fPP orchestration: publish groups, plan for every sub-agent,
//! broadcast the joint plan, and let each agent pick out its real path.

use std::fs;
use std::io;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dispatch::{dispatch_groups, AgentGroup, BroadcastGroup, CollisionRule, DispatchConfig, DispatchError, PrivateSidecar};
use crate::grid::{GridWorld, ScenarioEntry, Vertex};
use crate::plan::JointPlan;
use crate::search::{lacam_solve, pibt_solve, Failure, LacamConfig, PibtConfig, SolverKind, SolverProblem};

/// Sub-solver budget for LaCAM*; PIBT runs to its horizon regardless.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    Expansions(usize),
    WallClock(Duration),
}

/// One privacy-preserving MAPF instance plus solver settings.
#[derive(Debug, Clone)]
pub struct PrivacyProblem<'w> {
    pub world: &'w GridWorld,
    pub entries: Vec<ScenarioEntry>,
    pub k: usize,
    pub fov_radius: u32,
    pub solver: SolverKind,
    /// Seeds both the dispatcher and the sub-solver (independent streams).
    pub seed: u64,
    pub budget: Budget,
    /// PIBT horizon; defaults to 8·(width + height).
    pub horizon: Option<usize>,
    pub max_retries: usize,
    pub require_reachable: bool,
}

impl<'w> PrivacyProblem<'w> {
    pub fn new(world: &'w GridWorld, entries: Vec<ScenarioEntry>, k: usize, fov_radius: u32) -> Self {
        PrivacyProblem {
            world,
            entries,
            k,
            fov_radius,
            solver: SolverKind::Pibt,
            seed: 0,
            budget: Budget::Expansions(10_000),
            horizon: None,
            max_retries: 1000,
            require_reachable: true,
        }
    }

    pub fn with_solver(mut self, solver: SolverKind) -> Self {
        self.solver = solver;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }
}

/// Everything other agents get to see.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageTrace {
    pub published_groups: Vec<BroadcastGroup>,
    /// `None` if planning failed after the groups went out.
    pub broadcast_plan: Option<JointPlan>,
    /// Group id of the agent that ran the planner.
    pub planner: usize,
}

impl MessageTrace {
    /// Group of each sub-agent of the broadcast plan, group-major.
    pub fn group_of(&self) -> Vec<usize> {
        self.published_groups
            .iter()
            .enumerate()
            .flat_map(|(g, group)| std::iter::repeat_n(g, group.pairs.len()))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    /// Private: the dispatcher's groups including real indices.
    pub groups: Vec<AgentGroup>,
    pub full_plan: JointPlan,
    /// Real agent `i`'s path, extracted by agent `i` alone.
    pub real_plans: Vec<Vec<Vertex>>,
    pub trace: MessageTrace,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Dispatch(#[from] DispatchError),
    #[error("{failure} (groups were already published)")]
    Solve { failure: Failure, trace: Box<MessageTrace> },
}

/// The designated planner. Any group would do; a fixed choice keeps runs
/// reproducible.
pub const PLANNER: usize = 0;

/// kPP: planning-level privacy, FoV ignored.
pub fn kpp_solve(problem: &PrivacyProblem<'_>) -> Result<PipelineOutput, PipelineError> {
    run(problem, CollisionRule::StartGoalEquality, false)
}

/// fPP: kPP with FoV-aware dispatch and sub-solver.
pub fn fpp_solve(problem: &PrivacyProblem<'_>) -> Result<PipelineOutput, PipelineError> {
    run(problem, CollisionRule::FovAware(problem.fov_radius), true)
}

fn run(problem: &PrivacyProblem<'_>, rule: CollisionRule, fov_mode: bool) -> Result<PipelineOutput, PipelineError> {
    let mut config = DispatchConfig::new(problem.k, rule, problem.seed);
    config.max_retries = problem.max_retries;
    config.require_reachable = problem.require_reachable;
    let groups = dispatch_groups(&problem.entries, &config, problem.world)?;

    // Publication: only broadcast views leave the agents.
    let published: Vec<BroadcastGroup> = groups.iter().map(AgentGroup::broadcast).collect();
    let mut trace = MessageTrace {
        published_groups: published,
        broadcast_plan: None,
        planner: PLANNER,
    };

    let radius = if fov_mode { problem.fov_radius } else { 0 };
    let full_plan = match solve_published(problem.world, &trace.published_groups, radius, fov_mode, problem) {
        Ok(plan) => plan,
        Err(failure) => {
            return Err(PipelineError::Solve {
                failure,
                trace: Box::new(trace),
            })
        }
    };
    trace.broadcast_plan = Some(full_plan.clone());

    let real_plans = groups.iter().map(|g| extract_real_plan(&trace, g)).collect();
    Ok(PipelineOutput {
        groups,
        full_plan,
        real_plans,
        trace,
    })
}

/// What the designated planner does with the published groups.
fn solve_published(
    world: &GridWorld,
    groups: &[BroadcastGroup],
    radius: u32,
    fov_mode: bool,
    problem: &PrivacyProblem<'_>,
) -> Result<JointPlan, Failure> {
    let instance = SolverProblem::from_groups(world, groups, radius);
    solve_instance(&instance, fov_mode, problem.solver, problem.seed, problem.budget, problem.horizon)
}

/// Runs the chosen sub-solver on a prepared instance.
pub fn solve_instance(
    instance: &SolverProblem<'_>,
    fov_mode: bool,
    solver: SolverKind,
    seed: u64,
    budget: Budget,
    horizon: Option<usize>,
) -> Result<JointPlan, Failure> {
    match solver {
        SolverKind::Pibt => pibt_solve(
            instance,
            fov_mode,
            PibtConfig {
                seed,
                max_timesteps: horizon,
            },
        ),
        SolverKind::Lacam => {
            let config = match budget {
                Budget::Expansions(n) => LacamConfig::with_expansions(seed, n),
                Budget::WallClock(d) => LacamConfig::with_deadline(seed, d),
            };
            lacam_solve(instance, fov_mode, config)
        }
    }
}

/// Agent-side extraction: the broadcast path of the sub-agent holding the
/// agent's own (start, goal) pair.
pub fn extract_real_plan(trace: &MessageTrace, own: &AgentGroup) -> Vec<Vertex> {
    let plan = trace.broadcast_plan.as_ref().expect("plan was broadcast");
    let offset: usize = trace.published_groups[..own.group_id()].iter().map(|g| g.pairs.len()).sum();
    let real = own.real_pair();
    let published = &trace.published_groups[own.group_id()].pairs;
    let j = published.iter().position(|p| *p == real).expect("own pair was published");
    plan.path(offset + j).to_vec()
}

/// b_i^t: the distinct positions of group `i`'s sub-agents at `t`, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BeliefState {
    beliefs: Vec<Vec<Vec<Vertex>>>,
}

impl BeliefState {
    pub fn num_groups(&self) -> usize {
        self.beliefs.len()
    }

    /// Number of timesteps covered (makespan + 1), or 0 without a plan.
    pub fn timesteps(&self) -> usize {
        self.beliefs.first().map_or(0, |b| b.len())
    }

    pub fn belief(&self, group: usize, t: usize) -> &[Vertex] {
        &self.beliefs[group][t]
    }
}

/// Beliefs an observer holding only the trace can form.
pub fn compute_beliefs(trace: &MessageTrace) -> BeliefState {
    let Some(plan) = &trace.broadcast_plan else {
        return BeliefState {
            beliefs: vec![Vec::new(); trace.published_groups.len()],
        };
    };
    let horizon = plan.makespan();
    let mut offset = 0;
    let beliefs = trace
        .published_groups
        .iter()
        .map(|g| {
            let members = offset..offset + g.pairs.len();
            offset += g.pairs.len();
            (0..=horizon)
                .map(|t| {
                    let mut b: Vec<Vertex> = members.clone().map(|j| plan.position(j, t)).collect();
                    b.sort_unstable();
                    b.dedup();
                    b
                })
                .collect()
        })
        .collect();
    BeliefState { beliefs }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BeliefViolation {
    pub group: usize,
    pub t: usize,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrivacyReport {
    pub ok: bool,
    pub violations: Vec<BeliefViolation>,
}

pub fn check_k_privacy(beliefs: &BeliefState, k: usize) -> PrivacyReport {
    let mut violations = Vec::new();
    for (group, per_t) in beliefs.beliefs.iter().enumerate() {
        for (t, b) in per_t.iter().enumerate() {
            if b.len() < k {
                violations.push(BeliefViolation { group, t, size: b.len() });
            }
        }
    }
    PrivacyReport {
        ok: violations.is_empty(),
        violations,
    }
}

/// Full plan file: `group index-in-group v0 v1 ...`, one line per sub-agent.
pub fn write_full_plan(plan: &JointPlan, group_sizes: &[usize]) -> String {
    let mut out = String::new();
    let mut agent = 0;
    for (g, &size) in group_sizes.iter().enumerate() {
        for j in 0..size {
            out.push_str(&format!("{g} {j}"));
            for v in plan.path(agent) {
                out.push_str(&format!(" {v}"));
            }
            out.push('\n');
            agent += 1;
        }
    }
    out
}

#[derive(Debug, Error)]
pub enum PlanFileError {
    #[error("plan line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("plan file has no paths")]
    Empty,
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Parsed full plan file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanFile {
    pub plan: JointPlan,
    pub group_of: Vec<usize>,
}

pub fn parse_full_plan(text: &str) -> Result<PlanFile, PlanFileError> {
    let mut paths = Vec::new();
    let mut group_of = Vec::new();
    let mut expected = (0usize, 0usize);
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let err = |reason: String| PlanFileError::Parse { line, reason };
        let nums = raw
            .split_whitespace()
            .map(|t| t.parse::<u32>().map_err(|_| err(format!("'{t}' is not a non-negative integer"))))
            .collect::<Result<Vec<_>, _>>()?;
        if nums.len() < 3 {
            return Err(err("expected group, index and at least one vertex".into()));
        }
        let (g, j) = (nums[0] as usize, nums[1] as usize);
        let next_group = (expected.0 + 1, 0);
        if (g, j) != expected && (g, j) != next_group || (paths.is_empty() && (g, j) != (0, 0)) {
            return Err(err(format!(
                "expected sub-agent {}:{} or {}:0",
                expected.0,
                expected.1,
                expected.0 + 1
            )));
        }
        expected = (g, j + 1);
        group_of.push(g);
        paths.push(nums[2..].iter().map(|&v| Vertex(v)).collect());
    }
    if paths.is_empty() {
        return Err(PlanFileError::Empty);
    }
    Ok(PlanFile {
        plan: JointPlan::new(paths),
        group_of,
    })
}

pub fn load_full_plan(path: impl AsRef<Path>) -> Result<PlanFile, PlanFileError> {
    parse_full_plan(&fs::read_to_string(path)?)
}

/// Writes `agent_<i>.json` (real index) and `real_plan_<i>.txt` per agent.
pub fn write_private_dir(dir: &Path, groups: &[AgentGroup], real_plans: &[Vec<Vertex>]) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    for (g, path) in groups.iter().zip(real_plans) {
        let id = g.group_id();
        fs::write(
            dir.join(format!("agent_{id}.json")),
            serde_json::to_string(&g.sidecar()).expect("serializable"),
        )?;
        fs::write(dir.join(format!("real_plan_{id}.txt")), format_path(path))?;
    }
    Ok(())
}

pub fn format_path(path: &[Vertex]) -> String {
    let mut s = path.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
    s.push('\n');
    s
}

#[derive(Debug, Error)]
pub enum PrivateDirError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("{path}: sidecar belongs to group {found}")]
    WrongGroup { path: String, found: usize },
}

/// Reads `agent_<i>.json` for `i` in `0..groups`.
pub fn read_private_dir(dir: &Path, groups: usize) -> Result<Vec<PrivateSidecar>, PrivateDirError> {
    (0..groups)
        .map(|i| {
            let path = dir.join(format!("agent_{i}.json"));
            let shown = path.display().to_string();
            let text = fs::read_to_string(&path).map_err(|source| PrivateDirError::Io {
                path: shown.clone(),
                source,
            })?;
            let sidecar: PrivateSidecar = serde_json::from_str(&text).map_err(|source| PrivateDirError::Json {
                path: shown.clone(),
                source,
            })?;
            if sidecar.group_id != i {
                return Err(PrivateDirError::WrongGroup {
                    path: shown,
                    found: sidecar.group_id,
                });
            }
            Ok(sidecar)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::audit_paths;

    type Cell = (u32, u32);

    fn entries(w: &GridWorld, pairs: &[(Cell, Cell)]) -> Vec<ScenarioEntry> {
        pairs
            .iter()
            .map(|&((sx, sy), (gx, gy))| ScenarioEntry {
                start: w.vertex_at(sx, sy).unwrap(),
                goal: w.vertex_at(gx, gy).unwrap(),
            })
            .collect()
    }

    #[test]
    fn k1_is_plain_mapf_with_singleton_beliefs() {
        let w = GridWorld::open(8, 8);
        let e = entries(&w, &[((0, 0), (7, 7)), ((7, 0), (0, 7))]);
        let out = kpp_solve(&PrivacyProblem::new(&w, e.clone(), 1, 0)).unwrap();
        let plain = pibt_solve(
            &SolverProblem::single_agents(&w, vec![e[0].start, e[1].start], vec![e[0].goal, e[1].goal]),
            false,
            PibtConfig::new(0),
        )
        .unwrap();
        assert_eq!(out.full_plan, plain);
        let beliefs = compute_beliefs(&out.trace);
        for g in 0..2 {
            for t in 0..beliefs.timesteps() {
                assert_eq!(beliefs.belief(g, t).len(), 1);
            }
        }
    }

    #[test]
    fn real_paths_start_and_end_right() {
        let w = GridWorld::open(16, 16);
        let e = entries(&w, &[((0, 0), (15, 15)), ((15, 0), (0, 15)), ((8, 8), (2, 3))]);
        let problem = PrivacyProblem::new(&w, e.clone(), 3, 1).with_seed(4);
        let out = fpp_solve(&problem).unwrap();
        assert_eq!(out.full_plan.num_agents(), 9);
        for (path, entry) in out.real_plans.iter().zip(&e) {
            assert_eq!(path[0], entry.start);
            assert_eq!(*path.last().unwrap(), entry.goal);
        }
        let report = audit_paths(&out.full_plan.padded(), &w, &out.trace.group_of(), Some(1), None).unwrap();
        assert!(report.is_clean());
        assert!(check_k_privacy(&compute_beliefs(&out.trace), 3).ok);
        // rerun is identical
        assert_eq!(fpp_solve(&problem).unwrap().full_plan, out.full_plan);
    }

    #[test]
    fn merged_belief_is_reported() {
        let w = GridWorld::open(3, 3);
        let v = |x, y| w.vertex_at(x, y).unwrap();
        let pair = ScenarioEntry {
            start: v(0, 0),
            goal: v(0, 0),
        };
        let trace = MessageTrace {
            published_groups: vec![BroadcastGroup {
                group_id: 0,
                pairs: vec![pair, pair],
            }],
            broadcast_plan: Some(JointPlan::new(vec![vec![v(0, 0)], vec![v(0, 0)]])),
            planner: 0,
        };
        let report = check_k_privacy(&compute_beliefs(&trace), 2);
        assert_eq!(report.violations, vec![BeliefViolation { group: 0, t: 0, size: 1 }]);
        assert!(check_k_privacy(&compute_beliefs(&trace), 1).ok);
    }

    #[test]
    fn trace_round_trip_and_hygiene() {
        let w = GridWorld::open(10, 10);
        let e = entries(&w, &[((0, 0), (9, 9)), ((9, 0), (0, 9))]);
        let out = kpp_solve(&PrivacyProblem::new(&w, e, 3, 0).with_seed(2)).unwrap();
        let json = out.trace.to_json();
        assert!(!json.contains("real_index"));
        let back = MessageTrace::from_json(&json).unwrap();
        assert_eq!(compute_beliefs(&back), compute_beliefs(&out.trace));
    }

    #[test]
    fn plan_file_round_trip() {
        let plan = JointPlan::new(vec![
            vec![Vertex(0), Vertex(1)],
            vec![Vertex(5), Vertex(5)],
            vec![Vertex(9), Vertex(8)],
        ]);
        let text = write_full_plan(&plan, &[2, 1]);
        assert_eq!(text, "0 0 0 1\n0 1 5 5\n1 0 9 8\n");
        let parsed = parse_full_plan(&text).unwrap();
        assert_eq!(parsed.plan, plan);
        assert_eq!(parsed.group_of, vec![0, 0, 1]);
        assert!(matches!(
            parse_full_plan("0 0 1\n2 0 3\n"),
            Err(PlanFileError::Parse { line: 2, .. })
        ));
        assert!(matches!(parse_full_plan("0 0 x\n"), Err(PlanFileError::Parse { line: 1, .. })));
    }
}
