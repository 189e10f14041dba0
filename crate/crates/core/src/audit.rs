//! Independent plan validation and cost metrics.
//!
//! Nothing here looks at solver state: checks are computed from the plan,
//! the instance and (for metrics) the private real-pair indices only.

use serde::Serialize;
use thiserror::Error;

use crate::dispatch::AgentGroup;
use crate::grid::{GridWorld, Vertex};
use crate::pipeline::{check_k_privacy, compute_beliefs, MessageTrace, PrivacyReport};
use crate::plan::{path_cost, JointPlan};
use crate::safezone::SafeZoneSet;
use crate::search::SolverProblem;

/// One offending pair of sub-agents at timestep `t` (for swaps, the
/// exchange happens between `t - 1` and `t`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Conflict {
    pub a: usize,
    pub b: usize,
    pub t: usize,
    pub vertices: Vec<Vertex>,
}

/// A path that starts or ends in the wrong place, or jumps between
/// non-adjacent vertices at timestep `t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathDefect {
    pub agent: usize,
    pub t: usize,
    pub kind: DefectKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DefectKind {
    WrongStart,
    WrongGoal,
    InvalidMove,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ConflictReport {
    pub vertex_conflicts: Vec<Conflict>,
    pub swap_conflicts: Vec<Conflict>,
    pub fov_conflicts: Vec<Conflict>,
    pub path_defects: Vec<PathDefect>,
}

impl ConflictReport {
    pub fn is_clean(&self) -> bool {
        self.vertex_conflicts.is_empty() && self.swap_conflicts.is_empty() && self.fov_conflicts.is_empty() && self.path_defects.is_empty()
    }

    pub fn total(&self) -> usize {
        self.vertex_conflicts.len() + self.swap_conflicts.len() + self.fov_conflicts.len() + self.path_defects.len()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AuditError {
    #[error("plan is not padded to a common horizon (path lengths differ)")]
    Ragged,
    #[error("plan has {plan} paths but the instance has {expected} sub-agents")]
    AgentCount { plan: usize, expected: usize },
    #[error("vertex {0} is not a vertex of the map")]
    UnknownVertex(Vertex),
}

/// Lists every vertex, swap and (with `check_fov`) inter-group FoV conflict.
pub fn audit(plan: &JointPlan, problem: &SolverProblem<'_>, check_fov: bool) -> Result<ConflictReport, AuditError> {
    audit_paths(
        plan,
        problem.world(),
        problem.groups(),
        if check_fov { Some(problem.fov_radius()) } else { None },
        Some((problem.starts(), problem.goals())),
    )
}

/// Core of [`audit`]: `fov` is the radius for FoV checks, `endpoints`
/// the expected starts and goals (skipped if `None`).
pub fn audit_paths(
    plan: &JointPlan,
    world: &GridWorld,
    group_of: &[usize],
    fov: Option<u32>,
    endpoints: Option<(&[Vertex], &[Vertex])>,
) -> Result<ConflictReport, AuditError> {
    if !plan.is_padded() {
        return Err(AuditError::Ragged);
    }
    if plan.num_agents() != group_of.len() {
        return Err(AuditError::AgentCount {
            plan: plan.num_agents(),
            expected: group_of.len(),
        });
    }
    if let Some(v) = plan.paths().iter().flatten().find(|v| !world.contains(**v)) {
        return Err(AuditError::UnknownVertex(*v));
    }
    let mut report = ConflictReport::default();
    let n = plan.num_agents();
    let horizon = plan.makespan();

    if let Some((starts, goals)) = endpoints {
        for a in 0..n {
            if plan.position(a, 0) != starts[a] {
                report.path_defects.push(PathDefect {
                    agent: a,
                    t: 0,
                    kind: DefectKind::WrongStart,
                });
            }
            if plan.position(a, horizon) != goals[a] {
                report.path_defects.push(PathDefect {
                    agent: a,
                    t: horizon,
                    kind: DefectKind::WrongGoal,
                });
            }
        }
    }

    for t in 0..=horizon {
        for a in 0..n {
            let va = plan.position(a, t);
            if t > 0 {
                let prev = plan.position(a, t - 1);
                if prev != va && !world.are_adjacent(prev, va) {
                    report.path_defects.push(PathDefect {
                        agent: a,
                        t,
                        kind: DefectKind::InvalidMove,
                    });
                }
            }
            for b in a + 1..n {
                let vb = plan.position(b, t);
                if va == vb {
                    report.vertex_conflicts.push(Conflict {
                        a,
                        b,
                        t,
                        vertices: vec![va],
                    });
                }
                if t > 0 {
                    let (pa, pb) = (plan.position(a, t - 1), plan.position(b, t - 1));
                    if pa == vb && pb == va && pa != pb {
                        report.swap_conflicts.push(Conflict {
                            a,
                            b,
                            t,
                            vertices: vec![pa, va],
                        });
                    }
                }
                if let Some(r) = fov {
                    if group_of[a] != group_of[b] && world.in_fov(va, vb, r) {
                        report.fov_conflicts.push(Conflict {
                            a,
                            b,
                            t,
                            vertices: vec![va, vb],
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuntimePrivacyReport {
    pub ok: bool,
    pub privacy: PrivacyReport,
    pub fov_conflicts: Vec<Conflict>,
}

/// k-privacy of the trace plus an execution free of inter-group sightings.
pub fn check_runtime_k_privacy(
    plan: &JointPlan,
    trace: &MessageTrace,
    world: &GridWorld,
    k: usize,
    r: u32,
) -> Result<RuntimePrivacyReport, AuditError> {
    let privacy = check_k_privacy(&compute_beliefs(trace), k);
    let group_of = trace.group_of();
    let padded = plan.padded();
    let report = audit_paths(&padded, world, &group_of, Some(r), None)?;
    Ok(RuntimePrivacyReport {
        ok: privacy.ok && report.fov_conflicts.is_empty(),
        privacy,
        fov_conflicts: report.fov_conflicts,
    })
}

/// A pair of zone vertices of different groups that see each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SeparationViolation {
    pub t: usize,
    pub i: usize,
    pub j: usize,
    pub v: Vertex,
    pub u: Vertex,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationReport {
    pub ok: bool,
    pub violations: Vec<SeparationViolation>,
}

/// Zones are separated iff no vertex of one group's zone is in the FoV of
/// (or the same as) a vertex of another group's zone at the same timestep.
pub fn check_separated(zones: &SafeZoneSet, world: &GridWorld, r: u32) -> SeparationReport {
    let mut violations = Vec::new();
    for t in 0..zones.timesteps() {
        for i in 0..zones.num_groups() {
            for j in i + 1..zones.num_groups() {
                for &v in zones.zone(i, t) {
                    for &u in zones.zone(j, t) {
                        if world.in_fov(v, u, r) || world.in_fov(u, v, r) {
                            violations.push(SeparationViolation { t, i, j, v, u });
                        }
                    }
                }
            }
        }
    }
    SeparationReport {
        ok: violations.is_empty(),
        violations,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Metrics {
    /// PathCost of every sub-agent, group-major.
    pub path_costs: Vec<usize>,
    /// PathCost of each group's real sub-agent.
    pub real_costs: Vec<usize>,
    pub soc: usize,
    pub rsoc: usize,
    pub makespan: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("path of sub-agent {agent} does not end at its goal")]
    NotAtGoal { agent: usize },
    #[error("plan has {plan} paths but the groups have {expected} pairs")]
    AgentCount { plan: usize, expected: usize },
}

/// Sub-agent id of each group's real pair, group-major.
pub fn real_agents(groups: &[AgentGroup]) -> Vec<usize> {
    let mut offset = 0;
    groups
        .iter()
        .map(|g| {
            let id = offset + g.real_index();
            offset += g.k();
            id
        })
        .collect()
}

pub fn metrics(plan: &JointPlan, groups: &[AgentGroup]) -> Result<Metrics, MetricsError> {
    let goals: Vec<Vertex> = groups.iter().flat_map(|g| g.pairs().iter().map(|p| p.goal)).collect();
    if goals.len() != plan.num_agents() {
        return Err(MetricsError::AgentCount {
            plan: plan.num_agents(),
            expected: goals.len(),
        });
    }
    let path_costs = plan
        .paths()
        .iter()
        .zip(&goals)
        .enumerate()
        .map(|(agent, (p, &g))| path_cost(p, g).ok_or(MetricsError::NotAtGoal { agent }))
        .collect::<Result<Vec<_>, _>>()?;
    let real_costs: Vec<usize> = real_agents(groups).into_iter().map(|a| path_costs[a]).collect();
    Ok(Metrics {
        soc: path_costs.iter().sum(),
        rsoc: real_costs.iter().sum(),
        makespan: plan.makespan(),
        path_costs,
        real_costs,
    })
}

/// Sum of path costs of `paths`, each of which must end at its goal.
pub fn sum_of_costs(paths: &[Vec<Vertex>], goals: &[Vertex]) -> Result<usize, MetricsError> {
    paths
        .iter()
        .zip(goals)
        .enumerate()
        .map(|(agent, (p, &g))| path_cost(p, g).ok_or(MetricsError::NotAtGoal { agent }))
        .sum()
}

/// RSoC accumulated timestep by timestep: a step at the goal is only
/// charged once the agent is seen leaving it again.
pub fn rsoc_streaming(plan: &JointPlan, goals: &[Vertex], agents: &[usize]) -> usize {
    let mut total = 0;
    let mut deferred = vec![0usize; agents.len()];
    for t in 1..=plan.makespan() {
        for (slot, &a) in agents.iter().enumerate() {
            if plan.position(a, t - 1) != goals[a] {
                total += deferred[slot] + 1;
                deferred[slot] = 0;
            } else {
                deferred[slot] += 1;
            }
        }
    }
    total
}
