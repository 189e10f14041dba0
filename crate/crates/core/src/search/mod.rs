//! Configuration-level MAPF search over all sub-agents of all groups.

mod lacam;
mod pibt;

pub use lacam::{lacam_solve, lacam_solve_with_stats, LacamConfig, LacamStats};
pub use pibt::{pibt_solve, pibt_step, PibtConfig};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dispatch::BroadcastGroup;
use crate::grid::{GridWorld, Vertex};

/// One vertex per sub-agent.
pub type Configuration = Vec<Vertex>;

/// The combined instance over every sub-agent of every group.
///
/// Sub-agents are numbered group-major: group `g`'s `j`-th pair is sub-agent
/// `offsets[g] + j`.
#[derive(Debug, Clone)]
pub struct SolverProblem<'w> {
    world: &'w GridWorld,
    starts: Configuration,
    goals: Configuration,
    group_of: Vec<usize>,
    offsets: Vec<usize>,
    fov_radius: u32,
    dist: Vec<Vec<u32>>,
}

impl<'w> SolverProblem<'w> {
    /// Builds the instance for published groups, ordered by position in `groups`.
    pub fn from_groups(world: &'w GridWorld, groups: &[BroadcastGroup], fov_radius: u32) -> Self {
        let mut starts = Vec::new();
        let mut goals = Vec::new();
        let mut group_of = Vec::new();
        for (g, group) in groups.iter().enumerate() {
            for p in &group.pairs {
                starts.push(p.start);
                goals.push(p.goal);
                group_of.push(g);
            }
        }
        Self::new(world, starts, goals, group_of, fov_radius)
    }

    /// `group_of` must be non-decreasing and start at 0.
    pub fn new(world: &'w GridWorld, starts: Configuration, goals: Configuration, group_of: Vec<usize>, fov_radius: u32) -> Self {
        assert_eq!(starts.len(), goals.len());
        assert_eq!(starts.len(), group_of.len());
        let mut offsets = Vec::new();
        for (j, &g) in group_of.iter().enumerate() {
            assert!(g == offsets.len() || g + 1 == offsets.len(), "sub-agents must be grouped in order");
            if g == offsets.len() {
                offsets.push(j);
            }
        }
        let dist = goals.iter().map(|&g| world.distances_to(g)).collect();
        SolverProblem {
            world,
            starts,
            goals,
            group_of,
            offsets,
            fov_radius,
            dist,
        }
    }

    /// A plain MAPF instance: every agent is its own group.
    pub fn single_agents(world: &'w GridWorld, starts: Configuration, goals: Configuration) -> Self {
        let group_of = (0..starts.len()).collect();
        Self::new(world, starts, goals, group_of, 0)
    }

    pub fn world(&self) -> &'w GridWorld {
        self.world
    }

    pub fn num_agents(&self) -> usize {
        self.starts.len()
    }

    pub fn num_groups(&self) -> usize {
        self.offsets.len()
    }

    pub fn starts(&self) -> &[Vertex] {
        &self.starts
    }

    pub fn goals(&self) -> &[Vertex] {
        &self.goals
    }

    pub fn group_of(&self, agent: usize) -> usize {
        self.group_of[agent]
    }

    pub fn groups(&self) -> &[usize] {
        &self.group_of
    }

    /// Sub-agent ids of group `g`.
    pub fn members(&self, g: usize) -> std::ops::Range<usize> {
        let end = self.offsets.get(g + 1).copied().unwrap_or(self.starts.len());
        self.offsets[g]..end
    }

    pub fn fov_radius(&self) -> u32 {
        self.fov_radius
    }

    /// Shortest-path distance from `v` to agent `agent`'s goal.
    pub fn dist(&self, agent: usize, v: Vertex) -> u32 {
        self.dist[agent][v.index()]
    }

    pub fn is_goal(&self, config: &[Vertex]) -> bool {
        config == self.goals.as_slice()
    }

    /// Admissible estimate of the remaining sum of costs.
    pub fn heuristic(&self, config: &[Vertex]) -> u64 {
        config.iter().enumerate().map(|(i, &v)| u64::from(self.dist(i, v))).sum()
    }

    /// Checks one configuration: distinct vertices, and with `fov_mode` no
    /// sub-agent inside the FoV of a sub-agent of another group.
    pub fn config_conflict(&self, config: &[Vertex], fov_mode: bool) -> Option<(usize, usize)> {
        let r = if fov_mode { self.fov_radius } else { 0 };
        for a in 0..config.len() {
            for b in a + 1..config.len() {
                if config[a] == config[b] {
                    return Some((a, b));
                }
                if r > 0 && self.group_of[a] != self.group_of[b] && self.world.in_fov(config[a], config[b], r) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// Checks a transition: valid moves, and no two agents swapping along an edge.
    pub fn transition_conflict(&self, from: &[Vertex], to: &[Vertex]) -> Option<(usize, usize)> {
        for a in 0..from.len() {
            if from[a] != to[a] && !self.world.are_adjacent(from[a], to[a]) {
                return Some((a, a));
            }
            for b in a + 1..from.len() {
                if from[a] == to[b] && from[b] == to[a] && from[a] != from[b] {
                    return Some((a, b));
                }
            }
        }
        None
    }
}

/// Per-sub-agent PIBT priorities.
///
/// An agent away from its goal always has priority ≥ 1, an agent on its
/// goal keeps only its tie-breaking fraction in (0, 1), so off-goal agents
/// always outrank settled ones.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorityState {
    values: Vec<f64>,
}

impl PriorityState {
    /// Closer agents get the larger fraction.
    pub fn initial(problem: &SolverProblem<'_>, config: &[Vertex]) -> Self {
        let d: Vec<u32> = (0..config.len()).map(|i| problem.dist(i, config[i])).collect();
        let max_d = d.iter().copied().filter(|&x| x != u32::MAX).max().unwrap_or(0) as f64;
        let values = d
            .iter()
            .enumerate()
            .map(|(i, &di)| {
                let di = if di == u32::MAX { max_d } else { di as f64 };
                let eps = (max_d - di + 1.0) / (max_d + 2.0);
                if config[i] == problem.goals[i] {
                    eps
                } else {
                    eps + 1.0
                }
            })
            .collect();
        PriorityState { values }
    }

    /// Explicit priorities; higher values move first.
    pub fn from_values(values: Vec<f64>) -> Self {
        PriorityState { values }
    }

    /// Priorities for the step after `config` was reached.
    pub fn advanced(&self, problem: &SolverProblem<'_>, config: &[Vertex]) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &p)| if config[i] == problem.goals[i] { p.fract() } else { p + 1.0 })
            .collect();
        PriorityState { values }
    }

    pub fn value(&self, agent: usize) -> f64 {
        self.values[agent]
    }

    /// Agent ids from highest to lowest priority; ties go to the lower id.
    pub fn order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.values.len()).collect();
        order.sort_by(|&a, &b| self.values[b].total_cmp(&self.values[a]).then(a.cmp(&b)));
        order
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    Horizon,
    Livelock,
    Timeout,
    Unsolvable,
    Stuck,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FailureReason::Horizon => "horizon exhausted",
            FailureReason::Livelock => "livelock",
            FailureReason::Timeout => "budget exhausted",
            FailureReason::Unsolvable => "search space exhausted",
            FailureReason::Stuck => "start configuration is invalid",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("solver failed: {reason}")]
pub struct Failure {
    pub reason: FailureReason,
}

impl From<FailureReason> for Failure {
    fn from(reason: FailureReason) -> Self {
        Failure { reason }
    }
}

/// Which sub-solver a pipeline uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Pibt,
    Lacam,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::Pibt => "pibt",
            SolverKind::Lacam => "lacam",
        })
    }
}

impl std::str::FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pibt" => Ok(SolverKind::Pibt),
            "lacam" | "lacam*" | "lacamstar" => Ok(SolverKind::Lacam),
            other => Err(format!("unknown solver '{other}' (expected pibt or lacam)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::ScenarioEntry;

    #[test]
    fn group_major_numbering() {
        let w = GridWorld::open(6, 6);
        let at = |x, y| w.vertex_at(x, y).unwrap();
        let groups = vec![
            BroadcastGroup {
                group_id: 0,
                pairs: vec![
                    ScenarioEntry {
                        start: at(0, 0),
                        goal: at(5, 5),
                    },
                    ScenarioEntry {
                        start: at(0, 5),
                        goal: at(5, 0),
                    },
                ],
            },
            BroadcastGroup {
                group_id: 1,
                pairs: vec![
                    ScenarioEntry {
                        start: at(3, 0),
                        goal: at(3, 5),
                    },
                    ScenarioEntry {
                        start: at(3, 3),
                        goal: at(2, 2),
                    },
                ],
            },
        ];
        let p = SolverProblem::from_groups(&w, &groups, 1);
        assert_eq!(p.num_agents(), 4);
        assert_eq!(p.num_groups(), 2);
        assert_eq!(p.members(1), 2..4);
        assert_eq!(p.groups(), &[0, 0, 1, 1]);
        assert_eq!(p.dist(0, at(0, 0)), 10);
    }

    #[test]
    fn priorities_rank_off_goal_first() {
        let w = GridWorld::open(5, 1);
        let at = |x| w.vertex_at(x, 0).unwrap();
        let p = SolverProblem::single_agents(&w, vec![at(0), at(4), at(2)], vec![at(1), at(4), at(0)]);
        let pri = PriorityState::initial(&p, p.starts());
        // agent 1 is settled; agent 0 is closer than agent 2
        assert_eq!(pri.order(), vec![0, 2, 1]);
        assert!(pri.value(1) < 1.0);
        let next = pri.advanced(&p, &[at(1), at(3), at(1)]);
        assert!(next.value(0) < 1.0);
        assert!(next.value(1) >= 1.0, "displaced agent regains priority");
        assert!(next.value(2) > 2.0);
    }
}
