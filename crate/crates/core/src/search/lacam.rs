//! Anytime two-level search: depth-first over configurations, each holding a
//! breadth-first tree of (agent → vertex) constraints that is grown lazily.
//! Successors come from the (FoV-aware) PIBT generator. Rediscovered
//! configurations are rewired Dijkstra-style so the incumbent plan keeps
//! improving while budget remains.

use std::collections::{HashMap, VecDeque};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::pibt::Generator;
use super::{Configuration, Failure, FailureReason, PriorityState, SolverProblem};
use crate::grid::Vertex;
use crate::plan::JointPlan;

/// Search budget. Expansions give reproducible runs; the deadline is for
/// interactive use. Whichever runs out first stops the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LacamConfig {
    pub seed: u64,
    pub max_expansions: Option<usize>,
    pub deadline: Option<Duration>,
}

impl LacamConfig {
    pub fn with_expansions(seed: u64, max_expansions: usize) -> Self {
        LacamConfig {
            seed,
            max_expansions: Some(max_expansions),
            deadline: None,
        }
    }

    pub fn with_deadline(seed: u64, deadline: Duration) -> Self {
        LacamConfig {
            seed,
            max_expansions: None,
            deadline: Some(deadline),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LacamStats {
    pub expansions: usize,
    pub nodes: usize,
    /// Expansion count when the first goal configuration was reached.
    pub first_solution_at: Option<usize>,
    /// Times the incumbent plan was replaced by a cheaper one.
    pub improvements: usize,
    /// The whole reachable space was searched, so the plan is optimal
    /// with respect to the search's sum-of-loss edge costs.
    pub exhausted: bool,
}

struct HNode {
    config: Configuration,
    priorities: PriorityState,
    order: Vec<usize>,
    parent: Option<usize>,
    neighbors: Vec<usize>,
    g: u64,
    h: u64,
    constraints: VecDeque<Vec<(usize, Vertex)>>,
}

fn edge_cost(goals: &[Vertex], a: &[Vertex], b: &[Vertex]) -> u64 {
    goals.iter().zip(a.iter().zip(b)).filter(|(g, (x, y))| x != g || y != g).count() as u64
}

pub fn lacam_solve(problem: &SolverProblem<'_>, fov_mode: bool, config: LacamConfig) -> Result<JointPlan, Failure> {
    lacam_solve_with_stats(problem, fov_mode, config).0
}

pub fn lacam_solve_with_stats(
    problem: &SolverProblem<'_>,
    fov_mode: bool,
    config: LacamConfig,
) -> (Result<JointPlan, Failure>, LacamStats) {
    let mut stats = LacamStats::default();
    if problem.config_conflict(problem.starts(), fov_mode).is_some() {
        return (Err(FailureReason::Stuck.into()), stats);
    }
    let started = Instant::now();
    let goals = problem.goals();
    let n = problem.num_agents();
    let mut gen_rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut tree_rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut generator = Generator::new(problem, fov_mode);

    let root_priorities = PriorityState::initial(problem, problem.starts());
    let mut nodes = vec![HNode {
        config: problem.starts().to_vec(),
        order: root_priorities.order(),
        priorities: root_priorities,
        parent: None,
        neighbors: Vec::new(),
        g: 0,
        h: problem.heuristic(problem.starts()),
        constraints: VecDeque::from([Vec::new()]),
    }];
    let mut explored: HashMap<Configuration, usize> = HashMap::from([(problem.starts().to_vec(), 0)]);
    let mut open: Vec<usize> = vec![0];
    let mut goal: Option<usize> = None;
    let mut best: Option<(usize, JointPlan)> = None;
    let mut best_g = u64::MAX;

    let out_of_budget = |expansions: usize| {
        config.max_expansions.is_some_and(|m| expansions >= m) || config.deadline.is_some_and(|d| started.elapsed() >= d)
    };

    while let Some(&h) = open.last() {
        if let Some(gn) = goal {
            if nodes[gn].g < best_g {
                best_g = nodes[gn].g;
                let plan = extract(&nodes, gn);
                let soc = plan_soc(&plan, goals);
                if best.as_ref().is_none_or(|(s, _)| soc < *s) {
                    if best.is_some() {
                        stats.improvements += 1;
                    }
                    best = Some((soc, plan));
                }
            }
        }
        if out_of_budget(stats.expansions) {
            break;
        }
        stats.expansions += 1;

        if let Some(gn) = goal {
            if nodes[h].g + nodes[h].h >= nodes[gn].g {
                open.pop();
                continue;
            }
        }
        if goal.is_none() && problem.is_goal(&nodes[h].config) {
            goal = Some(h);
            stats.first_solution_at = Some(stats.expansions);
            continue;
        }
        let Some(constraint) = nodes[h].constraints.pop_front() else {
            open.pop();
            continue;
        };
        if constraint.len() < n {
            let i = nodes[h].order[constraint.len()];
            let at = nodes[h].config[i];
            let mut moves = problem.world().neighbors(at).to_vec();
            moves.push(at);
            moves.shuffle(&mut tree_rng);
            for u in moves {
                let mut child = constraint.clone();
                child.push((i, u));
                nodes[h].constraints.push_back(child);
            }
        }

        let from = &nodes[h].config;
        let Some(next) = generator.generate(from, &nodes[h].priorities, &constraint, &mut gen_rng) else {
            continue;
        };
        if problem.config_conflict(&next, fov_mode).is_some() || problem.transition_conflict(from, &next).is_some() {
            continue;
        }

        if let Some(&existing) = explored.get(&next) {
            nodes[h].neighbors.push(existing);
            rewire(&mut nodes, h, goals, goal, &mut open);
            let f = nodes[existing].g + nodes[existing].h;
            if goal.is_none_or(|gn| f < nodes[gn].g) {
                open.push(existing);
            }
        } else {
            let id = nodes.len();
            let priorities = nodes[h].priorities.advanced(problem, &next);
            let g = nodes[h].g + edge_cost(goals, &nodes[h].config, &next);
            nodes.push(HNode {
                h: problem.heuristic(&next),
                order: priorities.order(),
                priorities,
                parent: Some(h),
                neighbors: Vec::new(),
                g,
                constraints: VecDeque::from([Vec::new()]),
                config: next.clone(),
            });
            nodes[h].neighbors.push(id);
            explored.insert(next, id);
            open.push(id);
        }
    }
    stats.nodes = nodes.len();
    stats.exhausted = open.is_empty();

    let result = match best {
        Some((_, plan)) => Ok(plan),
        None if stats.exhausted => Err(FailureReason::Unsolvable.into()),
        None => Err(FailureReason::Timeout.into()),
    };
    (result, stats)
}

/// Propagates a cheaper route through `from` to everything reachable from it.
fn rewire(nodes: &mut [HNode], from: usize, goals: &[Vertex], goal: Option<usize>, open: &mut Vec<usize>) {
    let mut queue = VecDeque::from([from]);
    while let Some(a) = queue.pop_front() {
        for idx in 0..nodes[a].neighbors.len() {
            let b = nodes[a].neighbors[idx];
            let g = nodes[a].g + edge_cost(goals, &nodes[a].config, &nodes[b].config);
            if g < nodes[b].g {
                nodes[b].g = g;
                nodes[b].parent = Some(a);
                queue.push_back(b);
                if let Some(gn) = goal {
                    if g + nodes[b].h < nodes[gn].g {
                        open.push(b);
                    }
                }
            }
        }
    }
}

fn extract(nodes: &[HNode], mut id: usize) -> JointPlan {
    let mut configs = vec![nodes[id].config.clone()];
    while let Some(p) = nodes[id].parent {
        configs.push(nodes[p].config.clone());
        id = p;
    }
    configs.reverse();
    JointPlan::from_configurations(&configs)
}

fn plan_soc(plan: &JointPlan, goals: &[Vertex]) -> usize {
    plan.paths()
        .iter()
        .zip(goals)
        .map(|(p, &g)| crate::plan::path_cost(p, g).expect("plan ends at goals"))
        .sum()
}
