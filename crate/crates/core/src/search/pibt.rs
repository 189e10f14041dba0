//! Priority inheritance with backtracking, optionally FoV-aware.
//!
//! In FoV mode an agent entering `v` first pushes every unassigned agent of
//! another group currently within the FoV of `v`, plus whoever stands on `v`.
//! If one of them cannot get out of the way, the tentative moves of the set
//! are undone and the agent tries its next candidate. With radius 0 the push
//! set is just the occupant of `v` and this is classical PIBT.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Configuration, Failure, FailureReason, PriorityState, SolverProblem};
use crate::grid::Vertex;
use crate::plan::JointPlan;

const NONE: u32 = u32::MAX;

/// Reusable one-step configuration generator.
pub(crate) struct Generator<'p, 'w> {
    problem: &'p SolverProblem<'w>,
    radius: u32,
    occupied_now: Vec<u32>,
    occupied_next: Vec<u32>,
    q_from: Vec<Vertex>,
    q_to: Vec<Option<Vertex>>,
    trail: Vec<usize>,
}

impl<'p, 'w> Generator<'p, 'w> {
    pub(crate) fn new(problem: &'p SolverProblem<'w>, fov_mode: bool) -> Self {
        let n = problem.world().num_vertices();
        Generator {
            problem,
            radius: if fov_mode { problem.fov_radius() } else { 0 },
            occupied_now: vec![NONE; n],
            occupied_next: vec![NONE; n],
            q_from: Vec::new(),
            q_to: Vec::new(),
            trail: Vec::new(),
        }
    }

    /// Successor of `from`. Agents in `constraints` are fixed to the given
    /// vertices first; `None` if the constraints themselves are inconsistent.
    /// The result is not yet validated.
    pub(crate) fn generate(
        &mut self,
        from: &[Vertex],
        priorities: &PriorityState,
        constraints: &[(usize, Vertex)],
        rng: &mut ChaCha8Rng,
    ) -> Option<Configuration> {
        self.q_from.clear();
        self.q_from.extend_from_slice(from);
        self.q_to.clear();
        self.q_to.resize(from.len(), None);
        self.trail.clear();
        for (i, v) in from.iter().enumerate() {
            self.occupied_now[v.index()] = i as u32;
        }

        let world = self.problem.world();
        let mut consistent = true;
        for &(who, to) in constraints {
            if (to != from[who] && !world.are_adjacent(from[who], to)) || !self.admissible(who, to) {
                consistent = false;
                break;
            }
            self.assign(who, to);
        }

        if consistent {
            for i in priorities.order() {
                if self.q_to[i].is_none() {
                    self.pibt(i, rng);
                }
            }
        }

        let out = consistent.then(|| self.q_to.iter().map(|v| v.expect("every agent assigned")).collect());
        for v in from {
            self.occupied_now[v.index()] = NONE;
        }
        for to in self.q_to.iter().flatten() {
            self.occupied_next[to.index()] = NONE;
        }
        out
    }

    fn assign(&mut self, i: usize, v: Vertex) {
        self.q_to[i] = Some(v);
        self.occupied_next[v.index()] = i as u32;
        self.trail.push(i);
    }

    fn unassign(&mut self, i: usize) {
        if let Some(v) = self.q_to[i].take() {
            self.occupied_next[v.index()] = NONE;
        }
    }

    fn admissible(&self, i: usize, v: Vertex) -> bool {
        if self.occupied_next[v.index()] != NONE {
            return false;
        }
        let o = self.occupied_now[v.index()];
        if o != NONE && o as usize != i && self.q_to[o as usize] == Some(self.q_from[i]) {
            return false;
        }
        if self.radius > 0 {
            let g = self.problem.group_of(i);
            let seen = self.problem.world().any_in_fov(v, self.radius, |w| {
                let m = self.occupied_next[w.index()];
                m != NONE && self.problem.group_of(m as usize) != g
            });
            if seen {
                return false;
            }
        }
        true
    }

    /// Unassigned agents that must move before `i` may enter `v`.
    fn push_set(&self, i: usize, v: Vertex, out: &mut Vec<usize>) {
        out.clear();
        if self.radius == 0 {
            let o = self.occupied_now[v.index()];
            if o != NONE && o as usize != i && self.q_to[o as usize].is_none() {
                out.push(o as usize);
            }
            return;
        }
        let g = self.problem.group_of(i);
        self.problem.world().for_each_in_fov(v, self.radius, |w| {
            let o = self.occupied_now[w.index()];
            if o == NONE {
                return;
            }
            let o = o as usize;
            if o != i && self.q_to[o].is_none() && (w == v || self.problem.group_of(o) != g) {
                out.push(o);
            }
        });
        out.sort_unstable();
    }

    fn pibt(&mut self, i: usize, rng: &mut ChaCha8Rng) -> bool {
        let from = self.q_from[i];
        let world = self.problem.world();
        let mut candidates: Vec<Vertex> = world.neighbors(from).to_vec();
        candidates.push(from);
        candidates.shuffle(rng);
        candidates.sort_by_key(|&v| self.problem.dist(i, v));

        let mut push = Vec::new();
        for v in candidates {
            if !self.admissible(i, v) {
                continue;
            }
            let mark = self.trail.len();
            self.assign(i, v);
            self.push_set(i, v, &mut push);
            let mut failed_at = None;
            for &k in &push {
                if self.q_to[k].is_some() {
                    continue;
                }
                let before = self.trail.len();
                if !self.pibt(k, rng) {
                    failed_at = Some(before);
                    break;
                }
            }
            let Some(before) = failed_at else {
                return true;
            };
            // Undo this candidate and the siblings that moved for it; the
            // failed agent's own fallback stays in place.
            let undone: Vec<usize> = self.trail.drain(mark..before).collect();
            for k in undone {
                self.unassign(k);
            }
        }
        self.assign(i, from);
        false
    }
}

/// One PIBT step from a valid configuration.
///
/// A successor that fails validation is replaced by the all-wait
/// configuration; `Stuck` is returned only if `from` is itself invalid.
pub fn pibt_step(
    problem: &SolverProblem<'_>,
    from: &[Vertex],
    priorities: &PriorityState,
    rng: &mut ChaCha8Rng,
    fov_mode: bool,
) -> Result<Configuration, Failure> {
    let mut generator = Generator::new(problem, fov_mode);
    step_with(&mut generator, problem, from, priorities, rng, fov_mode)
}

fn step_with(
    generator: &mut Generator<'_, '_>,
    problem: &SolverProblem<'_>,
    from: &[Vertex],
    priorities: &PriorityState,
    rng: &mut ChaCha8Rng,
    fov_mode: bool,
) -> Result<Configuration, Failure> {
    let next = generator.generate(from, priorities, &[], rng).expect("no constraints");
    if problem.config_conflict(&next, fov_mode).is_none() && problem.transition_conflict(from, &next).is_none() {
        return Ok(next);
    }
    if problem.config_conflict(from, fov_mode).is_some() {
        return Err(FailureReason::Stuck.into());
    }
    Ok(from.to_vec())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PibtConfig {
    pub seed: u64,
    /// Defaults to 8·(width + height).
    pub max_timesteps: Option<usize>,
}

impl PibtConfig {
    pub fn new(seed: u64) -> Self {
        PibtConfig { seed, max_timesteps: None }
    }
}

pub(crate) fn default_horizon(problem: &SolverProblem<'_>) -> usize {
    8 * (problem.world().width() + problem.world().height()) as usize
}

/// Runs PIBT steps until every sub-agent rests on its goal.
pub fn pibt_solve(problem: &SolverProblem<'_>, fov_mode: bool, config: PibtConfig) -> Result<JointPlan, Failure> {
    if problem.config_conflict(problem.starts(), fov_mode).is_some() {
        return Err(FailureReason::Stuck.into());
    }
    let horizon = config.max_timesteps.unwrap_or_else(|| default_horizon(problem));
    let patience = problem.num_agents().max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut generator = Generator::new(problem, fov_mode);
    let mut configs = vec![problem.starts().to_vec()];
    let mut seen: HashSet<Configuration> = HashSet::from([problem.starts().to_vec()]);
    let mut priorities = PriorityState::initial(problem, problem.starts());
    let mut stale = 0;
    loop {
        let current = configs.last().unwrap();
        if problem.is_goal(current) {
            return Ok(JointPlan::from_configurations(&configs));
        }
        if configs.len() > horizon {
            return Err(FailureReason::Horizon.into());
        }
        let next = step_with(&mut generator, problem, current, &priorities, &mut rng, fov_mode)?;
        if seen.insert(next.clone()) {
            stale = 0;
        } else {
            stale += 1;
            if stale >= patience {
                return Err(FailureReason::Livelock.into());
            }
        }
        priorities = priorities.advanced(problem, &next);
        configs.push(next);
    }
}
