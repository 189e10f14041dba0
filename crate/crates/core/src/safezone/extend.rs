//! Randomised round-robin growth of safe zones.
//!
//! Per timestep, groups take turns adding one vertex each to their zone: a
//! uniformly random vertex adjacent to the zone that is not in, and not in
//! sight of, any other group's zone at that timestep, nor in another group's
//! zone at the previous timestep. Growth stops after a round in which no
//! group could pick. Only the broadcast plan feeds into this, so the result
//! reveals nothing about which sub-agent is real.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{SafeZoneSet, ZoneKind};
use crate::grid::{GridWorld, Vertex};

/// Which zones of the previous timestep block a pick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorZones {
    /// The extended zones of `t - 1`; timesteps are processed in order.
    Extended,
    /// The initial zones of `t - 1`; timesteps are independent and run in parallel.
    Initial,
}

#[derive(Debug, Clone)]
pub struct ExtendConfig {
    pub seed: u64,
    pub agent_order: Vec<usize>,
    pub prior: PriorZones,
}

/// One successful pick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Pick {
    pub t: usize,
    pub group: usize,
    pub vertex: Vertex,
    pub round: usize,
}

/// Mutable zones of all groups at one timestep.
struct Timestep<'a> {
    world: &'a GridWorld,
    r: u32,
    member: Vec<Vec<bool>>,
    /// `seen_by[j][v]`: number of vertices of zone `j` within radius of `v`.
    seen_by: Vec<Vec<u32>>,
    frontier: Vec<BTreeSet<Vertex>>,
    prior: Vec<Vec<bool>>,
}

impl<'a> Timestep<'a> {
    fn new(world: &'a GridWorld, r: u32, zones: Vec<&[Vertex]>, prior: Vec<Vec<bool>>) -> Self {
        let n = world.num_vertices();
        let groups = zones.len();
        let mut ts = Timestep {
            world,
            r,
            member: vec![vec![false; n]; groups],
            seen_by: vec![vec![0; n]; groups],
            frontier: vec![BTreeSet::new(); groups],
            prior,
        };
        for (i, zone) in zones.into_iter().enumerate() {
            for &v in zone {
                ts.add(i, v);
            }
        }
        ts
    }

    fn add(&mut self, i: usize, v: Vertex) {
        self.member[i][v.index()] = true;
        let seen = &mut self.seen_by[i];
        self.world.for_each_in_fov(v, self.r, |w| seen[w.index()] += 1);
        self.frontier[i].remove(&v);
        for &u in self.world.neighbors(v) {
            if !self.member[i][u.index()] {
                self.frontier[i].insert(u);
            }
        }
    }

    fn allowed(&self, i: usize, v: Vertex) -> bool {
        (0..self.member.len())
            .all(|j| !self.member[j][v.index()] && (j == i || (self.seen_by[j][v.index()] == 0 && !self.prior[j][v.index()])))
    }

    /// One pick for group `i`, uniformly among admissible frontier vertices.
    fn extend_one(&mut self, i: usize, rng: &mut ChaCha8Rng) -> Option<Vertex> {
        let options: Vec<Vertex> = self.frontier[i].iter().copied().filter(|&v| self.allowed(i, v)).collect();
        if options.is_empty() {
            return None;
        }
        let v = options[rng.gen_range(0..options.len())];
        self.add(i, v);
        Some(v)
    }

    fn zones(&self) -> Vec<Vec<Vertex>> {
        self.member
            .iter()
            .map(|m| m.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| Vertex(i as u32)).collect())
            .collect()
    }
}

fn membership(world: &GridWorld, zones: &[Vec<Vertex>]) -> Vec<Vec<bool>> {
    zones
        .iter()
        .map(|z| {
            let mut m = vec![false; world.num_vertices()];
            for v in z {
                m[v.index()] = true;
            }
            m
        })
        .collect()
}

fn timestep_rng(seed: u64, t: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t as u64);
    rng
}

/// Grows zones at one timestep to a fixpoint. Returns the zones and the picks.
fn extend_timestep(
    world: &GridWorld,
    r: u32,
    t: usize,
    start: Vec<&[Vertex]>,
    prior: Vec<Vec<bool>>,
    config: &ExtendConfig,
) -> (Vec<Vec<Vertex>>, Vec<Pick>) {
    let mut rng = timestep_rng(config.seed, t);
    let mut state = Timestep::new(world, r, start, prior);
    let mut picks = Vec::new();
    for round in 0.. {
        let mut picked = false;
        for &i in &config.agent_order {
            if let Some(vertex) = state.extend_one(i, &mut rng) {
                picks.push(Pick {
                    t,
                    group: i,
                    vertex,
                    round,
                });
                picked = true;
            }
        }
        if !picked {
            break;
        }
    }
    (state.zones(), picks)
}

/// Extends `initial` at every timestep. Deterministic in (seed, agent order, prior).
pub fn extend_safe_zones(initial: &SafeZoneSet, world: &GridWorld, r: u32, config: &ExtendConfig) -> (SafeZoneSet, Vec<Pick>) {
    let groups = initial.num_groups();
    let steps = initial.timesteps();
    let at = |t: usize| -> Vec<&[Vertex]> { (0..groups).map(|i| initial.zone(i, t)).collect() };
    let none = || vec![vec![false; world.num_vertices()]; groups];

    let per_t: Vec<(Vec<Vec<Vertex>>, Vec<Pick>)> = match config.prior {
        PriorZones::Initial => (0..steps)
            .into_par_iter()
            .map(|t| {
                let prior = if t == 0 {
                    none()
                } else {
                    membership(world, &(0..groups).map(|i| initial.zone(i, t - 1).to_vec()).collect::<Vec<_>>())
                };
                extend_timestep(world, r, t, at(t), prior, config)
            })
            .collect(),
        PriorZones::Extended => {
            let mut out: Vec<(Vec<Vec<Vertex>>, Vec<Pick>)> = Vec::with_capacity(steps);
            for t in 0..steps {
                let prior = match out.last() {
                    Some((zones, _)) => membership(world, zones),
                    None => none(),
                };
                out.push(extend_timestep(world, r, t, at(t), prior, config));
            }
            out
        }
    };

    let mut zones = vec![Vec::with_capacity(steps); groups];
    let mut picks = Vec::new();
    for (z, p) in per_t {
        for (i, zi) in z.into_iter().enumerate() {
            zones[i].push(zi);
        }
        picks.extend(p);
    }
    (SafeZoneSet::new(ZoneKind::Extended, zones), picks)
}

/// Which condition a pick broke.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZoneRule {
    /// The vertex must neighbour the picking group's zone.
    Adjacent,
    /// The vertex must not already be in any zone.
    Unclaimed,
    /// No other group's zone may see, or be seen from, the vertex.
    OutOfSight,
    /// The vertex must not be in another group's zone at `t - 1`.
    PriorStep,
    /// Replaying all picks must reproduce the extended zones.
    Replay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RuleViolation {
    /// Index into the pick list (`usize::MAX` for replay mismatches).
    pub pick: usize,
    pub rule: ZoneRule,
}

/// Replays `picks` on top of `initial` and checks each one directly against
/// the zone contents at that moment. Brute force, independent of the
/// bookkeeping used during extension.
pub fn check_pick_rules(
    initial: &SafeZoneSet,
    extended: &SafeZoneSet,
    picks: &[Pick],
    world: &GridWorld,
    r: u32,
    prior: PriorZones,
) -> Vec<RuleViolation> {
    let groups = initial.num_groups();
    let mut violations = Vec::new();
    let mut replay: Vec<Vec<Vec<Vertex>>> = (0..groups)
        .map(|i| (0..initial.timesteps()).map(|t| initial.zone(i, t).to_vec()).collect())
        .collect();
    for (idx, p) in picks.iter().enumerate() {
        let (t, i, v) = (p.t, p.group, p.vertex);
        let mut flag = |rule| violations.push(RuleViolation { pick: idx, rule });
        if !replay[i][t].iter().any(|&u| world.are_adjacent(u, v)) {
            flag(ZoneRule::Adjacent);
        }
        if (0..groups).any(|j| replay[j][t].contains(&v)) {
            flag(ZoneRule::Unclaimed);
        }
        if (0..groups)
            .filter(|&j| j != i)
            .any(|j| replay[j][t].iter().any(|&u| world.chebyshev(u, v) <= r))
        {
            flag(ZoneRule::OutOfSight);
        }
        if t > 0 {
            let blocked = (0..groups).filter(|&j| j != i).any(|j| match prior {
                PriorZones::Initial => initial.zone(j, t - 1).contains(&v),
                PriorZones::Extended => extended.zone(j, t - 1).contains(&v),
            });
            if blocked {
                flag(ZoneRule::PriorStep);
            }
        }
        replay[i][t].push(v);
    }
    let replayed = SafeZoneSet::new(ZoneKind::Extended, replay);
    if &replayed != extended {
        violations.push(RuleViolation {
            pick: usize::MAX,
            rule: ZoneRule::Replay,
        });
    }
    violations
}
