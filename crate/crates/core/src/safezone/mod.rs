//! Safe zones and the PPfPP post-processor.
//!
//! For every group and timestep of an fPP plan, the *initial* safe zone is
//! the set of vertices whose whole FoV lies inside the group's combined FoV;
//! nobody from another group can see into it. Zones are then grown one
//! vertex at a time under rules that keep different groups' zones out of
//! each other's sight, and each real agent is replanned inside its own
//! group's zone.

mod extend;
mod sipp;

pub use extend::{check_pick_rules, extend_safe_zones, ExtendConfig, Pick, PriorZones, RuleViolation, ZoneRule};
pub use sipp::{safe_intervals, sipp_replan, SafeInterval, SippError};

use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::audit::real_agents;
use crate::dispatch::AgentGroup;
use crate::grid::{GridWorld, Vertex};
use crate::plan::{path_cost, JointPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ZoneKind {
    Initial,
    Extended,
}

/// Per group, per timestep `0..=T`, a sorted vertex set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SafeZoneSet {
    kind: ZoneKind,
    zones: Vec<Vec<Vec<Vertex>>>,
}

impl SafeZoneSet {
    /// `zones[i][t]`; every group must cover the same number of timesteps.
    pub fn new(kind: ZoneKind, mut zones: Vec<Vec<Vec<Vertex>>>) -> Self {
        let steps = zones.first().map_or(0, |z| z.len());
        assert!(zones.iter().all(|z| z.len() == steps), "zones over different horizons");
        for z in zones.iter_mut().flatten() {
            z.sort_unstable();
            z.dedup();
        }
        SafeZoneSet { kind, zones }
    }

    pub fn kind(&self) -> ZoneKind {
        self.kind
    }

    pub fn num_groups(&self) -> usize {
        self.zones.len()
    }

    /// Number of timesteps covered, `T + 1`.
    pub fn timesteps(&self) -> usize {
        self.zones.first().map_or(0, |z| z.len())
    }

    pub fn zone(&self, group: usize, t: usize) -> &[Vertex] {
        &self.zones[group][t]
    }

    /// Zones of `group` over all timesteps.
    pub fn group(&self, group: usize) -> &[Vec<Vertex>] {
        &self.zones[group]
    }

    pub fn contains(&self, group: usize, t: usize, v: Vertex) -> bool {
        self.zones[group][t].binary_search(&v).is_ok()
    }

    /// Every zone of `self` is contained in the matching zone of `other`.
    pub fn is_subset_of(&self, other: &SafeZoneSet) -> bool {
        self.num_groups() == other.num_groups()
            && self.timesteps() == other.timesteps()
            && self
                .zones
                .iter()
                .zip(&other.zones)
                .all(|(a, b)| a.iter().zip(b).all(|(za, zb)| za.iter().all(|v| zb.binary_search(v).is_ok())))
    }
}

/// Sub-agent id ranges of consecutive groups of the given sizes.
pub fn group_ranges(sizes: &[usize]) -> Vec<Range<usize>> {
    let mut start = 0;
    sizes
        .iter()
        .map(|&k| {
            let r = start..start + k;
            start += k;
            r
        })
        .collect()
}

/// Union of the FoVs of the group's sub-agents at `t`, sorted.
pub fn group_fov(world: &GridWorld, plan: &JointPlan, members: Range<usize>, t: usize, r: u32) -> Vec<Vertex> {
    let mut out = Vec::new();
    for j in members {
        world.for_each_in_fov(plan.position(j, t), r, |u| out.push(u));
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Vertices whose own FoV fits inside the group's FoV at `t`, sorted.
pub fn initial_safe_zone(world: &GridWorld, plan: &JointPlan, members: Range<usize>, t: usize, r: u32) -> Vec<Vertex> {
    let fov = group_fov(world, plan, members, t, r);
    let mut inside = vec![false; world.num_vertices()];
    for v in &fov {
        inside[v.index()] = true;
    }
    fov.into_iter()
        .filter(|&v| !world.any_in_fov(v, r, |u| !inside[u.index()]))
        .collect()
}

/// Initial zones of every group over the plan's padded horizon.
pub fn initial_zones(world: &GridWorld, plan: &JointPlan, group_sizes: &[usize], r: u32) -> SafeZoneSet {
    let horizon = plan.makespan();
    let zones = group_ranges(group_sizes)
        .into_par_iter()
        .map(|members| {
            (0..=horizon)
                .map(|t| initial_safe_zone(world, plan, members.clone(), t, r))
                .collect()
        })
        .collect();
    SafeZoneSet::new(ZoneKind::Initial, zones)
}

#[derive(Debug, Clone, Serialize)]
pub struct RealCosts {
    pub costs: Vec<usize>,
    pub rsoc: usize,
}

#[derive(Debug, Clone)]
pub struct PpfppConfig {
    pub seed: u64,
    /// Round-robin order of groups; defaults to ascending ids.
    pub agent_order: Option<Vec<usize>>,
    pub prior: PriorZones,
}

impl PpfppConfig {
    pub fn new(seed: u64) -> Self {
        PpfppConfig {
            seed,
            agent_order: None,
            prior: PriorZones::Extended,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PpfppOutput {
    /// Replanned real path of each group, ending once the agent settles.
    pub refined_real_plans: Vec<Vec<Vertex>>,
    pub initial: SafeZoneSet,
    pub extended: SafeZoneSet,
    pub picks: Vec<Pick>,
    pub before: RealCosts,
    pub after: RealCosts,
}

impl PpfppOutput {
    /// Relative RSoC reduction in percent; 0 when nothing was there to reduce.
    pub fn improvement_pct(&self) -> f64 {
        if self.before.rsoc == 0 {
            0.0
        } else {
            (self.before.rsoc - self.after.rsoc) as f64 / self.before.rsoc as f64 * 100.0
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PpfppError {
    #[error("post-processing needs a field of view of radius at least 1 (got 0)")]
    ZeroRadius,
    #[error("plan has {plan} paths but the groups have {expected} pairs")]
    AgentCount { plan: usize, expected: usize },
    #[error("real path of group {group} does not end at its goal")]
    NotAtGoal { group: usize },
    #[error("real path of group {group} leaves its initial safe zone at t={t}; not an fPP plan for this radius")]
    OutsideZone { group: usize, t: usize },
    #[error("replanning for group {group} failed: {source}")]
    Replan { group: usize, source: SippError },
}

/// PPfPP: zones from the broadcast plan, then each real agent replanned
/// within its own extended zone.
pub fn ppfpp(world: &GridWorld, plan: &JointPlan, groups: &[AgentGroup], r: u32, config: &PpfppConfig) -> Result<PpfppOutput, PpfppError> {
    if r == 0 {
        return Err(PpfppError::ZeroRadius);
    }
    let sizes: Vec<usize> = groups.iter().map(AgentGroup::k).collect();
    let expected: usize = sizes.iter().sum();
    if plan.num_agents() != expected {
        return Err(PpfppError::AgentCount {
            plan: plan.num_agents(),
            expected,
        });
    }
    let plan = plan.padded();
    let horizon = plan.makespan();

    // Zone computation sees only public data: the plan and group sizes.
    let initial = initial_zones(world, &plan, &sizes, r);
    let order = config.agent_order.clone().unwrap_or_else(|| (0..groups.len()).collect());
    let extend = ExtendConfig {
        seed: config.seed,
        agent_order: order,
        prior: config.prior,
    };
    let (extended, picks) = extend_safe_zones(&initial, world, r, &extend);

    // Each agent replans privately.
    let reals = real_agents(groups);
    // (cost before, refined path, cost after) per group, in group order
    type Replanned = (usize, Vec<Vertex>, usize);
    let results: Vec<Result<Replanned, PpfppError>> = groups
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let real = g.real_pair();
            let original = plan.path(reals[i]);
            let before = path_cost(original, real.goal).ok_or(PpfppError::NotAtGoal { group: i })?;
            if let Some(t) = (0..=horizon).find(|&t| !initial.contains(i, t, original[t])) {
                return Err(PpfppError::OutsideZone { group: i, t });
            }
            let path =
                sipp_replan(world, extended.group(i), real.start, real.goal).map_err(|source| PpfppError::Replan { group: i, source })?;
            let after = path_cost(&path, real.goal).expect("replanned path ends at goal");
            Ok((before, path, after))
        })
        .collect();

    let mut before = Vec::new();
    let mut after = Vec::new();
    let mut refined = Vec::new();
    for r in results {
        let (b, path, a) = r?;
        before.push(b);
        after.push(a);
        refined.push(path);
    }
    Ok(PpfppOutput {
        refined_real_plans: refined,
        initial,
        extended,
        picks,
        before: RealCosts {
            rsoc: before.iter().sum(),
            costs: before,
        },
        after: RealCosts {
            rsoc: after.iter().sum(),
            costs: after,
        },
    })
}
