//! Mock-agent groups: each real agent publishes its own (start, goal) pair
//! shuffled among `k - 1` decoy pairs handed out by a trusted dispatcher.
//!
//! The dispatcher sees every real pair and resamples colliding mocks
//! internally, so a group is published exactly once and never patched
//! afterwards (replacing part of a published group would tell observers
//! the real pair is among the untouched ones).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{GridWorld, ScenarioEntry, Vertex};

/// When two groups are considered to collide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CollisionRule {
    /// Some start equals a start of the other group, or some goal a goal.
    StartGoalEquality,
    /// Some start lies in the FoV of a start of the other group, or some goal
    /// in the FoV of a goal. Radius 0 is the same as `StartGoalEquality`.
    FovAware(u32),
}

impl CollisionRule {
    pub fn radius(self) -> u32 {
        match self {
            CollisionRule::StartGoalEquality => 0,
            CollisionRule::FovAware(r) => r,
        }
    }

    #[inline]
    fn clash(self, world: &GridWorld, a: Vertex, b: Vertex) -> bool {
        world.in_fov(a, b, self.radius())
    }
}

/// The public part of a group: the `k` pairs, in shuffled order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BroadcastGroup {
    pub group_id: usize,
    pub pairs: Vec<ScenarioEntry>,
}

/// A group together with the private position of its real pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentGroup {
    group_id: usize,
    pairs: Vec<ScenarioEntry>,
    real_index: usize,
}

impl AgentGroup {
    pub fn new(group_id: usize, pairs: Vec<ScenarioEntry>, real_index: usize) -> Self {
        assert!(real_index < pairs.len(), "real index out of range");
        AgentGroup {
            group_id,
            pairs,
            real_index,
        }
    }

    /// Re-attaches a private sidecar to a published group.
    pub fn from_broadcast(group: BroadcastGroup, real_index: usize) -> Self {
        Self::new(group.group_id, group.pairs, real_index)
    }

    pub fn group_id(&self) -> usize {
        self.group_id
    }

    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[ScenarioEntry] {
        &self.pairs
    }

    pub fn real_index(&self) -> usize {
        self.real_index
    }

    pub fn real_pair(&self) -> ScenarioEntry {
        self.pairs[self.real_index]
    }

    /// The view other agents receive; carries no trace of `real_index`.
    pub fn broadcast(&self) -> BroadcastGroup {
        BroadcastGroup {
            group_id: self.group_id,
            pairs: self.pairs.clone(),
        }
    }

    pub fn sidecar(&self) -> PrivateSidecar {
        PrivateSidecar {
            group_id: self.group_id,
            real_index: self.real_index,
        }
    }
}

/// Per-agent private file content.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrivateSidecar {
    pub group_id: usize,
    pub real_index: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DispatchError {
    #[error("privacy level k must be at least 1")]
    InvalidK,
    #[error("real pairs of agents {a} and {b} already collide")]
    InfeasibleInput { a: usize, b: usize },
    #[error("no admissible mock pair for agent {group} after {attempts} attempts")]
    Exhausted { group: usize, attempts: usize },
}

/// Collision test between two published groups.
pub fn groups_collide(a: &BroadcastGroup, b: &BroadcastGroup, rule: CollisionRule, world: &GridWorld) -> bool {
    a.pairs.iter().any(|p| {
        b.pairs
            .iter()
            .any(|q| rule.clash(world, p.start, q.start) || rule.clash(world, p.goal, q.goal))
    })
}

#[derive(Debug, Clone)]
pub struct DispatchConfig {
    pub k: usize,
    pub rule: CollisionRule,
    pub seed: u64,
    /// Attempts per mock pair.
    pub max_retries: usize,
    /// Only hand out mock pairs whose start and goal share a component.
    pub require_reachable: bool,
}

impl DispatchConfig {
    pub fn new(k: usize, rule: CollisionRule, seed: u64) -> Self {
        DispatchConfig {
            k,
            rule,
            seed,
            max_retries: 1000,
            require_reachable: true,
        }
    }
}

/// Builds one group per entry, in entry order.
pub fn dispatch_groups(entries: &[ScenarioEntry], config: &DispatchConfig, world: &GridWorld) -> Result<Vec<AgentGroup>, DispatchError> {
    if config.k == 0 {
        return Err(DispatchError::InvalidK);
    }
    let rule = config.rule;
    for (a, ea) in entries.iter().enumerate() {
        for (b, eb) in entries.iter().enumerate().skip(a + 1) {
            if rule.clash(world, ea.start, eb.start) || rule.clash(world, ea.goal, eb.goal) {
                return Err(DispatchError::InfeasibleInput { a, b });
            }
        }
    }

    let component = config.require_reachable.then(|| world.components());
    // stream 1 keeps dispatch draws apart from a solver seeded with the same value
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1);
    let n = world.num_vertices() as u32;

    // (owner group, vertex) of every placed start / goal
    let mut starts: Vec<(usize, Vertex)> = entries.iter().enumerate().map(|(i, e)| (i, e.start)).collect();
    let mut goals: Vec<(usize, Vertex)> = entries.iter().enumerate().map(|(i, e)| (i, e.goal)).collect();
    let admissible = |placed: &[(usize, Vertex)], owner: usize, v: Vertex| {
        placed.iter().all(|&(g, u)| u != v && (g == owner || !rule.clash(world, u, v)))
    };

    let mut groups: Vec<Vec<ScenarioEntry>> = entries.iter().map(|e| vec![*e]).collect();
    for (i, group) in groups.iter_mut().enumerate() {
        for _ in 1..config.k {
            let mut attempts = 0;
            let mock = loop {
                if attempts == config.max_retries {
                    return Err(DispatchError::Exhausted { group: i, attempts });
                }
                attempts += 1;
                let s = Vertex(rng.gen_range(0..n));
                let g = Vertex(rng.gen_range(0..n));
                if let Some(c) = &component {
                    if c[s.index()] != c[g.index()] {
                        continue;
                    }
                }
                if admissible(&starts, i, s) && admissible(&goals, i, g) {
                    break ScenarioEntry { start: s, goal: g };
                }
            };
            starts.push((i, mock.start));
            goals.push((i, mock.goal));
            group.push(mock);
        }
    }

    let out: Vec<AgentGroup> = groups
        .into_iter()
        .enumerate()
        .map(|(i, mut pairs)| {
            let real = pairs[0];
            pairs.shuffle(&mut rng);
            let real_index = pairs.iter().position(|p| *p == real).unwrap();
            AgentGroup::new(i, pairs, real_index)
        })
        .collect();

    let published: Vec<BroadcastGroup> = out.iter().map(AgentGroup::broadcast).collect();
    assert_eq!(
        find_collision(&published, rule, world),
        None,
        "dispatcher produced colliding groups"
    );
    Ok(out)
}

/// First pair of colliding groups, or a group with duplicate starts or goals.
///
/// Plain O(N²k²) scan; independent of the dispatcher's bookkeeping.
pub fn find_collision(groups: &[BroadcastGroup], rule: CollisionRule, world: &GridWorld) -> Option<(usize, usize)> {
    for (a, ga) in groups.iter().enumerate() {
        for (i, p) in ga.pairs.iter().enumerate() {
            for q in &ga.pairs[i + 1..] {
                if p.start == q.start || p.goal == q.goal {
                    return Some((a, a));
                }
            }
        }
        for (b, gb) in groups.iter().enumerate().skip(a + 1) {
            if groups_collide(ga, gb, rule, world) {
                return Some((a, b));
            }
        }
    }
    None
}

/// One round of purely random mock placement with no collision handling.
///
/// Each agent draws its `k - 1` mock starts as a uniform subset of the
/// vertices other than its real start, and its mock goals likewise, then
/// pairs them up in draw order. This is the sampling model behind
/// [`no_collision_probability`].
pub fn sample_unchecked_groups(entries: &[ScenarioEntry], k: usize, world: &GridWorld, rng: &mut impl Rng) -> Vec<BroadcastGroup> {
    let n = world.num_vertices();
    let draw = |rng: &mut dyn rand::RngCore, exclude: Vertex| -> Vec<Vertex> {
        rand::seq::index::sample(rng, n - 1, k - 1)
            .into_iter()
            .map(|i| {
                let i = i as u32;
                if i >= exclude.0 {
                    Vertex(i + 1)
                } else {
                    Vertex(i)
                }
            })
            .collect()
    };
    entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let mut pairs = vec![*e];
            if k > 1 {
                let s = draw(rng, e.start);
                let g = draw(rng, e.goal);
                pairs.extend(s.into_iter().zip(g).map(|(start, goal)| ScenarioEntry { start, goal }));
            }
            BroadcastGroup { group_id: i, pairs }
        })
        .collect()
}

/// Result of a closed-form probability evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probability {
    pub value: f64,
    /// Arguments fell outside the formula's domain; `value` is 0.
    pub degenerate: bool,
}

fn ln_binomial(n: i64, k: i64) -> Option<f64> {
    if n < 0 || k < 0 {
        return None;
    }
    if k > n {
        return Some(f64::NEG_INFINITY);
    }
    let k = k.min(n - k);
    Some((1..=k).map(|i| (((n - k + i) as f64) / i as f64).ln()).sum())
}

/// Exact probability that purely random placement ([`sample_unchecked_groups`])
/// yields no start-start or goal-goal collision between any two of the
/// `n_agents` groups.
///
/// Starts and goals are independent, each contributing
/// `Π_{i<N} C(|V| − N − i(k−1), k−1) / C(|V| − 1, k−1)`.
pub fn no_collision_probability(num_vertices: usize, k: usize, n_agents: usize) -> Probability {
    let (n, m, agents) = (num_vertices as i64, k as i64 - 1, n_agents as i64);
    if m == 0 {
        return Probability {
            value: 1.0,
            degenerate: false,
        };
    }
    if m < 0 || n - 1 < m || agents > n {
        return Probability {
            value: 0.0,
            degenerate: true,
        };
    }
    let denom = ln_binomial(n - 1, m).unwrap();
    let mut ln_side = 0.0;
    for i in 0..agents {
        match ln_binomial(n - agents - i * m, m) {
            Some(l) => ln_side += l - denom,
            None => {
                ln_side = f64::NEG_INFINITY;
                break;
            }
        }
    }
    Probability {
        value: (2.0 * ln_side).exp(),
        degenerate: false,
    }
}

/// Pairwise-product estimate `(C(|V|−1−2k, 2(k−1)) / C(|V|−1, 2(k−1)))^C(N,2)`.
///
/// Treats each agent's mock starts and goals as one pool of `2(k−1)` vertices
/// and multiplies per-pair no-collision odds as if pairs were independent.
pub fn pairwise_product_estimate(num_vertices: usize, k: usize, n_agents: usize) -> Probability {
    let (n, k, agents) = (num_vertices as i64, k as i64, n_agents as i64);
    let picks = 2 * (k - 1);
    match (ln_binomial(n - 1 - 2 * k, picks), ln_binomial(n - 1, picks)) {
        (Some(num), Some(den)) if k >= 1 => {
            let pairs = (agents * (agents - 1) / 2) as f64;
            Probability {
                value: ((num - den) * pairs).exp(),
                degenerate: false,
            }
        }
        _ => Probability {
            value: 0.0,
            degenerate: true,
        },
    }
}

/// JSON-lines broadcast file: `{"group_id":i,"pairs":[[sx,sy,gx,gy],...]}`.
pub fn write_broadcast(groups: &[BroadcastGroup], world: &GridWorld) -> String {
    #[derive(Serialize)]
    struct Line {
        group_id: usize,
        pairs: Vec<[u32; 4]>,
    }
    let mut out = String::new();
    for g in groups {
        let line = Line {
            group_id: g.group_id,
            pairs: g
                .pairs
                .iter()
                .map(|p| {
                    let (sx, sy) = world.coords(p.start);
                    let (gx, gy) = world.coords(p.goal);
                    [sx, sy, gx, gy]
                })
                .collect(),
        };
        out.push_str(&serde_json::to_string(&line).expect("serializable"));
        out.push('\n');
    }
    out
}

#[derive(Debug, Error)]
pub enum BroadcastParseError {
    #[error("broadcast line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("broadcast line {line}: ({x}, {y}) is not a passable cell")]
    Blocked { line: usize, x: u32, y: u32 },
}

pub fn read_broadcast(text: &str, world: &GridWorld) -> Result<Vec<BroadcastGroup>, BroadcastParseError> {
    #[derive(Deserialize)]
    struct Line {
        group_id: usize,
        pairs: Vec<[u32; 4]>,
    }
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let line = idx + 1;
        let parsed: Line = serde_json::from_str(raw).map_err(|source| BroadcastParseError::Json { line, source })?;
        let cell = |x: u32, y: u32| world.vertex_at(x, y).ok_or(BroadcastParseError::Blocked { line, x, y });
        let pairs = parsed
            .pairs
            .iter()
            .map(|&[sx, sy, gx, gy]| {
                Ok(ScenarioEntry {
                    start: cell(sx, sy)?,
                    goal: cell(gx, gy)?,
                })
            })
            .collect::<Result<_, _>>()?;
        out.push(BroadcastGroup {
            group_id: parsed.group_id,
            pairs,
        });
    }
    Ok(out)
}
