//! Safe-interval path planning inside a time-varying zone.
//!
//! A vertex is usable at `t` iff it is in the zone at `t`; maximal runs of
//! usable timesteps form its safe intervals. Dijkstra over (vertex,
//! interval) states by earliest arrival gives the minimum-cost path that
//! stays inside the zone and settles on the goal for the rest of `[0, T]`.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use thiserror::Error;

use crate::grid::{GridWorld, Vertex};

/// Inclusive timestep range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SafeInterval {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SippError {
    #[error("zone covers no timesteps")]
    EmptyHorizon,
    #[error("start vertex is outside the zone at t=0")]
    StartOutside,
    #[error("no path inside the zone reaches the goal and stays there")]
    NoPath,
}

/// Safe intervals of every vertex, sorted by start. `zone[t]` lists the
/// vertices usable at `t`.
pub fn safe_intervals(world: &GridWorld, zone: &[Vec<Vertex>]) -> Vec<Vec<SafeInterval>> {
    let mut out: Vec<Vec<SafeInterval>> = vec![Vec::new(); world.num_vertices()];
    for (t, vs) in zone.iter().enumerate() {
        for &v in vs {
            let list = &mut out[v.index()];
            match list.last_mut() {
                Some(last) if last.end + 1 == t => last.end = t,
                _ => list.push(SafeInterval { start: t, end: t }),
            }
        }
    }
    out
}

/// Minimum-PathCost path from `start` to `goal` with `position(t) ∈ zone[t]`
/// for every `t ≤ T = zone.len() - 1`. The path is returned up to the
/// moment the agent settles on `goal`.
pub fn sipp_replan(world: &GridWorld, zone: &[Vec<Vertex>], start: Vertex, goal: Vertex) -> Result<Vec<Vertex>, SippError> {
    if zone.is_empty() {
        return Err(SippError::EmptyHorizon);
    }
    let horizon = zone.len() - 1;
    let intervals = safe_intervals(world, zone);
    let find = |v: Vertex, t: usize| intervals[v.index()].iter().position(|iv| iv.start <= t && t <= iv.end);
    let Some(first) = find(start, 0) else {
        return Err(SippError::StartOutside);
    };

    type State = (Vertex, usize);
    let mut best: HashMap<State, usize> = HashMap::from([((start, first), 0)]);
    let mut parent: HashMap<State, State> = HashMap::new();
    let mut heap = BinaryHeap::from([Reverse((0usize, start, first))]);
    let mut reached = None;
    while let Some(Reverse((arrival, v, idx))) = heap.pop() {
        if best.get(&(v, idx)).is_some_and(|&b| b < arrival) {
            continue;
        }
        let iv = intervals[v.index()][idx];
        if v == goal && iv.end == horizon {
            reached = Some(((v, idx), arrival));
            break;
        }
        for &u in world.neighbors(v) {
            for (jdx, jv) in intervals[u.index()].iter().enumerate() {
                // depart v at some d in [arrival, iv.end], arrive at u at d + 1 in jv
                let earliest = (arrival + 1).max(jv.start);
                if earliest > (iv.end + 1).min(jv.end) {
                    continue;
                }
                if best.get(&(u, jdx)).is_none_or(|&b| earliest < b) {
                    best.insert((u, jdx), earliest);
                    parent.insert((u, jdx), (v, idx));
                    heap.push(Reverse((earliest, u, jdx)));
                }
            }
        }
    }
    let Some((mut state, arrival)) = reached else {
        return Err(SippError::NoPath);
    };

    let mut stops = vec![(state.0, arrival)];
    while let Some(&p) = parent.get(&state) {
        stops.push((p.0, best[&p]));
        state = p;
    }
    stops.reverse();
    let mut path = Vec::with_capacity(arrival + 1);
    for pair in stops.windows(2) {
        let ((v, _), (_, next_arrival)) = (pair[0], pair[1]);
        while path.len() < next_arrival {
            path.push(v);
        }
    }
    path.push(goal);
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn everywhere(w: &GridWorld, horizon: usize) -> Vec<Vec<Vertex>> {
        vec![w.vertices().collect(); horizon + 1]
    }

    /// Earliest settling time by BFS over (vertex, t) layers.
    fn brute_force(w: &GridWorld, zone: &[Vec<Vertex>], start: Vertex, goal: Vertex) -> Option<usize> {
        let horizon = zone.len() - 1;
        let sets: Vec<HashSet<Vertex>> = zone.iter().map(|z| z.iter().copied().collect()).collect();
        let settle_from = (0..=horizon).rev().take_while(|&t| sets[t].contains(&goal)).last()?;
        let mut layer: HashSet<Vertex> = HashSet::new();
        if sets[0].contains(&start) {
            layer.insert(start);
        }
        for t in 0..=horizon {
            if t >= settle_from && layer.contains(&goal) {
                return Some(t);
            }
            if t == horizon {
                break;
            }
            let mut next = HashSet::new();
            for &v in &layer {
                for u in w.neighbors(v).iter().copied().chain([v]) {
                    if sets[t + 1].contains(&u) {
                        next.insert(u);
                    }
                }
            }
            layer = next;
        }
        None
    }

    fn check_path(w: &GridWorld, zone: &[Vec<Vertex>], path: &[Vertex], start: Vertex, goal: Vertex) {
        assert_eq!(path[0], start);
        assert_eq!(*path.last().unwrap(), goal);
        for (t, v) in path.iter().enumerate() {
            assert!(zone[t].contains(v), "t={t}");
            if t > 0 {
                assert!(path[t - 1] == *v || w.are_adjacent(path[t - 1], *v));
            }
        }
        for z in &zone[path.len() - 1..] {
            assert!(z.contains(&goal));
        }
    }

    #[test]
    fn open_zone_gives_shortest_path() {
        let w = GridWorld::open(6, 6);
        let at = |x, y| w.vertex_at(x, y).unwrap();
        let path = sipp_replan(&w, &everywhere(&w, 15), at(0, 0), at(5, 3)).unwrap();
        assert_eq!(path.len() - 1, 8);
    }

    #[test]
    fn tube_returns_original() {
        let w = GridWorld::open(5, 5);
        let at = |x, y| w.vertex_at(x, y).unwrap();
        let original = [at(0, 0), at(0, 0), at(1, 0), at(1, 1), at(1, 1), at(2, 1), at(2, 1)];
        let zone: Vec<Vec<Vertex>> = original.iter().map(|&v| vec![v]).collect();
        let path = sipp_replan(&w, &zone, at(0, 0), at(2, 1)).unwrap();
        assert_eq!(path, original[..6].to_vec());
    }

    #[test]
    fn waits_for_goal_to_open() {
        let w = GridWorld::open(3, 1);
        let at = |x| w.vertex_at(x, 0).unwrap();
        // goal usable only from t = 3 on
        let zone = vec![
            vec![at(0), at(1)],
            vec![at(0), at(1)],
            vec![at(0), at(1)],
            vec![at(0), at(1), at(2)],
            vec![at(2)],
        ];
        let path = sipp_replan(&w, &zone, at(0), at(2)).unwrap();
        check_path(&w, &zone, &path, at(0), at(2));
        assert_eq!(path.len() - 1, 3);
    }

    #[test]
    fn errors() {
        let w = GridWorld::open(3, 1);
        let at = |x| w.vertex_at(x, 0).unwrap();
        assert_eq!(sipp_replan(&w, &[], at(0), at(2)), Err(SippError::EmptyHorizon));
        assert_eq!(sipp_replan(&w, &[vec![at(1)]], at(0), at(1)), Err(SippError::StartOutside));
        let zone = vec![vec![at(0)], vec![at(0)], vec![at(0), at(2)]];
        assert_eq!(sipp_replan(&w, &zone, at(0), at(2)), Err(SippError::NoPath));
    }

    #[test]
    fn matches_brute_force_on_random_zones() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for case in 0..200 {
            let w = GridWorld::open(rng.gen_range(2..=6), rng.gen_range(2..=6));
            let horizon = rng.gen_range(1..=12);
            let verts: Vec<Vertex> = w.vertices().collect();
            let start = verts[rng.gen_range(0..verts.len())];
            let goal = verts[rng.gen_range(0..verts.len())];
            let zone: Vec<Vec<Vertex>> = (0..=horizon)
                .map(|t| {
                    verts
                        .iter()
                        .copied()
                        .filter(|&v| (t == 0 && v == start) || rng.gen_bool(0.75))
                        .collect()
                })
                .collect();
            let expected = brute_force(&w, &zone, start, goal);
            match sipp_replan(&w, &zone, start, goal) {
                Ok(path) => {
                    check_path(&w, &zone, &path, start, goal);
                    assert_eq!(Some(path.len() - 1), expected, "case {case}");
                }
                Err(e) => assert_eq!(expected, None, "case {case}: {e}"),
            }
        }
    }
}
