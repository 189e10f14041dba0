//! Joint plans: one vertex sequence per (sub-)agent.

use serde::{Deserialize, Serialize};

use crate::grid::Vertex;

/// Actions taken before the agent reaches `goal` for the last time and stays.
///
/// `None` if the path does not end at `goal`.
pub fn path_cost(path: &[Vertex], goal: Vertex) -> Option<usize> {
    if path.last() != Some(&goal) {
        return None;
    }
    Some(path.iter().rposition(|&v| v != goal).map_or(0, |i| i + 1))
}

/// Per-agent vertex sequences. `paths[j][t]` is agent `j` at timestep `t`.
///
/// Paths may have different lengths; an agent that has run out of path is
/// taken to wait at its last vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JointPlan {
    paths: Vec<Vec<Vertex>>,
}

impl JointPlan {
    pub fn new(paths: Vec<Vec<Vertex>>) -> Self {
        assert!(paths.iter().all(|p| !p.is_empty()), "empty path in plan");
        JointPlan { paths }
    }

    /// Builds a plan from the configuration at each timestep.
    pub fn from_configurations(configs: &[Vec<Vertex>]) -> Self {
        let agents = configs.first().map_or(0, |c| c.len());
        let paths = (0..agents).map(|j| configs.iter().map(|c| c[j]).collect()).collect();
        JointPlan { paths }
    }

    pub fn num_agents(&self) -> usize {
        self.paths.len()
    }

    pub fn paths(&self) -> &[Vec<Vertex>] {
        &self.paths
    }

    pub fn path(&self, agent: usize) -> &[Vertex] {
        &self.paths[agent]
    }

    pub fn into_paths(self) -> Vec<Vec<Vertex>> {
        self.paths
    }

    /// Last timestep index of the longest path.
    pub fn makespan(&self) -> usize {
        self.paths.iter().map(|p| p.len() - 1).max().unwrap_or(0)
    }

    /// Position with wait-at-end padding.
    pub fn position(&self, agent: usize, t: usize) -> Vertex {
        let p = &self.paths[agent];
        p[t.min(p.len() - 1)]
    }

    pub fn configuration(&self, t: usize) -> Vec<Vertex> {
        (0..self.paths.len()).map(|j| self.position(j, t)).collect()
    }

    pub fn is_padded(&self) -> bool {
        self.paths.windows(2).all(|w| w[0].len() == w[1].len())
    }

    /// Every path extended with waits to `makespan + 1` entries.
    pub fn padded(&self) -> JointPlan {
        self.padded_to(self.makespan())
    }

    pub fn padded_to(&self, horizon: usize) -> JointPlan {
        let paths = self
            .paths
            .iter()
            .map(|p| {
                let mut q = p.clone();
                let last = *q.last().unwrap();
                q.resize(horizon.max(p.len() - 1) + 1, last);
                q
            })
            .collect();
        JointPlan { paths }
    }

    /// Drops trailing repeats of each path's final vertex.
    pub fn trimmed(&self) -> JointPlan {
        let paths = self
            .paths
            .iter()
            .map(|p| {
                let last = *p.last().unwrap();
                let keep = p.iter().rposition(|&v| v != last).map_or(1, |i| i + 2);
                p[..keep].to_vec()
            })
            .collect();
        JointPlan { paths }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> Vertex {
        Vertex(i)
    }

    #[test]
    fn padding_and_positions() {
        let plan = JointPlan::new(vec![vec![v(0), v(1), v(2)], vec![v(5)]]);
        assert_eq!(plan.makespan(), 2);
        assert!(!plan.is_padded());
        assert_eq!(plan.position(1, 2), v(5));
        let padded = plan.padded();
        assert!(padded.is_padded());
        assert_eq!(padded.path(1), &[v(5), v(5), v(5)]);
        assert_eq!(padded.trimmed(), plan);
    }

    #[test]
    fn path_cost_counts_until_final_arrival() {
        assert_eq!(path_cost(&[v(4)], v(4)), Some(0));
        assert_eq!(path_cost(&[v(0), v(1), v(2), v(2), v(2)], v(2)), Some(2));
        // reaches at t=3, leaves, returns at t=6
        let p = [v(0), v(1), v(2), v(9), v(3), v(2), v(9), v(9)];
        assert_eq!(path_cost(&p, v(9)), Some(6));
        assert_eq!(path_cost(&[v(0), v(1)], v(0)), None);
    }

    #[test]
    fn configurations_round_trip() {
        let configs = vec![vec![v(0), v(3)], vec![v(1), v(3)], vec![v(2), v(4)]];
        let plan = JointPlan::from_configurations(&configs);
        assert_eq!(plan.path(0), &[v(0), v(1), v(2)]);
        assert_eq!(plan.configuration(1), configs[1]);
    }
}
