//! Small hand-built instances with known answers, used by the examples and
//! tests. Both have two agents with privacy level 2 and FoV radius 1:
//! group 0 holds `a0_0` (real) and `a0_1` (mock), group 1 holds `a1_0`
//! (mock) and `a1_1` (real).

use crate::dispatch::AgentGroup;
use crate::grid::{GridWorld, ScenarioEntry, Vertex};
use crate::plan::JointPlan;

/// A hand-built joint plan together with its private group data.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub world: GridWorld,
    pub groups: Vec<AgentGroup>,
    pub plan: JointPlan,
    pub fov_radius: u32,
}

impl Fixture {
    pub fn group_sizes(&self) -> Vec<usize> {
        self.groups.iter().map(AgentGroup::k).collect()
    }

    pub fn group_of(&self) -> Vec<usize> {
        self.groups
            .iter()
            .enumerate()
            .flat_map(|(g, group)| std::iter::repeat_n(g, group.k()))
            .collect()
    }
}

fn build(world: GridWorld, paths: [&[(u32, u32)]; 4], real: [usize; 2], r: u32) -> Fixture {
    let paths: Vec<Vec<Vertex>> = paths
        .iter()
        .map(|p| p.iter().map(|&(x, y)| world.vertex_at(x, y).expect("passable")).collect())
        .collect();
    let pair = |p: &Vec<Vertex>| ScenarioEntry {
        start: p[0],
        goal: *p.last().unwrap(),
    };
    let groups = vec![
        AgentGroup::new(0, vec![pair(&paths[0]), pair(&paths[1])], real[0]),
        AgentGroup::new(1, vec![pair(&paths[2]), pair(&paths[3])], real[1]),
    ];
    Fixture {
        plan: JointPlan::new(paths).padded(),
        world,
        groups,
        fov_radius: r,
    }
}

/// Open 7×5 grid. Mock `a0_1` walks down column 1 while mock `a1_0` walks
/// along the bottom row; `a0_1` waits in place at t = 2, because moving on
/// would put it next to `a1_0`.
pub fn waiting_mock() -> Fixture {
    build(
        GridWorld::open(7, 5),
        [
            &[(5, 0), (6, 0), (6, 1)],
            &[(1, 1), (1, 2), (1, 2), (1, 3)],
            &[(0, 4), (1, 4), (2, 4), (3, 4), (4, 4)],
            &[(6, 4), (6, 3)],
        ],
        [0, 1],
        1,
    )
}

/// The same instance with `a0_1` not waiting: fine without sensing, but
/// `a0_1` and `a1_0` see each other at t = 2.
pub fn waiting_mock_without_wait() -> Fixture {
    build(
        GridWorld::open(7, 5),
        [
            &[(5, 0), (6, 0), (6, 1)],
            &[(1, 1), (1, 2), (1, 3)],
            &[(0, 4), (1, 4), (2, 4), (3, 4), (4, 4)],
            &[(6, 4), (6, 3)],
        ],
        [0, 1],
        1,
    )
}

/// Two 5×5 rooms split by a wall column, one group per room. The plan is
/// valid but wasteful: `a0_0` idles at t = 1 (cost 5, shortest 4) and
/// `a1_1` walks around the room (cost 8, shortest 2). Its mock stays far
/// away, so `a1_1`'s initial zone hugs its own path, and only the extended
/// zone opens the short way to its goal.
pub fn two_rooms() -> Fixture {
    let world = GridWorld::from_rows(&[".....@.....", ".....@.....", ".....@.....", ".....@.....", ".....@....."]).expect("valid map");
    build(
        world,
        [
            &[(0, 0), (0, 0), (1, 0), (2, 0), (3, 0), (4, 0)],
            &[(0, 2), (1, 2), (2, 2), (3, 2), (4, 2)],
            &[(6, 4), (6, 3), (6, 2)],
            &[(8, 0), (9, 0), (10, 0), (10, 1), (10, 2), (10, 3), (9, 3), (8, 3), (8, 2)],
        ],
        [0, 1],
        1,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::{audit_paths, metrics};

    #[test]
    fn fixtures_are_consistent() {
        for f in [waiting_mock(), two_rooms()] {
            let report = audit_paths(&f.plan, &f.world, &f.group_of(), Some(f.fov_radius), None).unwrap();
            assert!(report.is_clean(), "{report:?}");
            assert!(metrics(&f.plan, &f.groups).is_ok());
        }
        let f = waiting_mock_without_wait();
        let plain = audit_paths(&f.plan, &f.world, &f.group_of(), None, None).unwrap();
        assert!(plain.is_clean());
        let sensed = audit_paths(&f.plan, &f.world, &f.group_of(), Some(1), None).unwrap();
        assert_eq!(sensed.fov_conflicts.len(), 1);
        assert_eq!(
            (sensed.fov_conflicts[0].a, sensed.fov_conflicts[0].b, sensed.fov_conflicts[0].t),
            (1, 2, 2)
        );
    }

    #[test]
    fn two_rooms_refines_to_shortest_paths() {
        use crate::safezone::{ppfpp, PpfppConfig};
        let f = two_rooms();
        for seed in 0..5 {
            let out = ppfpp(&f.world, &f.plan, &f.groups, f.fov_radius, &PpfppConfig::new(seed)).unwrap();
            assert_eq!(out.before.costs, vec![5, 8]);
            assert_eq!(out.after.costs, vec![4, 2]);
            assert_eq!((out.before.rsoc, out.after.rsoc), (13, 6));
        }
    }
}
