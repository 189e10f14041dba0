//! Property tests over randomly generated maps and instances.

use std::collections::HashSet;

use proptest::prelude::*;

use privmapf::audit::{audit, audit_paths};
use privmapf::dispatch::{dispatch_groups, find_collision, read_broadcast, write_broadcast};
use privmapf::pipeline::{check_k_privacy, compute_beliefs, fpp_solve, parse_full_plan, write_full_plan, PrivacyProblem};
use privmapf::plan::path_cost;
use privmapf::safezone::{ppfpp, PpfppConfig};
use privmapf::search::{pibt_solve, PibtConfig};
use privmapf::{CollisionRule, DispatchConfig, GridWorld, JointPlan, ScenarioEntry, SolverProblem, Vertex};

fn world_strategy() -> impl Strategy<Value = GridWorld> {
    (2u32..10, 2u32..10)
        .prop_flat_map(|(w, h)| {
            (
                Just(w),
                Just(h),
                proptest::collection::vec(proptest::bool::weighted(0.8), (w * h) as usize),
            )
        })
        .prop_filter_map("needs a passable cell", |(w, h, mask)| {
            GridWorld::from_mask("prop", w, h, &mask).ok()
        })
}

/// `n` pairs with distinct starts and distinct goals on an open grid.
fn instance(world: &GridWorld, n: usize, seed: u64) -> Vec<ScenarioEntry> {
    let verts: Vec<Vertex> = world.vertices().collect();
    let step = |i: usize, mult: u64| verts[((i as u64 * mult + seed) % verts.len() as u64) as usize];
    (0..n)
        .map(|i| ScenarioEntry {
            start: step(i, 7),
            goal: step(i, 11),
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fov_is_a_symmetric_chebyshev_square(world in world_strategy(), r in 0u32..4, a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let verts: Vec<Vertex> = world.vertices().collect();
        let (va, vb) = (verts[a.index(verts.len())], verts[b.index(verts.len())]);
        prop_assert_eq!(world.in_fov(va, vb, r), world.in_fov(vb, va, r));
        let ((ax, ay), (bx, by)) = (world.coords(va), world.coords(vb));
        prop_assert_eq!(world.in_fov(va, vb, r), ax.abs_diff(bx).max(ay.abs_diff(by)) <= r);
        let fov = world.fov(va, r);
        prop_assert!(fov.contains(&va));
        prop_assert!(fov.len() <= ((2 * r + 1) * (2 * r + 1)) as usize);
        prop_assert!(fov.iter().all(|&u| world.in_fov(va, u, r)));
    }

    #[test]
    fn map_text_round_trips(world in world_strategy()) {
        let text = world.to_map_string();
        let back = GridWorld::parse_map("prop", &text).unwrap();
        prop_assert_eq!(back.num_vertices(), world.num_vertices());
        prop_assert_eq!((back.width(), back.height()), (world.width(), world.height()));
        for v in world.vertices() {
            prop_assert_eq!(back.coords(v), world.coords(v));
            prop_assert_eq!(back.neighbors(v), world.neighbors(v));
        }
    }

    #[test]
    fn neighbours_are_symmetric_unit_steps(world in world_strategy()) {
        for v in world.vertices() {
            for &u in world.neighbors(v) {
                prop_assert!(world.neighbors(u).contains(&v));
                let ((vx, vy), (ux, uy)) = (world.coords(v), world.coords(u));
                prop_assert_eq!(vx.abs_diff(ux) + vy.abs_diff(uy), 1);
            }
        }
    }

    #[test]
    fn dispatch_keeps_real_pairs_and_never_collides(w in 6u32..14, h in 6u32..14, n in 1usize..5, k in 1usize..4, r in 0u32..2, seed in 0u64..1000) {
        let world = GridWorld::open(w, h);
        let entries = instance(&world, n, seed);
        let rule = CollisionRule::FovAware(r);
        if let Ok(groups) = dispatch_groups(&entries, &DispatchConfig::new(k, rule, seed), &world) {
            prop_assert_eq!(groups.len(), n);
            for (i, g) in groups.iter().enumerate() {
                prop_assert_eq!(g.k(), k);
                prop_assert_eq!(g.real_pair(), entries[i]);
            }
            let published: Vec<_> = groups.iter().map(|g| g.broadcast()).collect();
            prop_assert_eq!(find_collision(&published, rule, &world), None);
            let starts: HashSet<Vertex> = published.iter().flat_map(|g| g.pairs.iter().map(|p| p.start)).collect();
            prop_assert_eq!(starts.len(), n * k);
            prop_assert_eq!(read_broadcast(&write_broadcast(&published, &world), &world).unwrap(), published);
        }
    }

    #[test]
    fn plan_file_round_trips(paths in proptest::collection::vec(proptest::collection::vec(0u32..50, 1..8), 1..7)) {
        let plan = JointPlan::new(paths.into_iter().map(|p| p.into_iter().map(Vertex).collect()).collect());
        let sizes: Vec<usize> = vec![1; plan.num_agents()];
        let parsed = parse_full_plan(&write_full_plan(&plan, &sizes)).unwrap();
        prop_assert_eq!(parsed.plan, plan);
        prop_assert_eq!(parsed.group_of, (0..sizes.len()).collect::<Vec<_>>());
    }

    #[test]
    fn waiting_at_the_goal_is_free(prefix in proptest::collection::vec(0u32..20, 0..10), goal in 0u32..20, tail in 0usize..5) {
        let mut path: Vec<Vertex> = prefix.into_iter().map(Vertex).collect();
        path.push(Vertex(goal));
        let base = path_cost(&path, Vertex(goal)).unwrap();
        path.extend(std::iter::repeat_n(Vertex(goal), tail));
        prop_assert_eq!(path_cost(&path, Vertex(goal)), Some(base));
        prop_assert!(base < path.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pibt_plans_audit_clean(w in 5u32..10, h in 5u32..10, n in 1usize..6, seed in 0u64..500, fov in any::<bool>()) {
        let world = GridWorld::open(w, h);
        let entries = instance(&world, n, seed);
        let starts: Vec<Vertex> = entries.iter().map(|e| e.start).collect();
        let goals: Vec<Vertex> = entries.iter().map(|e| e.goal).collect();
        let group_of: Vec<usize> = (0..n).collect();
        let r = u32::from(fov);
        let problem = SolverProblem::new(&world, starts.clone(), goals.clone(), group_of.clone(), r);
        // starts that already see each other cannot be planned FoV-free
        prop_assume!(!fov || problem.config_conflict(&starts, true).is_none());
        if let Ok(plan) = pibt_solve(&problem, fov, PibtConfig::new(seed)) {
            let report = audit(&plan.padded(), &problem, fov).unwrap();
            prop_assert!(report.is_clean(), "{:?}", report);
            let direct = audit_paths(&plan.padded(), &world, &group_of, fov.then_some(r), Some((&starts, &goals))).unwrap();
            prop_assert!(direct.is_clean());
        }
    }

    #[test]
    fn fpp_outputs_are_private_and_refinable(n in 1usize..4, k in 1usize..4, seed in 0u64..500) {
        let world = GridWorld::open(10, 10);
        let verts: Vec<Vertex> = world.vertices().collect();
        // real starts on a sparse lattice so they never see each other
        let entries: Vec<ScenarioEntry> = (0..n)
            .map(|i| ScenarioEntry { start: verts[i * 33], goal: verts[99 - i * 33] })
            .collect();
        let problem = PrivacyProblem::new(&world, entries, k, 1).with_seed(seed);
        if let Ok(out) = fpp_solve(&problem) {
            prop_assert!(check_k_privacy(&compute_beliefs(&out.trace), k).ok);
            let refined = ppfpp(&world, &out.full_plan, &out.groups, 1, &PpfppConfig::new(seed)).unwrap();
            prop_assert!(refined.after.rsoc <= refined.before.rsoc);
            for (g, path) in refined.refined_real_plans.iter().enumerate() {
                let horizon = refined.extended.timesteps() - 1;
                for t in 0..=horizon {
                    prop_assert!(refined.extended.contains(g, t, path[t.min(path.len() - 1)]));
                }
            }
        }
    }
}
