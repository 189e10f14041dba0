//! Hand-built instances with known answers.

use std::collections::HashSet;

use privmapf::audit::{audit_paths, check_separated, metrics};
use privmapf::fixtures::{two_rooms, waiting_mock, waiting_mock_without_wait};
use privmapf::safezone::{check_pick_rules, initial_zones, ppfpp, PpfppConfig, PriorZones};
use privmapf::Vertex;

#[test]
fn mock_waits_to_stay_out_of_sight() {
    let f = waiting_mock();
    // a0_1 is sub-agent 1 and holds its cell from t = 1 to t = 2
    assert_eq!(f.plan.position(1, 1), f.plan.position(1, 2));
    assert_ne!(f.plan.position(1, 2), f.plan.position(1, 3));
    let report = audit_paths(&f.plan, &f.world, &f.group_of(), Some(1), None).unwrap();
    assert!(report.is_clean());

    let hasty = waiting_mock_without_wait();
    let plain = audit_paths(&hasty.plan, &hasty.world, &hasty.group_of(), None, None).unwrap();
    assert!(plain.is_clean(), "fine when nobody senses anything");
    let sensed = audit_paths(&hasty.plan, &hasty.world, &hasty.group_of(), Some(1), None).unwrap();
    let c = &sensed.fov_conflicts;
    assert_eq!(c.len(), 1);
    assert_eq!((c[0].a, c[0].b, c[0].t), (1, 2, 2));
    assert_eq!(
        metrics(&hasty.plan, &hasty.groups).unwrap().soc + 1,
        metrics(&f.plan, &f.groups).unwrap().soc
    );
}

#[test]
fn two_rooms_costs_drop_from_13_to_6() {
    let f = two_rooms();
    let before = metrics(&f.plan, &f.groups).unwrap();
    assert_eq!((before.real_costs.clone(), before.rsoc), (vec![5, 8], 13));

    // initial zone: cells whose whole view lies inside the group's view
    let initial = initial_zones(&f.world, &f.plan, &f.group_sizes(), 1);
    for t in 0..initial.timesteps() {
        let seen: HashSet<Vertex> = [2, 3].iter().flat_map(|&a| f.world.fov(f.plan.position(a, t), 1)).collect();
        let mut expected: Vec<Vertex> = f
            .world
            .vertices()
            .filter(|&v| f.world.fov(v, 1).iter().all(|u| seen.contains(u)))
            .collect();
        let mut zone = initial.zone(1, t).to_vec();
        expected.sort();
        zone.sort();
        assert_eq!(zone, expected, "t={t}");
    }
    // a1_1's goal is not yet in its initial zone at t = 2
    let goal = f.groups[1].real_pair().goal;
    assert!(!initial.contains(1, 2, goal));

    for prior in [PriorZones::Extended, PriorZones::Initial] {
        for seed in 0..10 {
            let mut config = PpfppConfig::new(seed);
            config.prior = prior;
            let out = ppfpp(&f.world, &f.plan, &f.groups, 1, &config).unwrap();
            assert!(out.extended.contains(1, 2, goal));
            assert_eq!(out.after.costs, vec![4, 2]);
            assert_eq!(out.after.rsoc, 6);
            assert!((out.improvement_pct() - 700.0 / 13.0).abs() < 1e-9);
            assert!(check_separated(&out.extended, &f.world, 1).ok);
            assert!(check_pick_rules(&out.initial, &out.extended, &out.picks, &f.world, 1, prior).is_empty());
        }
    }
}
