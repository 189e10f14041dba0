//! Audit a hand-built plan: a clean plan, the same plan with a forbidden
//! sighting, and real-agent metrics.

use privmapf::audit::{audit_paths, metrics};
use privmapf::fixtures::{waiting_mock, waiting_mock_without_wait};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (name, f) in [("with wait", waiting_mock()), ("without wait", waiting_mock_without_wait())] {
        let plain = audit_paths(&f.plan, &f.world, &f.group_of(), None, None)?;
        let sensed = audit_paths(&f.plan, &f.world, &f.group_of(), Some(f.fov_radius), None)?;
        println!(
            "{name}: vertex {}, swap {}, sightings at r={} {}",
            plain.vertex_conflicts.len(),
            plain.swap_conflicts.len(),
            f.fov_radius,
            sensed.fov_conflicts.len()
        );
        for c in &sensed.fov_conflicts {
            println!("  sub-agents {} and {} see each other at t={}", c.a, c.b, c.t);
        }
        let m = metrics(&f.plan, &f.groups)?;
        println!("  SoC {}, RSoC {}, makespan {}", m.soc, m.rsoc, m.makespan);
    }
    Ok(())
}
