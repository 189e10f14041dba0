//! PPfPP on two instances: a hand-built two-room plan with known answers,
//! and an fPP plan produced by the pipeline.

use privmapf::audit::check_separated;
use privmapf::bench::select_instance;
use privmapf::fixtures::two_rooms;
use privmapf::grid::load_scenario;
use privmapf::pipeline::{fpp_solve, PrivacyProblem};
use privmapf::safezone::{ppfpp, PpfppConfig};
use privmapf::{GridWorld, SolverKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = two_rooms();
    let out = ppfpp(&f.world, &f.plan, &f.groups, f.fov_radius, &PpfppConfig::new(0))?;
    println!(
        "two rooms: real costs {:?} -> {:?}, RSoC {} -> {}",
        out.before.costs, out.after.costs, out.before.rsoc, out.after.rsoc
    );

    let data = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let world = GridWorld::load_map(data.join("room-32-32-4.map"))?;
    let entries = load_scenario(data.join("room-32-32-4-random-1.scen"), &world)?;
    let real = select_instance(&world, &entries, 6, 5, 1).expect("enough rows");
    let solved = fpp_solve(&PrivacyProblem::new(&world, real, 2, 1).with_solver(SolverKind::Lacam).with_seed(5))?;
    let out = ppfpp(&world, &solved.full_plan, &solved.groups, 1, &PpfppConfig::new(5))?;
    println!(
        "room-32-32-4, 6 agents, k=2: RSoC {} -> {} ({:.2}% better), {} zone picks, zones separated: {}",
        out.before.rsoc,
        out.after.rsoc,
        out.improvement_pct(),
        out.picks.len(),
        check_separated(&out.extended, &world, 1).ok
    );
    Ok(())
}
