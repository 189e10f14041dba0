//! kPP and fPP end to end: dispatch, publish, plan, broadcast, and let
//! each agent extract its own real path.

use privmapf::audit::{audit_paths, metrics};
use privmapf::bench::select_instance;
use privmapf::grid::load_scenario;
use privmapf::pipeline::{fpp_solve, kpp_solve, PrivacyProblem};
use privmapf::{GridWorld, SolverKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let world = GridWorld::load_map(data.join("random-32-32-20.map"))?;
    let entries = load_scenario(data.join("random-32-32-20-random-1.scen"), &world)?;
    let real = select_instance(&world, &entries, 6, 2, 1).expect("enough rows");

    for k in 1..=3 {
        let problem = PrivacyProblem::new(&world, real.clone(), k, 1)
            .with_solver(SolverKind::Lacam)
            .with_seed(2);
        for (name, result) in [("kPP", kpp_solve(&problem)), ("fPP", fpp_solve(&problem))] {
            match result {
                Ok(out) => {
                    let m = metrics(&out.full_plan, &out.groups)?;
                    let sightings = audit_paths(&out.full_plan.padded(), &world, &out.trace.group_of(), Some(1), None)?
                        .fov_conflicts
                        .len();
                    println!(
                        "k={k} {name}: {} sub-agents, SoC {}, RSoC {}, inter-group sightings at r=1: {sightings}",
                        out.full_plan.num_agents(),
                        m.soc,
                        m.rsoc
                    );
                }
                Err(e) => println!("k={k} {name}: {e}"),
            }
        }
    }
    Ok(())
}
