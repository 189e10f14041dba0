//! Plain PIBT on a small instance, then the same agents under a field of
//! view where agents of different groups must stay out of sight.

use privmapf::audit::{audit, sum_of_costs};
use privmapf::bench::select_instance;
use privmapf::grid::load_scenario;
use privmapf::search::{pibt_solve, PibtConfig};
use privmapf::{GridWorld, SolverProblem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let world = GridWorld::load_map(data.join("empty-16-16.map"))?;
    let entries = load_scenario(data.join("empty-16-16-random-1.scen"), &world)?;
    let chosen = select_instance(&world, &entries, 6, 1, 1).expect("enough rows");
    let starts: Vec<_> = chosen.iter().map(|e| e.start).collect();
    let goals: Vec<_> = chosen.iter().map(|e| e.goal).collect();

    let plain = SolverProblem::single_agents(&world, starts.clone(), goals.clone());
    let plan = pibt_solve(&plain, false, PibtConfig::new(1))?;
    println!(
        "plain PIBT: makespan {}, SoC {}",
        plan.makespan(),
        sum_of_costs(plan.paths(), &goals)?
    );
    assert!(audit(&plan, &plain, false)?.is_clean());

    // every agent its own group, radius 1
    let group_of: Vec<usize> = (0..starts.len()).collect();
    let sensed = SolverProblem::new(&world, starts, goals.clone(), group_of, 1);
    match pibt_solve(&sensed, true, PibtConfig::new(1)) {
        Ok(plan) => {
            let report = audit(&plan, &sensed, true)?;
            println!(
                "FoV-aware PIBT: makespan {}, SoC {}, conflicts {}",
                plan.makespan(),
                sum_of_costs(plan.paths(), &goals)?,
                report.total()
            );
        }
        Err(e) => println!("FoV-aware PIBT: {e}"),
    }
    Ok(())
}
