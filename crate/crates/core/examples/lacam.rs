//! LaCAM*: first solution from PIBT, then anytime improvement within a
//! node-expansion budget.

use privmapf::audit::sum_of_costs;
use privmapf::bench::select_instance;
use privmapf::grid::load_scenario;
use privmapf::search::{lacam_solve_with_stats, pibt_solve, LacamConfig, PibtConfig};
use privmapf::{GridWorld, SolverProblem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let world = GridWorld::load_map(data.join("random-32-32-20.map"))?;
    let entries = load_scenario(data.join("random-32-32-20-random-1.scen"), &world)?;
    let chosen = select_instance(&world, &entries, 20, 1, 0).expect("enough rows");
    let starts: Vec<_> = chosen.iter().map(|e| e.start).collect();
    let goals: Vec<_> = chosen.iter().map(|e| e.goal).collect();
    let problem = SolverProblem::single_agents(&world, starts, goals.clone());

    if let Ok(plan) = pibt_solve(&problem, false, PibtConfig::new(1)) {
        println!("PIBT alone:   SoC {}", sum_of_costs(plan.paths(), &goals)?);
    }
    for budget in [1_000, 10_000, 50_000] {
        let (result, stats) = lacam_solve_with_stats(&problem, false, LacamConfig::with_expansions(1, budget));
        match result {
            Ok(plan) => println!(
                "LaCAM* {budget:>6} expansions: SoC {}, {} improvements, search space exhausted: {}",
                sum_of_costs(plan.paths(), &goals)?,
                stats.improvements,
                stats.exhausted
            ),
            Err(e) => println!("LaCAM* {budget:>6} expansions: {e}"),
        }
    }
    Ok(())
}
