//! What an observer can infer from the broadcast: the candidate locations
//! of each agent per timestep, and whether every belief keeps k options.

use privmapf::bench::select_instance;
use privmapf::grid::load_scenario;
use privmapf::pipeline::{check_k_privacy, compute_beliefs, fpp_solve, PrivacyProblem};
use privmapf::{GridWorld, SolverKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let world = GridWorld::load_map(data.join("empty-16-16.map"))?;
    let entries = load_scenario(data.join("empty-16-16-random-1.scen"), &world)?;
    let real = select_instance(&world, &entries, 4, 9, 1).expect("enough rows");
    let k = 3;
    let out = fpp_solve(&PrivacyProblem::new(&world, real, k, 1).with_solver(SolverKind::Lacam).with_seed(9))?;

    let beliefs = compute_beliefs(&out.trace);
    for g in 0..beliefs.num_groups() {
        let sizes: Vec<usize> = (0..beliefs.timesteps()).map(|t| beliefs.belief(g, t).len()).collect();
        println!("agent {g}: belief sizes over time {:?}", sizes);
    }
    let report = check_k_privacy(&beliefs, k);
    println!("{k}-privacy holds: {} ({} violations)", report.ok, report.violations.len());
    Ok(())
}
