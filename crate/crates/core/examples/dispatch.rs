//! Hide each real agent among k-1 mock agents and publish the groups.

use privmapf::bench::select_instance;
use privmapf::dispatch::{dispatch_groups, find_collision, write_broadcast};
use privmapf::grid::load_scenario;
use privmapf::{CollisionRule, DispatchConfig, GridWorld};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let world = GridWorld::load_map(data.join("random-32-32-20.map"))?;
    let entries = load_scenario(data.join("random-32-32-20-random-1.scen"), &world)?;
    let real = select_instance(&world, &entries, 5, 7, 1).expect("enough rows");

    let rule = CollisionRule::FovAware(1);
    let groups = dispatch_groups(&real, &DispatchConfig::new(3, rule, 7), &world)?;
    let published: Vec<_> = groups.iter().map(|g| g.broadcast()).collect();
    assert_eq!(find_collision(&published, rule, &world), None);

    println!("published groups (start_x, start_y, goal_x, goal_y per pair):");
    print!("{}", write_broadcast(&published, &world));
    println!("private sidecars (never published):");
    for g in &groups {
        println!("  {:?}", g.sidecar());
    }
    Ok(())
}
