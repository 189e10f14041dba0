//! Load a MovingAI map and scenario, and inspect fields of view.
//!
//! cargo run --example load_map -- [MAP] [SCEN]

use std::path::PathBuf;

use privmapf::grid::load_scenario;
use privmapf::GridWorld;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let mut args = std::env::args().skip(1);
    let map = args.next().map(PathBuf::from).unwrap_or(data.join("room-32-32-4.map"));
    let scen = args.next().map(PathBuf::from).unwrap_or(data.join("room-32-32-4-random-1.scen"));

    let world = GridWorld::load_map(&map)?;
    let entries = load_scenario(&scen, &world)?;
    println!(
        "{}: {}x{}, {} passable cells, {} connected component(s), {} scenario rows",
        world.name(),
        world.width(),
        world.height(),
        world.num_vertices(),
        world.components().iter().max().map_or(0, |c| c + 1),
        entries.len()
    );

    let first = entries[0];
    let (sx, sy) = world.coords(first.start);
    let (gx, gy) = world.coords(first.goal);
    let dist = world.distances_to(first.goal)[first.start.index()];
    println!("row 0: ({sx},{sy}) -> ({gx},{gy}), shortest path {dist:?} steps");
    for r in 0..=3 {
        println!("  FoV radius {r} around the start covers {} cells", world.fov(first.start, r).len());
    }
    Ok(())
}
