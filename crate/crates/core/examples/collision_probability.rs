//! Chance that random mock pairs collide with nobody, analytically and by
//! simulation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use privmapf::dispatch::{find_collision, no_collision_probability, pairwise_product_estimate, sample_unchecked_groups};
use privmapf::{CollisionRule, GridWorld, ScenarioEntry};

fn main() {
    let world = GridWorld::open(5, 4);
    let verts: Vec<_> = world.vertices().collect();
    let (k, n) = (2, 3);
    let real: Vec<ScenarioEntry> = (0..n)
        .map(|i| ScenarioEntry {
            start: verts[i],
            goal: verts[i + 10],
        })
        .collect();

    let trials = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let clean = (0..trials)
        .filter(|_| {
            let groups = sample_unchecked_groups(&real, k, &world, &mut rng);
            find_collision(&groups, CollisionRule::StartGoalEquality, &world).is_none()
        })
        .count();
    let exact = no_collision_probability(verts.len(), k, n);
    let rough = pairwise_product_estimate(verts.len(), k, n);
    println!("|V|={}, k={k}, N={n}", verts.len());
    println!("  simulated      {:.4}", clean as f64 / trials as f64);
    println!("  exact          {:.4}", exact.value);
    println!("  pairwise est.  {:.4}", rough.value);
}
