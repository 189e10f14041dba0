//! A small benchmark suite: CSV records, the improvement summary, and
//! cactus-chart data.

use privmapf::bench::{cactus_data, run_suite, summarize, write_csv, GroupBy, SuiteConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let config = SuiteConfig::from_toml(
        r#"
        agents = [6]
        k = [1, 2, 3]
        fov_radius = [1]
        solvers = ["lacam"]
        seeds = [0, 1, 2, 3, 4]
        expansions = 5000

        [[maps]]
        map = "random-32-32-20.map"
        scen = "random-32-32-20-random-1.scen"
        "#,
        &data,
    )?;
    let records = run_suite(&config)?;
    write_csv(std::io::stdout().lock(), &records[..3])?;
    println!("...\n");
    print!("{}", summarize(&records));
    println!();
    for s in cactus_data(&records, GroupBy::K) {
        println!("k={} solved {:>2}: {:?}", s.value, s.rsoc.len(), s.rsoc);
    }
    Ok(())
}
