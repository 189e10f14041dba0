use std::error::Error;
use std::fs;
use std::io::{self, BufReader};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use privmapf::audit::{audit_paths, check_runtime_k_privacy, metrics};
use privmapf::bench::{cactus_data, read_csv, run_suite, select_instance, summarize, write_csv, GroupBy, SuiteConfig};
use privmapf::dispatch::{read_broadcast, write_broadcast};
use privmapf::grid::load_scenario;
use privmapf::pipeline::{
    fpp_solve, kpp_solve, load_full_plan, read_private_dir, write_full_plan, write_private_dir, Budget, MessageTrace, PipelineError,
    PrivacyProblem,
};
use privmapf::safezone::{ppfpp, PpfppConfig, PriorZones, SafeZoneSet};
use privmapf::{AgentGroup, GridWorld, SolverKind};

type CliResult = Result<ExitCode, Box<dyn Error>>;

#[derive(Parser)]
#[command(name = "privmapf", version, about = "Privacy-preserving multi-agent path finding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dispatch groups for N scenario agents and plan for all sub-agents.
    Solve(SolveArgs),
    /// Shorten the real agents' paths of a solved fPP plan inside safe zones.
    Ppfpp(PpfppArgs),
    /// Check a plan file for conflicts and, given groups, for k-privacy.
    Audit(AuditArgs),
    /// Run an experiment suite described by a TOML config.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Kpp,
    Fpp,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Pibt,
    Lacam,
}

impl From<SolverArg> for SolverKind {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Pibt => SolverKind::Pibt,
            SolverArg::Lacam => SolverKind::Lacam,
        }
    }
}

#[derive(clap::Args)]
struct SolveArgs {
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    scen: PathBuf,
    /// Number of real agents, picked from the scenario in seeded order.
    #[arg(long)]
    agents: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    fov_radius: u32,
    #[arg(long, value_enum, default_value = "pibt")]
    solver: SolverArg,
    #[arg(long, value_enum, default_value = "fpp")]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// LaCAM* node expansions.
    #[arg(long, default_value_t = 10_000)]
    budget: usize,
    /// LaCAM* wall-clock budget; overrides --budget.
    #[arg(long)]
    time_budget_ms: Option<u64>,
    /// Writes groups.jsonl, plan.txt and private/ here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct PpfppArgs {
    #[arg(long)]
    plan: PathBuf,
    /// Published groups (JSON lines, as written by `solve`).
    #[arg(long)]
    groups: PathBuf,
    /// Directory with the agents' private sidecars.
    #[arg(long)]
    private: PathBuf,
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    fov_radius: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Grow zones against the initial rather than the extended zones of
    /// the previous timestep (parallel over timesteps).
    #[arg(long)]
    initial_prior: bool,
    /// Writes refined_plan_<i>.txt here, and zones.json with --zones.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    zones: bool,
}

#[derive(clap::Args)]
struct AuditArgs {
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    map: PathBuf,
    /// Also check inter-group sightings at this radius.
    #[arg(long)]
    fov_radius: Option<u32>,
    /// Published groups: enables endpoint and k-privacy checks.
    #[arg(long)]
    groups: Option<PathBuf>,
    /// Private sidecars: adds real-agent metrics.
    #[arg(long)]
    private: Option<PathBuf>,
}

#[derive(clap::Args)]
struct BenchArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV output; with only --summarize, the CSV to summarize.
    #[arg(long)]
    out: PathBuf,
    /// Print the improvement summary table.
    #[arg(long)]
    summarize: bool,
    /// Write cactus-chart data (JSON) grouped by k or r.
    #[arg(long, value_enum)]
    cactus: Option<CactusArg>,
    #[arg(long, requires = "cactus")]
    cactus_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CactusArg {
    K,
    R,
}

fn main() -> ExitCode {
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => solve(args),
        Command::Ppfpp(args) => run_ppfpp(args),
        Command::Audit(args) => audit(args),
        Command::Bench(args) => bench(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// PRIVMAPF_THREADS caps the worker pool.
fn configure_threads() -> Result<(), Box<dyn Error>> {
    let Ok(value) = std::env::var("PRIVMAPF_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| format!("PRIVMAPF_THREADS must be a positive integer, got '{value}'"))?;
    if threads == 0 {
        return Err("PRIVMAPF_THREADS must be a positive integer, got '0'".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn solve(args: SolveArgs) -> CliResult {
    let world = GridWorld::load_map(&args.map)?;
    let entries = load_scenario(&args.scen, &world)?;
    let radius = match args.mode {
        Mode::Kpp => 0,
        Mode::Fpp => args.fov_radius,
    };
    let chosen = select_instance(&world, &entries, args.agents, args.seed, radius)
        .ok_or_else(|| format!("scenario has fewer than {} mutually compatible rows", args.agents))?;
    let budget = match args.time_budget_ms {
        Some(ms) => Budget::WallClock(Duration::from_millis(ms)),
        None => Budget::Expansions(args.budget),
    };
    let problem = PrivacyProblem::new(&world, chosen, args.k, args.fov_radius)
        .with_solver(args.solver.into())
        .with_seed(args.seed)
        .with_budget(budget);
    let result = match args.mode {
        Mode::Kpp => kpp_solve(&problem),
        Mode::Fpp => fpp_solve(&problem),
    };
    let out = match result {
        Ok(out) => out,
        Err(PipelineError::Solve { failure, trace }) => {
            if let Some(dir) = &args.out {
                fs::create_dir_all(dir)?;
                fs::write(dir.join("groups.jsonl"), write_broadcast(&trace.published_groups, &world))?;
            }
            print_json(&json!({ "solved": false, "status": failure.reason.to_string() }));
            return Ok(ExitCode::from(1));
        }
        Err(e) => return Err(e.into()),
    };
    let m = metrics(&out.full_plan, &out.groups)?;
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
        let sizes: Vec<usize> = out.groups.iter().map(AgentGroup::k).collect();
        fs::write(dir.join("groups.jsonl"), write_broadcast(&out.trace.published_groups, &world))?;
        fs::write(dir.join("plan.txt"), write_full_plan(&out.full_plan, &sizes))?;
        write_private_dir(&dir.join("private"), &out.groups, &out.real_plans)?;
    }
    print_json(&json!({
        "solved": true,
        "agents": args.agents,
        "k": args.k,
        "fov_radius": radius,
        "soc": m.soc,
        "rsoc": m.rsoc,
        "makespan": m.makespan,
        "real_costs": m.real_costs,
    }));
    Ok(ExitCode::SUCCESS)
}

/// Groups with their private real indices, checked against the plan.
fn load_groups(world: &GridWorld, groups: &Path, private: &Path) -> Result<Vec<AgentGroup>, Box<dyn Error>> {
    let published = read_broadcast(&fs::read_to_string(groups)?, world)?;
    let sidecars = read_private_dir(private, published.len())?;
    Ok(published
        .into_iter()
        .zip(sidecars)
        .map(|(g, s)| AgentGroup::from_broadcast(g, s.real_index))
        .collect())
}

fn zones_json(world: &GridWorld, zones: &SafeZoneSet) -> serde_json::Value {
    let groups: Vec<Vec<Vec<(u32, u32)>>> = (0..zones.num_groups())
        .map(|g| {
            zones
                .group(g)
                .iter()
                .map(|vs| vs.iter().map(|&v| world.coords(v)).collect())
                .collect()
        })
        .collect();
    json!(groups)
}

fn run_ppfpp(args: PpfppArgs) -> CliResult {
    let world = GridWorld::load_map(&args.map)?;
    let plan = load_full_plan(&args.plan)?.plan;
    let groups = load_groups(&world, &args.groups, &args.private)?;
    let mut config = PpfppConfig::new(args.seed);
    if args.initial_prior {
        config.prior = PriorZones::Initial;
    }
    let out = ppfpp(&world, &plan, &groups, args.fov_radius, &config)?;
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
        for (i, path) in out.refined_real_plans.iter().enumerate() {
            fs::write(dir.join(format!("refined_plan_{i}.txt")), privmapf::pipeline::format_path(path))?;
        }
        if args.zones {
            let dump = json!({
                "initial": zones_json(&world, &out.initial),
                "extended": zones_json(&world, &out.extended),
            });
            fs::write(dir.join("zones.json"), serde_json::to_string(&dump)?)?;
        }
    }
    print_json(&json!({
        "before": out.before,
        "after": out.after,
        "improvement_pct": out.improvement_pct(),
        "picks": out.picks.len(),
    }));
    Ok(ExitCode::SUCCESS)
}

fn audit(args: AuditArgs) -> CliResult {
    let world = GridWorld::load_map(&args.map)?;
    let file = load_full_plan(&args.plan)?;
    let plan = file.plan.padded();
    let mut clean;
    let mut report = serde_json::Map::new();
    match &args.groups {
        None => {
            let conflicts = audit_paths(&plan, &world, &file.group_of, args.fov_radius, None)?;
            clean = conflicts.is_clean();
            report.insert("conflicts".into(), json!(conflicts));
        }
        Some(groups_path) => {
            let published = read_broadcast(&fs::read_to_string(groups_path)?, &world)?;
            let starts: Vec<_> = published.iter().flat_map(|g| g.pairs.iter().map(|p| p.start)).collect();
            let goals: Vec<_> = published.iter().flat_map(|g| g.pairs.iter().map(|p| p.goal)).collect();
            let trace = MessageTrace {
                published_groups: published,
                broadcast_plan: Some(file.plan.clone()),
                planner: privmapf::pipeline::PLANNER,
            };
            let conflicts = audit_paths(&plan, &world, &trace.group_of(), args.fov_radius, Some((&starts, &goals)))?;
            clean = conflicts.is_clean();
            report.insert("conflicts".into(), json!(conflicts));
            let k = trace.published_groups.iter().map(|g| g.pairs.len()).min().unwrap_or(0);
            let privacy = check_runtime_k_privacy(&plan, &trace, &world, k, args.fov_radius.unwrap_or(0))?;
            clean &= privacy.privacy.ok;
            report.insert("k".into(), json!(k));
            report.insert("k_privacy".into(), json!(privacy.privacy));
            if let Some(private) = &args.private {
                let groups = load_groups(&world, groups_path, private)?;
                report.insert("metrics".into(), json!(metrics(&plan, &groups)?));
            }
        }
    }
    report.insert("clean".into(), json!(clean));
    print_json(&serde_json::Value::Object(report));
    Ok(if clean { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn bench(args: BenchArgs) -> CliResult {
    let records = match &args.config {
        Some(config) => {
            let config = SuiteConfig::load(config)?;
            let records = run_suite(&config)?;
            write_csv(io::BufWriter::new(fs::File::create(&args.out)?), &records)?;
            let solved = records.iter().filter(|r| r.solved).count();
            eprintln!("{} runs, {} solved, written to {}", records.len(), solved, args.out.display());
            records
        }
        None => read_csv(BufReader::new(fs::File::open(&args.out)?))?,
    };
    if args.summarize || args.config.is_none() {
        print!("{}", summarize(&records));
    }
    if let Some(by) = args.cactus {
        let series = cactus_data(
            &records,
            match by {
                CactusArg::K => GroupBy::K,
                CactusArg::R => GroupBy::R,
            },
        );
        let value: Vec<_> = series
            .iter()
            .map(|s| json!({ "map": s.map, "solver": s.solver, "value": s.value, "rsoc": s.rsoc }))
            .collect();
        let text = serde_json::to_string_pretty(&value)?;
        match &args.cactus_out {
            Some(path) => fs::write(path, text)?,
            None => println!("{text}"),
        }
    }
    Ok(ExitCode::SUCCESS)
}
