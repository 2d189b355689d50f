use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mgmc::fluid::Order;
use mgmc::harness::{self, output, SimConfig, Solver, TestCase};

#[derive(Parser)]
#[command(name = "mgmc", version, about = "Moment guided Monte Carlo for the 1D BGK equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one test case and write profiles.csv and run.json
    Run(RunArgs),
    /// Statistical error study on the accuracy test; writes errors.csv
    Study(StudyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat JSON configuration; every key is optional
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    test: Option<TestCase>,
    /// Comma separated list, e.g. `mc,mg,dvm`
    #[arg(long, value_delimiter = ',')]
    solver: Option<Vec<Solver>>,
    /// Comma separated list of Knudsen numbers
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long)]
    ppc: Option<usize>,
    #[arg(long)]
    tfinal: Option<f64>,
    #[arg(long, value_parser = parse_order)]
    order: Option<Order>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StudyArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_order(s: &str) -> Result<Order, String> {
    match s {
        "1" | "first" => Ok(Order::First),
        "2" | "second" => Ok(Order::Second),
        "switch" => Ok(Order::Switch),
        _ => Err(format!("unknown order {s:?} (expected first, second or switch)")),
    }
}

fn load(path: Option<&PathBuf>) -> mgmc::Result<SimConfig> {
    match path {
        Some(p) => SimConfig::from_file(p),
        None => Ok(SimConfig::default()),
    }
}

fn run(args: RunArgs) -> mgmc::Result<()> {
    let mut cfg = load(args.config.as_ref())?;
    if let Some(t) = args.test {
        cfg.test_case = t;
    }
    if let Some(s) = args.solver {
        cfg.solver = s;
    }
    if let Some(e) = args.eps {
        cfg.eps = e;
    }
    cfg.n_cells = args.cells.unwrap_or(cfg.n_cells);
    cfg.n_per_cell = args.ppc.unwrap_or(cfg.n_per_cell);
    cfg.t_final = args.tfinal.or(cfg.t_final);
    cfg.order = args.order.or(cfg.order);
    cfg.seed = args.seed.unwrap_or(cfg.seed);
    cfg.output_dir = args.out.unwrap_or(cfg.output_dir);
    let cfg = cfg.resolved()?;
    let profiles = harness::run(&cfg)?;
    output::write_run(&cfg, &profiles)?;
    log::info!("wrote {}", cfg.output_dir.display());
    Ok(())
}

fn study(args: StudyArgs) -> mgmc::Result<()> {
    let mut cfg = load(args.config.as_ref())?;
    cfg.seed = args.seed.unwrap_or(cfg.seed);
    cfg.output_dir = args.out.unwrap_or(cfg.output_dir);
    let cfg = cfg.resolved()?;
    let table = harness::stochastic_error_study(&cfg)?;
    for s in &table.series {
        println!("{:>3} eps={:<8} slope={:.3} (rho {:.3}, u {:.3}, T {:.3})", s.solver.name(), s.eps, s.slope, s.slopes[0], s.slopes[1], s.slopes[2]);
    }
    output::write_study(&cfg, &table)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Study(a) => study(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
