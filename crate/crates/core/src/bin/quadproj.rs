use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DVector;

use quadproj::bench::{emit_report, run_trials, BenchConfig, Family};
use quadproj::splitting::{Method, SolverConfig};
use quadproj::{project_exact, quasi_project, Error, Quadric, Select, Variant};

#[derive(Parser)]
#[command(name = "quadproj", version, about = "Projections onto quadrics and box-quadric splitting benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run randomized trials and write one CSV row per solve.
    Bench(BenchArgs),
    /// Project one point onto a quadric and print it as JSON.
    Project(ProjectArgs),
}

#[derive(clap::Args)]
struct BenchArgs {
    #[arg(long, default_value = "ellipsoid")]
    family: Family,
    #[arg(long, value_delimiter = ',', default_value = "10,50,100")]
    dims: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, value_delimiter = ',', default_value = "ape,apc,apg,dr,drf")]
    methods: Vec<Method>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Solver settings as JSON; the flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    deviation_tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    no_restart: bool,
    #[arg(long, default_value_t = 1.0)]
    box_halfwidth: f64,
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProjectMethod {
    Exact,
    Center,
    Gradient,
}

#[derive(clap::Args)]
struct ProjectArgs {
    /// JSON document `{"B": [[..], ..], "b": [..], "c": ..}`.
    #[arg(long)]
    quadric: PathBuf,
    /// JSON array of coordinates.
    #[arg(long)]
    point: PathBuf,
    #[arg(long, value_enum, default_value = "exact")]
    method: ProjectMethod,
}

fn bench(args: BenchArgs) -> Result<(), Error> {
    let mut solver: SolverConfig = match &args.config {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
        None => SolverConfig::default(),
    };
    if let Some(g) = args.gamma {
        solver.gamma = g;
    }
    if let Some(t) = args.deviation_tol {
        solver.deviation_tol = t;
    }
    if let Some(m) = args.max_iter {
        solver.max_iter = m;
    }
    if args.no_restart {
        solver.restart = false;
    }
    let cfg = BenchConfig {
        family: args.family,
        dims: args.dims,
        trials: args.trials,
        methods: args.methods,
        seed: args.seed,
        box_halfwidth: args.box_halfwidth,
        solver,
    };
    let records = run_trials(&cfg)?;
    let summary = emit_report(&records, &args.out)?;
    print!("{summary}");
    Ok(())
}

fn project(args: ProjectArgs) -> Result<(), Error> {
    let q: Quadric = serde_json::from_str(&std::fs::read_to_string(&args.quadric)?)?;
    let x: Vec<f64> = serde_json::from_str(&std::fs::read_to_string(&args.point)?)?;
    let x = DVector::from_vec(x);
    let point = match args.method {
        ProjectMethod::Exact => project_exact(&q, &x)?.point,
        ProjectMethod::Center | ProjectMethod::Gradient => {
            q.validate()?;
            let variant = match args.method {
                ProjectMethod::Center => Variant::Center,
                _ => Variant::Gradient,
            };
            quasi_project(&q, &x, &variant, Select::Closest)?.ok_or_else(|| {
                Error::InvalidArgument("the line through the point misses the quadric".into())
            })?
        }
    };
    println!("{}", serde_json::to_string(point.as_slice())?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bench(a) => bench(a),
        Command::Project(a) => project(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
