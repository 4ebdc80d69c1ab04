use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mbl_quench::entropy::WrePath;
use mbl_quench::runner::{
    averaged_saturation_times, default_t0_grid, run_dynamics, run_growth_sweep, run_haar_baseline, Case,
    ExperimentConfig, InitialStateKind, Predict,
};
use mbl_quench::{Error, Exec};

#[derive(Parser, Debug)]
#[command(name = "mbl-quench", version, about = "Entanglement dynamics of structured states in disordered XXZ chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Time traces after the target quench.
    Dynamics(RunArgs),
    /// Saturation growth over the T0 sweep.
    Growth(RunArgs),
    /// Haar-random reference entropies.
    HaarBaseline(HaarArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CaseArg {
    #[value(name = "I")]
    I,
    #[value(name = "II")]
    II,
    #[value(name = "III")]
    III,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum InitialArg {
    Zrand,
    Xy,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WreArg {
    Naive,
    Fast,
    Both,
    None,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PredictArg {
    None,
    Gge,
    Scrooge,
    Both,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// JSON file with ExperimentConfig fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    case: Option<CaseArg>,
    #[arg(long = "L")]
    n_sites: Option<usize>,
    /// Target disorder strength.
    #[arg(long = "W")]
    w: Option<f64>,
    /// `full` for the 41-point sweep, or a comma-separated list.
    #[arg(long = "T0-grid")]
    t0_grid: Option<String>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    initial: Option<InitialArg>,
    #[arg(long, value_enum)]
    wre: Option<WreArg>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    predict: Option<PredictArg>,
    /// Scrooge draws per (realization, T0).
    #[arg(long)]
    scrooge_samples: Option<usize>,
    /// Average S(inf) over T = 1e12, 1.2e12, 1.5e12.
    #[arg(long)]
    saturation_average: bool,
    #[arg(long)]
    eigen_cache: Option<PathBuf>,
    #[arg(long)]
    sequential: bool,
}

#[derive(Args, Debug)]
struct HaarArgs {
    #[arg(long = "L", default_value_t = 12)]
    n_sites: usize,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 2025)]
    seed: u64,
    #[arg(long, value_enum, default_value = "naive")]
    wre: WreArg,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    sequential: bool,
}

fn wre_path(w: WreArg) -> WrePath {
    match w {
        WreArg::Naive => WrePath::Naive,
        WreArg::Fast => WrePath::Fast,
        WreArg::Both => WrePath::Both,
        WreArg::None => WrePath::None,
    }
}

fn exec(sequential: bool) -> Exec {
    if sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    }
}

fn parse_t0_grid(s: &str) -> Result<Vec<f64>, Error> {
    if s == "full" {
        return Ok(default_t0_grid());
    }
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| Error::InvalidInput(format!("bad T0 value {v:?}"))))
        .collect()
}

fn build_config(args: &RunArgs, dynamics: bool) -> Result<ExperimentConfig, Error> {
    let (mut cfg, file_has_t0) = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", p.display())))?;
            let value: serde_json::Value = serde_json::from_str(&text)?;
            let has_t0 = value.get("T0_grid").is_some();
            (serde_json::from_value::<ExperimentConfig>(value)?, has_t0)
        }
        None => (ExperimentConfig::default(), false),
    };
    if let Some(c) = args.case {
        cfg.case = match c {
            CaseArg::I => Case::I,
            CaseArg::II => Case::II,
            CaseArg::III => Case::III,
        };
    }
    if let Some(l) = args.n_sites {
        cfg.n_sites = l;
    }
    if let Some(w) = args.w {
        cfg.w_target = Some(w);
    }
    match &args.t0_grid {
        Some(s) => cfg.t0_grid = parse_t0_grid(s)?,
        None if dynamics && !file_has_t0 => cfg.t0_grid = vec![4.5],
        None => {}
    }
    if let Some(r) = args.realizations {
        cfg.realizations = r;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(i) = args.initial {
        cfg.initial_state_kind = match i {
            InitialArg::Zrand => InitialStateKind::RandomZHalfFilled,
            InitialArg::Xy => InitialStateKind::XyAlternating,
        };
    }
    if let Some(w) = args.wre {
        cfg.wre_path = wre_path(w);
    }
    if let Some(o) = &args.out {
        cfg.output_dir = o.clone();
    }
    if let Some(p) = args.predict {
        cfg.predict = match p {
            PredictArg::None => Predict::None,
            PredictArg::Gge => Predict::Gge,
            PredictArg::Scrooge => Predict::Scrooge,
            PredictArg::Both => Predict::Both,
        };
    }
    if let Some(n) = args.scrooge_samples {
        cfg.scrooge_samples = n;
    }
    if args.saturation_average {
        cfg.saturation_times = averaged_saturation_times();
    }
    if let Some(d) = &args.eigen_cache {
        cfg.eigen_cache_dir = Some(d.clone());
    }
    cfg.exec = exec(args.sequential);
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Dynamics(args) => {
            let out = run_dynamics(&build_config(&args, true)?)?;
            println!("{}", out.table.display());
        }
        Command::Growth(args) => {
            let out = run_growth_sweep(&build_config(&args, false)?)?;
            println!("{}", out.table.display());
            if let Some(a) = out.aggregate {
                println!("{}", a.display());
            }
        }
        Command::HaarBaseline(a) => {
            let (b, path) = run_haar_baseline(a.seed, a.n_sites, a.samples, wre_path(a.wre), exec(a.sequential), &a.out)?;
            println!("{}", path.display());
            log::info!("L = {}: purity {:.6} ± {:.6}, S_HC {:.6}", b.n_sites, b.purity_hc, b.purity_hc_stderr, b.s_hc);
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        _ if e.is_numerical() => 3,
        Error::InvalidInput(_) | Error::Json(_) | Error::LengthMismatch { .. } => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
