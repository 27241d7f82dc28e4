use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use decycle::models::ModelParams;
use decycle_harness::config::{default_lambda_max, PhaseConfig};
use decycle_harness::{parse_config, run, ExperimentConfig, HarnessError, Mode, Result};

#[derive(Parser, Debug)]
#[command(
    name = "decycle",
    version,
    about = "Decorated-cycle detection and recovery experiments"
)]
struct Cli {
    /// Base seed; overrides the `seed` of a configuration file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory; overrides `output_path`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print F, A+, the PLS threshold and the CCA condition.
    Threshold {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        gamma: f64,
    },
    /// Critical curves of the three methods over a grid of λ values.
    PhaseDiagram {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[arg(long, default_value_t = default_lambda_max())]
        lambda_max: f64,
    },
    /// Planted and null draws of the detection statistic.
    DetectSim {
        #[arg(long)]
        config: PathBuf,
    },
    /// Planted draws of the recovery scores.
    RecoverSim {
        #[arg(long)]
        config: PathBuf,
    },
    /// Monte Carlo low-degree advantage over a sweep of n.
    Lowdeg {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load(path: &PathBuf, mode: Mode) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let mut cfg = parse_config(&text).map_err(|e| match e {
        HarnessError::Config(msg) => HarnessError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    match cfg.mode {
        Some(m) if m != mode => {
            return Err(HarnessError::Config(format!(
                "{}: mode {m:?} does not match the subcommand",
                path.display()
            )))
        }
        _ => cfg.mode = Some(mode),
    }
    Ok(cfg)
}

fn build(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.command {
        Command::Threshold {
            lambda,
            mu,
            rho,
            gamma,
        } => {
            let mut c = ExperimentConfig::new(Mode::Threshold);
            c.params = Some(ModelParams::wigner(*lambda, *mu, *rho, 1));
            c.gamma = Some(*gamma);
            c
        }
        Command::PhaseDiagram {
            gamma,
            rho,
            grid,
            lambda_max,
        } => {
            let mut c = ExperimentConfig::new(Mode::PhaseDiagram);
            c.phase = Some(PhaseConfig {
                gamma: *gamma,
                rho: *rho,
                grid: *grid,
                lambda_max: *lambda_max,
            });
            c
        }
        Command::DetectSim { config } => load(config, Mode::DetectSim)?,
        Command::RecoverSim { config } => load(config, Mode::RecoverSim)?,
        Command::Lowdeg { config } => load(config, Mode::LowDeg)?,
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_path = Some(out.display().to_string());
    }
    Ok(cfg)
}

fn main_inner(cli: &Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    }
    let cfg = build(cli)?;
    let dir = PathBuf::from(cfg.output_path.clone().unwrap_or_else(|| "out".to_string()));
    let out = run(&cfg, &dir)?;
    for line in &out.report {
        println!("{line}");
    }
    println!(
        "wrote {} files to {}",
        out.manifest.outputs.len(),
        dir.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
