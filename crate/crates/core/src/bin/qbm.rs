use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qbm::experiments::{self, CompareConfig, ConfigFile, Format, NegativityConfig, Overrides, RunConfig, SweepConfig};
use qbm::Error;

#[derive(Parser)]
#[command(name = "qbm", version, about = "Finite-bath quantum Brownian motion: entropy production, correlations and entanglement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time series of every observable for one parameter set.
    Simulate(Common),
    /// Composition of the entropy production over a (gamma, T) grid.
    Map(Common),
    /// Logarithmic negativity and mutual information across T or gamma (undriven).
    Negativity(Common),
    /// Deffner-Lutz vs ELB entropy production along a coupling ladder.
    CompareDefinitions {
        #[command(flatten)]
        common: Common,
        /// Comma-separated couplings.
        #[arg(long, value_delimiter = ',')]
        gammas: Option<Vec<f64>>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML or JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long)]
    f0: Option<f64>,
    #[arg(long)]
    omega_f: Option<f64>,
    #[arg(long)]
    n_modes: Option<usize>,
    #[arg(long)]
    n_points: Option<usize>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<Format>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn load(&self) -> Result<(ConfigFile, Overrides), Error> {
        if let Some(n) = self.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Error::Config(format!("cannot start thread pool: {e}")))?;
        }
        let file = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let ov = Overrides {
            gamma: self.gamma,
            temperature: self.temperature,
            f0: self.f0,
            omega_f: self.omega_f,
            n_modes: self.n_modes,
            n_points: self.n_points,
            t_end: self.t_end,
            out: self.out.clone(),
            format: self.format,
        };
        Ok((file, ov))
    }
}

fn ensure_output(base: &mut RunConfig, command: &str) {
    if base.output.is_none() {
        base.output = Some(experiments::default_output(command, base.format));
    }
}

fn run(cli: Cli) -> Result<PathBuf, Error> {
    match cli.command {
        Command::Simulate(common) => {
            let (file, ov) = common.load()?;
            let mut cfg = RunConfig::resolve(&file, &ov)?;
            ensure_output(&mut cfg, "timeseries");
            experiments::run_timeseries(&cfg)?;
            Ok(cfg.output.unwrap())
        }
        Command::Map(common) => {
            let (file, ov) = common.load()?;
            let mut cfg = SweepConfig::resolve(&file, &ov)?;
            ensure_output(&mut cfg.base, "map");
            experiments::run_contribution_map(&cfg)?;
            Ok(cfg.base.output.unwrap())
        }
        Command::Negativity(common) => {
            let (file, ov) = common.load()?;
            let mut cfg = NegativityConfig::resolve(&file, &ov)?;
            ensure_output(&mut cfg.base, "negativity");
            experiments::run_negativity_study(&cfg)?;
            Ok(cfg.base.output.unwrap())
        }
        Command::CompareDefinitions { common, gammas } => {
            let (file, ov) = common.load()?;
            let mut cfg = CompareConfig::resolve(&file, &ov, gammas)?;
            ensure_output(&mut cfg.base, "compare");
            experiments::run_compare_definitions(&cfg)?;
            Ok(cfg.base.output.unwrap())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(path) => {
            log::info!("wrote {}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else if e.is_numerical() {
                ExitCode::from(3)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
