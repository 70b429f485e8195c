use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dvlnet::checkpoint::ModelKind;
use dvlnet::pipeline::{self, BiasSpec, DataSource, RunConfig};
use dvlnet::Error;

#[derive(Parser)]
#[command(name = "dvlnet", version, about = "DVL body-velocity estimation: simulate, train, evaluate")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write synthetic missions and a manifest to the output directory.
    Simulate(Common),
    /// Train one model on the training missions.
    Train {
        #[command(flatten)]
        common: Common,
        /// Continue from this checkpoint.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Score LS and any given checkpoints on the test missions.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[arg(long = "checkpoint")]
        checkpoints: Vec<PathBuf>,
    },
    /// Evaluate several checkpoints side by side.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(required = true)]
        checkpoints: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// beamsnet-v1, beamsnet-v2, snmnn-v1 or snmnn-v2.
    #[arg(long, value_parser = parse_model)]
    model: Option<ModelKind>,
    /// Beam pitch in degrees.
    #[arg(long)]
    theta_deg: Option<f64>,
    /// Per-beam bias, m/s.
    #[arg(long)]
    bias: Option<f64>,
    /// Beam noise standard deviation, m/s.
    #[arg(long)]
    noise_std: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    /// Read canonical mission files from this directory.
    #[arg(long)]
    data_dir: Option<PathBuf>,
    /// Debug logging.
    #[arg(short, long)]
    verbose: bool,
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    ModelKind::parse(s).map_err(|e| e.to_string())
}

impl Common {
    fn resolve(&self) -> dvlnet::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = &self.out {
            cfg.out = v.clone();
        }
        if let Some(v) = self.model {
            cfg.train.model = v;
        }
        if let Some(v) = self.theta_deg {
            cfg.geometry.pitch_deg = v;
        }
        if let Some(v) = self.bias {
            cfg.error.bias = BiasSpec::Uniform(v);
        }
        if let Some(v) = self.noise_std {
            cfg.error.noise_std = v;
        }
        if let Some(v) = self.epochs {
            cfg.train.epochs = Some(v);
        }
        if let Some(v) = &self.data_dir {
            cfg.data.source = DataSource::Files;
            cfg.data.dir = Some(v.clone());
        }
        cfg.error_model()?;
        cfg.geometry()?;
        Ok(cfg)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::SingularGeometry { .. } => 2,
        Error::Data(_) | Error::EmptyDataset | Error::Checkpoint(_) => 3,
        Error::Divergence { .. } => 4,
        _ => 1,
    }
}

fn run(cli: Cli) -> dvlnet::Result<()> {
    match cli.command {
        Command::Simulate(common) => {
            let cfg = common.resolve()?;
            let m = pipeline::simulate(&cfg)?;
            println!("wrote {} missions to {} (config {})", m.files.len(), cfg.out.display(), m.config_hash);
        }
        Command::Train { common, resume } => {
            let cfg = common.resolve()?;
            let s = pipeline::train(&cfg, resume.as_deref())?;
            let last = s.log.last().map_or(f64::NAN, |l| l.loss);
            println!("{}: {} epochs, final loss {last:.6}, checkpoint {}", s.model, s.epochs, s.checkpoint.display());
        }
        Command::Evaluate { common, checkpoints } | Command::Compare { common, checkpoints } => {
            let cfg = common.resolve()?;
            let e = pipeline::evaluate(&cfg, &checkpoints)?;
            print!("{}", e.table);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let verbose = match &cli.command {
        Command::Simulate(c) | Command::Train { common: c, .. } => c.verbose,
        Command::Evaluate { common: c, .. } | Command::Compare { common: c, .. } => c.verbose,
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if verbose { "debug" } else { "info" }))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
