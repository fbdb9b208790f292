use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use pnep_core::ldpc::{LdpcCode, ParityCheckMatrix};
use pnep_core::simkit::{
    parse_ebn0_grid, parse_variant, with_workers, write_outputs, RunConfig, RunConfigFile,
    Simulation,
};
use pnep_core::{Error as CoreError, ScenarioPreset};

#[derive(Parser)]
#[command(name = "pnep", version, about = "Phase-noise receiver simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a BER/FER sweep and write CSV plus a JSON config sidecar.
    Simulate(SimulateArgs),
    /// Build a (3,6)-regular LDPC code and write it as an alist file.
    Gencode {
        /// Code length.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check that an alist file parses and describes a usable code.
    ValidateCode { path: PathBuf },
}

#[derive(clap::Args)]
struct SimulateArgs {
    /// TOML or JSON run configuration.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario (Fig3Distributed, Fig4DvbDistributed, Fig5Concentrated, KnownPhase, AllPilots).
    #[arg(long)]
    preset: Option<String>,
    /// Eb/N0 grid in dB: start:step:stop (inclusive) or a comma-separated list.
    #[arg(long)]
    ebn0: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, env = "PNEP_OUT_DIR", default_value = "results")]
    out: PathBuf,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Detector variant (Tp, EpNative, EpDamped, EpModified, DpBcjr).
    #[arg(long)]
    variant: Option<String>,
    /// Stop after this many frame errors.
    #[arg(long)]
    min_frame_errors: Option<u64>,
    /// Stop after this many frames.
    #[arg(long)]
    max_frames: Option<u64>,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Config(_) | CoreError::Parse { .. } | CoreError::InvalidParameter(_) => {
                Failure::Config(e.into())
            }
            other => Failure::Runtime(other.into()),
        }
    }
}

fn resolve_config(args: &SimulateArgs) -> Result<RunConfig, Failure> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(_), Some(_)) => {
            return Err(Failure::Config(anyhow!("--config and --preset are mutually exclusive")))
        }
        (None, None) => return Err(Failure::Config(anyhow!("one of --config or --preset is required"))),
        (Some(path), None) => RunConfig::from_path(path)?,
        (None, Some(name)) => {
            let preset: ScenarioPreset = name.parse()?;
            RunConfigFile {
                preset: Some(preset),
                ..Default::default()
            }
            .resolve()?
        }
    };
    if let Some(v) = &args.variant {
        let file = RunConfigFile {
            name: Some(cfg.name.clone()),
            variant: Some(parse_variant(v)?),
            scenario: Some(cfg.scenario.clone()),
            ebn0_db: Some(cfg.ebn0_db.clone()),
            stop: Some(cfg.stop),
            base_seed: Some(cfg.base_seed),
            preset: None,
        };
        cfg = file.resolve()?;
    }
    if let Some(g) = &args.ebn0 {
        cfg.ebn0_db = parse_ebn0_grid(g)?;
    }
    if let Some(s) = args.seed {
        cfg.base_seed = s;
    }
    if let Some(n) = args.min_frame_errors {
        cfg.stop.min_frame_errors = n;
    }
    if let Some(n) = args.max_frames {
        cfg.stop.max_frames = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn output_stem(cfg: &RunConfig) -> String {
    let variant: String = cfg
        .variant_label()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    format!("{}_{}_{}", cfg.name, variant, cfg.config_hash())
}

fn simulate(args: &SimulateArgs) -> Result<(), Failure> {
    let cfg = resolve_config(args)?;
    let sim = Simulation::new(cfg.clone())?;
    println!(
        "# {} / {} ({} symbols per frame, rate {:.4}, config {})",
        cfg.name,
        cfg.variant_label(),
        sim.plan().len(),
        sim.code().rate(),
        cfg.config_hash()
    );
    let records = with_workers(args.workers, || {
        sim.run_sweep(|r| {
            println!(
                "Eb/N0 {:>5.2} dB  frames {:>6}  frame errors {:>5}  BER {:.3e}  FER {:.3e}  ({:.1} s)",
                r.ebn0_db, r.frames, r.frame_errors, r.ber, r.fer, r.wall_seconds
            );
        })
    })??;
    let (csv, json) = write_outputs(&args.out, &output_stem(&cfg), &cfg, &records)?;
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(())
}

fn gencode(n: usize, seed: u64, out: &Path) -> Result<(), Failure> {
    let code = LdpcCode::construct_regular(n, 3, 6, seed)?;
    code.write_alist(out)?;
    println!(
        "wrote {}: n = {}, m = {}, rank = {}, rate = {:.4}",
        out.display(),
        code.n(),
        code.matrix().m(),
        code.rank(),
        code.rate()
    );
    Ok(())
}

fn validate_code(path: &Path) -> Result<(), Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Runtime)?;
    let h = ParityCheckMatrix::from_alist(&text)
        .map_err(|e| Failure::Config(anyhow!("{}: {e}", path.display())))?;
    let code = LdpcCode::from_matrix(h);
    println!(
        "{}: n = {}, m = {}, rank = {}, k = {}, 4-cycles: {}",
        path.display(),
        code.n(),
        code.matrix().m(),
        code.rank(),
        code.k(),
        if code.matrix().has_four_cycle() { "yes" } else { "no" }
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Gencode { n, seed, out } => gencode(*n, *seed, out),
        Command::ValidateCode { path } => validate_code(path),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
