use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use clinr_sim::engine::EngineKind;
use clinr_sim::error::Error;
use clinr_sim::harness::{compare_modes, run_sweep, write_outputs, ExperimentConfig, ModeSelection};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EngineArg {
    Frame,
    Reference,
}

/// Run a sweep of direct, monolithic and distributed CliNR simulations.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    /// Sweep description (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Overrides `master_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `output`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    engine: Option<EngineArg>,
    /// Also write the scheduler trace of the first shot of every
    /// distributed point.
    #[arg(long)]
    trace: bool,
}

fn run(args: Args) -> anyhow::Result<()> {
    let mut cfg = ExperimentConfig::from_file(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(out) = args.out {
        cfg.output = out;
    }
    if let Some(engine) = args.engine {
        cfg.engine = match engine {
            EngineArg::Frame => EngineKind::PauliFrame,
            EngineArg::Reference => EngineKind::ReferenceTableau,
        };
    }
    let stats = run_sweep(&cfg, args.trace)?;
    for p in &stats.points {
        let tau = p.tau_e.map(|t| t.to_string()).unwrap_or_else(|| "-".into());
        println!(
            "{:<6} n={:<4} tau_e={:<4} ler={:.3e} ± {:.1e}  depth={:.1} ± {:.1}",
            format!("{:?}", p.mode).to_lowercase(),
            p.n,
            tau,
            p.ler_mean,
            p.ler_std,
            p.depth_mean,
            p.depth_std
        );
    }
    if cfg.mode == ModeSelection::All {
        for c in compare_modes(&stats)? {
            println!(
                "n={} tau_e={}: ler<direct {}  ler≈mono {}  depth<mono {}  depth<direct {}",
                c.n,
                c.tau_e,
                c.dist_ler_better_than_direct,
                c.dist_ler_le_mono,
                c.dist_depth_lt_mono,
                c.dist_depth_lt_direct
            );
        }
    }
    for path in write_outputs(&stats, &cfg.output)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::LayerCapExceeded { .. }) => ExitCode::from(3),
                Some(Error::Config(_)) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
