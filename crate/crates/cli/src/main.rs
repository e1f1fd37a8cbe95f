use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use rfvlc::{run_sweep, Error, Figure, Method, Scenario, StreamSeed};

/// Effective-capacity experiments for a hybrid RF/VLC downlink.
#[derive(Parser)]
#[command(name = "rfvlc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Effective capacity against the QoS exponent.
    EcSweep(RunArgs),
    /// VLC effective capacity against LoS availability.
    BlockageSweep(RunArgs),
    /// Per-user effective capacity under TDMA and FDMA.
    UsersSweep(RunArgs),
    /// Delay bounds against the arrival rate.
    DelaySweep(RunArgs),
    /// Queue simulations checking tail exponents and delay bounds.
    QueueValidate(RunArgs),
    /// Print the default scenario as TOML.
    ShowDefaults,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (TOML). Built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// closed-form, quadrature or monte-carlo.
    #[arg(long)]
    method: Option<Method>,
    /// Output CSV; `<preset>.csv` by default.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Simulated frames for queue-validate.
    #[arg(long)]
    frames: Option<usize>,
    /// Worker threads (default: all cores). Does not affect results.
    #[arg(long)]
    threads: Option<usize>,
}

fn run(figure: Figure, args: RunArgs) -> anyhow::Result<()> {
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker threads")?;
    }
    let mut scenario = match &args.config {
        Some(path) => Scenario::load(path).with_context(|| format!("loading {}", path.display()))?,
        None => Scenario::reference(),
    };
    if let Some(seed) = args.seed {
        scenario.seed = StreamSeed(seed);
    }
    if let Some(n) = args.samples {
        anyhow::ensure!(n > 0, "--samples must be positive");
        scenario.samples = n;
    }
    if let Some(m) = args.method {
        scenario.method = m;
    }
    if let Some(f) = args.frames {
        anyhow::ensure!(f > 0, "--frames must be positive");
        scenario.queue.frames = f;
    }
    let result = run_sweep(&scenario, figure)?;
    let out = args.out.unwrap_or_else(|| PathBuf::from(format!("{figure}.csv")));
    result
        .save(&out)
        .with_context(|| format!("writing {}", out.display()))?;
    eprintln!("{figure}: {} rows -> {}", result.rows.len(), out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::ShowDefaults => {
            print!("{}", Scenario::reference().to_toml());
            Ok(())
        }
        Command::EcSweep(a) => run(Figure::EcSweep, a),
        Command::BlockageSweep(a) => run(Figure::BlockageSweep, a),
        Command::UsersSweep(a) => run(Figure::UsersSweep, a),
        Command::DelaySweep(a) => run(Figure::DelaySweep, a),
        Command::QueueValidate(a) => run(Figure::QueueValidate, a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match e.downcast_ref::<Error>() {
                Some(Error::Config(diags)) => eprintln!("invalid configuration ({e}):\n{diags}"),
                _ => eprintln!("error: {e:#}"),
            }
            ExitCode::FAILURE
        }
    }
}
