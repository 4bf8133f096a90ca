use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use fwl_cli::{execute, init_threads, rerun, CliError, CommandKind, RunConfig};

#[derive(Parser)]
#[command(
    name = "fwl",
    version,
    about = "fractal Weyl laboratory: limit sets, zeta zeros, resonance counts, cylinder flow"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct RunArgs {
    /// JSON config describing the run (one config per run)
    #[arg(long)]
    config: PathBuf,
    /// directory for outputs and the manifest
    #[arg(long, default_value = "fwl-out")]
    out_dir: PathBuf,
    /// worker threads for library computations; output assembly stays
    /// single-threaded
    #[arg(long)]
    threads: Option<usize>,
    /// override the config's word_length
    #[arg(long)]
    word_length: Option<usize>,
    /// override the config's k_max
    #[arg(long)]
    k_max: Option<u32>,
}

#[derive(Subcommand)]
enum Cmd {
    /// sample a limit set and render it
    Limitset(RunArgs),
    /// box-counting dimension of a limit set
    Dimension(RunArgs),
    /// dimension estimate from the zeta function's real zero
    Delta(RunArgs),
    /// locate zeta zeros inside a rectangle
    Zeros(RunArgs),
    /// count zeros in sliding windows along the axis
    Count(RunArgs),
    /// count zeros and fit the growth exponent
    Weyl(RunArgs),
    /// integrate cylinder trajectories
    CylinderFlow(RunArgs),
    /// verify cylinder model identities on a grid
    CylinderCheck(RunArgs),
    /// replay a recorded run and compare output digests
    ManifestRerun {
        /// manifest.json from a previous run
        #[arg(long)]
        manifest: PathBuf,
        /// where to replay (default: <manifest dir>/rerun)
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn run_command(kind: CommandKind, args: RunArgs) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(&args.config)?;
    if args.word_length.is_some() {
        cfg.word_length = args.word_length;
    }
    if args.k_max.is_some() {
        cfg.k_max = args.k_max;
    }
    if args.threads.is_some() {
        cfg.threads = args.threads;
    }
    init_threads(cfg.threads);
    let manifest = execute(kind, &cfg, &args.out_dir)?;
    println!(
        "{}: wrote {} outputs to {} in {:.2}s",
        manifest.command,
        manifest.outputs.len(),
        args.out_dir.display(),
        manifest.wall_time_seconds
    );
    Ok(())
}

fn run() -> Result<(), CliError> {
    match Cli::parse().command {
        Cmd::Limitset(a) => run_command(CommandKind::Limitset, a),
        Cmd::Dimension(a) => run_command(CommandKind::Dimension, a),
        Cmd::Delta(a) => run_command(CommandKind::Delta, a),
        Cmd::Zeros(a) => run_command(CommandKind::Zeros, a),
        Cmd::Count(a) => run_command(CommandKind::Count, a),
        Cmd::Weyl(a) => run_command(CommandKind::Weyl, a),
        Cmd::CylinderFlow(a) => run_command(CommandKind::CylinderFlow, a),
        Cmd::CylinderCheck(a) => run_command(CommandKind::CylinderCheck, a),
        Cmd::ManifestRerun { manifest, out_dir } => {
            let report = rerun(&manifest, out_dir)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(())
        }
    }
}

fn main() {
    if let Err(e) = run() {
        eprintln!("{}", e.stderr_payload());
        std::process::exit(e.exit_code());
    }
}
