use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use vmfcorr_cli::{emit, parse_config, run, CliError, ConfigError, Format, Mode, SweepConfig};

/// Correlation curves, fields, array matrices and radar tables for
/// von Mises-Fisher scattering channels.
#[derive(Debug, Parser)]
#[command(name = "vmfcorr", version)]
struct Args {
    mode: Mode,
    /// JSON config; the built-in scenario for the mode is used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    threads: Option<usize>,
}

fn load(args: &Args) -> Result<SweepConfig, CliError> {
    let Some(path) = &args.config else {
        return Ok(SweepConfig::defaults(args.mode));
    };
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        context: format!("reading {}", path.display()),
        source,
    })?;
    let config = parse_config(&text)?;
    let found = config.mode.mode();
    if found != args.mode {
        return Err(ConfigError::WrongMode {
            requested: args.mode.to_string(),
            found: found.to_string(),
        }
        .into());
    }
    Ok(config)
}

fn main_inner(args: Args) -> Result<(), CliError> {
    let mut config = load(&args)?;
    if let Some(format) = args.format {
        config.format = format;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = args.out {
        config.out = Some(out);
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Io {
        context: "starting worker threads".into(),
        source: std::io::Error::other(e),
    })?;
    let report = pool.install(|| run(&config))?;
    if let Some(v) = &report.validation {
        eprintln!("{v}");
    }
    emit(&report, config.format, config.out.as_deref())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match main_inner(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
