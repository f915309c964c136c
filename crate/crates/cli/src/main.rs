//! `dichotome`: tone-dichotomy enhancement from the command line.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Runtime failures exit 1; validation failures exit 2 (like usage errors).
pub enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(err: anyhow::Error) -> Self {
        CliError::Runtime(err)
    }
}

pub type CliResult = Result<(), CliError>;

#[derive(Parser)]
#[command(name = "dichotome", version, about = "Tone-dichotomy image processing")]
struct Cli {
    /// Worker thread cap (defaults to all cores).
    #[arg(long, global = true, env = "DICHOTOME_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Dichotomy,
    Gamma,
    Plain,
}

#[derive(Subcommand)]
enum Command {
    /// Apply the dichotomy transform k*|x^g - x| to an image.
    Enhance {
        input: PathBuf,
        output: PathBuf,
        /// Gamma exponent (nonnegative, not 1).
        #[arg(long)]
        gamma: f64,
        /// Write the inversion record (JSON) next to the output.
        #[arg(long, value_name = "PATH")]
        save_record: Option<PathBuf>,
        /// Write the rendered slope class map (PNG).
        #[arg(long, value_name = "PATH")]
        save_classmap: Option<PathBuf>,
        /// Output bit depth; defaults to 16 for PNG (preserves precision
        /// for inversion) and 8 for JPEG.
        #[arg(long)]
        depth: Option<u8>,
    },
    /// Reconstruct the original image from an enhanced one and its record.
    Invert {
        enhanced: PathBuf,
        record: PathBuf,
        output: PathBuf,
    },
    /// Build the scale-space stack: per-cell responses, masks, aggregates,
    /// overlays, and a JSON manifest.
    Dogspace {
        input: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// TOML config file; flags below override its values.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "dichotomy")]
        variant: Variant,
        /// Comma-separated gamma list override.
        #[arg(long)]
        gammas: Option<String>,
        #[arg(long)]
        thr_plus: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        thr_minus: Option<f64>,
    },
    /// Patch-entropy grid, heatmap, and histogram of an image.
    Entropy {
        input: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Patch mesh as ROWSxCOLS.
        #[arg(long, default_value = "30x30")]
        mesh: String,
        /// Histogram bin count over [0, 8] bits.
        #[arg(long, default_value_t = 16)]
        bins: usize,
    },
    /// Gamma-sweep PSNR/SSIM benchmark over a paired low/normal dataset.
    Bench {
        /// Dataset directory containing low/ and high/ (or eval15/...).
        dataset: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Gamma grid: START:STEP:END or a comma-separated list.
        #[arg(long, default_value = "0.5:0.05:1.5")]
        gammas: String,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();

    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .expect("thread pool initialized once");
    }

    let result = match cli.command {
        Command::Enhance {
            input,
            output,
            gamma,
            save_record,
            save_classmap,
            depth,
        } => commands::enhance::run(&input, &output, gamma, save_record, save_classmap, depth),
        Command::Invert {
            enhanced,
            record,
            output,
        } => commands::invert::run(&enhanced, &record, &output),
        Command::Dogspace {
            input,
            out,
            config,
            variant,
            gammas,
            thr_plus,
            thr_minus,
        } => commands::dogspace::run(&input, &out, config, variant, gammas, thr_plus, thr_minus),
        Command::Entropy {
            input,
            out,
            mesh,
            bins,
        } => commands::entropy::run(&input, &out, &mesh, bins),
        Command::Bench {
            dataset,
            out,
            gammas,
        } => commands::bench::run(&dataset, &out, &gammas),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            match &err {
                CliError::Usage(msg) => eprintln!("error: {msg}"),
                CliError::Runtime(e) => eprintln!("error: {e:#}"),
            }
            ExitCode::from(err.code())
        }
    }
}
