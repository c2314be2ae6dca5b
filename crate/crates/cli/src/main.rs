mod commands;
mod params;

use std::net::SocketAddr;
use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use params::ParamArgs;

/// Colorize manga and line art from a coarse color hint.
#[derive(Debug, Parser)]
#[command(name = "mangahue", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the full pipeline. With a directory as --target, every image in
    /// it is colorized; hints (and optional line art and strokes) are
    /// matched by file stem in the directories given for them.
    Colorize {
        /// Monochrome page, or a directory of pages
        #[arg(long)]
        target: PathBuf,
        /// Coarse colorization at any resolution, or a directory of them
        #[arg(long)]
        hint: PathBuf,
        /// Clean line drawing to use instead of extracting one
        #[arg(long)]
        lineart: Option<PathBuf>,
        /// Strokes JSON: [{"width": 2, "points": [[x, y], ...]}, ...]
        #[arg(long)]
        strokes: Option<PathBuf>,
        /// The target is clean line art: binarize it directly and skip shading
        #[arg(long)]
        no_screentones: bool,
        /// Write every intermediate stage into this directory
        #[arg(long, value_name = "DIR")]
        dump_stages: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
        /// Output PNG, or directory in batch mode
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Extract the line art only.
    Lineart {
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        no_screentones: bool,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Segment the page and write a false-color label preview.
    Segment {
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        lineart: Option<PathBuf>,
        #[arg(long)]
        strokes: Option<PathBuf>,
        #[arg(long)]
        no_screentones: bool,
        /// Also write the run-length label sidecar JSON here
        #[arg(long, value_name = "FILE")]
        labels: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Reduce an image to k colors with seeded k-means.
    Quantize {
        #[arg(long)]
        input: PathBuf,
        #[arg(
            long,
            value_name = "K",
            allow_negative_numbers = true,
            help = "Number of colors [permissible > 0; recommended 5-20, optimum often 5-12]"
        )]
        colors: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Line art whose ink pixels are left out of clustering and kept as is
        #[arg(long)]
        edges: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Serve the tuner HTTP API.
    Serve {
        #[arg(long, env = "MANGAHUE_ADDR", default_value = mangahue_tuner::DEFAULT_ADDR)]
        addr: SocketAddr,
        #[arg(long, env = "MANGAHUE_MAX_SESSIONS", default_value_t = NonZeroUsize::new(mangahue_tuner::DEFAULT_MAX_SESSIONS).unwrap())]
        max_sessions: NonZeroUsize,
    },
}

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments; exit status 2.
    Usage(String),
    /// Processing or I/O failure; exit status 1.
    Failed(String),
}

impl From<mangahue::Error> for CliError {
    fn from(e: mangahue::Error) -> Self {
        match e {
            mangahue::Error::Param { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Colorize {
            target,
            hint,
            lineart,
            strokes,
            no_screentones,
            dump_stages,
            params,
            output,
        } => commands::colorize(commands::ColorizeArgs {
            target,
            hint,
            lineart,
            strokes,
            has_screentones: !no_screentones,
            dump_stages,
            params,
            output,
        }),
        Command::Lineart {
            target,
            no_screentones,
            params,
            output,
        } => commands::lineart(&target, !no_screentones, &params, &output),
        Command::Segment {
            target,
            lineart,
            strokes,
            no_screentones,
            labels,
            params,
            output,
        } => commands::segment(commands::SegmentArgs {
            target,
            lineart,
            strokes,
            has_screentones: !no_screentones,
            labels,
            params,
            output,
        }),
        Command::Quantize {
            input,
            colors,
            seed,
            edges,
            output,
        } => commands::quantize(&input, colors, seed, edges.as_deref(), &output),
        Command::Serve { addr, max_sessions } => {
            commands::serve(mangahue_tuner::Config { addr, max_sessions })
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
