mod commands;
mod error;
mod format;
mod inputs;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nsot_core::compose::ViewKind;
use nsot_core::ns_box::BoxShape;

use commands::{Inputs, Report};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "nsot", version, about = "Non-signaling boxes, channels and oblivious transfer analysis")]
struct Cli {
    /// Numerical tolerance for every equality test.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum View {
    Receiver,
    Receiver1,
    Receiver2,
}

impl From<View> for ViewKind {
    fn from(v: View) -> Self {
        match v {
            View::Receiver => ViewKind::Receiver,
            View::Receiver1 => ViewKind::Receiver1,
            View::Receiver2 => ViewKind::Receiver2,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the non-signaling constraints of a box.
    CheckNs {
        #[arg(long = "box", value_name = "PATH|builtin:NAME")]
        box_src: String,
    },
    /// Classify a MAC or BC box as trivial or nontrivial.
    Classify {
        #[arg(long = "box", value_name = "PATH|builtin:NAME")]
        box_src: String,
        #[arg(long, value_name = "uniform|PATH", default_value = "uniform")]
        inputs: String,
        /// Classify the composed resource over this channel instead of the box alone.
        #[arg(long, value_name = "PATH|builtin:NAME")]
        channel: Option<String>,
    },
    /// Receiver views of a box composed with a channel.
    Compose {
        #[arg(long = "box", value_name = "PATH|builtin:NAME")]
        box_src: String,
        #[arg(long, value_name = "PATH|builtin:NAME")]
        channel: String,
        #[arg(long, value_enum, default_value = "receiver")]
        view: View,
    },
    /// Pairwise total variation between receiver views.
    Leakage {
        #[arg(long = "box", value_name = "PATH|builtin:NAME")]
        box_src: String,
        #[arg(long, value_name = "PATH|builtin:NAME")]
        channel: String,
        #[arg(long, value_enum, default_value = "receiver")]
        view: View,
    },
    /// Distinguishing curve over repeated independent uses.
    Amplify {
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        n_max: u32,
    },
    /// Local and non-signaling values of a game.
    Game {
        #[arg(long, value_name = "PATH|builtin:NAME")]
        game: String,
        #[arg(long, value_name = "SHAPE")]
        shape: String,
    },
    /// Largest receiver-view distance between two sender input pairs over NS boxes.
    Search {
        #[arg(long, value_name = "SHAPE")]
        shape: String,
        #[arg(long, value_name = "PATH|builtin:NAME")]
        channel: String,
        #[arg(long, value_name = "(i1,i2)|(i1',i2')")]
        pair: String,
    },
    /// Exhaustive security evaluation of a protocol scenario.
    ProtocolEval {
        #[arg(long, value_name = "PATH|builtin:NAME")]
        scenario: String,
    },
}

fn parse_shape(raw: &str) -> Result<BoxShape, CliError> {
    raw.parse().map_err(|e: nsot_core::Error| CliError::invalid("--shape", e.to_string()))
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let tol = cli.tolerance;
    if !(tol.is_finite() && tol > 0.0 && tol < 1.0) {
        return Err(CliError::invalid("--tolerance", format!("{tol} is not in (0, 1)")));
    }
    let load_box = |src: &str| inputs::load_box("--box", src).map(|b| b.with_tolerance(tol));
    let load_channel = |src: &str| inputs::load_channel("--channel", src).map(|c| c.with_tolerance(tol));
    match &cli.command {
        Command::CheckNs { box_src } => commands::check_ns_report(&load_box(box_src)?),
        Command::Classify { box_src, inputs: dist, channel } => {
            let b = load_box(box_src)?;
            let w = channel.as_deref().map(load_channel).transpose()?;
            let dist = match dist.as_str() {
                "uniform" => Inputs::Uniform,
                path => Inputs::Given(inputs::load_joint("--inputs", path)?.set_tolerance(tol)),
            };
            commands::classify_report(&b, dist, w.as_ref())
        }
        Command::Compose { box_src, channel, view } => {
            let (b, w) = (load_box(box_src)?, load_channel(channel)?);
            commands::compose_report(&b, &w, (*view).into())
        }
        Command::Leakage { box_src, channel, view } => {
            let (b, w) = (load_box(box_src)?, load_channel(channel)?);
            commands::leakage_report(&b, &w, (*view).into())
        }
        Command::Amplify { epsilon, n_max } => commands::amplify_report(*epsilon, *n_max),
        Command::Game { game, shape } => {
            let g = inputs::load_game("--game", game)?;
            let shape = parse_shape(shape)?;
            commands::game_report(&g, &shape)
        }
        Command::Search { shape, channel, pair } => {
            let shape = parse_shape(shape)?;
            let w = load_channel(channel)?;
            let pair = inputs::parse_pair(pair)?;
            commands::search_report(&shape, &w, pair)
        }
        Command::ProtocolEval { scenario } => {
            let s = inputs::load_scenario("--scenario", scenario)?;
            commands::protocol_report(&s, tol)
        }
    }
}

/// Write through a temporary file in the target directory so a failed run
/// never leaves a partial report behind.
fn write_output(path: &Path, text: &str) -> Result<(), CliError> {
    let err = |source| CliError::Write { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(text.as_bytes()).map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|report| {
        let text = match cli.format {
            Format::Json => format::json(&report.json),
            Format::Csv => report.table.to_csv(),
        };
        match &cli.output {
            Some(path) => write_output(path, &text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nsot: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
