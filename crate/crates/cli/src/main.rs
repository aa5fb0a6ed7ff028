//! `blinkmorse`: calibrate, decode, replay, simulate and analyze blink Morse
//! sessions.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 empty or insufficient data,
//! 3 protocol error, 4 usage error or unsupported input.

mod commands;
mod config;
mod error;
mod source;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::EngineConfig;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "blinkmorse", version, about = "Blink-driven Morse code engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Derive detector thresholds from a short recording and write a config file.
    Calibrate(CalibrateArgs),
    /// Decode a live frame stream (stdin, file or TCP) into text.
    Decode(DecodeArgs),
    /// Decode a recorded frame or blink-event file.
    Replay(ReplayArgs),
    /// Generate a synthetic blink-event or frame stream for a message.
    Simulate(SimulateArgs),
    /// Summarize a trials log and write charts with their tables.
    Analyze(AnalyzeArgs),
    /// Write the bundled five-participant study as a trials log.
    Fixture(FixtureArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Frame source: a file path, or `-` for standard input.
    #[arg(long, value_name = "PATH", conflicts_with = "port")]
    source: Option<PathBuf>,
    /// Listen on 127.0.0.1:PORT for one client instead (0 picks a free port).
    #[arg(long)]
    port: Option<u16>,
}

#[derive(Debug, Args)]
struct TuningArgs {
    /// Settings file written by `calibrate`.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// EAR below this starts a closure. Also moves the open threshold unless
    /// --open-threshold is given.
    #[arg(long)]
    close_threshold: Option<f64>,
    #[arg(long)]
    open_threshold: Option<f64>,
    /// Seconds; shorter closures are dropped as noise.
    #[arg(long)]
    min_closure: Option<f64>,
    /// Seconds; shortest blink read as a dot.
    #[arg(long)]
    dot_min: Option<f64>,
    /// Seconds; shortest blink read as a dash.
    #[arg(long)]
    dash_min: Option<f64>,
    /// Seconds of pause after which the pending letter is committed.
    #[arg(long)]
    letter_gap: Option<f64>,
    /// Seconds of pause after which a word ends.
    #[arg(long)]
    word_gap: Option<f64>,
}

impl TuningArgs {
    fn resolve(&self) -> Result<EngineConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => EngineConfig::load(path)?,
            None => EngineConfig::default(),
        };
        let (d, t) = (&mut cfg.detector, &mut cfg.timing);
        if let Some(v) = self.close_threshold {
            d.open_threshold += v - d.close_threshold;
            d.close_threshold = v;
        }
        let overrides = [
            (self.open_threshold, &mut d.open_threshold),
            (self.min_closure, &mut d.min_closure_s),
            (self.dot_min, &mut t.dot_min_s),
            (self.dash_min, &mut t.dash_min_s),
            (self.letter_gap, &mut t.letter_gap_s),
            (self.word_gap, &mut t.word_gap_s),
        ];
        for (value, slot) in overrides {
            if let Some(v) = value {
                *slot = v;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct SessionArgs {
    /// Message the participant was asked to send; logs the trial when given.
    #[arg(long)]
    target: Option<String>,
    #[arg(long, default_value = "P1")]
    participant: String,
    /// Trial number; defaults to the participant's next one in the log.
    #[arg(long)]
    trial: Option<u32>,
    /// Directory receiving trials.csv and blinks.csv.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Pace file input at its recorded speed.
    #[arg(long)]
    realtime: bool,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Base settings; timing keys are carried over to the output.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Where to write the derived settings.
    #[arg(long, value_name = "PATH", default_value = "blinkmorse.conf")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct DecodeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    tuning: TuningArgs,
    #[command(flatten)]
    session: SessionArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReplayModeArg {
    /// Decide from the first line.
    Auto,
    Frames,
    Events,
}

#[derive(Debug, Args)]
struct ReplayArgs {
    /// Recorded frame or event file.
    #[arg(long, value_name = "PATH")]
    source: PathBuf,
    #[arg(long, value_enum, default_value_t = ReplayModeArg::Auto)]
    mode: ReplayModeArg,
    #[command(flatten)]
    tuning: TuningArgs,
    #[command(flatten)]
    session: SessionArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Events,
    Frames,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Text over A-Z, 0-9 and spaces.
    message: String,
    #[arg(long, value_enum, default_value_t = Emit::Frames)]
    emit: Emit,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    fps: Option<f64>,
    /// Standard deviation of Gaussian EAR noise.
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    dot: Option<f64>,
    #[arg(long)]
    dash: Option<f64>,
    /// Pause between symbols of a letter.
    #[arg(long)]
    intra_gap: Option<f64>,
    #[arg(long)]
    letter_gap: Option<f64>,
    #[arg(long)]
    word_gap: Option<f64>,
    #[arg(long)]
    open_ear: Option<f64>,
    #[arg(long)]
    closed_ear: Option<f64>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Trials log to summarize.
    #[arg(long, value_name = "PATH")]
    source: PathBuf,
    /// Directory for the charts and tables.
    #[arg(long, value_name = "DIR", default_value = "report")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct FixtureArgs {
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Calibrate(a) => commands::calibrate(a),
        Command::Decode(a) => commands::decode(a),
        Command::Replay(a) => commands::replay(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Analyze(a) => commands::analyze(a),
        Command::Fixture(a) => commands::fixture(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(4),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("blinkmorse: {e}");
            e.exit_code()
        }
    }
}
