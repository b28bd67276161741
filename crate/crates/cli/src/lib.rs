//! The `astra` command line: sessions, bundle validation, trace replay,
//! audits, corpus generation and the studio host.

use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;

use astra_core::config::PlayerMode;
use astra_core::harness::{GameKind, JitterSpec};
use astra_core::orchestrator::Mode;
use astra_core::Execution;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

mod commands;
mod error;
pub mod studio;

pub use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "astra", version, about = "Accessibility runtime for 2D games")]
pub struct Cli {
    /// More log output on stderr (repeat for more)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a session against a live, recorded or simulated game
    Run(RunArgs),
    /// Check a configuration bundle and print its findings
    Validate {
        #[arg(long)]
        bundle: PathBuf,
    },
    /// Replay a recorded trace through a session; scores detections when the
    /// trace carries a truth.json
    Replay(ReplayArgs),
    /// Run a scenario script, or navigation and action audits over a game
    Audit(AuditArgs),
    /// Generate a ground-truthed template-matching corpus
    GenCorpus(GenCorpusArgs),
    /// Write the configuration bundle of a simulated game
    SimBundle {
        #[arg(long)]
        game: GameKind,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        scale: u32,
    },
    /// Print the navigation grid of an element map or a grid fixture
    PreviewGrid {
        map: PathBuf,
        /// Row tolerance; a fixture's own tolerance wins when omitted
        #[arg(long)]
        tolerance: Option<f64>,
        /// Compare against the fixture's expected rows
        #[arg(long)]
        check: bool,
        #[arg(long)]
        json: bool,
    },
    /// Serve the annotation studio and accept bundle exports on POST /export
    ServeStudio(StudioArgs),
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Bundle directory; optional for simulated sources
    #[arg(long)]
    pub bundle: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ProfileArg::Blind)]
    pub profile: ProfileArg,
    #[arg(long, default_value = "full")]
    pub mode: Mode,
    /// live, trace:<dir> or sim:<game>
    #[arg(long)]
    pub source: SourceSpec,
    /// Frames to draw from a simulated source
    #[arg(long, default_value_t = 60)]
    pub frames: usize,
    #[arg(long, default_value_t = 100)]
    pub step_ms: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub scale: u32,
    /// Persistent description cache file
    #[arg(long)]
    pub cache: Option<PathBuf>,
    #[arg(long)]
    pub title: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ReplayArgs {
    #[arg(long)]
    pub trace: PathBuf,
    #[arg(long)]
    pub bundle: PathBuf,
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, default_value = "full")]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = ProfileArg::Blind)]
    pub profile: ProfileArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    #[arg(long, conflicts_with_all = ["game", "scene"], required_unless_present = "game")]
    pub scenario: Option<PathBuf>,
    /// Audit every scene of a simulated game instead of a script
    #[arg(long)]
    pub game: Option<GameKind>,
    #[arg(long, requires = "game")]
    pub scene: Option<String>,
    #[arg(long, default_value = "full")]
    pub mode: Mode,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Report file; defaults to report.json in the output directory
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct GenCorpusArgs {
    #[arg(long)]
    pub game: GameKind,
    #[arg(long, default_value_t = 119)]
    pub n: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = JitterArg::None)]
    pub jitter: JitterArg,
    #[arg(long, default_value_t = 1)]
    pub scale: u32,
}

#[derive(Args, Debug)]
pub struct StudioArgs {
    /// 0 picks a free port
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Directory with the built studio
    #[arg(long, default_value = "studio/dist")]
    pub root: PathBuf,
    /// Accepted bundles land in <export-dir>/<game_id>
    #[arg(long, default_value = "studio-export")]
    pub export_dir: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Where session.jsonl and speech.jsonl go
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = ExecArg::Parallel)]
    pub exec: ExecArg,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileArg {
    Blind,
    #[value(name = "low_vision")]
    LowVision,
}

impl From<ProfileArg> for PlayerMode {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Blind => PlayerMode::Blind,
            ProfileArg::LowVision => PlayerMode::LowVision,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecArg {
    Parallel,
    Sequential,
}

impl From<ExecArg> for Execution {
    fn from(e: ExecArg) -> Self {
        match e {
            ExecArg::Parallel => Execution::Parallel,
            ExecArg::Sequential => Execution::Sequential,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum JitterArg {
    None,
    Standard,
}

impl From<JitterArg> for JitterSpec {
    fn from(j: JitterArg) -> Self {
        match j {
            JitterArg::None => JitterSpec::NONE,
            JitterArg::Standard => JitterSpec::STANDARD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceSpec {
    Live,
    Trace(PathBuf),
    Sim(GameKind),
}

impl FromStr for SourceSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            None if s == "live" => Ok(SourceSpec::Live),
            Some(("trace", dir)) if !dir.is_empty() => Ok(SourceSpec::Trace(dir.into())),
            Some(("sim", game)) => game.parse().map(SourceSpec::Sim).map_err(|e| e.to_string()),
            _ => Err(format!("expected live, trace:<dir> or sim:<game>, got {s:?}")),
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    init_tracing(cli.verbose);
    match commands::dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Usage(_) = e {
                eprintln!("{}", Cli::command().render_usage());
            }
            e.exit_code()
        }
    }
}

fn init_tracing(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let filter = tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| level.into());
    let _ = tracing_subscriber::fmt().with_env_filter(filter).with_writer(std::io::stderr).try_init();
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn source_specs() {
        assert_eq!("live".parse(), Ok(SourceSpec::Live));
        assert_eq!("trace:runs/a".parse(), Ok(SourceSpec::Trace("runs/a".into())));
        assert_eq!("sim:uno".parse(), Ok(SourceSpec::Sim(GameKind::Card)));
        assert_eq!("sim:merge".parse(), Ok(SourceSpec::Sim(GameKind::Merge)));
        assert!("sim:chess".parse::<SourceSpec>().is_err());
        assert!("trace:".parse::<SourceSpec>().is_err());
        assert!("camera".parse::<SourceSpec>().is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_cli(["astra"]), 2);
        assert_eq!(run_cli(["astra", "validate"]), 2);
        assert_eq!(run_cli(["astra", "run", "--source", "sim:chess"]), 2);
        assert_eq!(run_cli(["astra", "run", "--source", "sim:card", "--mode", "turbo"]), 2);
        assert_eq!(run_cli(["astra", "audit", "--scenario", "a.json", "--game", "card"]), 2);
    }

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
