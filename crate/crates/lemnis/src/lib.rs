//! File formats, run configuration and subcommands of the `lemnis` tool.
//! The numerics live in `lemnis-core`.

pub mod commands;
pub mod config;
pub mod formats;
pub mod svg;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{Outcome, Status, Suite};
pub use config::{Knobs, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "lemnis",
    version,
    about = "Lemniscates, capacity and harmonic measure of rational functions"
)]
pub struct Cli {
    /// TOML file with default knobs; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Print a JSON summary instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(flatten)]
    pub knobs: Knobs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trace {|R| >= t}; writes lemniscate.svg and lemniscate.json.
    Trace,
    /// Capacity of each component and of the whole set; writes capacity.csv and measure.json.
    Cap,
    /// Harmonic measure of boundary arcs seen from a source; writes hm.json.
    Hm {
        /// `inf` or `x,y`.
        #[arg(long, default_value = "inf")]
        source: String,
    },
    /// Run a verification suite; exit 0 on pass, 1 on a failed assertion, 2 on a numerical failure.
    Verify {
        #[arg(value_enum)]
        which: Suite,
    },
    /// Sweep t^{1/m} cap(K_t) over levels; writes schwarz.csv and schwarz.svg.
    Sweep,
}

/// Run a parsed command line.
pub fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let cfg = RunConfig::resolve(cli.config.as_deref(), &cli.knobs)?;
    match &cli.command {
        Command::Trace => commands::cmd_trace(&cfg),
        Command::Cap => commands::cmd_cap(&cfg),
        Command::Hm { source } => commands::cmd_hm(&cfg, commands::parse_source(source)?),
        Command::Verify { which } => commands::cmd_verify(&cfg, *which),
        Command::Sweep => commands::cmd_sweep(&cfg),
    }
}
