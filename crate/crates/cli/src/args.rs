use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use locfaults_core::solver::Domain;

#[derive(Debug, Parser)]
#[command(name = "locfaults", version, about = "Localize faults in a program from a counterexample")]
#[command(args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Replay the configurations listed in a TOML manifest.
    Bench {
        manifest: PathBuf,
        /// Omit the timing columns.
        #[arg(long)]
        no_timings: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Program source file.
    #[arg(required = true)]
    pub program: Option<PathBuf>,

    /// Counterexample, e.g. `i=0,j=1` or `tab=3,2,1,0`.
    #[arg(long, conflicts_with_all = ["ce_file", "find_ce"])]
    pub ce: Option<String>,

    /// JSON object mapping parameters to integers or integer arrays.
    #[arg(long, conflicts_with = "find_ce")]
    pub ce_file: Option<PathBuf>,

    /// Search for a counterexample, trying at most this many inputs.
    #[arg(long, value_name = "BUDGET")]
    pub find_ce: Option<usize>,

    /// Values tried by --find-ce.
    #[arg(long, value_name = "LO..HI", default_value = "-8..8", value_parser = parse_domain, allow_hyphen_values = true)]
    pub ce_range: Domain,

    /// Loop unrolling bound.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub unroll: u32,

    /// Largest number of deviated conditions.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(0..=8))]
    pub max_deviations: u8,

    /// Largest MCS size.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=8))]
    pub max_mcs_size: u8,

    /// Skip deviations at conditions that already ended a smaller correcting set.
    #[arg(long, value_enum, default_value = "on")]
    pub marking: Switch,

    /// Domain of every solver variable.
    #[arg(long, value_name = "LO..HI", default_value = "-32768..32767", value_parser = parse_domain, allow_hyphen_values = true)]
    pub domain: Domain,

    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,

    /// Write the unrolled, renamed CFG in Graphviz format.
    #[arg(long, value_name = "PATH")]
    pub dot: Option<PathBuf>,

    /// Leave timings out of the report.
    #[arg(long)]
    pub no_timings: bool,
}

pub fn parse_domain(s: &str) -> Result<Domain, String> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| format!("expected LO..HI, got `{s}`"))?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("`{lo}`: {e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("`{hi}`: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok(Domain::new(lo, hi))
}
