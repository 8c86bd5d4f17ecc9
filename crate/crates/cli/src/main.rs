use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod load;

use load::Failure;

#[derive(Parser)]
#[command(
    name = "causal-unfold",
    version,
    about = "Event structures with disjunctive causes"
)]
struct Cli {
    /// Maximum number of events in an input structure.
    #[arg(long, global = true)]
    cap_events: Option<usize>,
    /// Maximum number of configurations or extremal classes.
    #[arg(long, global = true)]
    cap_configs: Option<usize>,
    /// Maximum number of maps produced by an enumeration.
    #[arg(long, global = true)]
    cap_maps: Option<usize>,
    /// Emit DOT instead of JSON where the result is a structure.
    #[arg(long, global = true)]
    dot: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LimitCategory {
    Ese,
    Edc,
    Family,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MapCategory {
    Family,
    General,
    Ese,
    Prime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Pullback,
    PseudoPullback,
    Bipullback,
}

#[derive(Subcommand)]
enum Command {
    /// Check a structure or realisation file against its axioms.
    Validate { file: PathBuf },
    /// The family of configurations.
    Configs { file: PathBuf },
    /// The causal unfolding as an ese.
    Unfold { file: PathBuf },
    /// The collapse of the configuration family to a general event structure.
    Collapse { file: PathBuf },
    /// Prime extremal realisations and the order of extremal classes.
    Extremals { file: PathBuf },
    /// Project an ese on an equivalence-closed set of events.
    Hide {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        visible: Vec<String>,
    },
    /// The largest part satisfying Ax0, Ax1 or Ax2.
    RestrictAx {
        file: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=2))]
        level: u8,
    },
    /// Ax0-Ax2 and the structural axioms of the unfolding.
    CheckAxioms { file: PathBuf },
    /// Stability, and the unambiguous family and its edc when stable.
    Stable { file: PathBuf },
    /// Product of two structures.
    Product {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, value_enum, default_value = "family")]
        category: LimitCategory,
    },
    /// Pullback of two maps with a common target.
    Pullback {
        /// Map file `f: A -> C`.
        f: PathBuf,
        /// Map file `g: B -> C`.
        g: PathBuf,
        #[arg(long, value_enum, default_value = "family")]
        category: LimitCategory,
    },
    /// Pseudo pullback of two maps with a common target.
    PseudoPullback {
        f: PathBuf,
        g: PathBuf,
        #[arg(long, value_enum, default_value = "family")]
        category: LimitCategory,
    },
    /// Check a map file against its source and target.
    CheckMap {
        map: PathBuf,
        #[arg(long, value_enum, default_value = "family")]
        category: MapCategory,
    },
    /// Exhaustive checks on small instances.
    Oracle {
        #[command(subcommand)]
        check: OracleCheck,
    },
    /// Replay the argument that the fixture cospan has no pullback of ese's.
    ReplayAppendixB,
    /// DOT for a structure or realisation file.
    ExportDot { file: PathBuf },
}

#[derive(Subcommand)]
pub enum OracleCheck {
    /// Every map between two structures.
    Maps {
        source: PathBuf,
        target: PathBuf,
        #[arg(long, value_enum, default_value = "family")]
        category: MapCategory,
    },
    /// Universality of the counit of the unfolding at a family.
    Counit {
        family: PathBuf,
        /// Test ese's.
        #[arg(required = true)]
        tests: Vec<PathBuf>,
    },
    /// Universality of the unit of the collapse at a general event structure.
    Unit {
        general: PathBuf,
        /// Test structures, taken as families.
        #[arg(required = true)]
        tests: Vec<PathBuf>,
    },
    /// Universality of an apex over a cospan.
    Span {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Map file from the apex to A.
        #[arg(long)]
        left: PathBuf,
        /// Map file from the apex to B.
        #[arg(long)]
        right: PathBuf,
        /// Map file `f: A -> C`.
        #[arg(long)]
        f: PathBuf,
        /// Map file `g: B -> C`.
        #[arg(long)]
        g: PathBuf,
        /// Test ese's; every commuting cone from each is checked.
        #[arg(required = true)]
        tests: Vec<PathBuf>,
    },
    /// Compare the local and definitional extremality checks on every realisation.
    Extremal {
        file: PathBuf,
        #[arg(long, default_value_t = 5)]
        nodes: usize,
    },
}

fn run(cli: Cli) -> Result<String, Failure> {
    let caps = load::caps(cli.cap_events, cli.cap_configs, cli.cap_maps)?;
    let ctx = commands::Ctx { caps, dot: cli.dot };
    match cli.command {
        Command::Validate { file } => commands::validate(&ctx, &file),
        Command::Configs { file } => commands::configs(&ctx, &file),
        Command::Unfold { file } => commands::unfold(&ctx, &file),
        Command::Collapse { file } => commands::collapse(&ctx, &file),
        Command::Extremals { file } => commands::extremals(&ctx, &file),
        Command::Hide { file, visible } => commands::hide(&ctx, &file, &visible),
        Command::RestrictAx { file, level } => commands::restrict_ax(&ctx, &file, level),
        Command::CheckAxioms { file } => commands::check_axioms(&ctx, &file),
        Command::Stable { file } => commands::stable(&ctx, &file),
        Command::Product {
            left,
            right,
            category,
        } => commands::product(&ctx, &left, &right, category),
        Command::Pullback { f, g, category } => commands::pullback(&ctx, &f, &g, category, false),
        Command::PseudoPullback { f, g, category } => {
            commands::pullback(&ctx, &f, &g, category, true)
        }
        Command::CheckMap { map, category } => commands::check_map(&ctx, &map, category),
        Command::Oracle { check } => commands::oracle(&ctx, check),
        Command::ReplayAppendixB => commands::replay(&ctx),
        Command::ExportDot { file } => commands::export_dot(&file),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            if let Some(out) = &failure.stdout {
                print!("{out}");
            }
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
