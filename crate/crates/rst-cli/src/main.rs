use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rst::hfset::DEFAULT_CAP;
use rst::model::DEFAULT_BUDGET;
use rst_cli::commands::{self, ModelTarget};
use rst_cli::corpus::default_root;

#[derive(Parser)]
#[command(name = "rst", version, about = "Proof checker and finite models for a reduced set theory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a proof script against a theory (file or builtin name).
    Check { theory: String, proof: String },
    /// Print the primitive expansion of a proof script.
    Expand { theory: String, proof: String },
    /// List the derived rules.
    Rules,
    /// Eliminate defined symbols from a formula.
    Elaborate { theory: String, formula: String },
    /// Validity in the stage V_k.
    Model {
        k: usize,
        /// Report the axiom schemas.
        #[arg(long, conflicts_with = "formula")]
        axioms: bool,
        /// Restrict the report to these schemas.
        #[arg(long = "schema")]
        schemas: Vec<String>,
        /// A2 payloads for the report.
        #[arg(long = "payload")]
        payloads: Vec<String>,
        /// Check one formula.
        #[arg(long)]
        formula: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Evaluate a set expression.
    Hf {
        expr: String,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Check the proof corpus.
    Corpus {
        filter: Option<String>,
        #[arg(long)]
        root: Option<PathBuf>,
        /// Also run the semantic soundness audit in V2 and V3.
        #[arg(long)]
        audit: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match cli.command {
        Command::Check { theory, proof } => commands::check(&theory, &proof),
        Command::Expand { theory, proof } => commands::expand_proof(&theory, &proof),
        Command::Rules => commands::rules(),
        Command::Elaborate { theory, formula } => commands::elaborate(&theory, &formula),
        Command::Model { k, axioms, schemas, payloads, formula, budget } => {
            let target = match formula {
                Some(f) => ModelTarget::Formula(f),
                None if axioms || !schemas.is_empty() => ModelTarget::Axioms { schemas, payloads },
                None => {
                    eprintln!("model: give --axioms or --formula");
                    return ExitCode::from(2);
                }
            };
            commands::model(k, &target, budget)
        }
        Command::Hf { expr, cap } => commands::hf(&expr, cap),
        Command::Corpus { filter, root, audit } => {
            commands::corpus(&root.unwrap_or_else(default_root), filter.as_deref(), audit)
        }
    };
    let _ = write!(std::io::stdout().lock(), "{out}");
    ExitCode::from(out.status as u8)
}
