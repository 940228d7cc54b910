//! Command-line interface to the ultraproduct engine.
//!
//! Exit codes: 0 success, 2 parse error, 3 evaluation cap exceeded,
//! 4 inconsistent filter base, 1 anything else. Diagnostics go to stderr;
//! stdout carries only the report.

mod commands;
mod exprs;
mod report;
mod selftest;
mod session;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ultraprod::Error;

use commands::{check_window, Ctx};

const GRAMMAR_HELP: &str = "\
EXPRESSION GRAMMARS
  formulas   formula := (\"exists\"|\"forall\") var \".\" formula | imp
             imp := disj [\"->\" formula]      disj := conj {\"|\" conj}
             conj := neg {\"&\" neg}           neg := \"!\" neg | atom
             atom := term (\"=\"|\"!=\") term | \"(\" formula \")\"
             term := over + - * ( ) 0 1 int-literal var; precedence ! > & > | > ->
             Unicode forms are accepted; output is ASCII.
  families   Fp | Z/<n> | Zp^<k> | const:Z/<n>
  filters    generic | principal:<prime> | constrained   (--assume SET builds a base)
  sets       all | {2, 3} | (1 mod 4) | (1, 5 mod 12), with + {..} / - {..} corrections
  rules      polynomials in p over the rationals, e.g. (p^2 - 1)/2 ; except {2: 7}
  sequences  terms \"coeff x^exp\": x + (p - 1), (2)x^2 - x, x^[p]; suffix / deg<=K
             or / count<=K declares the filtration step; sum_{i<=p} x^i is the
             canonical unbounded example

ENVIRONMENT
  ULTRAPROD_WINDOW           default sampling window (primes up to the bound)
  ULTRAPROD_DIRICHLET_BOUND  witness search bound for retained congruence classes

EXIT CODES
  0 ok, 2 parse error, 3 evaluation cap exceeded, 4 inconsistent filter base";

#[derive(Parser)]
#[command(
    name = "ultraprod",
    version,
    about = "Evaluate first-order sentences over prime-indexed ring families, classify truth \
             under ultrafilter specifications, compute in definable ultraproduct fragments, \
             and build protoproducts of filtered polynomial rings",
    after_long_help = GRAMMAR_HELP
)]
struct Cli {
    /// Emit a machine-readable JSON report on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Sampling window: primes up to this bound (default 1000, or
    /// ULTRAPROD_WINDOW).
    #[arg(long, global = true)]
    window: Option<u64>,
    /// Definable set the non-principal ultrafilter is assumed to contain
    /// (repeatable; builds a constrained filter).
    #[arg(long = "assume", global = true)]
    assume: Vec<String>,
    /// Per-quantifier evaluation cap in element tuples (default 100000).
    #[arg(long, global = true)]
    cap: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a sentence over a family under a filter specification.
    Eval {
        /// Family descriptor: Fp, Z/n, Zp^k, const:Z/n.
        family: String,
        /// Sentence, e.g. "exists x. x*x = -1".
        formula: String,
        /// Filter: generic, principal:P, constrained.
        filter: String,
        /// Include the per-prime truth bitmap in the report.
        #[arg(long)]
        bitmap: bool,
    },
    /// Classify a definable set against a filter specification.
    Classify {
        /// Set literal, e.g. "(1 mod 4) + {2} - {5}".
        set: String,
        filter: String,
    },
    /// Element operations: eq, inv, residue, compare, const, add, mul, sub, neg.
    Elem {
        /// e.g. "eq (p) (0) @Fp generic" or "residue (p) mod 4".
        expr: String,
    },
    /// Protoproducts of filtered polynomial-ring families.
    Proto {
        #[command(subcommand)]
        sub: ProtoCommand,
    },
    /// Compare a sentence across two families and report exceptional primes.
    Transfer {
        family_a: String,
        family_b: String,
        formula: String,
    },
    /// Run the seeded property harness.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Replay a JSON session file to a single deterministic report.
    Session { file: PathBuf },
}

#[derive(Subcommand)]
enum ProtoCommand {
    /// Membership of a sequence in both filtrations.
    Check {
        /// Sequence literal, e.g. "x + (p - 1)" or "sum_{i<=p} x^i".
        sequence: String,
    },
    /// Collapse a degree-bounded sequence to a polynomial over the
    /// ultraproduct field.
    Collapse {
        /// e.g. "x + (p - 1) / deg<=1".
        sequence: String,
    },
    /// Multiply two degree-bounded sequences after collapsing.
    Mul { a: String, b: String },
    /// Multiply two count-bounded sequences as ultra monomial sums.
    MonoMul { a: String, b: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Syntax { .. }
        | Error::UnboundVariable { .. }
        | Error::ShadowedVariable { .. }
        | Error::NotPrime(_)
        | Error::InvalidRule { .. } => 2,
        Error::CapExceeded { .. } | Error::StructureTooLarge { .. } => 3,
        Error::InconsistentBase { .. } => 4,
        _ => 1,
    }
}

fn default_window() -> u64 {
    std::env::var("ULTRAPROD_WINDOW")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(1000)
}

fn emit<T: serde::Serialize>(json: bool, report: &T, text: impl FnOnce() -> String) {
    if json {
        println!(
            "{}",
            serde_json::to_string(report).expect("reports serialize")
        );
    } else {
        println!("{}", text());
    }
}

fn run(cli: &Cli) -> ultraprod::Result<()> {
    let window = check_window(cli.window.unwrap_or_else(default_window))?;
    let mut ctx = Ctx::new(window, &cli.assume)?;
    if let Some(cap) = cli.cap {
        ctx.opts.quantifier_cap = cap;
    }
    match &cli.command {
        Command::Eval {
            family,
            formula,
            filter,
            bitmap,
        } => {
            let report = commands::cmd_eval(&ctx, family, formula, filter, *bitmap)?;
            emit(cli.json, &report, || report.text());
        }
        Command::Classify { set, filter } => {
            let report = commands::cmd_classify(&ctx, set, filter)?;
            emit(cli.json, &report, || report.text());
        }
        Command::Elem { expr } => {
            let report = commands::cmd_elem(&ctx, expr)?;
            emit(cli.json, &report, || report.text());
        }
        Command::Proto { sub } => {
            let report = match sub {
                ProtoCommand::Check { sequence } => commands::cmd_proto_check(sequence)?,
                ProtoCommand::Collapse { sequence } => commands::cmd_proto_collapse(sequence)?,
                ProtoCommand::Mul { a, b } => commands::cmd_proto_mul(a, b)?,
                ProtoCommand::MonoMul { a, b } => commands::cmd_proto_mono_mul(a, b)?,
            };
            emit(cli.json, &report, || report.text());
        }
        Command::Transfer {
            family_a,
            family_b,
            formula,
        } => {
            let report = commands::cmd_transfer(&ctx, family_a, family_b, formula)?;
            emit(cli.json, &report, || report.text());
        }
        Command::Selftest { seed } => {
            let report = selftest::run(*seed, window)?;
            emit(cli.json, &report, || report.text());
            if !report.all_passed {
                return Err(Error::Unsupported {
                    msg: "selftest failed".into(),
                });
            }
        }
        Command::Session { file } => {
            let text = std::fs::read_to_string(file).map_err(|e| Error::Unsupported {
                msg: format!("cannot read session file: {e}"),
            })?;
            match session::run(&text, window)? {
                session::SessionOutput::Json(report) => println!(
                    "{}",
                    serde_json::to_string(&report).expect("reports serialize")
                ),
                session::SessionOutput::Text(lines) => println!("{lines}"),
            }
        }
    }
    Ok(())
}
