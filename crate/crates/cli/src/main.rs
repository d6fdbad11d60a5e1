use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use modewise::abstraction::{AbstractionOptions, BuiltinTable};
use modewise::interp::{sample_and_check, Limits, Program, SampleError};
use modewise::pipeline::{analyze_source, Analysis, AnalysisError, AnalysisOptions};
use modewise::report::{dump_iterates, Report};

#[derive(Parser)]
#[command(name = "modewise", version, about = "Backward groundness mode inference for Prolog")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Infer call and success modes for every predicate of a program.
    Analyze(AnalyzeArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(clap::Args)]
struct AnalyzeArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Print every least-fixpoint iterate.
    #[arg(long)]
    dump_lfp: bool,
    /// Print every greatest-fixpoint iterate.
    #[arg(long)]
    dump_gfp: bool,
    /// Builtin mode table to use instead of the shipped one.
    #[arg(long, value_name = "FILE")]
    builtins: Option<PathBuf>,
    /// Run N random queries per predicate against its inferred mode.
    #[arg(long, value_name = "N")]
    check: Option<usize>,
    #[arg(long, value_name = "S", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "D", default_value_t = 128)]
    max_depth: u32,
    /// Resolution steps per query before giving up.
    #[arg(long, value_name = "N", default_value_t = 10_000)]
    max_steps: usize,
    /// Include per-phase timings in text output.
    #[arg(long)]
    timing: bool,
    /// Treat calls to builtins missing from the table as never safe.
    #[arg(long)]
    allow_unknown_builtins: bool,
}

fn main() -> ExitCode {
    let Command::Analyze(args) = Cli::parse().command;
    match analyze(&args) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn diagnostic(file: &Path, e: &AnalysisError) -> String {
    match e.line() {
        Some(_) => format!("{}:{e}", file.display()),
        None => format!("{}: {e}", file.display()),
    }
}

fn analyze(args: &AnalyzeArgs) -> Result<ExitCode, String> {
    let builtins = match &args.builtins {
        Some(p) => BuiltinTable::parse(&read(p)?).map_err(|e| format!("{}: {e}", p.display()))?,
        None => BuiltinTable::standard(),
    };
    let text = read(&args.file)?;
    let opts = AnalysisOptions {
        abstraction: AbstractionOptions {
            allow_unknown_builtins: args.allow_unknown_builtins,
        },
        ..AnalysisOptions::default()
    };
    let a = analyze_source(&text, &builtins, &opts).map_err(|e| diagnostic(&args.file, &e))?;
    for w in &a.program.warnings {
        eprintln!("{}:{w}", args.file.display());
    }

    let report = Report::new(&a);
    match args.format {
        Format::Json => println!("{}", report.to_json()),
        Format::Text => print!("{}", report.to_text(args.timing)),
    }
    if args.dump_lfp {
        eprint!("{}", dump_iterates(&a.result.success, "F", a.user_preds()));
    }
    if args.dump_gfp {
        eprint!("{}", dump_iterates(&a.result.calls, "D", a.user_preds()));
    }

    match args.check {
        Some(n) => check(args, &a, &builtins, n),
        None => Ok(ExitCode::SUCCESS),
    }
}

/// Runs the sampler for each predicate; reports go to stderr so JSON on
/// stdout stays parseable.
fn check(args: &AnalyzeArgs, a: &Analysis, builtins: &BuiltinTable, n: usize) -> Result<ExitCode, String> {
    let prog = Program::new(&a.source, builtins).map_err(|e| diagnostic(&args.file, &AnalysisError::from(e)))?;
    let limits = Limits {
        max_depth: args.max_depth,
        max_steps: args.max_steps,
        ..Limits::default()
    };
    let mut found = 0;
    for key in a.user_preds() {
        match sample_and_check(&prog, key, &a.call_mode(key), n, args.seed, &limits) {
            Ok(r) => {
                eprintln!(
                    "check {key}: {} queries, {} succeeded, {} failed, {} cut off, {} errors",
                    r.samples,
                    r.successes,
                    r.failures,
                    r.incomplete,
                    r.counterexamples.len()
                );
                for c in &r.counterexamples {
                    eprintln!("  ?- {}\n  {}", c.query, c.violation);
                }
                found += r.counterexamples.len();
            }
            Err(e @ SampleError::EmptyMode(_)) => eprintln!("check {key}: skipped, {e}"),
            Err(e) => eprintln!("check {key}: {e}"),
        }
    }
    Ok(if found > 0 { ExitCode::from(2) } else { ExitCode::SUCCESS })
}
