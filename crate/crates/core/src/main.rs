use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use colearn::distinguish::distinguishing_test;
use colearn::format::{export_dot, export_system, parse_system};
use colearn::reachability::{reachable_part, restrict};
use colearn::{eval_test, learn, logical_quotient, LearnConfig, PointedSystem, Teacher, Test};

#[derive(Parser, Debug)]
#[command(name = "colearn", version, about = "Learn minimal systems from a teacher with logical tests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Learn the minimal reachable system behind a teacher file.
    Learn {
        #[arg(long)]
        teacher: PathBuf,
        /// Write the learned system here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Write the run as newline-delimited JSON events.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        check_invariants: bool,
        #[arg(long)]
        max_outer_iterations: Option<usize>,
    },
    /// Quotient the reachable part of a system by logical equivalence.
    Minimize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Compare the initial states of two systems.
    Equiv { left: PathBuf, right: PathBuf },
    /// Evaluate a test at a state.
    Eval {
        #[arg(long)]
        teacher: PathBuf,
        #[arg(long)]
        state: String,
        #[arg(long)]
        test: String,
    },
}

/// 1: bad input, 2: the learner broke one of its own invariants.
enum Failure {
    Input(String),
    Internal(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

fn load(path: &Path) -> Result<PointedSystem, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    parse_system(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit_system(sys: &PointedSystem, output: Option<&Path>, dot: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(path) => write(path, &export_system(sys))?,
        None => print!("{}", export_system(sys)),
    }
    if let Some(path) = dot {
        write(path, &export_dot(sys))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Learn {
            teacher,
            output,
            dot,
            trace,
            check_invariants,
            max_outer_iterations,
        } => {
            let mut teacher = Teacher::new(load(&teacher)?);
            let config = LearnConfig {
                check_invariants,
                max_outer_iterations,
            };
            let outcome = learn(&mut teacher, &config).map_err(|e| {
                if e.is_internal() {
                    Failure::Internal(e.to_string())
                } else {
                    Failure::Input(e.to_string())
                }
            })?;
            emit_system(&outcome.conjecture.system, output.as_deref(), dot.as_deref())?;
            if let Some(path) = trace {
                write(&path, &outcome.trace.to_ndjson())?;
            }
            let counters = outcome.trace.counters;
            println!("states: {}", outcome.conjecture.system.num_states());
            println!("membership_queries: {}", counters.membership);
            println!("equivalence_queries: {}", counters.equivalence);
            println!("base_queries: {}", counters.base);
            println!("outer_iterations: {}", outcome.trace.outer_iterations);
        }
        Command::Minimize { input, output, dot } => {
            let sys = load(&input)?;
            let reachable = restrict(&sys, &reachable_part(&sys))?;
            let (_, quotient) = logical_quotient(&reachable);
            emit_system(&quotient, output.as_deref(), dot.as_deref())?;
        }
        Command::Equiv { left, right } => {
            let left = load(&left)?;
            let right = load(&right)?;
            match distinguishing_test(&left, &right)? {
                None => println!("CORRECT"),
                Some(t) => println!("{}", t.display(left.alphabet())),
            }
        }
        Command::Eval {
            teacher,
            state,
            test,
        } => {
            let sys = load(&teacher)?;
            let x = sys.state(&state)?;
            let t = Test::parse(&test, sys.kind(), sys.alphabet())?;
            println!("{}", eval_test(&sys, x, &t)?.render(sys.outputs()));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}
