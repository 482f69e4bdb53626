use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use embedlab::construct::{construct, ConstructOptions, Method};
use embedlab::files::{load_matrix, load_target};
use embedlab::pipeline::{certify, check, render, CheckOptions};
use embedlab::scan::{scan, write_csv, ScanOptions};
use embedlab::{extreme, threads_from_env, CliError, EXIT_INTERNAL};
use embedlab_core::lindblad::{DEFAULT_FINAL_TIME, DEFAULT_GAMMA};
use embedlab_core::optimizer::{Parameterization, SearchOptions, DEFAULT_DELTA, DEFAULT_RESTARTS};

#[derive(Parser)]
#[command(name = "embedlab", version, about = "Quantum embeddability of stochastic matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// σx drive plus one rank-one jump operator (qubits only).
    Reduced,
    /// Arbitrary Hamiltonian and Choi factor.
    General,
}

#[derive(Subcommand)]
enum Command {
    /// Layered verdict: analytic certificates first, then numerical search.
    /// Exit 0 = embeddable, 1 = certified not embeddable, 2 = inconclusive.
    Check {
        matrix: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        param: Option<Family>,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// JSON report of every analytic certificate; no optimization.
    Certify { matrix: PathBuf },
    /// Count extreme matrices and optionally list the non-embeddable ones.
    ClassifyExtreme {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        list_non_embeddable: bool,
        #[arg(long)]
        json: bool,
    },
    /// Search every cell of an N×N grid over 2×2 matrices and write CSV.
    ScanQubit {
        #[arg(long)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Family::Reduced)]
        param: Family,
    },
    /// Explicit generator for a target of known structure, as JSON.
    EmbedConstruct {
        #[arg(long)]
        target: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long, default_value_t = DEFAULT_GAMMA)]
        gamma: f64,
        #[arg(long, default_value_t = DEFAULT_FINAL_TIME)]
        tf: f64,
    },
}

fn parameterization(family: Family, d: usize) -> Result<Parameterization, CliError> {
    match family {
        Family::General => Ok(Parameterization::general_for(d)),
        Family::Reduced if d == 2 => Ok(Parameterization::ReducedQubit),
        Family::Reduced => Err(CliError::Parse(format!(
            "the reduced family is only defined for d = 2, got d = {d}"
        ))),
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Parse(e.to_string()))
}

fn run(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Check {
            matrix,
            delta,
            restarts,
            seed,
            param,
            json,
        } => {
            let t = load_matrix(&matrix)?;
            let opts = CheckOptions {
                search: SearchOptions::new(restarts, delta, seed),
                parameterization: param.map(|f| parameterization(f, t.dim())).transpose()?,
            };
            let report = check(&t, &opts)?;
            if json {
                println!("{}", to_json(&report)?);
            } else {
                print!("{}", render(&report));
            }
            if report.certificate_verified == Some(false) {
                eprintln!("error: the emitted certificate failed re-verification");
                return Ok(EXIT_INTERNAL);
            }
            Ok(report.exit_code())
        }
        Command::Certify { matrix } => {
            let t = load_matrix(&matrix)?;
            let report = certify(&t)?;
            println!("{}", to_json(&report)?);
            Ok(report.exit_code())
        }
        Command::ClassifyExtreme {
            d,
            list_non_embeddable,
            json,
        } => {
            let s = extreme::summarize(d, list_non_embeddable)?;
            if json {
                println!("{}", to_json(&s)?);
            } else {
                print!("{}", extreme::render(&s));
            }
            Ok(0)
        }
        Command::ScanQubit {
            grid,
            delta,
            restarts,
            seed,
            out,
            param,
        } => {
            let opts = ScanOptions {
                grid,
                delta,
                restarts,
                seed,
                parameterization: parameterization(param, 2)?,
            };
            let rows = scan(&opts)?;
            write_csv(&rows, &out)?;
            let embeddable = rows.iter().filter(|r| r.embeddable()).count();
            eprintln!(
                "{} cells, {embeddable} embeddable at δ={delta:e}, written to {}",
                rows.len(),
                out.display()
            );
            Ok(0)
        }
        Command::EmbedConstruct {
            target,
            method,
            gamma,
            tf,
        } => {
            let target = load_target(&target)?;
            let opts = ConstructOptions {
                method,
                gamma,
                final_time: tf,
            };
            let c = construct(&target, &opts)?;
            println!("{}", to_json(&c)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = threads_from_env().and_then(|threads| match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Parse(format!("thread pool: {e}")))?
            .install(|| run(cli.command)),
        None => run(cli.command),
    });
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
