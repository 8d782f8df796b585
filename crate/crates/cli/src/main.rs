use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chaincongruence_core::bench::{self, BenchConfig};
use chaincongruence_core::generate::{exploded_grid, GridOptions};
use chaincongruence_core::io::{self, COMPLEX_SCHEMA, QUOTIENT_SCHEMA};
use chaincongruence_core::{
    chain_congruence, euler_characteristic, validate, Engine, Error, MergeOptions, Tolerance,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

mod alloc;

#[global_allocator]
static GLOBAL: alloc::CountingAlloc = alloc::CountingAlloc;

/// Merge local chain complexes into a global one by epsilon-congruence.
#[derive(Parser)]
#[command(name = "chaincongruence", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Tuning {
    /// Vertex welding radius in model units.
    #[arg(long, default_value_t = Tolerance::DEFAULT)]
    epsilon: f64,
    /// Worker threads (results do not depend on it).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Aa,
    Sparse,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Engine {
        match e {
            EngineArg::Aa => Engine::ArrayOfArrays,
            EngineArg::Sparse => Engine::Sparse,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Cube,
    Grid,
}

#[derive(Subcommand)]
enum Command {
    /// Merge an accumulator complex file into a quotient file.
    Merge {
        input: PathBuf,
        /// Output path; standard output when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "sparse")]
        engine: EngineArg,
        /// Skip the delta1 * delta0 = 0 check.
        #[arg(long)]
        no_self_check: bool,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Validate a quotient file; exits 1 when a hard check fails.
    Validate {
        input: PathBuf,
        /// Report path; standard output when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Expected Euler characteristic (advisory only).
        #[arg(long, allow_hyphen_values = true)]
        expected_euler: Option<i64>,
    },
    /// Generate an exploded cube or cuboid grid fixture.
    Gen {
        #[arg(value_enum)]
        kind: Kind,
        /// Grid size as PxQxR, or a single N for NxNxN.
        #[arg(long, value_parser = parse_grid, default_value = "1")]
        grid: [usize; 3],
        /// Maximum per-instance displacement, below epsilon/2.
        #[arg(long, default_value_t = 0.0)]
        jitter: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = Tolerance::DEFAULT)]
        epsilon: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Time both engines on generated grids.
    Bench {
        /// Grid sizes; repeat the flag for several.
        #[arg(long = "grid", value_parser = parse_grid, default_value = "2")]
        grids: Vec<[usize; 3]>,
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
        reps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Per-instance jitter; defaults to epsilon/4.
        #[arg(long)]
        jitter: Option<f64>,
        /// JSON table path.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Summarize a complex or quotient file.
    Info { input: PathBuf },
}

fn parse_grid(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<usize> = s
        .split('x')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [n] => Ok([n, n, n]),
        [p, q, r] => Ok([p, q, r]),
        _ => Err(format!("expected N or PxQxR, got {s:?}")),
    }
}

/// Process exit status for an error: 1 validation failure, 2 bad input,
/// 3 internal invariant violation.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::ChainConstraint { .. } => 1,
        Error::InvalidPartition(_) | Error::ZeroVector | Error::EngineDisagreement(_) => 3,
        _ => 2,
    }
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Error> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Merge {
            input,
            output,
            engine,
            no_self_check,
            tuning,
        } => {
            let acc = io::load_complex(&input)?;
            let options = MergeOptions {
                tolerance: Tolerance::new(tuning.epsilon)?,
                engine: engine.into(),
                self_check: !no_self_check,
                threads: tuning.threads,
            };
            let q = chain_congruence(&acc, &options)?;
            emit(&io::quotient_to_json(&q), output.as_deref())?;
            let [v, e, f] = q.counts();
            eprintln!("merged {input:?}: {v} vertices, {e} edges, {f} faces");
            Ok(0)
        }
        Command::Validate {
            input,
            output,
            expected_euler,
        } => {
            let q = io::load_quotient(&input)?;
            let report = validate(&q, expected_euler);
            emit(&io::report_to_json(&report), output.as_deref())?;
            if report.dd_zero.is_none() {
                eprintln!("dd check skipped: no signed operators in {input:?}");
            }
            for v in &report.violations {
                eprintln!("violation: {v}");
            }
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Gen {
            kind,
            grid,
            jitter,
            seed,
            epsilon,
            output,
        } => {
            let base = match kind {
                Kind::Cube => GridOptions::unit_cube(seed),
                Kind::Grid => GridOptions::grid(grid, seed),
            };
            let opts = GridOptions {
                jitter,
                epsilon,
                ..base
            };
            let acc = exploded_grid(&opts)?;
            emit(&io::complex_to_json(&acc), output.as_deref())?;
            Ok(0)
        }
        Command::Bench {
            grids,
            reps,
            seed,
            jitter,
            output,
            tuning,
        } => {
            let config = BenchConfig {
                sizes: grids,
                repetitions: reps as usize,
                seed,
                jitter: jitter.unwrap_or(tuning.epsilon / 4.0),
                tolerance: Tolerance::new(tuning.epsilon)?,
                threads: tuning.threads,
            };
            let report = bench::run(&config, &alloc::CountingProbe)?;
            print!("{}", report.to_table());
            if let Some(path) = output {
                emit(&io::to_canonical_json(&report), Some(&path))?;
            }
            Ok(0)
        }
        Command::Info { input } => {
            let text = std::fs::read_to_string(&input).map_err(|source| Error::Io {
                path: input.clone(),
                source,
            })?;
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| Error::Schema {
                    path: input.clone(),
                    message: e.to_string(),
                })?;
            match value.get("schema_version").and_then(|v| v.as_str()) {
                Some(COMPLEX_SCHEMA) => {
                    let acc = io::complex_from_json(&text)?;
                    let [v, e, f] = acc.counts();
                    println!("accumulator complex");
                    println!("  vertex instances: {v}");
                    println!(
                        "  local edges:      {e} (delta0 nnz {})",
                        acc.delta0().nnz()
                    );
                    println!(
                        "  local faces:      {f} (delta1 nnz {})",
                        acc.delta1().nnz()
                    );
                }
                Some(QUOTIENT_SCHEMA) => {
                    let q = io::quotient_from_json(&text)?;
                    let counts = q.counts();
                    println!("quotient complex");
                    println!("  vertices: {}", counts[0]);
                    println!(
                        "  edges:    {} ({} degenerate dropped)",
                        counts[1],
                        q.eclasses.dropped.len()
                    );
                    println!(
                        "  faces:    {} ({} degenerate dropped)",
                        counts[2],
                        q.fclasses.dropped.len()
                    );
                    println!("  signed operators: {}", q.delta0.is_some());
                    println!("  euler characteristic: {}", euler_characteristic(&counts));
                }
                other => {
                    return Err(Error::Schema {
                        path: input,
                        message: format!("unknown schema_version {other:?}"),
                    })
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error[{}]: {err}", err.code());
            ExitCode::from(exit_code(&err))
        }
    }
}
