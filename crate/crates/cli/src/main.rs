use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use densedelta::generator::{gen_mixed_dense, GenSpec};
use densedelta::graph::verify_coloring;
use densedelta::{exit_code, run_pipeline, Coloring, Error, Graph, PipelineConfig, RoundTrace};
use serde_json::json;

const DEBUG_ENV: &str = "DENSEDELTA_DEBUG";

#[derive(Parser)]
#[command(name = "densedelta", version, about = "Deterministic Delta-coloring of dense graphs, simulated round by round")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Hard,
    Mixed,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dense instance and its ground-truth metadata.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        delta: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// External edges to delete (mixed only).
        #[arg(long, default_value_t = 0)]
        easy_drop: usize,
        /// Clique pairs to join by a second edge (mixed only).
        #[arg(long, default_value_t = 0)]
        easy_double: usize,
    },
    /// Color a graph and write the coloring and the round trace.
    Run {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out_coloring: PathBuf,
        #[arg(long)]
        out_trace: PathBuf,
        /// Intermediate structures (partition, matchings, triads, ...).
        #[arg(long)]
        out_artifacts: Option<PathBuf>,
        /// Where the failure witness goes; defaults to `<out-coloring>.witness.json`.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Check that a coloring is a total proper Delta-coloring.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        coloring: PathBuf,
    },
    /// Summarize a round trace.
    Stats {
        #[arg(long)]
        trace: PathBuf,
    },
}

enum Failure {
    Verification(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        message: format!("{}: {e}", path.display()),
    })
}

/// Writes through a temporary sibling so readers never see a half file.
fn write(path: &Path, contents: &str) -> Result<(), Error> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let io = |e: std::io::Error| Error::Io {
        message: format!("{}: {e}", path.display()),
    };
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    s.into()
}

fn gen(kind: Kind, spec: GenSpec, out: &Path) -> Result<(), Failure> {
    if matches!(kind, Kind::Hard) && (spec.easy_drop > 0 || spec.easy_double > 0) {
        return Err(Error::Infeasible {
            message: "--easy-drop and --easy-double need --kind mixed".into(),
        }
        .into());
    }
    let inst = gen_mixed_dense(&spec)?;
    write(out, &inst.graph.write_text())?;
    let meta = json!({ "spec": spec, "meta": inst.meta });
    write(&with_suffix(out, ".meta.json"), &serde_json::to_string(&meta).expect("meta serializes"))?;
    eprintln!("wrote n = {}, m = {}, delta = {} to {}", inst.graph.n(), inst.graph.m(), inst.graph.delta(), out.display());
    Ok(())
}

fn run(input: &Path, out_coloring: &Path, out_trace: &Path, out_artifacts: Option<&Path>, witness: Option<&Path>) -> Result<(), Failure> {
    let g = Graph::read_text(&read(input)?)?;
    let config = PipelineConfig {
        debug_checks: std::env::var(DEBUG_ENV).is_ok_and(|v| v == "1"),
        ..Default::default()
    };
    match run_pipeline(&g, &config) {
        Ok(out) => {
            write(out_trace, &out.trace.to_json())?;
            if let Some(path) = out_artifacts {
                write(path, &serde_json::to_string(&out.artifacts).expect("artifacts serialize"))?;
            }
            write(out_coloring, &out.coloring.to_json())?;
            eprintln!("colored {} vertices with {} colors in {} rounds", g.n(), g.delta(), out.trace.total);
            Ok(())
        }
        Err(e) => {
            let path = witness.map_or_else(|| with_suffix(out_coloring, ".witness.json"), Path::to_path_buf);
            write(&path, &serde_json::to_string_pretty(&e.witness()).expect("witness serializes"))?;
            eprintln!("witness written to {}", path.display());
            Err(e.into())
        }
    }
}

fn verify(input: &Path, coloring: &Path) -> Result<(), Failure> {
    let g = Graph::read_text(&read(input)?)?;
    let c = Coloring::from_json(&read(coloring)?)?;
    let report = verify_coloring(&g, &c, true);
    println!("{}", serde_json::to_string(&report).expect("report serializes"));
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "{} monochromatic edges, {} uncolored, {} out of range{}",
            report.monochromatic.len(),
            report.uncolored.len(),
            report.out_of_range.len(),
            if report.size_mismatch { ", size or delta mismatch" } else { "" }
        )))
    }
}

fn stats(trace: &Path) -> Result<(), Failure> {
    let t = RoundTrace::from_json(&read(trace)?)?;
    let width = t.phases.iter().map(|p| p.name.len()).max().unwrap_or(5).max(5);
    println!("{:<width$}  {:>7}  mode", "phase", "rounds");
    for p in &t.phases {
        let mode = serde_json::to_value(p.mode).expect("mode serializes");
        println!("{:<width$}  {:>7}  {}", p.name, p.rounds, mode.as_str().unwrap_or_default());
    }
    let central = t.phases.iter().filter(|p| p.rounds == 0).count();
    println!("{:<width$}  {:>7}", "total", t.total);
    println!("{} phases, {} with no rounds charged", t.phases.len(), central);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen {
            kind,
            k,
            delta,
            seed,
            out,
            easy_drop,
            easy_double,
        } => gen(
            kind,
            GenSpec {
                k,
                delta,
                seed,
                easy_drop,
                easy_double,
            },
            &out,
        ),
        Command::Run {
            input,
            out_coloring,
            out_trace,
            out_artifacts,
            witness,
        } => run(&input, &out_coloring, &out_trace, out_artifacts.as_deref(), witness.as_deref()),
        Command::Verify { input, coloring } => verify(&input, &coloring),
        Command::Stats { trace } => stats(&trace),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
