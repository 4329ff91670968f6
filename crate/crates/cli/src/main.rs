//! `mbqc`: flow, rewriting and canonical forms for stabilizer MBQC diagrams.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mbqc_canon::canon::{canonicalize, decide_equiv, CanonError, Canonicalization};
use mbqc_canon::clifford::Sign;
use mbqc_canon::diagram::Diagram;
use mbqc_canon::dot::{diagram_to_dot, phase_poly_to_dot};
use mbqc_canon::evaluate::{evaluate_with_limit, EvalError, DEFAULT_WIRE_LIMIT};
use mbqc_canon::flow::{find_flow, verify_flow, PauliFlow, VerifyError};
use mbqc_canon::graph::{VertexId, VertexSet};
use mbqc_canon::io::{
    diagram_to_json, graph_from_json, trace_from_jsonl, trace_to_jsonl, DiagramFile, DiagramKind,
    IoError,
};
use mbqc_canon::random::{self, DiagramParams};
use mbqc_canon::rewrite::{
    lc_rewrite, pivot_rewrite, replay, z_delete, z_insert, RewriteError, RewriteStep,
};
use thiserror::Error;

const EXIT_VIOLATION: u8 = 1;
const EXIT_NO_FLOW: u8 = 2;
const EXIT_NOT_EQUIVALENT: u8 = 3;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    SizeLimit(String),
    #[error("{0}")]
    Precondition(String),
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Schema(_) => 64,
            CliError::SizeLimit(_) => 65,
            CliError::Precondition(_) => 66,
            CliError::File { .. } => 74,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Schema(e.to_string())
    }
}

impl From<RewriteError> for CliError {
    fn from(e: RewriteError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

impl From<CanonError> for CliError {
    fn from(e: CanonError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::SizeLimit(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "mbqc",
    version,
    about = "Pauli flow, flow-preserving rewrites and canonical forms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check or find a Pauli flow.
    #[command(subcommand)]
    Flow(FlowCmd),
    /// Apply one rewrite, or replay a trace with `--replay`.
    Rewrite(RewriteCmd),
    /// Rewrite diagrams to canonical form.
    Canonicalize(CanonicalizeCmd),
    /// Decide whether two diagrams are equal up to a scalar.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        /// Write a trace rewriting `a` into `b`.
        #[arg(long)]
        emit_trace: Option<PathBuf>,
    },
    /// Print the exact amplitudes of a diagram.
    Simulate {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_WIRE_LIMIT)]
        max_wires: usize,
    },
    /// Generate a random diagram (ChaCha8 seeded with `--seed`).
    Random {
        #[arg(long)]
        vertices: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Resample until the graph has a Pauli flow.
        #[arg(long)]
        ensure_flow: bool,
    },
    /// Render a diagram as Graphviz DOT.
    ExportDot { file: PathBuf },
}

#[derive(Subcommand)]
enum FlowCmd {
    /// Prints `ok`, or the first violation as `(vertex, condition, witness)`.
    Verify {
        graph: PathBuf,
        #[arg(long)]
        flow: PathBuf,
    },
    /// Prints a flow as JSON, or `none`.
    Find { graph: PathBuf },
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
struct RewriteCmd {
    #[command(subcommand)]
    op: Option<RewriteOp>,
    /// Trace to replay on FILE.
    #[arg(long, requires = "file")]
    replay: Option<PathBuf>,
    file: Option<PathBuf>,
}

#[derive(Args)]
struct EmitArgs {
    /// Append the step as one JSON line to this trace file.
    #[arg(long)]
    emit_step: Option<PathBuf>,
}

#[derive(Subcommand)]
enum RewriteOp {
    Lc {
        file: PathBuf,
        #[arg(long)]
        vertex: VertexId,
        #[command(flatten)]
        emit: EmitArgs,
    },
    Pivot {
        file: PathBuf,
        /// The edge as `u,v`.
        #[arg(long, value_parser = parse_edge)]
        edge: (VertexId, VertexId),
        #[command(flatten)]
        emit: EmitArgs,
    },
    Zdelete {
        file: PathBuf,
        #[arg(long)]
        vertex: VertexId,
        #[command(flatten)]
        emit: EmitArgs,
    },
    Zinsert {
        file: PathBuf,
        /// Comma-separated neighbours; empty for an isolated vertex.
        #[arg(long, default_value = "", value_parser = parse_ids)]
        neighbors: VertexSet,
        #[arg(long, allow_hyphen_values = true)]
        sign: Sign,
        #[command(flatten)]
        emit: EmitArgs,
    },
}

#[derive(Args)]
struct CanonicalizeCmd {
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Trace file for a single input.
    #[arg(long, conflicts_with = "out_dir")]
    trace: Option<PathBuf>,
    /// Batch mode: write `<stem>.canonical.json` and `<stem>.trace` here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads for batch mode.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn parse_ids(s: &str) -> std::result::Result<VertexSet, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<VertexId>().map_err(|e| format!("{t:?}: {e}")))
        .collect()
}

fn parse_edge(s: &str) -> std::result::Result<(VertexId, VertexId), String> {
    let ids: Vec<VertexId> = s
        .split(',')
        .map(|t| t.trim().parse().map_err(|e| format!("{t:?}: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    match ids[..] {
        [u, v] => Ok((u, v)),
        _ => Err(format!("expected u,v, got {s:?}")),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::File {
        path: path.to_owned(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::File {
        path: path.to_owned(),
        source,
    })
}

fn append(path: &Path, text: &str) -> Result<()> {
    use std::io::Write;
    let file = fs::OpenOptions::new().create(true).append(true).open(path);
    file.and_then(|mut f| f.write_all(text.as_bytes()))
        .map_err(|source| CliError::File {
            path: path.to_owned(),
            source,
        })
}

/// Any diagram file; phase-polynomial kinds are read as output-only
/// diagrams.
fn load_diagram(path: &Path) -> Result<Diagram> {
    Ok(DiagramFile::parse(&read(path)?)?.to_diagram()?)
}

fn flow_cmd(cmd: FlowCmd) -> Result<u8> {
    match cmd {
        FlowCmd::Verify { graph, flow } => {
            let g = graph_from_json(&read(&graph)?)?;
            let f: PauliFlow = serde_json::from_str(&read(&flow)?)
                .map_err(|e| CliError::Schema(format!("{}: {e}", flow.display())))?;
            match verify_flow(&g, &f) {
                Ok(()) => {
                    println!("ok");
                    Ok(0)
                }
                Err(VerifyError::Violation(v)) => {
                    println!("violation {v}");
                    Ok(EXIT_VIOLATION)
                }
                Err(e @ VerifyError::Malformed(_)) => Err(CliError::Schema(e.to_string())),
            }
        }
        FlowCmd::Find { graph } => {
            let g = graph_from_json(&read(&graph)?)?;
            match find_flow(&g) {
                Some(f) => {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&f).expect("flows serialize")
                    );
                    Ok(0)
                }
                None => {
                    println!("none");
                    Ok(EXIT_NO_FLOW)
                }
            }
        }
    }
}

fn rewrite_cmd(cmd: RewriteCmd) -> Result<u8> {
    let Some(op) = cmd.op else {
        let (Some(trace), Some(file)) = (cmd.replay, cmd.file) else {
            return Err(CliError::Schema(
                "rewrite needs an operation or --replay TRACE FILE".into(),
            ));
        };
        let steps = trace_from_jsonl(&read(&trace)?)?;
        print!(
            "{}",
            diagram_to_json(&replay(&load_diagram(&file)?, &steps)?)
        );
        return Ok(0);
    };
    let (out, step, emit) = match op {
        RewriteOp::Lc { file, vertex, emit } => {
            let d = load_diagram(&file)?;
            (lc_rewrite(&d, vertex)?, RewriteStep::Lc { vertex }, emit)
        }
        RewriteOp::Pivot {
            file,
            edge: (u, v),
            emit,
        } => {
            let d = load_diagram(&file)?;
            (pivot_rewrite(&d, u, v)?, RewriteStep::Pivot { u, v }, emit)
        }
        RewriteOp::Zdelete { file, vertex, emit } => {
            let (d, step) = z_delete(&load_diagram(&file)?, vertex)?;
            (d, step, emit)
        }
        RewriteOp::Zinsert {
            file,
            neighbors,
            sign,
            emit,
        } => {
            let (d, vertex) = z_insert(&load_diagram(&file)?, &neighbors, sign)?;
            let step = RewriteStep::ZInsert {
                vertex,
                neighbours: neighbors.into_iter().collect(),
                sign,
            };
            (d, step, emit)
        }
    };
    let line = trace_to_jsonl(std::slice::from_ref(&step));
    match emit.emit_step {
        Some(path) => append(&path, &line)?,
        None => eprint!("{line}"),
    }
    print!("{}", diagram_to_json(&out));
    Ok(0)
}

fn canonical_text(c: &Canonicalization) -> String {
    DiagramFile::from_canonical(&c.canonical).to_json()
}

fn canonicalize_file(path: &Path) -> Result<Canonicalization> {
    Ok(canonicalize(&load_diagram(path)?)?)
}

fn canonicalize_cmd(cmd: CanonicalizeCmd) -> Result<u8> {
    let Some(dir) = cmd.out_dir else {
        let [file] = &cmd.files[..] else {
            return Err(CliError::Schema("several inputs need --out-dir".into()));
        };
        let c = canonicalize_file(file)?;
        if let Some(trace) = cmd.trace {
            write(&trace, &trace_to_jsonl(&c.trace))?;
        }
        print!("{}", canonical_text(&c));
        return Ok(0);
    };
    let jobs = cmd.jobs.max(1);
    let chunk = cmd.files.len().div_ceil(jobs);
    // Each worker handles one contiguous chunk; the first error in input
    // order is reported.
    let results: Vec<Result<()>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cmd
            .files
            .chunks(chunk)
            .map(|files| {
                let dir = &dir;
                scope.spawn(move || {
                    files
                        .iter()
                        .map(|f| {
                            let c = canonicalize_file(f)?;
                            let stem = f.file_stem().unwrap_or_default().to_string_lossy();
                            write(
                                &dir.join(format!("{stem}.canonical.json")),
                                &canonical_text(&c),
                            )?;
                            write(
                                &dir.join(format!("{stem}.trace")),
                                &trace_to_jsonl(&c.trace),
                            )
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    results.into_iter().collect::<Result<Vec<()>>>()?;
    Ok(0)
}

fn equiv_cmd(a: &Path, b: &Path, emit_trace: Option<PathBuf>) -> Result<u8> {
    match decide_equiv(&load_diagram(a)?, &load_diagram(b)?) {
        Ok(trace) => {
            if let Some(path) = emit_trace {
                write(&path, &trace_to_jsonl(&trace))?;
            }
            println!("equivalent");
            Ok(0)
        }
        Err(CanonError::NotEquivalent) => {
            println!("not equivalent");
            Ok(EXIT_NOT_EQUIVALENT)
        }
        Err(e) => Err(e.into()),
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Flow(cmd) => flow_cmd(cmd),
        Command::Rewrite(cmd) => rewrite_cmd(cmd),
        Command::Canonicalize(cmd) => canonicalize_cmd(cmd),
        Command::Equiv { a, b, emit_trace } => equiv_cmd(&a, &b, emit_trace),
        Command::Simulate { file, max_wires } => {
            let s = evaluate_with_limit(&load_diagram(&file)?, max_wires)?;
            println!("{}", serde_json::to_string(&s).expect("states serialize"));
            Ok(0)
        }
        Command::Random {
            vertices,
            seed,
            ensure_flow,
        } => {
            if vertices == 0 {
                return Err(CliError::Precondition(
                    "--vertices must be at least 1".into(),
                ));
            }
            let mut rng = random::rng(seed);
            let p = DiagramParams::new(vertices);
            let d = if ensure_flow {
                random::flowed_diagram(&mut rng, p)
            } else {
                random::diagram(&mut rng, p)
            };
            print!("{}", diagram_to_json(&d));
            Ok(0)
        }
        Command::ExportDot { file } => {
            let f = DiagramFile::parse(&read(&file)?)?;
            let dot = match f.kind {
                DiagramKind::MbqcLc => diagram_to_dot(&f.to_diagram()?),
                _ => phase_poly_to_dot(&f.to_phase_poly()?),
            };
            print!("{dot}");
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
