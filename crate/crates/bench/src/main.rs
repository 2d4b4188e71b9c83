//! `gcolor`: generate R-MAT inputs, color them with any algorithm and worker
//! count, and record timings.
//!
//! Exit codes: 0 success, 1 invalid coloring, 2 usage error, 3 I/O error.

mod record;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use gcolor::dataflow::{dataflow_color_with, DataflowConfig};
use gcolor::io::{read_graph, write_graph};
use gcolor::iterative::Chunking;
use gcolor::stats::{bucket_label, clustering_report, degree_stats, DegreeStats};
use gcolor::{
    greedy_color_natural, iterative_color, rmat_generate, shuffle_labels, verify_coloring, Coloring, Graph, Preset,
    RmatParams, SchedulePolicy,
};
use thiserror::Error;

use record::{median_row, BenchRow, GraphDescriptor, GraphMeta, RoundRecord, RunRecord};

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    InvalidColoring(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::InvalidColoring(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<gcolor::GraphError> for CliError {
    fn from(e: gcolor::GraphError) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "gcolor", version, about = "Parallel graph coloring benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PresetArg {
    Er,
    G,
    B,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Er => Preset::Er,
            PresetArg::G => Preset::G,
            PresetArg::B => Preset::B,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Serial,
    Iterative,
    Dataflow,
}

impl Algorithm {
    fn name(self) -> &'static str {
        match self {
            Algorithm::Serial => "serial",
            Algorithm::Iterative => "iterative",
            Algorithm::Dataflow => "dataflow",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, clap::Args)]
struct ScheduleArgs {
    /// Iterative only: hand out work in dynamic chunks of this size instead of
    /// one static block per worker.
    #[arg(long)]
    chunk: Option<usize>,
    /// Iterative only: color pending sets of at most this many vertices with a
    /// single worker.
    #[arg(long)]
    sequential_cutoff: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an R-MAT graph with shuffled vertex labels.
    Generate {
        #[arg(long, value_enum)]
        preset: PresetArg,
        #[arg(long)]
        scale: u32,
        #[arg(long, default_value_t = 8)]
        edge_factor: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output file; `.txt`, `.el` or `.edges` writes a text edge list,
        /// anything else the binary CSR format.
        #[arg(long)]
        out: PathBuf,
    },
    /// Color a graph once and emit a JSON run record.
    Color {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        algorithm: Algorithm,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[command(flatten)]
        schedule: ScheduleArgs,
        /// Write the JSON record here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the coloring here, one color per line in vertex order.
        #[arg(long)]
        coloring: Option<PathBuf>,
        /// Include the coloring in the JSON record.
        #[arg(long)]
        embed_coloring: bool,
    },
    /// Time algorithms over worker counts and emit a CSV table.
    Bench {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "serial,iterative,dataflow")]
        algorithms: Vec<Algorithm>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
        workers: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        repetitions: usize,
        #[command(flatten)]
        schedule: ScheduleArgs,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print degree and clustering statistics.
    Stats {
        #[arg(long)]
        graph: PathBuf,
    },
}

struct Timed {
    coloring: Coloring,
    seconds: f64,
    rounds: Option<Vec<RoundRecord>>,
    max_wait_chain: Option<usize>,
    blocked_reads: Option<u64>,
}

fn policy(workers: usize, schedule: ScheduleArgs) -> SchedulePolicy {
    let mut p = SchedulePolicy::with_workers(workers);
    if let Some(chunk) = schedule.chunk {
        p.chunking = Chunking::Dynamic { chunk };
    }
    p.sequential_cutoff = schedule.sequential_cutoff;
    p
}

/// Runs one coloring; only the coloring call itself is timed.
fn run_algorithm(g: &Graph, alg: Algorithm, workers: usize, schedule: ScheduleArgs) -> Result<Timed, CliError> {
    if workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    let start = Instant::now();
    let timed = match alg {
        Algorithm::Serial => {
            let coloring = greedy_color_natural(g);
            Timed {
                seconds: start.elapsed().as_secs_f64(),
                coloring,
                rounds: None,
                max_wait_chain: None,
                blocked_reads: None,
            }
        }
        Algorithm::Iterative => {
            let policy = policy(workers, schedule);
            policy.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            let run = iterative_color(g, &policy).map_err(|e| CliError::Io(e.to_string()))?;
            let seconds = start.elapsed().as_secs_f64();
            let rounds = run
                .rounds
                .iter()
                .map(|r| RoundRecord {
                    round: r.round,
                    pending: r.pending,
                    conflicts: r.conflicts,
                    tentative_seconds: r.tentative_time.as_secs_f64(),
                    detection_seconds: r.detection_time.as_secs_f64(),
                })
                .collect();
            Timed {
                coloring: run.coloring,
                seconds,
                rounds: Some(rounds),
                max_wait_chain: None,
                blocked_reads: None,
            }
        }
        Algorithm::Dataflow => {
            let run = dataflow_color_with(g, &DataflowConfig::with_workers(workers))
                .map_err(|e| CliError::Io(e.to_string()))?;
            Timed {
                seconds: start.elapsed().as_secs_f64(),
                coloring: run.coloring,
                rounds: None,
                max_wait_chain: Some(run.max_chain),
                blocked_reads: Some(run.blocked_reads),
            }
        }
    };
    Ok(timed)
}

fn load(path: &Path) -> Result<(Graph, GraphDescriptor), CliError> {
    let g = read_graph(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let sidecar = GraphMeta::sidecar_path(path);
    let generator = match std::fs::read(&sidecar) {
        Ok(bytes) => {
            Some(serde_json::from_slice(&bytes).map_err(|e| CliError::Io(format!("{}: {e}", sidecar.display())))?)
        }
        Err(e) if e.kind() == io::ErrorKind::NotFound => None,
        Err(e) => return Err(e.into()),
    };
    let descriptor = GraphDescriptor {
        path: path.to_path_buf(),
        vertices: g.num_vertices(),
        edges: g.num_edges(),
        generator,
    };
    Ok((g, descriptor))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn print_degree_stats(out: &mut impl Write, g: &Graph, s: &DegreeStats) -> io::Result<()> {
    writeln!(out, "vertices       {}", g.num_vertices())?;
    writeln!(out, "edges          {}", g.num_edges())?;
    writeln!(out, "avg degree     {:.4}", s.avg_degree)?;
    writeln!(out, "max degree     {}", s.max_degree)?;
    writeln!(out, "variance       {:.4}", s.variance)?;
    writeln!(out, "isolated       {:.4}%", s.isolated_pct)
}

fn cmd_generate(preset: PresetArg, scale: u32, edge_factor: u64, seed: u64, out: &Path) -> Result<(), CliError> {
    let params = RmatParams::from_preset(preset.into(), scale, edge_factor, seed);
    let g = rmat_generate(&params).map_err(|e| CliError::Usage(e.to_string()))?;
    let g = shuffle_labels(&g, seed);
    write_graph(&g, out)?;
    let meta = GraphMeta {
        preset: Preset::from(preset).name().to_string(),
        scale,
        edge_factor,
        seed,
    };
    std::fs::write(
        GraphMeta::sidecar_path(out),
        serde_json::to_vec_pretty(&meta).expect("serializable"),
    )?;
    let mut stdout = io::stdout().lock();
    writeln!(stdout, "wrote {}", out.display())?;
    print_degree_stats(&mut stdout, &g, &degree_stats(&g))?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_color(
    graph: &Path,
    alg: Algorithm,
    workers: usize,
    schedule: ScheduleArgs,
    out: Option<&Path>,
    coloring_out: Option<&Path>,
    embed: bool,
) -> Result<(), CliError> {
    let (g, descriptor) = load(graph)?;
    let workers = if alg == Algorithm::Serial { 1 } else { workers };
    let t = run_algorithm(&g, alg, workers, schedule)?;
    let violations = verify_coloring(&g, &t.coloring);
    let valid = violations.is_empty();
    let record = RunRecord {
        graph: descriptor,
        algorithm: alg.name().to_string(),
        workers,
        wall_time_seconds: t.seconds,
        colors_used: t.coloring.0.iter().copied().max().unwrap_or(0),
        rounds: t.rounds.as_ref().map(Vec::len),
        total_conflicts: t.rounds.as_ref().map(|r| r.iter().map(|x| x.conflicts).sum()),
        round_stats: t.rounds,
        max_wait_chain: t.max_wait_chain,
        blocked_reads: t.blocked_reads,
        valid,
        coloring: embed.then(|| t.coloring.0.clone()),
    };
    if let Some(path) = coloring_out {
        let mut w = BufWriter::new(File::create(path)?);
        for c in &t.coloring.0 {
            writeln!(w, "{c}")?;
        }
        w.flush()?;
    }
    let mut w = output(out)?;
    serde_json::to_writer_pretty(&mut w, &record).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    if !valid {
        return Err(CliError::InvalidColoring(format!(
            "{} conflicting edges, {} uncolored vertices",
            violations.conflicts.len(),
            violations.uncolored.len()
        )));
    }
    Ok(())
}

fn cmd_bench(
    graph: &Path,
    algorithms: &[Algorithm],
    worker_list: &[usize],
    repetitions: usize,
    schedule: ScheduleArgs,
    out: Option<&Path>,
) -> Result<(), CliError> {
    if repetitions == 0 {
        return Err(CliError::Usage("--repetitions must be at least 1".into()));
    }
    if worker_list.is_empty() || worker_list.contains(&0) {
        return Err(CliError::Usage("--workers needs positive worker counts".into()));
    }
    let (g, descriptor) = load(graph)?;
    let label = descriptor.label();
    let mut writer = csv::Writer::from_writer(output(out)?);
    let mut summaries = Vec::new();
    let mut all_valid = true;
    for &alg in algorithms {
        let counts: &[usize] = if alg == Algorithm::Serial { &[1] } else { worker_list };
        for &workers in counts {
            let mut cell = Vec::with_capacity(repetitions);
            for rep in 0..repetitions {
                let t = run_algorithm(&g, alg, workers, schedule)?;
                let valid = verify_coloring(&g, &t.coloring).is_empty();
                all_valid &= valid;
                let row = BenchRow {
                    graph: label.clone(),
                    algorithm: alg.name().to_string(),
                    workers,
                    rep: rep.to_string(),
                    seconds: t.seconds,
                    colors: t.coloring.0.iter().copied().max().unwrap_or(0),
                    rounds: t.rounds.as_ref().map(Vec::len),
                    conflicts: t.rounds.as_ref().map(|r| r.iter().map(|x| x.conflicts).sum()),
                    valid,
                };
                writer.serialize(&row).map_err(|e| CliError::Io(e.to_string()))?;
                cell.push(row);
            }
            summaries.extend(median_row(&cell));
        }
    }
    for row in &summaries {
        writer.serialize(row).map_err(|e| CliError::Io(e.to_string()))?;
    }
    writer.flush()?;
    if !all_valid {
        return Err(CliError::InvalidColoring(
            "benchmark produced an invalid coloring".into(),
        ));
    }
    Ok(())
}

fn cmd_stats(graph: &Path) -> Result<(), CliError> {
    let (g, _) = load(graph)?;
    let report = clustering_report(&g);
    let mut out = io::stdout().lock();
    print_degree_stats(&mut out, &g, &degree_stats(&g))?;
    writeln!(out, "avg clustering {:.6}", report.average)?;
    writeln!(out, "clustering histogram")?;
    for (i, count) in report.histogram.iter().enumerate() {
        writeln!(out, "  {:<10} {count}", bucket_label(i))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate {
            preset,
            scale,
            edge_factor,
            seed,
            out,
        } => cmd_generate(preset, scale, edge_factor, seed, &out),
        Command::Color {
            graph,
            algorithm,
            workers,
            schedule,
            out,
            coloring,
            embed_coloring,
        } => cmd_color(
            &graph,
            algorithm,
            workers,
            schedule,
            out.as_deref(),
            coloring.as_deref(),
            embed_coloring,
        ),
        Command::Bench {
            graph,
            algorithms,
            workers,
            repetitions,
            schedule,
            out,
        } => cmd_bench(&graph, &algorithms, &workers, repetitions, schedule, out.as_deref()),
        Command::Stats { graph } => cmd_stats(&graph),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gcolor: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
