use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// Written next to a generated graph as `<graph>.meta.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphMeta {
    pub preset: String,
    pub scale: u32,
    pub edge_factor: u64,
    pub seed: u64,
}

impl GraphMeta {
    pub fn sidecar_path(graph: &Path) -> PathBuf {
        let mut name = graph.as_os_str().to_owned();
        name.push(".meta.json");
        PathBuf::from(name)
    }

    pub fn label(&self) -> String {
        format!(
            "rmat-{}-s{}-ef{}-seed{}",
            self.preset, self.scale, self.edge_factor, self.seed
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphDescriptor {
    pub path: PathBuf,
    pub vertices: usize,
    pub edges: usize,
    /// Present when the graph came from `generate`.
    #[serde(flatten)]
    pub generator: Option<GraphMeta>,
}

impl GraphDescriptor {
    pub fn label(&self) -> String {
        match &self.generator {
            Some(meta) => meta.label(),
            None => self
                .path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| self.path.display().to_string()),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub pending: usize,
    pub conflicts: usize,
    pub tentative_seconds: f64,
    pub detection_seconds: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub graph: GraphDescriptor,
    pub algorithm: String,
    pub workers: usize,
    pub wall_time_seconds: f64,
    pub colors_used: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_conflicts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub round_stats: Option<Vec<RoundRecord>>,
    /// Longest chain of nested vertices one dataflow worker had in progress.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_wait_chain: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocked_reads: Option<u64>,
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coloring: Option<Vec<u32>>,
}

/// One line of the `bench` CSV. The column order is part of the output
/// format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub graph: String,
    pub algorithm: String,
    pub workers: usize,
    /// Repetition index, or `median` for summary rows.
    pub rep: String,
    pub seconds: f64,
    pub colors: u32,
    pub rounds: Option<usize>,
    pub conflicts: Option<usize>,
    pub valid: bool,
}

#[cfg(test)]
pub const BENCH_COLUMNS: &str = "graph,algorithm,workers,rep,seconds,colors,rounds,conflicts,valid";

fn median_of<T: Copy + PartialOrd>(mut xs: Vec<T>) -> Option<T> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(|a, b| a.partial_cmp(b).expect("comparable"));
    Some(xs[(xs.len() - 1) / 2])
}

/// Median row over the repetitions of one (algorithm, workers) cell. For even
/// counts the lower median is used so values stay observed ones.
pub fn median_row(reps: &[BenchRow]) -> Option<BenchRow> {
    let first = reps.first()?;
    Some(BenchRow {
        graph: first.graph.clone(),
        algorithm: first.algorithm.clone(),
        workers: first.workers,
        rep: "median".to_string(),
        seconds: median_of(reps.iter().map(|r| r.seconds).collect())?,
        colors: median_of(reps.iter().map(|r| r.colors).collect())?,
        rounds: median_of(reps.iter().filter_map(|r| r.rounds).collect()),
        conflicts: median_of(reps.iter().filter_map(|r| r.conflicts).collect()),
        valid: reps.iter().all(|r| r.valid),
    })
}
