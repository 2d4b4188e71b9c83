//! Degree and clustering statistics.

use rayon::prelude::*;

use crate::graph::{Graph, GraphError, Vertex};

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeStats {
    /// 2m / n.
    pub avg_degree: f64,
    pub max_degree: usize,
    /// Population variance of the degree sequence.
    pub variance: f64,
    /// Percentage of degree-0 vertices, in [0, 100].
    pub isolated_pct: f64,
}

/// Degree statistics. An empty graph reports all zeros.
pub fn degree_stats(g: &Graph) -> DegreeStats {
    let n = g.num_vertices();
    if n == 0 {
        return DegreeStats {
            avg_degree: 0.0,
            max_degree: 0,
            variance: 0.0,
            isolated_pct: 0.0,
        };
    }
    let avg = 2.0 * g.num_edges() as f64 / n as f64;
    let (sq, isolated) = g.degrees().fold((0.0f64, 0usize), |(sq, iso), d| {
        let dev = d as f64 - avg;
        (sq + dev * dev, iso + usize::from(d == 0))
    });
    DegreeStats {
        avg_degree: avg,
        max_degree: g.max_degree(),
        variance: sq / n as f64,
        isolated_pct: 100.0 * isolated as f64 / n as f64,
    }
}

/// Number of edges among the neighbors of `v`.
pub fn neighbor_links(g: &Graph, v: Vertex) -> u64 {
    let adj = g.neighbors(v);
    let mut links = 0u64;
    for &u in adj {
        let other = g.neighbors(u);
        // Probe the shorter list against the longer one.
        let (small, large) = if other.len() < adj.len() {
            (other, adj)
        } else {
            (adj, other)
        };
        links += small.iter().filter(|w| large.binary_search(w).is_ok()).count() as u64;
    }
    links / 2
}

/// Fraction of `v`'s neighbor pairs that are adjacent; 0 when `d(v) < 2`.
pub fn local_clustering(g: &Graph, v: Vertex) -> f64 {
    let d = g.degree(v) as f64;
    if d < 2.0 {
        return 0.0;
    }
    neighbor_links(g, v) as f64 / (d * (d - 1.0) / 2.0)
}

pub fn average_clustering(g: &Graph) -> Result<f64, GraphError> {
    if g.num_vertices() == 0 {
        return Err(GraphError::Empty);
    }
    Ok(local_coefficients(g).iter().sum::<f64>() / g.num_vertices() as f64)
}

pub fn local_coefficients(g: &Graph) -> Vec<f64> {
    (0..g.num_vertices() as Vertex)
        .into_par_iter()
        .map(|v| local_clustering(g, v))
        .collect()
}

/// Histogram buckets: `{0}`, `(0, 0.1]`, `(0.1, 0.2]`, ..., `(0.9, 1.0]`.
pub const HISTOGRAM_BUCKETS: usize = 11;

pub fn bucket_label(i: usize) -> String {
    match i {
        0 => "0".to_string(),
        _ => format!("({:.1},{:.1}]", (i - 1) as f64 / 10.0, i as f64 / 10.0),
    }
}

pub fn bucket_of(coefficient: f64) -> usize {
    if coefficient <= 0.0 {
        0
    } else {
        (1..10).find(|&k| coefficient <= k as f64 / 10.0).unwrap_or(10)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusteringReport {
    pub per_vertex: Vec<f64>,
    /// Mean over all vertices; 0 for an empty graph.
    pub average: f64,
    pub histogram: [usize; HISTOGRAM_BUCKETS],
}

pub fn clustering_report(g: &Graph) -> ClusteringReport {
    let per_vertex = local_coefficients(g);
    let mut histogram = [0usize; HISTOGRAM_BUCKETS];
    for &c in &per_vertex {
        histogram[bucket_of(c)] += 1;
    }
    let average = if per_vertex.is_empty() {
        0.0
    } else {
        per_vertex.iter().sum::<f64>() / per_vertex.len() as f64
    };
    ClusteringReport {
        per_vertex,
        average,
        histogram,
    }
}
