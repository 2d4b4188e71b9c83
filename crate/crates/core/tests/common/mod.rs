//! Reference implementations used only by tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use gcolor::{Coloring, Graph, Vertex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random graph with `n` vertices and about `n * avg_degree / 2` edge draws
/// (duplicates and self-loops included in the raw list).
pub fn random_graph(rng: &mut impl Rng, n: usize, avg_degree: f64) -> Graph {
    let draws = if n < 2 {
        0
    } else {
        (n as f64 * avg_degree / 2.0) as usize
    };
    let edges: Vec<(u64, u64)> = (0..draws)
        .map(|_| (rng.gen_range(0..n as u64), rng.gen_range(0..n as u64)))
        .collect();
    Graph::from_edges(n, edges).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_order(rng: &mut impl Rng, n: usize) -> Vec<Vertex> {
    let mut order: Vec<Vertex> = (0..n as Vertex).collect();
    order.shuffle(rng);
    order
}

/// First-fit with an explicit set of neighbor colors per vertex.
pub fn naive_greedy(g: &Graph, order: &[Vertex]) -> Coloring {
    let mut colors = vec![0u32; g.num_vertices()];
    for &v in order {
        let taken: BTreeSet<u32> = g.neighbors(v).iter().map(|&w| colors[w as usize]).collect();
        colors[v as usize] = (1..).find(|c| !taken.contains(c)).unwrap();
    }
    Coloring(colors)
}

/// Local clustering by enumerating neighbor pairs and scanning for each edge.
pub fn brute_clustering(g: &Graph, v: Vertex) -> f64 {
    let adj = g.neighbors(v);
    let d = adj.len();
    if d < 2 {
        return 0.0;
    }
    let mut links = 0usize;
    for i in 0..d {
        for j in i + 1..d {
            if g.neighbors(adj[i]).iter().any(|&x| x == adj[j]) {
                links += 1;
            }
        }
    }
    links as f64 / (d * (d - 1) / 2) as f64
}

pub fn two_pass_variance(g: &Graph) -> f64 {
    let degrees: Vec<f64> = g.degrees().map(|d| d as f64).collect();
    let n = degrees.len() as f64;
    let mean = degrees.iter().sum::<f64>() / n;
    degrees.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n
}
