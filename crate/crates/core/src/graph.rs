//! Immutable undirected graphs in compressed sparse row form.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

/// Vertex identifier. Vertices are numbered `0..n`.
pub type Vertex = u32;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("edge ({u}, {v}) has an endpoint outside [0, {n})")]
    EndpointOutOfRange { u: u64, v: u64, n: usize },
    #[error("graph with {0} vertices does not fit 32-bit vertex ids")]
    TooManyVertices(usize),
    #[error("malformed CSR arrays: {0}")]
    InvalidCsr(String),
    #[error("graph has no vertices")]
    Empty,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("bad binary graph: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Undirected simple graph. Each edge is stored in both endpoints' neighbor
/// lists and every list is sorted ascending without duplicates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<Vertex>,
}

impl Graph {
    /// Builds a graph from an arbitrary edge sequence, dropping self-loops and
    /// collapsing duplicates and reversed pairs into one undirected edge.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (u64, u64)>,
    {
        if n > Vertex::MAX as usize {
            return Err(GraphError::TooManyVertices(n));
        }
        let iter = edges.into_iter();
        let mut pairs = Vec::with_capacity(iter.size_hint().0);
        for (u, v) in iter {
            if u >= n as u64 || v >= n as u64 {
                return Err(GraphError::EndpointOutOfRange { u, v, n });
            }
            if u != v {
                pairs.push((u.min(v) as Vertex, u.max(v) as Vertex));
            }
        }
        Ok(Self::from_canonical_pairs(n, pairs))
    }

    /// `pairs` must already be in range with `u < v`; order and duplicates are
    /// arbitrary.
    pub(crate) fn from_canonical_pairs(n: usize, mut pairs: Vec<(Vertex, Vertex)>) -> Self {
        pairs.par_sort_unstable();
        pairs.dedup();

        let mut offsets = vec![0usize; n + 1];
        for &(u, v) in &pairs {
            offsets[u as usize + 1] += 1;
            offsets[v as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets[..n].to_vec();
        let mut neighbors = vec![0 as Vertex; offsets[n]];
        // Lexicographic pair order fills every list in ascending order: for a
        // vertex x, the pairs (u, x) with u < x all precede the pairs (x, w).
        for &(u, v) in &pairs {
            neighbors[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            neighbors[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        let g = Graph { offsets, neighbors };
        debug_assert!(g.check_invariants().is_ok());
        g
    }

    /// Wraps raw CSR arrays after checking every structural invariant.
    pub fn from_csr(offsets: Vec<usize>, neighbors: Vec<Vertex>) -> Result<Self, GraphError> {
        let g = Graph { offsets, neighbors };
        g.check_invariants()?;
        Ok(g)
    }

    pub fn num_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn neighbor_array(&self) -> &[Vertex] {
        &self.neighbors
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        let v = v as usize;
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Neighbors of `v` with a smaller index. Lists are sorted, so this is a
    /// prefix of [`Graph::neighbors`].
    #[inline]
    pub fn lower_neighbors(&self, v: Vertex) -> &[Vertex] {
        let adj = self.neighbors(v);
        &adj[..adj.partition_point(|&w| w < v)]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        self.offsets.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = Vertex> {
        0..self.num_vertices() as Vertex
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.neighbors(a).binary_search(&b).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.vertices().flat_map(move |u| {
            let adj = self.neighbors(u);
            let start = adj.partition_point(|&w| w <= u);
            adj[start..].iter().map(move |&v| (u, v))
        })
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.offsets.windows(2).map(|w| w[1] - w[0])
    }

    fn check_invariants(&self) -> Result<(), GraphError> {
        let bad = |msg: String| Err(GraphError::InvalidCsr(msg));
        if self.offsets.is_empty() || self.offsets[0] != 0 {
            return bad("offsets must start with 0".into());
        }
        let n = self.num_vertices();
        if n > Vertex::MAX as usize {
            return Err(GraphError::TooManyVertices(n));
        }
        if self.offsets[n] != self.neighbors.len() {
            return bad(format!(
                "last offset {} != neighbor count {}",
                self.offsets[n],
                self.neighbors.len()
            ));
        }
        if self.offsets.windows(2).any(|w| w[0] > w[1]) {
            return bad("offsets decrease".into());
        }
        for v in self.vertices() {
            let adj = self.neighbors(v);
            for (i, &w) in adj.iter().enumerate() {
                if w as usize >= n {
                    return bad(format!("vertex {v} has out-of-range neighbor {w}"));
                }
                if w == v {
                    return bad(format!("self-loop at {v}"));
                }
                if i > 0 && adj[i - 1] >= w {
                    return bad(format!("neighbors of {v} not strictly ascending"));
                }
            }
        }
        for v in self.vertices() {
            for &w in self.neighbors(v) {
                if self.neighbors(w).binary_search(&v).is_err() {
                    return bad(format!("edge ({v}, {w}) missing its reverse"));
                }
            }
        }
        Ok(())
    }

    /// Relabels vertices by `perm`, where vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[Vertex]) -> Graph {
        assert_eq!(perm.len(), self.num_vertices(), "permutation length");
        let pairs = self
            .edges()
            .map(|(u, v)| {
                let (a, b) = (perm[u as usize], perm[v as usize]);
                (a.min(b), a.max(b))
            })
            .collect();
        Graph::from_canonical_pairs(self.num_vertices(), pairs)
    }
}

/// The seeded Fisher–Yates permutation used by [`shuffle_labels`]: entry `v`
/// is the new label of vertex `v`.
pub fn label_permutation(n: usize, seed: u64) -> Vec<Vertex> {
    let mut perm: Vec<Vertex> = (0..n as Vertex).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    perm
}

/// Returns an isomorphic copy of `g` with vertex ids randomly permuted.
pub fn shuffle_labels(g: &Graph, seed: u64) -> Graph {
    g.relabel(&label_permutation(g.num_vertices(), seed))
}
