//! R-MAT recursive-matrix graph generator.
//!
//! Every candidate edge is placed by `scale` successive quadrant choices over
//! the adjacency matrix. Candidates are drawn in fixed-size blocks, each with
//! its own ChaCha stream, so the output depends only on the parameters and not
//! on how many threads did the sampling.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Graph, Vertex};

/// Candidate edges drawn per RNG stream.
const BLOCK_EDGES: u64 = 1 << 14;

#[derive(Debug, Error, PartialEq)]
pub enum RmatError {
    #[error("unknown R-MAT preset {0:?} (expected er, g or b)")]
    UnknownPreset(String),
    #[error("invalid R-MAT parameters: {0}")]
    InvalidParams(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    /// Uniform quadrants, Erdős–Rényi-like degree distribution.
    Er,
    /// Moderately skewed.
    G,
    /// Heavily skewed.
    B,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Er, Preset::G, Preset::B];

    /// Quadrant probabilities `(a, b, c, d)`.
    pub fn probabilities(self) -> [f64; 4] {
        match self {
            Preset::Er => [0.25, 0.25, 0.25, 0.25],
            Preset::G => [0.45, 0.15, 0.15, 0.25],
            Preset::B => [0.55, 0.15, 0.15, 0.15],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Er => "er",
            Preset::G => "g",
            Preset::B => "b",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = RmatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().trim_start_matches("rmat-") {
            "er" => Ok(Preset::Er),
            "g" => Ok(Preset::G),
            "b" => Ok(Preset::B),
            _ => Err(RmatError::UnknownPreset(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RmatParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// The graph has `2^scale` vertices.
    pub scale: u32,
    /// Candidate edges per vertex; `edge_factor * 2^scale` edges are drawn.
    pub edge_factor: u64,
    pub seed: u64,
}

impl RmatParams {
    pub fn from_preset(preset: Preset, scale: u32, edge_factor: u64, seed: u64) -> Self {
        let [a, b, c, d] = preset.probabilities();
        RmatParams {
            a,
            b,
            c,
            d,
            scale,
            edge_factor,
            seed,
        }
    }

    pub fn num_vertices(&self) -> usize {
        1usize << self.scale
    }

    pub fn num_candidate_edges(&self) -> u64 {
        self.edge_factor << self.scale
    }

    pub fn validate(&self) -> Result<(), RmatError> {
        let probs = [self.a, self.b, self.c, self.d];
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(RmatError::InvalidParams(format!(
                "negative or non-finite probability in {probs:?}"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(RmatError::InvalidParams(format!("probabilities sum to {sum}, not 1")));
        }
        if !(1..=31).contains(&self.scale) {
            return Err(RmatError::InvalidParams(format!(
                "scale {} outside [1, 31]",
                self.scale
            )));
        }
        if self.edge_factor == 0 {
            return Err(RmatError::InvalidParams("edge factor must be at least 1".into()));
        }
        if self
            .edge_factor
            .checked_shl(self.scale)
            .is_none_or(|e| e >> self.scale != self.edge_factor)
        {
            return Err(RmatError::InvalidParams("edge count overflows".into()));
        }
        Ok(())
    }
}

/// Places one edge by `scale` quadrant choices, each consuming one uniform
/// variate from `draw`. The first choice fixes the most significant bit of the
/// row and column.
pub fn sample_edge(p: &RmatParams, mut draw: impl FnMut() -> f64) -> (u64, u64) {
    let (ab, abc) = (p.a + p.b, p.a + p.b + p.c);
    let (mut row, mut col) = (0u64, 0u64);
    for _ in 0..p.scale {
        let r = draw();
        let (i, j) = if r < p.a {
            (0, 0)
        } else if r < ab {
            (0, 1)
        } else if r < abc {
            (1, 0)
        } else {
            (1, 1)
        };
        row = (row << 1) | i;
        col = (col << 1) | j;
    }
    (row, col)
}

fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Draws all candidate edges as canonical `(min, max)` pairs, self-loops
/// already removed.
fn candidate_pairs(p: &RmatParams) -> Vec<(Vertex, Vertex)> {
    let total = p.num_candidate_edges();
    let blocks = total.div_ceil(BLOCK_EDGES);
    (0..blocks)
        .into_par_iter()
        .flat_map_iter(|block| {
            let mut rng = block_rng(p.seed, block);
            let len = BLOCK_EDGES.min(total - block * BLOCK_EDGES);
            (0..len).filter_map(move |_| {
                let (u, v) = sample_edge(p, || rng.gen::<f64>());
                (u != v).then(|| (u.min(v) as Vertex, u.max(v) as Vertex))
            })
        })
        .collect()
}

pub fn rmat_generate(p: &RmatParams) -> Result<Graph, RmatError> {
    p.validate()?;
    Ok(Graph::from_canonical_pairs(p.num_vertices(), candidate_pairs(p)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scripted(values: &[f64]) -> impl FnMut() -> f64 + '_ {
        let mut it = values.iter().copied();
        move || it.next().expect("ran out of variates")
    }

    #[test]
    fn preset_probabilities() {
        assert_eq!(Preset::Er.probabilities(), [0.25, 0.25, 0.25, 0.25]);
        assert_eq!(Preset::G.probabilities(), [0.45, 0.15, 0.15, 0.25]);
        assert_eq!(Preset::B.probabilities(), [0.55, 0.15, 0.15, 0.15]);
        assert_eq!("B".parse::<Preset>(), Ok(Preset::B));
        assert_eq!("rmat-er".parse::<Preset>(), Ok(Preset::Er));
        assert!(matches!("x".parse::<Preset>(), Err(RmatError::UnknownPreset(_))));
    }

    #[test]
    fn single_subdivision() {
        let p = RmatParams::from_preset(Preset::G, 1, 1, 0);
        assert_eq!(sample_edge(&p, scripted(&[0.1])), (0, 0));
        assert_eq!(sample_edge(&p, scripted(&[0.5])), (0, 1));
        assert_eq!(sample_edge(&p, scripted(&[0.7])), (1, 0));
        assert_eq!(sample_edge(&p, scripted(&[0.99])), (1, 1));
    }

    #[test]
    fn bits_accumulate_high_to_low() {
        let p = RmatParams::from_preset(Preset::G, 2, 1, 0);
        // (2,2) then (1,2)
        assert_eq!(sample_edge(&p, scripted(&[0.9, 0.5])), (2, 3));
    }

    #[test]
    fn three_level_trace() {
        // B preset thresholds: a = 0.55, a+b = 0.70, a+b+c = 0.85.
        // 0.80 -> (2,1): row bit 1, col bit 0
        // 0.60 -> (1,2): row bit 0, col bit 1
        // 0.90 -> (2,2): row bit 1, col bit 1
        // row = 0b101 = 5, col = 0b011 = 3
        let p = RmatParams::from_preset(Preset::B, 3, 1, 0);
        assert_eq!(sample_edge(&p, scripted(&[0.80, 0.60, 0.90])), (5, 3));

        // Same walk driven by the seeded block stream, traced independently.
        let mut rng = block_rng(7, 0);
        let draws: Vec<f64> = (0..3).map(|_| rng.gen()).collect();
        let (mut row, mut col) = (0, 0);
        for &r in &draws {
            let q = [0.55, 0.70, 0.85].iter().filter(|&&t| r >= t).count() as u64;
            row = row * 2 + q / 2;
            col = col * 2 + q % 2;
        }
        let mut rng = block_rng(7, 0);
        assert_eq!(sample_edge(&p, || rng.gen()), (row, col));
    }

    #[test]
    fn validation() {
        let ok = RmatParams::from_preset(Preset::Er, 4, 8, 1);
        assert!(ok.validate().is_ok());
        for bad in [
            RmatParams { a: 0.5, ..ok },
            RmatParams {
                a: -0.25,
                b: 0.75,
                ..ok
            },
            RmatParams { scale: 0, ..ok },
            RmatParams { scale: 32, ..ok },
            RmatParams { edge_factor: 0, ..ok },
        ] {
            assert!(
                matches!(rmat_generate(&bad), Err(RmatError::InvalidParams(_))),
                "{bad:?}"
            );
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let p = RmatParams::from_preset(Preset::Er, 10, 8, 3);
        let g1 = rmat_generate(&p).unwrap();
        let g2 = rmat_generate(&p).unwrap();
        assert_eq!(g1, g2);
        assert_eq!(g1.num_vertices(), 1024);
        assert!(g1.num_edges() <= 8 * 1024);
        let other = rmat_generate(&RmatParams { seed: 4, ..p }).unwrap();
        assert_ne!(g1, other);
    }

    #[test]
    fn independent_of_thread_count() {
        let p = RmatParams::from_preset(Preset::B, 12, 8, 11);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        assert_eq!(one.install(|| rmat_generate(&p)), four.install(|| rmat_generate(&p)));
    }
}
