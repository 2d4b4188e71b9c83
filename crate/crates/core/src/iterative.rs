//! Speculative iterative parallel coloring.
//!
//! Each round colors the pending set in parallel, reading neighbor colors
//! without synchronization, then scans the same set for edges whose endpoints
//! ended up with equal colors. The higher-indexed endpoint of every such edge
//! is pending in the next round. The lowest vertex of a pending set can never
//! be flagged, so each round strictly shrinks the set.

use std::sync::atomic::{AtomicU32, Ordering};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::graph::{Graph, Vertex};
use crate::greedy::{Color, Coloring, ForbiddenMarks};
use crate::workers::{run_workers, static_block, ChunkCursor, SpawnError};

#[derive(Debug, Error)]
pub enum IterativeError {
    #[error("invalid schedule: {0}")]
    InvalidPolicy(String),
    #[error(transparent)]
    Spawn(#[from] SpawnError),
}

/// How a parallel loop over the pending set is split among workers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chunking {
    /// One contiguous block per worker.
    Static,
    /// Workers repeatedly take the next `chunk` vertices.
    Dynamic { chunk: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchedulePolicy {
    pub workers: usize,
    pub chunking: Chunking,
    /// Pending sets no larger than this are colored by a single worker.
    /// `None` never falls back.
    pub sequential_cutoff: Option<usize>,
}

impl SchedulePolicy {
    pub fn with_workers(workers: usize) -> Self {
        SchedulePolicy {
            workers,
            chunking: Chunking::Static,
            sequential_cutoff: None,
        }
    }

    pub fn dynamic(mut self, chunk: usize) -> Self {
        self.chunking = Chunking::Dynamic { chunk };
        self
    }

    pub fn sequential_cutoff(mut self, cutoff: usize) -> Self {
        self.sequential_cutoff = Some(cutoff);
        self
    }

    pub fn validate(&self) -> Result<(), IterativeError> {
        if self.workers == 0 {
            return Err(IterativeError::InvalidPolicy("worker count must be at least 1".into()));
        }
        if self.chunking == (Chunking::Dynamic { chunk: 0 }) {
            return Err(IterativeError::InvalidPolicy("chunk size must be at least 1".into()));
        }
        Ok(())
    }

    /// Applies `body` to every item of `items` across the workers and returns
    /// one accumulator per worker, in worker order.
    fn for_each<T, A, I, F>(&self, workers: usize, items: &[T], init: I, body: F) -> Result<Vec<A>, SpawnError>
    where
        T: Sync,
        A: Send,
        I: Fn() -> A + Sync,
        F: Fn(&mut A, &T) + Sync,
    {
        match self.chunking {
            Chunking::Static => run_workers(workers, |i| {
                let mut acc = init();
                for item in &items[static_block(items.len(), workers, i)] {
                    body(&mut acc, item);
                }
                acc
            }),
            Chunking::Dynamic { chunk } => {
                let cursor = ChunkCursor::new(items.len(), chunk);
                run_workers(workers, |_| {
                    let mut acc = init();
                    while let Some(range) = cursor.grab() {
                        for item in &items[range] {
                            body(&mut acc, item);
                        }
                    }
                    acc
                })
            }
        }
    }
}

/// Color array shared by all workers. Every slot is accessed with relaxed
/// atomics; a stale read only produces a conflict that detection catches.
#[derive(Debug)]
pub struct SharedColors(Vec<AtomicU32>);

impl SharedColors {
    pub fn new(n: usize) -> Self {
        SharedColors((0..n).map(|_| AtomicU32::new(0)).collect())
    }

    #[inline]
    pub fn get(&self, v: Vertex) -> Color {
        self.0[v as usize].load(Ordering::Relaxed)
    }

    #[inline]
    pub fn set(&self, v: Vertex, c: Color) {
        self.0[v as usize].store(c, Ordering::Relaxed)
    }

    pub fn into_coloring(self) -> Coloring {
        Coloring(self.0.into_iter().map(AtomicU32::into_inner).collect())
    }
}

impl From<&Coloring> for SharedColors {
    fn from(c: &Coloring) -> Self {
        SharedColors(c.0.iter().map(|&x| AtomicU32::new(x)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundStats {
    /// 1-based.
    pub round: usize,
    /// Size of the pending set entering the round.
    pub pending: usize,
    /// Vertices flagged for recoloring at the end of the round.
    pub conflicts: usize,
    pub tentative_time: Duration,
    pub detection_time: Duration,
}

#[derive(Clone, Debug)]
pub struct IterativeRun {
    pub coloring: Coloring,
    pub rounds: Vec<RoundStats>,
}

impl IterativeRun {
    pub fn total_conflicts(&self) -> usize {
        self.rounds.iter().map(|r| r.conflicts).sum()
    }
}

/// Phase 1: gives every vertex of `pending` the smallest color not seen on its
/// neighbors. Each worker keeps its own forbidden-color marks.
pub fn tentative_round(
    g: &Graph,
    pending: &[Vertex],
    colors: &SharedColors,
    policy: &SchedulePolicy,
) -> Result<(), IterativeError> {
    policy.validate()?;
    let workers = match policy.sequential_cutoff {
        Some(cutoff) if pending.len() <= cutoff => 1,
        _ => policy.workers,
    };
    policy.for_each(
        workers,
        pending,
        || ForbiddenMarks::for_graph(g),
        |marks, &v| {
            let c = marks.choose(g.neighbors(v), v, |w| colors.get(w));
            colors.set(v, c);
        },
    )?;
    Ok(())
}

/// Phase 2: the vertices of `pending` that share a color with some
/// lower-indexed neighbor, in ascending order.
pub fn detect_conflicts(
    g: &Graph,
    pending: &[Vertex],
    colors: &SharedColors,
    policy: &SchedulePolicy,
) -> Result<Vec<Vertex>, IterativeError> {
    policy.validate()?;
    let parts = policy.for_each(policy.workers, pending, Vec::new, |out: &mut Vec<Vertex>, &v| {
        let c = colors.get(v);
        if g.lower_neighbors(v).iter().any(|&w| colors.get(w) == c) {
            out.push(v);
        }
    })?;
    let mut recolor: Vec<Vertex> = parts.into_iter().flatten().collect();
    recolor.sort_unstable();
    Ok(recolor)
}

/// Colors `g` by rounds of speculation and conflict detection. With one
/// worker the result equals first-fit coloring in natural order.
pub fn iterative_color(g: &Graph, policy: &SchedulePolicy) -> Result<IterativeRun, IterativeError> {
    policy.validate()?;
    let colors = SharedColors::new(g.num_vertices());
    let pending: Vec<Vertex> = g.vertices().collect();
    run_rounds(g, policy, colors, pending, false)
}

/// Continues the algorithm from a state where `pending` has just been
/// tentatively colored with `colors`: the first recorded round runs only
/// conflict detection.
pub fn resume_after_tentative(
    g: &Graph,
    policy: &SchedulePolicy,
    colors: &Coloring,
    pending: Vec<Vertex>,
) -> Result<IterativeRun, IterativeError> {
    policy.validate()?;
    run_rounds(g, policy, SharedColors::from(colors), pending, true)
}

fn run_rounds(
    g: &Graph,
    policy: &SchedulePolicy,
    colors: SharedColors,
    mut pending: Vec<Vertex>,
    mut skip_tentative: bool,
) -> Result<IterativeRun, IterativeError> {
    let mut rounds = Vec::new();
    while !pending.is_empty() {
        let start = Instant::now();
        if !skip_tentative {
            tentative_round(g, &pending, &colors, policy)?;
        }
        skip_tentative = false;
        let tentative_time = start.elapsed();

        let start = Instant::now();
        let recolor = detect_conflicts(g, &pending, &colors, policy)?;
        let detection_time = start.elapsed();

        debug_assert!(recolor.len() < pending.len());
        rounds.push(RoundStats {
            round: rounds.len() + 1,
            pending: pending.len(),
            conflicts: recolor.len(),
            tentative_time,
            detection_time,
        });
        pending = recolor;
    }
    Ok(IterativeRun {
        coloring: colors.into_coloring(),
        rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greedy::{greedy_color_natural, verify_coloring};
    use std::sync::Barrier;

    fn graph(n: usize, edges: &[(u64, u64)]) -> Graph {
        Graph::from_edges(n, edges.iter().copied()).unwrap()
    }

    #[test]
    fn policy_validation() {
        assert!(SchedulePolicy::with_workers(0).validate().is_err());
        assert!(SchedulePolicy::with_workers(2).dynamic(0).validate().is_err());
        assert!(SchedulePolicy::with_workers(2).dynamic(16).validate().is_ok());
        let g = graph(2, &[(0, 1)]);
        assert!(matches!(
            iterative_color(&g, &SchedulePolicy::with_workers(0)),
            Err(IterativeError::InvalidPolicy(_))
        ));
    }

    #[test]
    fn isolated_vertex_gets_one() {
        let g = graph(3, &[(1, 2)]);
        let colors = SharedColors::new(3);
        tentative_round(&g, &[0], &colors, &SchedulePolicy::with_workers(2)).unwrap();
        assert_eq!(colors.get(0), 1);
    }

    #[test]
    fn single_worker_round_is_greedy() {
        let p4 = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        let colors = SharedColors::new(4);
        tentative_round(&p4, &[0, 1, 2, 3], &colors, &SchedulePolicy::with_workers(1)).unwrap();
        assert_eq!(colors.into_coloring().0, vec![1, 2, 1, 2]);
    }

    #[test]
    fn concurrent_reads_before_writes_conflict() {
        // Both workers read their neighbor before either publishes.
        let k2 = graph(2, &[(0, 1)]);
        let colors = SharedColors::new(2);
        let barrier = Barrier::new(2);
        run_workers(2, |i| {
            let v = i as Vertex;
            let mut marks = ForbiddenMarks::for_graph(&k2);
            let c = marks.choose(k2.neighbors(v), v, |w| colors.get(w));
            barrier.wait();
            colors.set(v, c);
        })
        .unwrap();
        assert_eq!((colors.get(0), colors.get(1)), (1, 1));
        let recolor = detect_conflicts(&k2, &[0, 1], &colors, &SchedulePolicy::with_workers(2)).unwrap();
        assert_eq!(recolor, vec![1]);
    }

    #[test]
    fn detection_cases() {
        let policy = SchedulePolicy::with_workers(2);
        let p3 = graph(3, &[(0, 1), (1, 2)]);
        let c = SharedColors::from(&Coloring(vec![1, 2, 1]));
        assert!(detect_conflicts(&p3, &[0, 1, 2], &c, &policy).unwrap().is_empty());

        let k2 = graph(2, &[(0, 1)]);
        let c = SharedColors::from(&Coloring(vec![1, 1]));
        assert_eq!(detect_conflicts(&k2, &[0, 1], &c, &policy).unwrap(), vec![1]);

        let k3 = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let c = SharedColors::from(&Coloring(vec![1, 1, 1]));
        assert_eq!(detect_conflicts(&k3, &[0, 1, 2], &c, &policy).unwrap(), vec![1, 2]);
    }

    #[test]
    fn k2_conflict_recolors_higher_endpoint() {
        let k2 = graph(2, &[(0, 1)]);
        let run =
            resume_after_tentative(&k2, &SchedulePolicy::with_workers(2), &Coloring(vec![1, 1]), vec![0, 1]).unwrap();
        assert_eq!(run.coloring.0, vec![1, 2]);
        assert_eq!(run.rounds.len(), 2);
        assert_eq!((run.rounds[0].pending, run.rounds[0].conflicts), (2, 1));
        assert_eq!((run.rounds[1].pending, run.rounds[1].conflicts), (1, 0));
        assert_eq!(run.total_conflicts(), 1);
    }

    #[test]
    fn one_worker_equals_greedy() {
        let c5 = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let run = iterative_color(&c5, &SchedulePolicy::with_workers(1)).unwrap();
        assert_eq!(run.coloring, greedy_color_natural(&c5));
        assert_eq!(run.rounds.len(), 1);
        assert_eq!(run.total_conflicts(), 0);
    }

    #[test]
    fn empty_graph_has_no_rounds() {
        let g = graph(0, &[]);
        let run = iterative_color(&g, &SchedulePolicy::with_workers(4)).unwrap();
        assert!(run.rounds.is_empty());
        assert!(run.coloring.is_empty());
    }

    #[test]
    fn schedules_produce_valid_colorings() {
        let g = crate::rmat::rmat_generate(&crate::rmat::RmatParams::from_preset(crate::rmat::Preset::G, 11, 8, 5))
            .unwrap();
        for policy in [
            SchedulePolicy::with_workers(3),
            SchedulePolicy::with_workers(4).dynamic(1),
            SchedulePolicy::with_workers(8).dynamic(64),
            SchedulePolicy::with_workers(4).sequential_cutoff(100),
        ] {
            let run = iterative_color(&g, &policy).unwrap();
            assert!(verify_coloring(&g, &run.coloring).is_empty(), "{policy:?}");
            assert_eq!(run.rounds.last().unwrap().conflicts, 0);
            for r in &run.rounds {
                assert!(r.conflicts < r.pending);
            }
        }
    }
}
