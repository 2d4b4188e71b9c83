//! Dataflow coloring on a publish/wait color board.
//!
//! Every vertex waits for the final colors of its lower-indexed neighbors and
//! then takes the first free color, so the result is exactly the natural-order
//! first-fit coloring no matter how the work is scheduled. A worker that finds
//! an unclaimed lower neighbor colors it itself before waiting on it, which
//! keeps every wait pointed at a vertex some running worker is busy with.
//! Wait chains strictly decrease in vertex index and cannot cycle.

use std::sync::atomic::{AtomicBool, AtomicU32, AtomicU64, AtomicUsize, Ordering};
use std::thread;
use std::time::{Duration, Instant};

use rand::rngs::SmallRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::graph::{Graph, Vertex};
use crate::greedy::{Color, Coloring, ForbiddenMarks};
use crate::workers::{run_workers, static_block, ChunkCursor, SpawnError};

pub const DEFAULT_WAIT_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, Error)]
pub enum DataflowError {
    #[error("waited {waited:?} for vertex {vertex} to be published; suspected deadlock")]
    DeadlockSuspected { vertex: Vertex, waited: Duration },
    #[error("vertex {0} published twice")]
    AlreadyPublished(Vertex),
    #[error("wait on vertex {0} abandoned after another worker failed")]
    Aborted(Vertex),
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error(transparent)]
    Spawn(#[from] SpawnError),
}

/// Vertex colors with per-slot empty/full state.
///
/// A slot holding 0 is empty; any positive value is a published color. The
/// publishing store is a release and a successful wait an acquire, so a reader
/// that sees a slot full also sees the color written into it.
#[derive(Debug)]
pub struct ColorBoard {
    slots: Vec<AtomicU32>,
}

impl ColorBoard {
    /// A board of `n` empty slots.
    pub fn new(n: usize) -> Self {
        ColorBoard {
            slots: (0..n).map(|_| AtomicU32::new(0)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Empties every slot and zeroes its value.
    pub fn purge(&self) {
        for s in &self.slots {
            s.store(0, Ordering::Relaxed);
        }
    }

    /// The published color of `v`, or `None` while the slot is empty.
    #[inline]
    pub fn try_read(&self, v: Vertex) -> Option<Color> {
        match self.slots[v as usize].load(Ordering::Acquire) {
            0 => None,
            c => Some(c),
        }
    }

    /// Writes `c` into the empty slot of `v` and marks it full.
    pub fn publish(&self, v: Vertex, c: Color) -> Result<(), DataflowError> {
        assert!(c > 0, "colors are positive");
        self.slots[v as usize]
            .compare_exchange(0, c, Ordering::Release, Ordering::Relaxed)
            .map(|_| ())
            .map_err(|_| DataflowError::AlreadyPublished(v))
    }

    /// Waits until `v` is published and returns its color.
    pub fn read_blocking(&self, v: Vertex, timeout: Duration) -> Result<Color, DataflowError> {
        self.wait_full(v, timeout, None)
    }

    fn wait_full(&self, v: Vertex, timeout: Duration, abort: Option<&AtomicBool>) -> Result<Color, DataflowError> {
        if let Some(c) = self.try_read(v) {
            return Ok(c);
        }
        for step in 0..7 {
            for _ in 0..(1 << step) {
                std::hint::spin_loop();
            }
            if let Some(c) = self.try_read(v) {
                return Ok(c);
            }
        }
        let start = Instant::now();
        let mut polls = 0u32;
        loop {
            thread::yield_now();
            if let Some(c) = self.try_read(v) {
                return Ok(c);
            }
            polls = polls.wrapping_add(1);
            if polls.is_multiple_of(32) {
                if abort.is_some_and(|a| a.load(Ordering::Relaxed)) {
                    return Err(DataflowError::Aborted(v));
                }
                let waited = start.elapsed();
                if waited >= timeout {
                    return Err(DataflowError::DeadlockSuspected { vertex: v, waited });
                }
            }
        }
    }

    /// Snapshot of the board; empty slots read as 0.
    pub fn to_coloring(&self) -> Coloring {
        Coloring(self.slots.iter().map(|s| s.load(Ordering::Acquire)).collect())
    }
}

/// Per-vertex claim counters. The first claimant of a vertex is its only
/// processor.
#[derive(Debug)]
pub struct ClaimTable {
    state: Vec<AtomicU32>,
}

impl ClaimTable {
    pub fn new(n: usize) -> Self {
        ClaimTable {
            state: (0..n).map(|_| AtomicU32::new(0)).collect(),
        }
    }

    pub fn reset(&self) {
        for s in &self.state {
            s.store(0, Ordering::Relaxed);
        }
    }

    /// Increments the counter of `v`; true iff it was 0 before.
    #[inline]
    pub fn claim(&self, v: Vertex) -> bool {
        self.state[v as usize].fetch_add(1, Ordering::Relaxed) == 0
    }
}

#[derive(Clone, Debug)]
pub struct DataflowConfig {
    pub workers: usize,
    pub wait_timeout: Duration,
    /// When set, workers visit vertices in a seeded random order, take work
    /// in randomly sized chunks and yield at random points. Used to stress
    /// unusual interleavings; the coloring itself does not change.
    pub interleave_seed: Option<u64>,
}

impl DataflowConfig {
    pub fn with_workers(workers: usize) -> Self {
        DataflowConfig {
            workers,
            wait_timeout: DEFAULT_WAIT_TIMEOUT,
            interleave_seed: None,
        }
    }

    pub fn interleaved(mut self, seed: u64) -> Self {
        self.interleave_seed = Some(seed);
        self
    }

    pub fn wait_timeout(mut self, timeout: Duration) -> Self {
        self.wait_timeout = timeout;
        self
    }
}

#[derive(Clone, Debug)]
pub struct DataflowRun {
    pub coloring: Coloring,
    /// Deepest chain of vertices a single worker had in progress at once.
    pub max_chain: usize,
    /// Neighbor reads that found the slot still empty and had to wait.
    pub blocked_reads: u64,
}

/// A vertex in progress and how many of its lower neighbors have been
/// visited.
struct Frame {
    v: Vertex,
    next: usize,
}

/// Shared state for one coloring run.
pub struct Dataflow<'g> {
    g: &'g Graph,
    board: ColorBoard,
    claims: ClaimTable,
    timeout: Duration,
    abort: AtomicBool,
    max_chain: AtomicUsize,
    blocked_reads: AtomicU64,
}

/// Private state of one worker.
pub struct WorkerState {
    marks: ForbiddenMarks,
    stack: Vec<Frame>,
    rng: Option<SmallRng>,
    max_chain: usize,
    blocked_reads: u64,
}

impl<'g> Dataflow<'g> {
    pub fn new(g: &'g Graph, timeout: Duration) -> Self {
        Dataflow {
            g,
            board: ColorBoard::new(g.num_vertices()),
            claims: ClaimTable::new(g.num_vertices()),
            timeout,
            abort: AtomicBool::new(false),
            max_chain: AtomicUsize::new(0),
            blocked_reads: AtomicU64::new(0),
        }
    }

    pub fn board(&self) -> &ColorBoard {
        &self.board
    }

    pub fn claims(&self) -> &ClaimTable {
        &self.claims
    }

    pub fn worker(&self, jitter_seed: Option<u64>) -> WorkerState {
        WorkerState {
            marks: ForbiddenMarks::for_graph(self.g),
            stack: Vec::new(),
            rng: jitter_seed.map(SmallRng::seed_from_u64),
            max_chain: 0,
            blocked_reads: 0,
        }
    }

    /// Claims `v` and processes it if the claim wins.
    pub fn visit(&self, v: Vertex, w: &mut WorkerState) -> Result<(), DataflowError> {
        if self.claims.claim(v) {
            self.process_vertex(v, w)?;
        }
        Ok(())
    }

    /// Colors `v`, which the caller has claimed. For each lower neighbor in
    /// ascending order: claim it and color it first if unclaimed, then wait
    /// for its color. Recursion into claimed neighbors runs on an explicit
    /// stack.
    pub fn process_vertex(&self, v: Vertex, w: &mut WorkerState) -> Result<(), DataflowError> {
        debug_assert!(w.stack.is_empty());
        w.stack.push(Frame { v, next: 0 });
        while let Some(top) = w.stack.last_mut() {
            let lower = self.g.lower_neighbors(top.v);
            if let Some(&u) = lower.get(top.next) {
                top.next += 1;
                if let Some(rng) = w.rng.as_mut() {
                    if rng.gen_ratio(1, 8) {
                        thread::yield_now();
                    }
                }
                if self.claims.claim(u) {
                    w.stack.push(Frame { v: u, next: 0 });
                    w.max_chain = w.max_chain.max(w.stack.len());
                } else if self.board.try_read(u).is_none() {
                    w.blocked_reads += 1;
                    if let Err(e) = self.board.wait_full(u, self.timeout, Some(&self.abort)) {
                        w.stack.clear();
                        return Err(e);
                    }
                }
            } else {
                // Every lower neighbor is now published. Marks are written in
                // one pass here because a nested frame reuses the same array.
                let v = top.v;
                for &u in lower {
                    let c = self.board.try_read(u).expect("lower neighbor published");
                    w.marks.forbid(c, v);
                }
                let c = w.marks.first_permissible(v);
                w.stack.pop();
                if let Err(e) = self.board.publish(v, c) {
                    w.stack.clear();
                    return Err(e);
                }
            }
        }
        w.max_chain = w.max_chain.max(1);
        Ok(())
    }

    fn finish_worker(&self, w: &WorkerState) {
        self.max_chain.fetch_max(w.max_chain, Ordering::Relaxed);
        self.blocked_reads.fetch_add(w.blocked_reads, Ordering::Relaxed);
    }

    fn fail(&self, e: DataflowError) -> DataflowError {
        self.abort.store(true, Ordering::Relaxed);
        e
    }
}

/// Natural-order first-fit coloring computed by dataflow over `workers`
/// threads.
pub fn dataflow_color(g: &Graph, workers: usize) -> Result<Coloring, DataflowError> {
    dataflow_color_with(g, &DataflowConfig::with_workers(workers)).map(|r| r.coloring)
}

pub fn dataflow_color_with(g: &Graph, config: &DataflowConfig) -> Result<DataflowRun, DataflowError> {
    if config.workers == 0 {
        return Err(DataflowError::NoWorkers);
    }
    let n = g.num_vertices();
    let flow = Dataflow::new(g, config.wait_timeout);
    flow.board.purge();
    flow.claims.reset();

    let results = match config.interleave_seed {
        None => run_workers(config.workers, |i| {
            let mut state = flow.worker(None);
            let mut outcome = Ok(());
            for v in static_block(n, config.workers, i) {
                if let Err(e) = flow.visit(v as Vertex, &mut state) {
                    outcome = Err(flow.fail(e));
                    break;
                }
            }
            flow.finish_worker(&state);
            outcome
        })?,
        Some(seed) => {
            let mut rng = SmallRng::seed_from_u64(seed);
            let mut order: Vec<Vertex> = g.vertices().collect();
            order.shuffle(&mut rng);
            let cursor = ChunkCursor::new(n, rng.gen_range(1..=64));
            let base: u64 = rng.gen();
            run_workers(config.workers, |i| {
                let mut state = flow.worker(Some(base ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)));
                let mut outcome = Ok(());
                'work: while let Some(range) = cursor.grab() {
                    for &v in &order[range] {
                        if let Err(e) = flow.visit(v, &mut state) {
                            outcome = Err(flow.fail(e));
                            break 'work;
                        }
                    }
                }
                flow.finish_worker(&state);
                outcome
            })?
        }
    };

    // Prefer the root cause over the waits it abandoned.
    let mut errors: Vec<DataflowError> = results.into_iter().filter_map(Result::err).collect();
    if let Some(pos) = errors.iter().position(|e| !matches!(e, DataflowError::Aborted(_))) {
        return Err(errors.swap_remove(pos));
    }
    if let Some(e) = errors.pop() {
        return Err(e);
    }
    Ok(DataflowRun {
        coloring: flow.board.to_coloring(),
        max_chain: flow.max_chain.load(Ordering::Relaxed),
        blocked_reads: flow.blocked_reads.load(Ordering::Relaxed),
    })
}
