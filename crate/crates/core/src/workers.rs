//! Scoped worker threads shared by the parallel colorings.

use std::io;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::thread;

use thiserror::Error;

#[derive(Debug, Error)]
#[error("failed to start worker thread: {0}")]
pub struct SpawnError(#[from] pub io::Error);

/// Runs `body(worker_index)` on `workers` threads and returns the results in
/// worker order. A single worker runs on the calling thread.
pub(crate) fn run_workers<T, F>(workers: usize, body: F) -> Result<Vec<T>, SpawnError>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    if workers <= 1 {
        return Ok(vec![body(0)]);
    }
    thread::scope(|s| {
        let mut handles = Vec::with_capacity(workers);
        for i in 0..workers {
            let body = &body;
            let h = thread::Builder::new()
                .name(format!("gcolor-worker-{i}"))
                .spawn_scoped(s, move || body(i))?;
            handles.push(h);
        }
        Ok(handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|e| std::panic::resume_unwind(e)))
            .collect())
    })
}

/// Half-open index range of worker `i` when `len` items are split into
/// `workers` contiguous blocks.
pub(crate) fn static_block(len: usize, workers: usize, i: usize) -> std::ops::Range<usize> {
    (i * len / workers)..((i + 1) * len / workers)
}

/// Hands out consecutive chunks of `0..len` to whichever worker asks first.
pub(crate) struct ChunkCursor {
    next: AtomicUsize,
    len: usize,
    chunk: usize,
}

impl ChunkCursor {
    pub(crate) fn new(len: usize, chunk: usize) -> Self {
        ChunkCursor {
            next: AtomicUsize::new(0),
            len,
            chunk: chunk.max(1),
        }
    }

    pub(crate) fn grab(&self) -> Option<std::ops::Range<usize>> {
        let start = self.next.fetch_add(self.chunk, Ordering::Relaxed);
        (start < self.len).then(|| start..(start + self.chunk).min(self.len))
    }
}
