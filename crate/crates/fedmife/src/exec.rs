use std::thread;
use std::time::Instant;

use fedmife_core::protocol::{Clock, Executor};

/// Splits `0..len` into `chunks` contiguous ranges of equal size and runs
/// each on its own scoped thread.
#[derive(Clone, Copy, Debug)]
pub struct ChunkedThreads {
    chunks: usize,
}

impl ChunkedThreads {
    pub const DEFAULT_CHUNKS: usize = 15;

    pub fn new(chunks: usize) -> Self {
        Self { chunks: chunks.max(1) }
    }

    pub fn chunks(&self) -> usize {
        self.chunks
    }
}

impl Default for ChunkedThreads {
    fn default() -> Self {
        Self::new(Self::DEFAULT_CHUNKS)
    }
}

impl Executor for ChunkedThreads {
    fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        if self.chunks == 1 || len <= 1 {
            return (0..len).map(f).collect();
        }
        let size = len.div_ceil(self.chunks);
        let f = &f;
        thread::scope(|s| {
            let handles: Vec<_> = (0..len)
                .step_by(size)
                .map(|start| s.spawn(move || (start..(start + size).min(len)).map(f).collect::<Vec<T>>()))
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("worker panicked"))
                .collect()
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct WallClock {
    start: Instant,
}

impl WallClock {
    pub fn new() -> Self {
        Self { start: Instant::now() }
    }
}

impl Default for WallClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for WallClock {
    fn now_ns(&self) -> u64 {
        self.start.elapsed().as_nanos() as u64
    }
}
