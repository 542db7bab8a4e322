use hesmooth_core::RunExecutor;
use rayon::prelude::*;

/// Runs on a rayon pool. Results come back in run order, so merged tables
/// do not depend on the thread count.
#[derive(Debug, Clone, Copy, Default)]
pub struct Parallel {
    /// `None` uses rayon's global pool (one thread per core).
    pub threads: Option<usize>,
}

impl Parallel {
    pub fn new(threads: Option<usize>) -> Self {
        Self { threads }
    }
}

impl RunExecutor for Parallel {
    fn map_runs<T, F>(&self, runs: u32, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u32) -> T + Sync + Send,
    {
        match self.threads {
            Some(1) => (0..runs).map(f).collect(),
            Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(pool) => pool.install(|| (0..runs).into_par_iter().map(&f).collect()),
                // a pool that cannot be spawned degrades to the caller's thread
                Err(_) => (0..runs).map(f).collect(),
            },
            None => (0..runs).into_par_iter().map(f).collect(),
        }
    }
}
