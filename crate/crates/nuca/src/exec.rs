use nuca_core::{Executor, Result};
use rayon::prelude::*;

/// Runs candidate scans on a rayon pool. The hit with the smallest index
/// wins, so results do not depend on the number of threads.
pub struct Pool {
    pool: rayon::ThreadPool,
}

impl Pool {
    pub fn new(jobs: usize) -> std::result::Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
        Ok(Pool { pool })
    }
}

impl Executor for Pool {
    fn find_first<T, F>(&self, count: usize, probe: F) -> Result<Option<(usize, T)>>
    where
        T: Send,
        F: Fn(usize) -> Result<Option<T>> + Sync,
    {
        let hit = self.pool.install(|| {
            (0..count)
                .into_par_iter()
                .find_map_first(|i| probe(i).transpose().map(|r| (i, r)))
        });
        match hit {
            None => Ok(None),
            Some((i, r)) => r.map(|t| Some((i, t))),
        }
    }
}
