//! Replica fan-out. Replica `j` always draws from the stream keyed by `j`,
//! so results do not depend on how many workers run them.

use rayon::prelude::*;

use crate::error::{LabError, LabResult};

pub const WORKERS_ENV: &str = "PEELAB_WORKERS";

/// `--workers`, else `PEELAB_WORKERS`, else rayon's default (0).
pub fn worker_count(flag: Option<usize>) -> LabResult<usize> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var(WORKERS_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| LabError::Usage(format!("{WORKERS_ENV}={s} is not a worker count"))),
        Err(_) => Ok(0),
    }
}

pub fn pool(workers: usize) -> LabResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| LabError::Usage(format!("cannot start {workers} workers: {e}")))
}

/// `f(0), ..., f(n - 1)` in index order, computed on the current pool.
pub fn fan_out<T, F>(n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use peelab_core::RngStream;

    #[test]
    fn results_do_not_depend_on_pool_size() {
        let work = |j| RngStream::for_replica(9, j).next_u64();
        let one = pool(1).unwrap().install(|| fan_out(200, work));
        let many = pool(6).unwrap().install(|| fan_out(200, work));
        assert_eq!(one, many);
    }
}
