//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) work is spread over rayon; without
//! it, or when a single worker is requested, plain iterators are used.
//! Results are always returned in index order.

/// Map `f` over `0..n`, collecting results in order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Run `job` with at most `workers` threads. `None` uses the global pool;
/// `Some(1)` (or a build without the `parallel` feature) runs inline.
pub fn with_workers<R, F>(workers: Option<usize>, job: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        match workers {
            None => job(),
            Some(w) => match rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
            {
                Ok(pool) => pool.install(job),
                Err(_) => job(),
            },
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        job()
    }
}

/// Whether this build can run work in parallel.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
