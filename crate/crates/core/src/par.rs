//! Ordered parallel map with a sequential fallback.
//!
//! With the `parallel` feature, work runs on a rayon pool sized by the
//! caller; without it (or with one worker) the same closure runs in a plain
//! loop. Output order always matches input order.

/// How to execute independent work items.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Parallel with the given worker count (0 = rayon default).
    Parallel(usize),
}

impl Exec {
    pub fn from_workers(workers: usize) -> Self {
        if workers == 1 {
            Exec::Sequential
        } else {
            Exec::Parallel(workers)
        }
    }
}

#[cfg(feature = "parallel")]
pub fn map_ordered<T, R, F>(exec: Exec, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    match exec {
        Exec::Sequential => items.into_iter().map(f).collect(),
        Exec::Parallel(workers) => {
            let run = || items.into_par_iter().map(&f).collect();
            if workers == 0 {
                run()
            } else {
                match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
                    Ok(pool) => pool.install(run),
                    Err(e) => {
                        log::warn!("could not build a {workers}-thread pool ({e}); using the global pool");
                        run()
                    }
                }
            }
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_ordered<T, R, F>(_exec: Exec, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    items.into_iter().map(f).collect()
}
