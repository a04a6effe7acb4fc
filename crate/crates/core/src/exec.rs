//! Data-parallel mapping with a sequential fallback.
//!
//! With the `parallel` feature (on by default) work runs on a dedicated
//! rayon pool sized from the configured parallelism. Without it, or with
//! parallelism 1, items are processed in order on the calling thread.
//! Results always come back in input order.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    Parallel { threads: usize },
}

impl ExecMode {
    pub fn from_parallelism(n: usize) -> Self {
        if n <= 1 {
            ExecMode::Sequential
        } else {
            ExecMode::Parallel { threads: n }
        }
    }
}

/// Applies `f` to every item. On failure the error of the earliest failing
/// item is returned, whatever order the work finished in.
pub fn try_map<T, R, E, F>(mode: ExecMode, items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    map(mode, items, f).into_iter().collect()
}

/// Applies `f` to every item, keeping input order.
pub fn map<T, R, F>(mode: ExecMode, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match mode {
        ExecMode::Sequential => items.iter().map(f).collect(),
        ExecMode::Parallel { threads } => parallel_map(threads, items, f),
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, R, F>(threads: usize, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;

    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
        Err(e) => {
            log::warn!("cannot start a {threads}-thread pool ({e}); running sequentially");
            items.iter().map(f).collect()
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, R, F>(_threads: usize, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u32> = (0..1000).collect();
        let seq = map(ExecMode::Sequential, &items, |x| x * 3);
        let par = map(ExecMode::Parallel { threads: 4 }, &items, |x| x * 3);
        assert_eq!(seq, par);
    }

    #[test]
    fn earliest_error_wins() {
        let items: Vec<u32> = (0..500).collect();
        let r: Result<Vec<u32>, u32> = try_map(ExecMode::Parallel { threads: 8 }, &items, |&x| {
            if x % 100 == 37 {
                Err(x)
            } else {
                Ok(x)
            }
        });
        assert_eq!(r, Err(37));
    }

    #[test]
    fn from_parallelism() {
        assert_eq!(ExecMode::from_parallelism(1), ExecMode::Sequential);
        assert_eq!(ExecMode::from_parallelism(3), ExecMode::Parallel { threads: 3 });
    }
}
