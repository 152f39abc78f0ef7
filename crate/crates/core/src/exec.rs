//! Sequential or data-parallel execution of independent work items.

/// How a batch of independent items is evaluated.
///
/// `Parallel` uses rayon when the crate is built with the `parallel` feature
/// and silently degrades to `Sequential` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Evaluates `f(0), .., f(n-1)` and returns the results in index order.
    pub fn map<T, F>(self, n: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }

    /// Folds `f(0), .., f(n-1)` into per-chunk accumulators and merges them.
    /// `merge` must be associative and commutative for the result to be
    /// schedule independent.
    pub fn fold_chunks<A, F, M>(self, n: u64, chunk: u64, f: F, merge: M) -> Option<A>
    where
        A: Send,
        F: Fn(std::ops::Range<u64>) -> A + Sync + Send,
        M: Fn(A, A) -> A + Sync + Send,
    {
        let chunk = chunk.max(1);
        let chunks = n.div_ceil(chunk);
        let range = move |c: u64| (c * chunk)..((c + 1) * chunk).min(n);
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..chunks)
                    .into_par_iter()
                    .map(|c| f(range(c)))
                    .reduce_with(merge)
            }
            _ => (0..chunks).map(|c| f(range(c))).reduce(merge),
        }
    }
}
