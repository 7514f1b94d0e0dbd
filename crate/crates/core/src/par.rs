//! Fixed-chunk map/reduce that runs on rayon with the `parallel` feature and
//! sequentially without it. Chunk results are collected in index order, so
//! floating-point sums do not depend on the worker count or the feature.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Evaluates `f` on every chunk index in `0..chunks` and returns the results
/// in chunk order.
pub(crate) fn map_chunks<T, F>(chunks: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..chunks).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..chunks).map(f).collect()
    }
}
