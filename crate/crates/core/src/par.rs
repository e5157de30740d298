//! Trial fan-out: rayon when the `parallel` feature is on, a plain loop otherwise.

use std::ops::Range;

#[cfg(feature = "parallel")]
pub fn map_range<T, F>(range: Range<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    range.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<T, F>(range: Range<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    range.map(f).collect()
}

/// Sequential regardless of features; for comparisons and benches.
pub fn map_range_seq<T, F: Fn(u64) -> T>(range: Range<u64>, f: F) -> Vec<T> {
    range.map(f).collect()
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
