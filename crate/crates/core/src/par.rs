//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature these dispatch to rayon; without it they run
//! the same closures in index order. Results are always returned in index
//! order, so callers see identical output either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// `f(i)` for every `i` in `0..len`, collected in order.
pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Map over a slice, preserving order.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Lowest index in `range` whose `f` returns `Some`, together with the value.
///
/// Every index of the range may be evaluated; the answer is the same as a
/// sequential scan.
pub fn find_first_in<T, F>(range: std::ops::Range<usize>, f: F) -> Option<(usize, T)>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        range.into_par_iter().filter_map(|i| f(i).map(|v| (i, v))).min_by_key(|(i, _)| *i)
    }
    #[cfg(not(feature = "parallel"))]
    {
        range.into_iter().find_map(|i| f(i).map(|v| (i, v)))
    }
}

/// Sum of `f(i)` over `0..len` in chunks, reduced in chunk order so the
/// floating-point result does not depend on scheduling.
pub fn chunked_sum<F>(len: usize, chunk: usize, f: F) -> f64
where
    F: Fn(std::ops::Range<usize>) -> f64 + Send + Sync,
{
    let chunk = chunk.max(1);
    let chunks = len.div_ceil(chunk);
    map_indexed(chunks, |c| f(c * chunk..((c + 1) * chunk).min(len))).into_iter().sum()
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
