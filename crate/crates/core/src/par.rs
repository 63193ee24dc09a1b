//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature every helper runs on the current rayon pool;
//! without it the same call runs on the calling thread. Results are always
//! collected in input order and reductions happen sequentially over fixed
//! blocks, so output does not depend on the number of threads.

use std::ops::Range;

/// Block length used by the fixed-partition reductions.
pub const BLOCK: usize = 1 << 14;

/// Maps `f` over `items`, preserving order.
#[cfg(feature = "parallel")]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Maps `f` over an index range, preserving order.
#[cfg(feature = "parallel")]
pub fn map_range<R, F>(range: Range<usize>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    use rayon::prelude::*;
    range.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<R, F>(range: Range<usize>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    range.map(f).collect()
}

/// Splits `0..len` into consecutive blocks of [`BLOCK`] indices and maps `f`
/// over them. The partition depends only on `len`.
pub fn map_blocks<R, F>(len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(Range<usize>) -> R + Sync + Send,
{
    let blocks = len.div_ceil(BLOCK);
    map_range(0..blocks, |b| {
        let start = b * BLOCK;
        f(start..(start + BLOCK).min(len))
    })
}

/// Number of worker threads the helpers will use.
pub fn current_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}
