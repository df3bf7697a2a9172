//! Execution shim: data-parallel loops with a serial fallback.
//!
//! Reductions run over fixed-size index chunks that are merged in chunk
//! order, so results are bitwise identical no matter how many workers
//! execute them (or whether the `parallel` feature is on at all).

#[cfg(feature = "parallel")]
use rayon::prelude::*;

const CHUNK: usize = 4096;

/// Order-preserving map over 0..n.
pub(crate) fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Chunked accumulate-and-merge over 0..n; merge order is fixed.
pub(crate) fn fold_chunks<T, I, B, M>(n: usize, init: I, body: B, merge: M) -> T
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    B: Fn(&mut T, usize) + Sync + Send,
    M: Fn(&mut T, T),
{
    let ranges: Vec<std::ops::Range<usize>> = (0..n.div_ceil(CHUNK))
        .map(|k| k * CHUNK..((k + 1) * CHUNK).min(n))
        .collect();
    let run = |r: std::ops::Range<usize>| {
        let mut acc = init();
        for i in r {
            body(&mut acc, i);
        }
        acc
    };
    #[cfg(feature = "parallel")]
    let parts: Vec<T> = ranges.into_par_iter().map(run).collect();
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<T> = ranges.into_iter().map(run).collect();
    let mut total = init();
    for p in parts {
        merge(&mut total, p);
    }
    total
}

/// Max-reduce a per-index score.
pub(crate) fn max_over<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    fold_chunks(
        n,
        || f64::NEG_INFINITY,
        |acc, i| *acc = acc.max(f(i)),
        |acc, p| *acc = acc.max(p),
    )
}

/// Sum-reduce a per-index value with fixed association.
pub(crate) fn sum_over<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    fold_chunks(n, || 0.0, |acc, i| *acc += f(i), |acc, p| *acc += p)
}
