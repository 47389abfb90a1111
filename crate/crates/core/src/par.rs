//! Data-parallel helpers. With the `parallel` feature (default) these fan out
//! over rayon's pool; without it they run sequentially with identical results.
//!
//! Every helper preserves input order, so outputs are deterministic regardless
//! of scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub fn num_threads() -> usize {
    #[cfg(feature = "parallel")]
    return rayon::current_num_threads();

    #[cfg(not(feature = "parallel"))]
    return 1;
}

/// `(0..n).map(f).collect()`, possibly in parallel.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    #[cfg(feature = "parallel")]
    return (0..n).into_par_iter().map(f).collect();

    #[cfg(not(feature = "parallel"))]
    return (0..n).map(f).collect();
}

/// `items.iter().map(f).collect()`, possibly in parallel.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Send + Sync,
{
    #[cfg(feature = "parallel")]
    return items.par_iter().map(f).collect();

    #[cfg(not(feature = "parallel"))]
    return items.iter().map(f).collect();
}

pub fn join<A, B, RA, RB>(oper_a: A, oper_b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    #[cfg(feature = "parallel")]
    return rayon::join(oper_a, oper_b);

    #[cfg(not(feature = "parallel"))]
    return (oper_a(), oper_b());
}

/// Elementwise maximum of per-chunk partial results. `n` outputs, `chunks`
/// work items each producing a full-length partial vector.
pub fn max_reduce<F>(n: usize, chunks: usize, f: F) -> Vec<f64>
where
    F: Fn(usize) -> Vec<f64> + Send + Sync,
{
    let merge = |mut a: Vec<f64>, b: Vec<f64>| {
        for (x, y) in a.iter_mut().zip(b) {
            if y > *x {
                *x = y;
            }
        }
        a
    };

    #[cfg(feature = "parallel")]
    return (0..chunks)
        .into_par_iter()
        .map(f)
        .reduce(|| vec![0.0; n], merge);

    #[cfg(not(feature = "parallel"))]
    return (0..chunks).map(f).fold(vec![0.0; n], merge);
}
