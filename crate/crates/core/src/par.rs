//! Data-parallel loop helpers.
//!
//! With the `parallel` feature (default) these dispatch to rayon; without it
//! they run the same closures sequentially. Every helper writes each output
//! element from exactly one closure call and performs no floating-point
//! reductions, so results are bitwise identical for any thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Minimum elements handed to one rayon task.
#[cfg(feature = "parallel")]
const MIN_LEN: usize = 1024;

/// Calls `f(i, &mut data[i])` for every element.
pub fn for_each_indexed<T, F>(data: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    data.par_iter_mut()
        .with_min_len(MIN_LEN)
        .enumerate()
        .for_each(|(i, v)| f(i, v));
    #[cfg(not(feature = "parallel"))]
    data.iter_mut().enumerate().for_each(|(i, v)| f(i, v));
}

/// Calls `f(scratch, chunk_index, chunk)` for consecutive chunks of
/// `chunk_len` elements, with one `init()` scratch value per worker.
pub fn for_each_chunk<T, S, I, F>(data: &mut [T], chunk_len: usize, init: I, f: F)
where
    T: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    data.par_chunks_mut(chunk_len)
        .enumerate()
        .for_each_init(&init, |s, (i, c)| f(s, i, c));
    #[cfg(not(feature = "parallel"))]
    {
        let mut s = init();
        data.chunks_mut(chunk_len)
            .enumerate()
            .for_each(|(i, c)| f(&mut s, i, c));
    }
}

/// True if `pred` holds for any element.
pub fn any<T, P>(data: &[T], pred: P) -> bool
where
    T: Sync,
    P: Fn(&T) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    return data.par_iter().with_min_len(MIN_LEN).any(pred);
    #[cfg(not(feature = "parallel"))]
    data.iter().any(pred)
}

/// Maps `f` over `items`, preserving order.
pub fn map_collect<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    return items.par_iter().map(f).collect();
    #[cfg(not(feature = "parallel"))]
    items.iter().map(f).collect()
}

/// Runs `op` with at most `threads` workers (`None` = library default).
///
/// Sequential builds ignore the limit.
pub fn with_threads<R: Send>(threads: Option<usize>, op: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
        {
            return pool.install(op);
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    op()
}

/// Worker count available to the helpers above.
pub fn current_threads() -> usize {
    #[cfg(feature = "parallel")]
    return rayon::current_num_threads();
    #[cfg(not(feature = "parallel"))]
    1
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_see_their_index() {
        let mut v = vec![0usize; 100];
        for_each_chunk(&mut v, 10, || (), |_, i, c| c.fill(i));
        assert_eq!(v[95], 9);
        assert_eq!(v[0], 0);
    }

    #[test]
    fn indexed_and_any() {
        let mut v = vec![0.0; 5000];
        for_each_indexed(&mut v, |i, x| *x = i as f64);
        assert!(any(&v, |x| *x == 4999.0));
        assert!(!any(&v, |x| x.is_nan()));
        let sq = with_threads(Some(2), || map_collect(&[1, 2, 3], |x| x * x));
        assert_eq!(sq, vec![1, 4, 9]);
    }
}
