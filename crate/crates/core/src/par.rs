//! Data-parallel map helpers.
//!
//! With the `parallel` feature (default) the hot sweeps run on rayon; without
//! it the same call sites fall back to a sequential map, so the numerical
//! output is identical either way. Reductions are always performed
//! sequentially on the collected vector to keep results bit-reproducible.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, preserving order.
pub fn par_map<I, O, F>(items: &[I], f: F) -> Vec<O>
where
    I: Sync,
    O: Send,
    F: Fn(&I) -> O + Sync + Send,
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

/// Map `f` over indices `0..n`, preserving order.
pub fn par_map_range<O, F>(n: usize, f: F) -> Vec<O>
where
    O: Send,
    F: Fn(usize) -> O + Sync + Send,
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

/// Apply `f` to disjoint chunks of `data` of length `chunk`, in parallel.
/// `f` receives the chunk index and the mutable chunk.
pub fn par_chunks_mut<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(i, c)| f(i, c));
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn par_map_preserves_order() {
        let items: Vec<i64> = (0..1000).collect();
        let out = par_map(&items, |x| x * x);
        for (i, v) in out.iter().enumerate() {
            assert_eq!(*v, (i as i64) * (i as i64));
        }
    }

    #[test]
    fn chunked_map_touches_every_chunk() {
        let mut data = vec![0usize; 64];
        par_chunks_mut(&mut data, 8, |i, c| {
            for v in c.iter_mut() {
                *v = i;
            }
        });
        assert_eq!(data[0], 0);
        assert_eq!(data[63], 7);
    }
}
