//! Data-parallel map helpers with a sequential fallback.
//!
//! With the default `parallel` feature the maps run on the ambient rayon
//! thread pool; without it they degrade to plain sequential iteration.
//! Results always come back in input order, and callers derive any per-item
//! RNG seeds from the item index, so output is identical in both modes.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, collecting results in input order.
pub fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
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

/// Map `f` over `0..n`, collecting results in index order.
pub fn map_indices<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
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

/// Always-sequential variant of [`map_indices`], kept as a baseline for the
/// criterion benches comparing both execution modes.
pub fn map_indices_seq<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_input_order() {
        let xs: Vec<u32> = (0..100).collect();
        let ys = map_collect(&xs, |x| x * 2);
        assert_eq!(ys, (0..100).map(|x| x * 2).collect::<Vec<_>>());
        let zs = map_indices(100, |i| i as u32 * 2);
        assert_eq!(zs, ys);
        assert_eq!(map_indices_seq(100, |i| i as u32 * 2), ys);
    }
}
