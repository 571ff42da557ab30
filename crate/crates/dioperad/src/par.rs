//! Parallelism switch. The heavy loops (overlap checking, block counting,
//! oracle ranks) run through these helpers so benchmarks can compare the
//! rayon path against the sequential one at runtime; without the `parallel`
//! feature everything is sequential.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    Rayon,
}

impl Default for Parallelism {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Parallelism::Rayon
        }
        #[cfg(not(feature = "parallel"))]
        {
            Parallelism::Sequential
        }
    }
}

/// Map over items, preserving order.
pub fn map_items<T, U, F>(par: Parallelism, items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    match par {
        Parallelism::Sequential => items.into_iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Parallelism::Rayon => {
            use rayon::prelude::*;
            items.into_par_iter().map(f).collect()
        }
        #[cfg(not(feature = "parallel"))]
        Parallelism::Rayon => items.into_iter().map(f).collect(),
    }
}
