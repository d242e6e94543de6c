//! Dispatch helpers for the data-parallel inner loops. With the `parallel`
//! feature the work fans out over rayon; without it the same closures run
//! sequentially. Results are scheduling-independent: `any` is order-blind
//! and `find_first` keeps the leftmost hit.

#[cfg(feature = "parallel")]
pub(crate) fn any_indexed<F>(count: usize, f: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().any(f)
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn any_indexed<F>(count: usize, f: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    (0..count).any(f)
}

#[cfg(feature = "parallel")]
pub(crate) fn find_first_indexed<T, F>(count: usize, f: F) -> Option<T>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().find_map_first(f)
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn find_first_indexed<T, F>(count: usize, f: F) -> Option<T>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync + Send,
{
    (0..count).find_map(f)
}

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..count).map(f).collect()
}
