//! Data-parallel map helpers.
//!
//! Independent work items (sweep cells, benchmark trials, footprint cells)
//! run through [`par_map`], which uses rayon when the `parallel` feature is
//! enabled and falls back to a plain sequential map otherwise. Results are
//! always returned in index order, so the two paths produce identical output.
//!
//! [`seq_map`] is the always-sequential variant; the criterion bench suite
//! uses it as the baseline against `par_map`.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n`, in parallel when the `parallel` feature is enabled.
pub fn par_map<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
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

/// Sequential map over `0..n` regardless of feature flags.
pub fn seq_map<R, F>(n: usize, f: F) -> Vec<R>
where
    F: Fn(usize) -> R,
{
    (0..n).map(f).collect()
}
