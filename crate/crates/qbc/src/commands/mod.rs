pub mod counterfactual;
pub mod nogo;
pub mod run;
pub mod strategies;
pub mod sweep;
pub mod verify;

use rayon::prelude::*;

use crate::error::CliResult;

/// Default reflectivity grid for tables over `R`.
pub const R_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Run `trial(t)` for `t in 0..trials` in parallel, keeping index order.
pub fn par_trials<T, F>(trials: u64, trial: F) -> CliResult<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> qbc_core::Result<T> + Sync,
{
    Ok((0..trials)
        .into_par_iter()
        .map(&trial)
        .collect::<qbc_core::Result<Vec<T>>>()?)
}
