use std::num::NonZeroUsize;
use std::thread;

use effx_core::dea::evaluate_dmu;
use effx_core::{Dataset, DeaError, DeaOptions, EfficiencyResult, FrontierReport};

pub const THREADS_ENV: &str = "EFFX_THREADS";

/// Worker count: `EFFX_THREADS` when set to a positive integer, otherwise
/// the machine's available parallelism.
pub fn thread_cap() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| thread::available_parallelism().map(NonZeroUsize::get).unwrap_or(1))
}

/// Same result as `effx_core::dea::run_frontier`, with DMUs split into
/// contiguous blocks across at most `threads` workers. Results are merged
/// in dataset order and the first failure in that order is reported.
pub fn run_frontier_parallel(ds: &Dataset, opts: &DeaOptions, threads: usize) -> Result<FrontierReport, DeaError> {
    opts.validate()?;
    let n = ds.n();
    let workers = threads.clamp(1, n.max(1));
    let block = n.div_ceil(workers);
    let blocks: Vec<Vec<Result<EfficiencyResult, DeaError>>> = thread::scope(|scope| {
        let handles: Vec<_> = (0..n)
            .step_by(block)
            .map(|start| {
                let end = (start + block).min(n);
                scope.spawn(move || (start..end).map(|j| evaluate_dmu(ds, j, opts)).collect::<Vec<_>>())
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("DEA worker panicked"))
            .collect()
    });
    let results = blocks.into_iter().flatten().collect::<Result<Vec<_>, _>>()?;
    Ok(FrontierReport::from_results(
        results,
        ds.discrimination(),
        opts.efficiency_tol,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use effx_core::dea::run_frontier;
    use effx_core::fixture::bundled_fixture;

    #[test]
    fn matches_sequential_for_any_thread_count() {
        let ds = bundled_fixture();
        let opts = DeaOptions::default();
        let seq = run_frontier(&ds, &opts).unwrap();
        for t in [1, 2, 3, 7, 30, 64] {
            assert_eq!(run_frontier_parallel(&ds, &opts, t).unwrap(), seq);
        }
    }
}
