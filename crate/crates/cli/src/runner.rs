//! Parallel trial dispatch with order-independent results.

use rayon::prelude::*;
use schedgeo_core::montecarlo::{run_trial_range, Scheduler, SimulationOptions, TrialStatistics};
use schedgeo_core::NetworkConfig;

use crate::error::CliResult;

/// Trials per work item. Fixed so the merge order, and hence the floating
/// point sums, never depend on the thread count.
pub const BATCH_TRIALS: u64 = 2_000;

pub fn simulate(
    cfg: &NetworkConfig,
    scheduler: Scheduler,
    thetas: &[f64],
    trials: u64,
    seed: u64,
    opts: &SimulationOptions,
) -> CliResult<TrialStatistics> {
    let batches = trials.div_ceil(BATCH_TRIALS);
    let parts: Vec<_> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let range = b * BATCH_TRIALS..((b + 1) * BATCH_TRIALS).min(trials);
            run_trial_range(cfg, scheduler, thetas, range, seed, opts)
        })
        .collect();
    let mut total = TrialStatistics::empty(thetas, seed);
    for part in parts {
        total.merge(&part?)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use schedgeo_core::montecarlo::run_trials;
    use schedgeo_core::Scenario;

    #[test]
    fn batched_equals_serial_counts() {
        let cfg = NetworkConfig::interference_limited(2.0, Scenario::AllBsActive).unwrap();
        let opts = SimulationOptions::default();
        let thetas = [0.5, 2.0];
        let par = simulate(&cfg, Scheduler::NormalizedSnr, &thetas, 4_500, 8, &opts).unwrap();
        let ser = run_trials(&cfg, Scheduler::NormalizedSnr, &thetas, 4_500, 8, &opts).unwrap();
        assert_eq!(par.coverage_hits, ser.coverage_hits);
        assert_eq!(par.trials, 4_500);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let cfg = NetworkConfig::interference_limited(1.0, Scenario::OnlyLoadedBsActive).unwrap();
        let opts = SimulationOptions::default();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate(&cfg, Scheduler::RoundRobin, &[1.0], 5_000, 3, &opts).unwrap())
        };
        let a = run(1);
        let b = run(3);
        assert_eq!(a, b);
        assert_eq!(a.rate_sum.to_bits(), b.rate_sum.to_bits());
    }
}
