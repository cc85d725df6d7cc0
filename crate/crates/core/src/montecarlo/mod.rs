//! Spatial Monte Carlo simulation of the same network model.
//!
//! Each trial samples a fresh deployment on a disk around the tagged user,
//! fresh fading, and records whether the SINR clears each threshold along
//! with `ln(1 + SINR)`. Trial `i` draws from its own ChaCha8 stream, so any
//! split of the trial range across workers reproduces the same numbers.

mod deployment;
mod link;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::NetworkConfig;
use crate::{Error, Result};

pub use deployment::{sample_realization, Point, Realization, MIN_EXPECTED_BS};
pub use link::{far_field_interference, simulate_sinr, LinkDraw, Scheduler};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Below this many hits (or misses) the Wilson interval is reported.
const WILSON_BELOW: u64 = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationOptions {
    /// Mean BS count in the window; sets the window radius.
    pub expected_bs_count: f64,
    /// Add the mean interference from beyond the window.
    pub far_field_correction: bool,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        SimulationOptions {
            expected_bs_count: 200.0,
            far_field_correction: true,
        }
    }
}

impl SimulationOptions {
    pub fn window_radius(&self, cfg: &NetworkConfig) -> f64 {
        (self.expected_bs_count / (PI * cfg.lambda_b)).sqrt()
    }
}

/// Stream for trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Accumulated outcome of a run of trials.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialStatistics {
    pub trials: u64,
    /// Linear SINR thresholds, parallel to `coverage_hits`.
    pub thetas: Vec<f64>,
    pub coverage_hits: Vec<u64>,
    /// Sum of `ln(1 + SINR)`.
    pub rate_sum: f64,
    pub rate_sq_sum: f64,
    pub seed: u64,
    /// Deployments redrawn because they had no BS.
    pub resamples: u64,
}

impl TrialStatistics {
    pub fn empty(thetas: &[f64], seed: u64) -> Self {
        TrialStatistics {
            trials: 0,
            thetas: thetas.to_vec(),
            coverage_hits: vec![0; thetas.len()],
            rate_sum: 0.0,
            rate_sq_sum: 0.0,
            seed,
            resamples: 0,
        }
    }

    fn record(&mut self, sinr: f64) {
        self.trials += 1;
        for (hits, &theta) in self.coverage_hits.iter_mut().zip(&self.thetas) {
            if sinr > theta {
                *hits += 1;
            }
        }
        let rate = sinr.ln_1p();
        self.rate_sum += rate;
        self.rate_sq_sum += rate * rate;
    }

    /// Appends `other`, which must come from the same thresholds and seed.
    pub fn merge(&mut self, other: &TrialStatistics) -> Result<()> {
        if self.thetas != other.thetas || self.seed != other.seed {
            return Err(Error::config("cannot merge statistics from different runs"));
        }
        self.trials += other.trials;
        for (a, b) in self.coverage_hits.iter_mut().zip(&other.coverage_hits) {
            *a += b;
        }
        self.rate_sum += other.rate_sum;
        self.rate_sq_sum += other.rate_sq_sum;
        self.resamples += other.resamples;
        Ok(())
    }

    pub fn coverage(&self, i: usize) -> f64 {
        self.coverage_hits[i] as f64 / self.trials as f64
    }

    /// 95% half-width of `coverage(i)`: normal approximation, Wilson when
    /// either the hit or the miss count is small.
    pub fn coverage_ci_halfwidth(&self, i: usize) -> f64 {
        let n = self.trials as f64;
        let hits = self.coverage_hits[i];
        let p = self.coverage(i);
        let var = p * (1.0 - p) / n;
        if hits < WILSON_BELOW || self.trials - hits < WILSON_BELOW {
            let z2 = Z95 * Z95;
            Z95 / (1.0 + z2 / n) * (var + z2 / (4.0 * n * n)).sqrt()
        } else {
            Z95 * var.sqrt()
        }
    }

    /// Mean of `ln(1 + SINR)` in nats/Hz.
    pub fn mean_rate(&self) -> f64 {
        self.rate_sum / self.trials as f64
    }

    pub fn rate_ci_halfwidth(&self) -> f64 {
        let n = self.trials as f64;
        if self.trials < 2 {
            return f64::INFINITY;
        }
        let mean = self.mean_rate();
        let var = ((self.rate_sq_sum - n * mean * mean) / (n - 1.0)).max(0.0);
        Z95 * (var / n).sqrt()
    }
}

/// Runs trials `range` (trial indices, not counts). Used directly by
/// parallel drivers; [`run_trials`] is the single-threaded front end.
pub fn run_trial_range(
    cfg: &NetworkConfig,
    scheduler: Scheduler,
    thetas: &[f64],
    range: Range<u64>,
    seed: u64,
    opts: &SimulationOptions,
) -> Result<TrialStatistics> {
    cfg.validate()?;
    if thetas.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::domain("thresholds must be >= 0"));
    }
    let window = opts.window_radius(cfg);
    let mut stats = TrialStatistics::empty(thetas, seed);
    let mut real = Realization::default();
    let base = ChaCha8Rng::seed_from_u64(seed);
    for index in range {
        let mut rng = base.clone();
        rng.set_stream(index);
        real.resample(cfg, window, &mut rng)?;
        stats.resamples += u64::from(real.resamples);
        let extra = if opts.far_field_correction {
            far_field_interference(&real, cfg)
        } else {
            0.0
        };
        let sinr = simulate_sinr(&real, cfg, scheduler, extra, &mut rng);
        stats.record(sinr);
    }
    Ok(stats)
}

/// Runs `trials` independent trials: fresh deployment and fading each time.
pub fn run_trials(
    cfg: &NetworkConfig,
    scheduler: Scheduler,
    thetas: &[f64],
    trials: u64,
    seed: u64,
    opts: &SimulationOptions,
) -> Result<TrialStatistics> {
    if trials == 0 {
        return Err(Error::config(format!("need at least one trial, got {trials}")));
    }
    run_trial_range(cfg, scheduler, thetas, 0..trials, seed, opts)
}
