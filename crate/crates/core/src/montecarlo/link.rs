//! Fading draws and the SINR of the tagged user.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;

use super::deployment::Realization;
use crate::model::{sample_exp1, NetworkConfig, Scenario};

/// How the serving BS picks a user in each slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheduler {
    /// Largest instantaneous SNR over short-term average SNR. Under Rayleigh
    /// fading this is the user with the largest fading gain.
    NormalizedSnr,
    /// Channel-oblivious turn taking.
    RoundRobin,
}

/// Everything random about one slot once the deployment is fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkDraw {
    /// Gain of each transmitting interferer.
    pub fading: Vec<f64>,
    /// Distance from the origin to each transmitting interferer.
    pub distances: Vec<f64>,
    /// Gain of the scheduled tagged user.
    pub serving_fading: f64,
}

#[inline]
fn path_gain(d2: f64, alpha: f64) -> f64 {
    if alpha == 4.0 {
        let inv = 1.0 / d2;
        inv * inv
    } else {
        d2.powf(-alpha / 2.0)
    }
}

fn transmits(real: &Realization, scenario: Scenario, b: usize) -> bool {
    b != real.serving_bs && (scenario == Scenario::AllBsActive || real.is_loaded(b))
}

/// Draws one gain per BS in index order (the serving one and silent ones
/// included, so scenarios and schedulers stay coupled on a shared stream),
/// then the scheduled user's gain.
fn draw<R, F>(real: &Realization, cfg: &NetworkConfig, scheduler: Scheduler, rng: &mut R, mut interferer: F) -> f64
where
    R: Rng + ?Sized,
    F: FnMut(usize, f64),
{
    for b in 0..real.bs_points.len() {
        let g = sample_exp1(rng);
        if transmits(real, cfg.scenario, b) {
            interferer(b, g);
        }
    }
    let mut h = sample_exp1(rng);
    if scheduler == Scheduler::NormalizedSnr {
        for _ in 0..real.cell_user_count {
            h = h.max(sample_exp1(rng));
        }
    }
    h
}

impl LinkDraw {
    pub fn sample<R: Rng + ?Sized>(real: &Realization, cfg: &NetworkConfig, scheduler: Scheduler, rng: &mut R) -> Self {
        let mut fading = Vec::new();
        let mut distances = Vec::new();
        let serving_fading = draw(real, cfg, scheduler, rng, |b, g| {
            let p = real.bs_points[b];
            fading.push(g);
            distances.push((p[0] * p[0] + p[1] * p[1]).sqrt());
        });
        LinkDraw {
            fading,
            distances,
            serving_fading,
        }
    }

    /// `P h r^-a / (sigma^2 + P sum_b g_b d_b^-a + extra_interference)`.
    pub fn sinr(&self, cfg: &NetworkConfig, serving_distance: f64, extra_interference: f64) -> f64 {
        let interference: f64 = self
            .fading
            .iter()
            .zip(&self.distances)
            .map(|(g, d)| g * path_gain(d * d, cfg.alpha))
            .sum();
        let signal = cfg.power * self.serving_fading * path_gain(serving_distance * serving_distance, cfg.alpha);
        signal / (cfg.noise + cfg.power * interference + extra_interference)
    }
}

/// Mean interference from transmitters beyond the window, treating them as
/// a Poisson process whose density is the loaded fraction of BSs seen in
/// the inner half of the window.
pub fn far_field_interference(real: &Realization, cfg: &NetworkConfig) -> f64 {
    let w = real.window_radius;
    let density = match cfg.scenario {
        Scenario::AllBsActive => cfg.lambda_b,
        Scenario::OnlyLoadedBsActive => {
            let inner = w * w / 4.0;
            let (mut total, mut loaded) = (0usize, 0usize);
            for (b, p) in real.bs_points.iter().enumerate() {
                if p[0] * p[0] + p[1] * p[1] <= inner {
                    total += 1;
                    loaded += usize::from(real.is_loaded(b));
                }
            }
            if total == 0 {
                cfg.lambda_b
            } else {
                cfg.lambda_b * loaded as f64 / total as f64
            }
        }
    };
    cfg.power * 2.0 * PI * density * w.powf(2.0 - cfg.alpha) / (cfg.alpha - 2.0)
}

/// SINR of the tagged user for one slot. `extra_interference` is added to
/// the sampled interference, typically [`far_field_interference`].
pub fn simulate_sinr<R: Rng + ?Sized>(
    real: &Realization,
    cfg: &NetworkConfig,
    scheduler: Scheduler,
    extra_interference: f64,
    rng: &mut R,
) -> f64 {
    let alpha = cfg.alpha;
    let mut interference = 0.0;
    let h = draw(real, cfg, scheduler, rng, |b, g| {
        let p = real.bs_points[b];
        interference += g * path_gain(p[0] * p[0] + p[1] * p[1], alpha);
    });
    let r = real.serving_distance();
    let signal = cfg.power * h * path_gain(r * r, alpha);
    signal / (cfg.noise + cfg.power * interference + extra_interference)
}
