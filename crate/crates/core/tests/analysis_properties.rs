use proptest::prelude::*;
use schedgeo_core::analysis::{
    average_rate_roundrobin, conditional_coverage_fixed_interference, coverage_mode_approximation,
    coverage_probability, coverage_special_case, scheduling_gain,
};
use schedgeo_core::model::max_fading_cdf;
use schedgeo_core::{CoverageQuery, NetworkConfig, NumericsPolicy, Scenario};

const THETA_DB: [f64; 7] = [-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0];

fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

fn query(theta: f64) -> CoverageQuery {
    CoverageQuery::with_default_numerics(theta).unwrap()
}

fn special(theta: f64, ratio: f64, scenario: Scenario) -> f64 {
    coverage_special_case(&query(theta), ratio, scenario).unwrap().probability
}

#[test]
fn coverage_decreases_with_threshold() {
    let noisy = NetworkConfig::new(1.0, 3.0, 1.0, 0.05, 3.0, Scenario::OnlyLoadedBsActive).unwrap();
    let mut last_general = 1.0;
    let mut last_special = 1.0;
    for t in THETA_DB {
        let g = coverage_probability(&noisy, &query(db(t))).unwrap().probability;
        let s = special(db(t), 3.0, Scenario::AllBsActive);
        assert!(g <= last_general && s <= last_special, "theta {t} dB");
        last_general = g;
        last_special = s;
    }
}

#[test]
fn coverage_increases_with_user_density() {
    for t in THETA_DB {
        let vals: Vec<f64> = [0.5, 1.0, 2.0, 5.0, 10.0, 20.0]
            .iter()
            .map(|&r| special(db(t), r, Scenario::AllBsActive))
            .collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]), "theta {t} dB: {vals:?}");
    }
}

#[test]
fn interference_limited_coverage_is_scale_free() {
    for t in [-5.0, 5.0, 15.0] {
        let base = NetworkConfig::interference_limited(4.0, Scenario::AllBsActive).unwrap();
        let reference = coverage_probability(&base, &query(db(t))).unwrap().probability;
        for c in [0.1, 10.0] {
            let scaled = NetworkConfig::new(c, 4.0 * c, 1.0, 0.0, 4.0, Scenario::AllBsActive).unwrap();
            let v = coverage_probability(&scaled, &query(db(t))).unwrap().probability;
            assert!((v - reference).abs() < 1e-8, "c={c} theta {t} dB");
        }
    }
}

#[test]
fn general_form_reduces_to_closed_form() {
    for ratio in [1.0, 5.0] {
        for scenario in [Scenario::AllBsActive, Scenario::OnlyLoadedBsActive] {
            let cfg = NetworkConfig::interference_limited(ratio, scenario).unwrap();
            for t in THETA_DB {
                let g = coverage_probability(&cfg, &query(db(t))).unwrap().probability;
                let s = special(db(t), ratio, scenario);
                assert!((g - s).abs() <= 1e-6, "ratio {ratio} {scenario:?} theta {t} dB");
            }
        }
    }
}

#[test]
fn silent_cells_only_help() {
    for ratio in [0.5, 2.0, 8.0] {
        for t in THETA_DB {
            let s1 = NetworkConfig::new(1.0, ratio, 1.0, 0.02, 3.5, Scenario::AllBsActive).unwrap();
            let s2 = s1.with_scenario(Scenario::OnlyLoadedBsActive);
            let a = coverage_probability(&s1, &query(db(t))).unwrap().probability;
            let b = coverage_probability(&s2, &query(db(t))).unwrap().probability;
            assert!(b >= a, "ratio {ratio} theta {t} dB");
        }
    }
}

#[test]
fn order_statistic_identity() {
    let cfg = NetworkConfig::new(1.0, 2.0, 2.0, 0.3, 3.7, Scenario::AllBsActive).unwrap();
    for n in 0..=20u32 {
        for (r, theta, i0) in [(0.2, 0.5, 0.1), (0.8, 2.0, 1.3), (1.1, 0.05, 4.0)] {
            let x = f64::powf(r, 3.7) * theta * (0.3 + i0) / 2.0;
            let series = conditional_coverage_fixed_interference(r, n, theta, i0, &cfg).unwrap();
            let direct = 1.0 - max_fading_cdf(x, n).unwrap();
            assert!((series - direct).abs() <= 1e-12, "n={n} x={x}");
        }
    }
}

#[test]
fn mode_approximation_close_to_mixture() {
    for ratio in [1.0, 5.0, 10.0] {
        for t in THETA_DB {
            let a = coverage_mode_approximation(&query(db(t)), ratio, Scenario::AllBsActive).unwrap();
            let s = special(db(t), ratio, Scenario::AllBsActive);
            assert!((a.probability - s).abs() <= 0.03, "ratio {ratio} theta {t} dB");
        }
    }
}

#[test]
fn roundrobin_rate_ignores_users_when_all_bs_transmit() {
    let n = NumericsPolicy::default();
    let a = average_rate_roundrobin(&NetworkConfig::interference_limited(1.0, Scenario::AllBsActive).unwrap(), &n).unwrap();
    let b = average_rate_roundrobin(&NetworkConfig::interference_limited(30.0, Scenario::AllBsActive).unwrap(), &n).unwrap();
    assert_eq!(a.nats_per_hz, b.nats_per_hz);
    let crowded = NetworkConfig::interference_limited(1e6, Scenario::OnlyLoadedBsActive).unwrap();
    let c = average_rate_roundrobin(&crowded, &n).unwrap();
    assert!((c.nats_per_hz - a.nats_per_hz).abs() < 1e-9);
}

#[test]
fn gain_grows_with_user_density() {
    let n = NumericsPolicy::default();
    for scenario in [Scenario::AllBsActive, Scenario::OnlyLoadedBsActive] {
        let gains: Vec<f64> = [1.0, 2.0, 5.0, 10.0, 20.0]
            .iter()
            .map(|&r| scheduling_gain(&NetworkConfig::interference_limited(r, scenario).unwrap(), &n).unwrap())
            .collect();
        assert!(gains[0] >= 1.0);
        assert!(gains.windows(2).all(|w| w[1] >= w[0]), "{scenario:?}: {gains:?}");
    }
}

#[test]
fn scenario_gains_converge() {
    let n = NumericsPolicy::default();
    let g1 = scheduling_gain(&NetworkConfig::interference_limited(50.0, Scenario::AllBsActive).unwrap(), &n).unwrap();
    let g2 = scheduling_gain(&NetworkConfig::interference_limited(50.0, Scenario::OnlyLoadedBsActive).unwrap(), &n).unwrap();
    assert!((g2 - g1).abs() / g1 <= 0.05);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coverage_is_a_probability(theta_db in -20.0f64..30.0, ratio in 0.01f64..60.0, loaded in any::<bool>()) {
        let scenario = if loaded { Scenario::OnlyLoadedBsActive } else { Scenario::AllBsActive };
        let v = coverage_special_case(&query(db(theta_db)), ratio, scenario).unwrap();
        prop_assert!((0.0..=1.0).contains(&v.probability));
        prop_assert!((v.raw_probability - v.probability).abs() < 1e-9);
    }
}
