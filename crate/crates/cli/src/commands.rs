//! The four subcommands. Each builds its rows in memory, in a fixed order,
//! and then writes them as CSV.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use schedgeo_core::analysis::{
    conditional_coverage_fixed_interference, coverage_mode_approximation, coverage_probability, coverage_special_case,
    average_rate_roundrobin, average_rate_scheduled,
};
use schedgeo_core::model::max_fading_cdf;
use schedgeo_core::montecarlo::{sample_realization, trial_rng, Scheduler};
use schedgeo_core::{CoverageQuery, NetworkConfig, Scenario};
use serde::Serialize;

use crate::config::{db_to_linear, Method, RunConfig, ScenarioSelect};
use crate::error::{CliError, CliResult};
use crate::runner::simulate;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageRow {
    pub theta_db: f64,
    pub ratio: f64,
    pub pc_general: Option<f64>,
    pub pc_special: Option<f64>,
    pub pc_approx: Option<f64>,
    pub pc_mc: Option<f64>,
    pub pc_mc_ci_halfwidth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainRow {
    pub ratio: f64,
    pub scenario: u8,
    pub tau_s: f64,
    pub tau_r: f64,
    pub gain: f64,
    pub gain_mc: Option<f64>,
    pub gain_mc_ci_halfwidth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeploymentRow {
    pub kind: &'static str,
    pub x: f64,
    pub y: f64,
    pub serving_bs_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub check: &'static str,
    pub scenario: u8,
    pub ratio: Option<f64>,
    pub theta_db: Option<f64>,
    pub reference: f64,
    pub candidate: f64,
    pub abs_diff: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    #[allow(clippy::too_many_arguments)]
    fn new(
        check: &'static str,
        scenario: Scenario,
        ratio: Option<f64>,
        theta_db: Option<f64>,
        reference: f64,
        candidate: f64,
        tolerance: f64,
    ) -> Self {
        let abs_diff = (candidate - reference).abs();
        CheckRow {
            check,
            scenario: scenario.index(),
            ratio,
            theta_db,
            reference,
            candidate,
            abs_diff,
            tolerance,
            pass: abs_diff <= tolerance,
        }
    }
}

pub fn write_csv<T: Serialize>(rows: &[T], out: Option<&Path>) -> CliResult<()> {
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| CliError::io(path, e))?)),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()
        .map_err(|e| CliError::io(out.unwrap_or(Path::new("<stdout>")), e))
}

fn single_scenario(run: &RunConfig, command: &str) -> CliResult<Scenario> {
    match run.scenario.unwrap_or(ScenarioSelect::AllBsActive) {
        ScenarioSelect::AllBsActive => Ok(Scenario::AllBsActive),
        ScenarioSelect::OnlyLoadedBsActive => Ok(Scenario::OnlyLoadedBsActive),
        ScenarioSelect::Both => Err(CliError::Invalid(format!(
            "{command} writes one scenario per file; pass --scenario 1 or --scenario 2"
        ))),
    }
}

fn query(run: &RunConfig, theta: f64) -> CliResult<CoverageQuery> {
    Ok(CoverageQuery::new(theta, run.numerics)?)
}

fn is_integer(x: f64) -> bool {
    x >= 1.0 && x.fract() == 0.0
}

/// Coverage probability on the `theta_db x ratios` grid.
pub fn coverage_rows(run: &RunConfig) -> CliResult<Vec<CoverageRow>> {
    let scenario = single_scenario(run, "coverage")?;
    let thetas = run.thetas_linear();
    let cells: Vec<(usize, usize)> = (0..run.ratios.len())
        .flat_map(|r| (0..thetas.len()).map(move |t| (r, t)))
        .collect();
    let analytic: Vec<CliResult<CoverageRow>> = cells
        .par_iter()
        .map(|&(r, t)| {
            let ratio = run.ratios[r];
            let cfg = run.network(ratio, scenario)?;
            let q = query(run, thetas[t])?;
            let closed = run.closed_forms_apply();
            let pc_general = if run.wants(Method::General) {
                Some(coverage_probability(&cfg, &q)?.probability)
            } else {
                None
            };
            let pc_special = if closed && run.wants(Method::Special) {
                Some(coverage_special_case(&q, ratio, scenario)?.probability)
            } else {
                None
            };
            let pc_approx = if closed && is_integer(ratio) && run.wants(Method::Approx) {
                Some(coverage_mode_approximation(&q, ratio, scenario)?.probability)
            } else {
                None
            };
            Ok(CoverageRow {
                theta_db: run.theta_db[t],
                ratio,
                pc_general,
                pc_special,
                pc_approx,
                pc_mc: None,
                pc_mc_ci_halfwidth: None,
            })
        })
        .collect();
    let mut rows = analytic.into_iter().collect::<CliResult<Vec<_>>>()?;
    if run.wants(Method::Montecarlo) {
        for (r, &ratio) in run.ratios.iter().enumerate() {
            let cfg = run.network(ratio, scenario)?;
            let stats = simulate(&cfg, Scheduler::NormalizedSnr, &thetas, run.trials, run.seed, &run.simulation)?;
            for t in 0..thetas.len() {
                let row = &mut rows[r * thetas.len() + t];
                row.pc_mc = Some(stats.coverage(t));
                row.pc_mc_ci_halfwidth = Some(stats.coverage_ci_halfwidth(t));
            }
        }
    }
    Ok(rows)
}

/// Average rates and scheduling gain per ratio and scenario.
pub fn gain_rows(run: &RunConfig) -> CliResult<Vec<GainRow>> {
    let scenarios = run.scenario.unwrap_or(ScenarioSelect::Both).scenarios();
    let cells: Vec<(Scenario, f64)> = scenarios
        .iter()
        .flat_map(|&s| run.ratios.iter().map(move |&r| (s, r)))
        .collect();
    let analytic: Vec<CliResult<GainRow>> = cells
        .par_iter()
        .map(|&(scenario, ratio)| {
            let cfg = run.network(ratio, scenario)?;
            let tau_s = average_rate_scheduled(&cfg, &run.numerics)?.nats_per_hz;
            let tau_r = average_rate_roundrobin(&cfg, &run.numerics)?.nats_per_hz;
            if !(tau_r > 0.0) {
                return Err(CliError::Numerical(format!("round-robin rate {tau_r} at ratio {ratio}")));
            }
            Ok(GainRow {
                ratio,
                scenario: scenario.index(),
                tau_s,
                tau_r,
                gain: tau_s / tau_r,
                gain_mc: None,
                gain_mc_ci_halfwidth: None,
            })
        })
        .collect();
    let mut rows = analytic.into_iter().collect::<CliResult<Vec<_>>>()?;
    if run.wants(Method::Montecarlo) {
        for (row, &(scenario, ratio)) in rows.iter_mut().zip(&cells) {
            let cfg = run.network(ratio, scenario)?;
            let (g, hw) = simulated_gain(run, &cfg)?;
            row.gain_mc = Some(g);
            row.gain_mc_ci_halfwidth = Some(hw);
        }
    }
    Ok(rows)
}

/// Ratio of mean rates on shared draws, with a half-width that ignores the
/// (positive) correlation between the two means and so errs wide.
pub fn simulated_gain(run: &RunConfig, cfg: &NetworkConfig) -> CliResult<(f64, f64)> {
    let s = simulate(cfg, Scheduler::NormalizedSnr, &[], run.trials, run.seed, &run.simulation)?;
    let r = simulate(cfg, Scheduler::RoundRobin, &[], run.trials, run.seed, &run.simulation)?;
    let (a, b) = (s.mean_rate(), r.mean_rate());
    let g = a / b;
    let rel = (s.rate_ci_halfwidth() / a).hypot(r.rate_ci_halfwidth() / b);
    Ok((g, g * rel))
}

/// One sampled deployment: BSs, users, then the tagged user at the origin.
pub fn deployment_rows(run: &RunConfig) -> CliResult<Vec<DeploymentRow>> {
    let ratio = run.ratios[0];
    let cfg = run.network(ratio, Scenario::AllBsActive)?;
    let window = run.simulation.window_radius(&cfg);
    let real = sample_realization(&cfg, window, &mut trial_rng(run.seed, 0))?;
    let mut rows = Vec::with_capacity(real.bs_points.len() + real.user_points.len() + 1);
    rows.extend(real.bs_points.iter().enumerate().map(|(i, p)| DeploymentRow {
        kind: "bs",
        x: p[0],
        y: p[1],
        serving_bs_index: i,
    }));
    rows.extend(real.user_points.iter().zip(&real.user_serving).map(|(p, &b)| DeploymentRow {
        kind: "user",
        x: p[0],
        y: p[1],
        serving_bs_index: b as usize,
    }));
    rows.push(DeploymentRow {
        kind: "tagged",
        x: 0.0,
        y: 0.0,
        serving_bs_index: real.serving_bs,
    });
    Ok(rows)
}

const MC_TOL_CLOSED: f64 = 0.015;
const MC_TOL_GENERAL: f64 = 0.02;
const SPECIALIZATION_TOL: f64 = 1e-6;
const APPROX_TOL: f64 = 0.03;
const IDENTITY_TOL: f64 = 1e-12;

/// Runs the analysis-versus-simulation checks on the configured grid.
pub fn validation_rows(run: &RunConfig) -> CliResult<Vec<CheckRow>> {
    let scenarios = run.scenario.unwrap_or(ScenarioSelect::AllBsActive).scenarios();
    let thetas = run.thetas_linear();
    let closed = run.closed_forms_apply();
    let mut rows = Vec::new();
    for &scenario in &scenarios {
        for &ratio in &run.ratios {
            let cfg = run.network(ratio, scenario)?;
            let reference: Vec<f64> = thetas
                .par_iter()
                .map(|&th| {
                    let q = query(run, th)?;
                    let v = if closed {
                        coverage_special_case(&q, ratio, scenario)?
                    } else {
                        coverage_probability(&cfg, &q)?
                    };
                    Ok(v.probability)
                })
                .collect::<CliResult<_>>()?;
            if closed && run.wants(Method::General) {
                for (t, &th) in thetas.iter().enumerate() {
                    let g = coverage_probability(&cfg, &query(run, th)?)?.probability;
                    rows.push(CheckRow::new(
                        "general_vs_closed_form",
                        scenario,
                        Some(ratio),
                        Some(run.theta_db[t]),
                        reference[t],
                        g,
                        SPECIALIZATION_TOL,
                    ));
                }
            }
            if closed && is_integer(ratio) && run.wants(Method::Approx) {
                for (t, &th) in thetas.iter().enumerate() {
                    let a = coverage_mode_approximation(&query(run, th)?, ratio, scenario)?.probability;
                    rows.push(CheckRow::new(
                        "mode_approximation",
                        scenario,
                        Some(ratio),
                        Some(run.theta_db[t]),
                        reference[t],
                        a,
                        APPROX_TOL,
                    ));
                }
            }
            if run.wants(Method::Montecarlo) {
                let stats = simulate(&cfg, Scheduler::NormalizedSnr, &thetas, run.trials, run.seed, &run.simulation)?;
                let floor = if closed { MC_TOL_CLOSED } else { MC_TOL_GENERAL };
                for (t, (&db, &expected)) in run.theta_db.iter().zip(&reference).enumerate() {
                    rows.push(CheckRow::new(
                        "montecarlo_vs_analysis",
                        scenario,
                        Some(ratio),
                        Some(db),
                        expected,
                        stats.coverage(t),
                        floor.max(3.0 * stats.coverage_ci_halfwidth(t)),
                    ));
                }
            }
        }
        if closed && scenario == Scenario::AllBsActive && run.wants(Method::Montecarlo) {
            let cfg = run.network(run.ratios[0], scenario)?;
            let stats = simulate(&cfg, Scheduler::RoundRobin, &[1.0], run.trials, run.seed, &run.simulation)?;
            rows.push(CheckRow::new(
                "roundrobin_baseline",
                scenario,
                None,
                Some(0.0),
                1.0 / (1.0 + std::f64::consts::FRAC_PI_4),
                stats.coverage(0),
                MC_TOL_CLOSED.max(3.0 * stats.coverage_ci_halfwidth(0)),
            ));
        }
    }
    rows.push(order_statistic_check(run)?);
    Ok(rows)
}

fn order_statistic_check(run: &RunConfig) -> CliResult<CheckRow> {
    let cfg = run.network(run.ratios[0], Scenario::AllBsActive)?;
    let mut worst: f64 = 0.0;
    for n in 0..=20u32 {
        for (r, theta_db, i0) in [(0.3, -5.0, 0.2), (0.7, 0.0, 1.0), (1.2, 10.0, 0.05)] {
            let theta = db_to_linear(theta_db);
            let x = f64::powf(r, cfg.alpha) * theta * (cfg.noise + i0) / cfg.power;
            let series = conditional_coverage_fixed_interference(r, n, theta, i0, &cfg)?;
            worst = worst.max((series - (1.0 - max_fading_cdf(x, n)?)).abs());
        }
    }
    Ok(CheckRow::new(
        "order_statistic_identity",
        Scenario::AllBsActive,
        None,
        None,
        0.0,
        worst,
        IDENTITY_TOL,
    ))
}

/// Human-readable pass/fail table.
pub fn render_checks(rows: &[CheckRow]) -> String {
    let mut s = format!(
        "{:<26} {:>3} {:>8} {:>8} {:>10} {:>10} {:>10} {:>10}  result\n",
        "check", "sc", "ratio", "theta_db", "reference", "candidate", "abs_diff", "tolerance"
    );
    let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v}"));
    for r in rows {
        s.push_str(&format!(
            "{:<26} {:>3} {:>8} {:>8} {:>10.6} {:>10.6} {:>10.2e} {:>10.2e}  {}\n",
            r.check,
            r.scenario,
            opt(r.ratio),
            opt(r.theta_db),
            r.reference,
            r.candidate,
            r.abs_diff,
            r.tolerance,
            if r.pass { "PASS" } else { "FAIL" }
        ));
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    s.push_str(&format!("{} checks, {} failed\n", rows.len(), failed));
    s
}
