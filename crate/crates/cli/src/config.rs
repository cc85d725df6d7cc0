//! Run configuration: built-in defaults, overridden by a TOML file,
//! overridden by command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use schedgeo_core::montecarlo::{SimulationOptions, MIN_EXPECTED_BS};
use schedgeo_core::{NetworkConfig, NumericsPolicy, Scenario};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    General,
    Special,
    Approx,
    Montecarlo,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::General, Method::Special, Method::Approx, Method::Montecarlo];
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "general" => Ok(Method::General),
            "special" => Ok(Method::Special),
            "approx" => Ok(Method::Approx),
            "montecarlo" | "mc" => Ok(Method::Montecarlo),
            other => Err(format!(
                "unknown method '{other}' (expected general, special, approx or montecarlo)"
            )),
        }
    }
}

/// Which interference scenario(s) a command covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScenarioSelect {
    #[serde(rename = "1")]
    AllBsActive,
    #[serde(rename = "2")]
    OnlyLoadedBsActive,
    #[serde(rename = "both")]
    Both,
}

impl ScenarioSelect {
    pub fn scenarios(self) -> Vec<Scenario> {
        match self {
            ScenarioSelect::AllBsActive => vec![Scenario::AllBsActive],
            ScenarioSelect::OnlyLoadedBsActive => vec![Scenario::OnlyLoadedBsActive],
            ScenarioSelect::Both => vec![Scenario::AllBsActive, Scenario::OnlyLoadedBsActive],
        }
    }
}

impl FromStr for ScenarioSelect {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "1" => Ok(ScenarioSelect::AllBsActive),
            "2" => Ok(ScenarioSelect::OnlyLoadedBsActive),
            "both" => Ok(ScenarioSelect::Both),
            other => Err(format!("scenario must be 1, 2 or both, got '{other}'")),
        }
    }
}

impl fmt::Display for ScenarioSelect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioSelect::AllBsActive => "1",
            ScenarioSelect::OnlyLoadedBsActive => "2",
            ScenarioSelect::Both => "both",
        })
    }
}

/// Parses `"-10,-5,0"` or `"-10:5:20"` (start:step:end, end included) or a
/// mix of both separated by commas.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number"));
        match parts.as_slice() {
            [v] => out.push(num(v)?),
            [a, step, b] => {
                let (a, step, b) = (num(a)?, num(step)?, num(b)?);
                if !(step > 0.0) || b < a {
                    return Err(format!("range '{item}' needs start <= end and a positive step"));
                }
                let count = ((b - a) / step + 1e-9).floor() as usize;
                out.extend((0..=count).map(|i| a + step * i as f64));
            }
            _ => return Err(format!("cannot parse grid item '{item}'")),
        }
    }
    if out.is_empty() {
        return Err("grid is empty".into());
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quad_rel_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series_tail_mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_n: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_bs_count: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub far_field_correction: Option<bool>,
}

/// A partial configuration, as read from a file or assembled from flags.
/// Unset fields leave the layer below untouched.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_db: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratios: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioSelect>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub methods: Option<Vec<Method>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numerics: Option<NumericsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSection>,
}

impl ConfigLayer {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Invalid(format!("config file: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
    }
}

/// Fully resolved parameters of one command invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub lambda_b: f64,
    pub power: f64,
    pub noise: f64,
    pub alpha: f64,
    pub theta_db: Vec<f64>,
    pub ratios: Vec<f64>,
    /// `None` lets each command pick its own default.
    pub scenario: Option<ScenarioSelect>,
    pub methods: Vec<Method>,
    pub trials: u64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub numerics: NumericsPolicy,
    pub simulation: SimulationOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            lambda_b: 1.0,
            power: 1.0,
            noise: 0.0,
            alpha: 4.0,
            theta_db: vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0],
            ratios: vec![1.0, 2.0, 5.0, 10.0, 20.0],
            scenario: None,
            methods: Method::ALL.to_vec(),
            trials: 100_000,
            seed: 42,
            out: None,
            numerics: NumericsPolicy::default(),
            simulation: SimulationOptions::default(),
        }
    }
}

impl RunConfig {
    /// Applies every field set in `layer`.
    pub fn apply(&mut self, layer: &ConfigLayer) {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = &layer.$field { self.$field = v.clone(); })*
            };
        }
        take!(lambda_b, power, noise, alpha, theta_db, ratios, methods, trials, seed);
        if layer.scenario.is_some() {
            self.scenario = layer.scenario;
        }
        if layer.out.is_some() {
            self.out = layer.out.clone();
        }
        if let Some(n) = &layer.numerics {
            if let Some(v) = n.quad_rel_tol {
                self.numerics.quad_rel_tol = v;
            }
            if let Some(v) = n.series_tail_mass {
                self.numerics.series_tail_mass = v;
            }
            if let Some(v) = n.max_n {
                self.numerics.max_n = v;
            }
        }
        if let Some(s) = &layer.simulation {
            if let Some(v) = s.expected_bs_count {
                self.simulation.expected_bs_count = v;
            }
            if let Some(v) = s.far_field_correction {
                self.simulation.far_field_correction = v;
            }
        }
        self.numerics.seed = self.seed;
    }

    /// Defaults, then the file, then the flags.
    pub fn resolve(file: Option<&ConfigLayer>, flags: &ConfigLayer) -> CliResult<Self> {
        let mut run = RunConfig::default();
        if let Some(file) = file {
            run.apply(file);
        }
        run.apply(flags);
        run.validate()?;
        Ok(run)
    }

    /// Every effective parameter as a layer, so it can be written back out.
    pub fn to_layer(&self) -> ConfigLayer {
        ConfigLayer {
            lambda_b: Some(self.lambda_b),
            power: Some(self.power),
            noise: Some(self.noise),
            alpha: Some(self.alpha),
            theta_db: Some(self.theta_db.clone()),
            ratios: Some(self.ratios.clone()),
            scenario: self.scenario,
            methods: Some(self.methods.clone()),
            trials: Some(self.trials),
            seed: Some(self.seed),
            out: self.out.clone(),
            numerics: Some(NumericsSection {
                quad_rel_tol: Some(self.numerics.quad_rel_tol),
                series_tail_mass: Some(self.numerics.series_tail_mass),
                max_n: Some(self.numerics.max_n),
            }),
            simulation: Some(SimulationSection {
                expected_bs_count: Some(self.simulation.expected_bs_count),
                far_field_correction: Some(self.simulation.far_field_correction),
            }),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_layer()).expect("plain data always serializes")
    }

    pub fn wants(&self, method: Method) -> bool {
        self.methods.contains(&method)
    }

    pub fn thetas_linear(&self) -> Vec<f64> {
        self.theta_db.iter().map(|&db| db_to_linear(db)).collect()
    }

    pub fn network(&self, ratio: f64, scenario: Scenario) -> CliResult<NetworkConfig> {
        NetworkConfig::new(self.lambda_b, ratio * self.lambda_b, self.power, self.noise, self.alpha, scenario)
            .map_err(|e| CliError::Invalid(format!("ratio {ratio}: {e}")))
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Invalid(m));
        if self.theta_db.is_empty() {
            return bad("theta_db grid is empty".into());
        }
        if let Some(t) = self.theta_db.iter().find(|t| !t.is_finite()) {
            return bad(format!("theta_db entry {t} is not finite"));
        }
        if self.ratios.is_empty() {
            return bad("ratios grid is empty".into());
        }
        if let Some(r) = self.ratios.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return bad(format!("ratio {r} must be finite and > 0"));
        }
        if self.methods.is_empty() {
            return bad("no methods selected".into());
        }
        if self.wants(Method::Montecarlo) && self.trials < 1 {
            return bad("montecarlo needs trials >= 1".into());
        }
        for &r in &self.ratios {
            self.network(r, Scenario::AllBsActive)?;
        }
        self.numerics
            .validate()
            .map_err(|e| CliError::Invalid(e.to_string()))?;
        if !(self.simulation.expected_bs_count >= MIN_EXPECTED_BS) {
            return bad(format!(
                "simulation.expected_bs_count must be at least {MIN_EXPECTED_BS}, got {}",
                self.simulation.expected_bs_count
            ));
        }
        Ok(())
    }

    /// True when the closed forms for `alpha = 4` without noise apply.
    pub fn closed_forms_apply(&self) -> bool {
        self.alpha == 4.0 && self.noise == 0.0
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_syntax() {
        assert_eq!(parse_grid("-10:5:20").unwrap(), vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0]);
        assert_eq!(parse_grid("1, 2.5,4").unwrap(), vec![1.0, 2.5, 4.0]);
        assert_eq!(parse_grid("0:0.1:0.3,7").unwrap().len(), 5);
        assert!(parse_grid("").is_err());
        assert!(parse_grid("3:1:1").is_err());
        assert!(parse_grid("a").is_err());
    }

    #[test]
    fn layers_override_in_order() {
        let file = ConfigLayer {
            alpha: Some(3.5),
            trials: Some(10),
            ..Default::default()
        };
        let flags = ConfigLayer {
            trials: Some(20),
            ..Default::default()
        };
        let run = RunConfig::resolve(Some(&file), &flags).unwrap();
        assert_eq!(run.alpha, 3.5);
        assert_eq!(run.trials, 20);
        assert_eq!(run.lambda_b, 1.0);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ConfigLayer::from_toml("alpah = 3.0").is_err());
    }

    #[test]
    fn bad_values_rejected() {
        let flags = ConfigLayer {
            alpha: Some(2.0),
            ..Default::default()
        };
        assert!(matches!(RunConfig::resolve(None, &flags), Err(CliError::Invalid(_))));
    }

    #[test]
    fn db_conversion() {
        assert_eq!(db_to_linear(0.0), 1.0);
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
    }
}
