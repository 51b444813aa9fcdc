//! Flat `key = value` run configuration.
//!
//! Precedence is command line `--set` over the config file over defaults.
//! Unknown keys are rejected.

use std::fmt::Write as _;

use crate::closed_form::ConsistencyParams;
use crate::inversion::{ForwardPath, InversionProblem};
use crate::sweep::{ModelParams, OutputColumn, Spacing, SweepAxis, SweepSpec, SweepValues};
use crate::Tolerances;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelParams,

    pub observed_omega_s: Option<f64>,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub tol_rel: f64,
    pub max_iter: usize,
    pub forward_path: ForwardPath,

    pub sweep_axis: Option<SweepAxis>,
    pub sweep_values: Option<Vec<f64>>,
    pub sweep_start: Option<f64>,
    pub sweep_stop: Option<f64>,
    pub sweep_count: Option<usize>,
    pub sweep_spacing: Spacing,
    pub sweep_outputs: Vec<OutputColumn>,

    pub oracle_alphas: Vec<f64>,
    pub oracle_radii: Vec<f64>,

    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let oracle = ConsistencyParams::default();
        Self {
            model: ModelParams::default(),
            observed_omega_s: None,
            bracket_lo: crate::inversion::DEFAULT_BRACKET.0,
            bracket_hi: crate::inversion::DEFAULT_BRACKET.1,
            tol_rel: 1e-10,
            max_iter: 200,
            forward_path: ForwardPath::Paper,
            sweep_axis: None,
            sweep_values: None,
            sweep_start: None,
            sweep_stop: None,
            sweep_count: None,
            sweep_spacing: Spacing::Linear,
            sweep_outputs: OutputColumn::ALL.to_vec(),
            oracle_alphas: oracle.alphas,
            oracle_radii: oracle.radii,
            seed: 0,
        }
    }
}

pub const KEYS: &[&str] = &[
    "epsilon_d",
    "R_nm",
    "omega_eV",
    "kappa",
    "n_max",
    "photon_energy_eV",
    "ground_energy_eV",
    "moment_scale",
    "near_field_factor",
    "tol_hermitian",
    "tol_normalization",
    "tol_degeneracy",
    "tol_overlap",
    "observed_omega_s",
    "bracket_lo",
    "bracket_hi",
    "tol_rel",
    "max_iter",
    "forward_path",
    "sweep_axis",
    "sweep_values",
    "sweep_start",
    "sweep_stop",
    "sweep_count",
    "sweep_spacing",
    "sweep_outputs",
    "oracle_alphas",
    "oracle_radii",
    "seed",
];

fn number(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| ConfigError(format!("{key}: '{value}' is not a number")))
}

fn integer<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| ConfigError(format!("{key}: '{value}' is not a non-negative integer")))
}

fn number_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| number(key, s))
        .collect()
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl RunConfig {
    /// Builds a config from optional file text and `key=value` overrides.
    pub fn from_sources(file_text: Option<&str>, overrides: &[String]) -> Result<Self> {
        let mut cfg = RunConfig::default();
        if let Some(text) = file_text {
            let mut seen = std::collections::HashSet::new();
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    ConfigError(format!("line {}: expected key = value", lineno + 1))
                })?;
                let key = key.trim();
                if !seen.insert(key.to_string()) {
                    return Err(ConfigError(format!(
                        "line {}: duplicate key '{key}'",
                        lineno + 1
                    )));
                }
                cfg.set(key, value.trim())?;
            }
        }
        for item in overrides {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("--set '{item}': expected key=value")))?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let m = &mut self.model;
        match key {
            "epsilon_d" => m.epsilon_d = number(key, value)?,
            "R_nm" => m.r_nm = number(key, value)?,
            "omega_eV" => m.omega_ev = number(key, value)?,
            "kappa" => m.kappa = number(key, value)?,
            "n_max" => m.n_max = integer(key, value)?,
            "photon_energy_eV" => {
                m.photon_energy_ev = match value {
                    "resonant" => None,
                    v => Some(number(key, v)?),
                }
            }
            "ground_energy_eV" => m.ground_energy_ev = number(key, value)?,
            "moment_scale" => m.moment_scale = number(key, value)?,
            "near_field_factor" => m.near_field_factor = number(key, value)?,
            "tol_hermitian" => m.tolerances.hermitian = number(key, value)?,
            "tol_normalization" => m.tolerances.normalization = number(key, value)?,
            "tol_degeneracy" => m.tolerances.degeneracy = number(key, value)?,
            "tol_overlap" => m.tolerances.overlap_threshold = number(key, value)?,
            "observed_omega_s" => self.observed_omega_s = Some(number(key, value)?),
            "bracket_lo" => self.bracket_lo = number(key, value)?,
            "bracket_hi" => self.bracket_hi = number(key, value)?,
            "tol_rel" => self.tol_rel = number(key, value)?,
            "max_iter" => self.max_iter = integer(key, value)?,
            "forward_path" => self.forward_path = value.parse().map_err(ConfigError)?,
            "sweep_axis" => {
                self.sweep_axis = Some(
                    value
                        .parse()
                        .map_err(|e: crate::Error| ConfigError(format!("sweep_axis: {e}")))?,
                )
            }
            "sweep_values" => self.sweep_values = Some(number_list(key, value)?),
            "sweep_start" => self.sweep_start = Some(number(key, value)?),
            "sweep_stop" => self.sweep_stop = Some(number(key, value)?),
            "sweep_count" => self.sweep_count = Some(integer(key, value)?),
            "sweep_spacing" => {
                self.sweep_spacing = match value {
                    "linear" => Spacing::Linear,
                    "log" => Spacing::Log,
                    other => {
                        return Err(ConfigError(format!(
                            "sweep_spacing: '{other}' is not linear|log"
                        )))
                    }
                }
            }
            "sweep_outputs" => {
                self.sweep_outputs = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.parse()
                            .map_err(|e: crate::Error| ConfigError(format!("sweep_outputs: {e}")))
                    })
                    .collect::<Result<_>>()?
            }
            "oracle_alphas" => self.oracle_alphas = number_list(key, value)?,
            "oracle_radii" => self.oracle_radii = number_list(key, value)?,
            "seed" => self.seed = integer(key, value)?,
            other => return Err(ConfigError(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Tolerances {
        self.model.tolerances
    }

    pub fn inversion_problem(&self) -> Result<InversionProblem> {
        let observed = self
            .observed_omega_s
            .ok_or_else(|| ConfigError("observed_omega_s is required for invert".into()))?;
        Ok(InversionProblem {
            observed_omega_s: observed,
            r: self.model.r_nm,
            omega: self.model.omega_ev,
            kappa: self.model.kappa * self.model.moment_scale * self.model.moment_scale,
            bracket: (self.bracket_lo, self.bracket_hi),
            tol_rel: self.tol_rel,
            max_iter: self.max_iter,
            path: self.forward_path,
        })
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let axis = self
            .sweep_axis
            .ok_or_else(|| ConfigError("sweep_axis is required for sweep".into()))?;
        let values = match (
            &self.sweep_values,
            self.sweep_start,
            self.sweep_stop,
            self.sweep_count,
        ) {
            (Some(v), None, None, None) => SweepValues::List(v.clone()),
            (None, Some(start), Some(stop), Some(count)) => SweepValues::Range {
                start,
                stop,
                count,
                spacing: self.sweep_spacing,
            },
            _ => {
                return Err(ConfigError(
                    "give either sweep_values or all of sweep_start, sweep_stop, sweep_count"
                        .into(),
                ))
            }
        };
        Ok(SweepSpec {
            axis,
            values,
            fixed: self.model,
            outputs: self.sweep_outputs.clone(),
        })
    }

    pub fn consistency_params(&self) -> ConsistencyParams {
        ConsistencyParams {
            omega: self.model.omega_ev,
            kappa: self.model.kappa * self.model.moment_scale * self.model.moment_scale,
            n_max: self.model.n_max,
            photon_energy: self.model.photon_energy_ev,
            alphas: self.oracle_alphas.clone(),
            radii: self.oracle_radii.clone(),
            tolerances: self.model.tolerances,
        }
    }

    /// Fully resolved configuration, one `key = value` per line, in `KEYS` order.
    pub fn render(&self) -> String {
        let m = &self.model;
        let opt = |v: Option<f64>| v.map_or_else(String::new, |x| x.to_string());
        let mut out = String::new();
        for key in KEYS {
            let value = match *key {
                "epsilon_d" => m.epsilon_d.to_string(),
                "R_nm" => m.r_nm.to_string(),
                "omega_eV" => m.omega_ev.to_string(),
                "kappa" => m.kappa.to_string(),
                "n_max" => m.n_max.to_string(),
                "photon_energy_eV" => m
                    .photon_energy_ev
                    .map_or_else(|| "resonant".into(), |x| x.to_string()),
                "ground_energy_eV" => m.ground_energy_ev.to_string(),
                "moment_scale" => m.moment_scale.to_string(),
                "near_field_factor" => m.near_field_factor.to_string(),
                "tol_hermitian" => m.tolerances.hermitian.to_string(),
                "tol_normalization" => m.tolerances.normalization.to_string(),
                "tol_degeneracy" => m.tolerances.degeneracy.to_string(),
                "tol_overlap" => m.tolerances.overlap_threshold.to_string(),
                "observed_omega_s" => opt(self.observed_omega_s),
                "bracket_lo" => self.bracket_lo.to_string(),
                "bracket_hi" => self.bracket_hi.to_string(),
                "tol_rel" => self.tol_rel.to_string(),
                "max_iter" => self.max_iter.to_string(),
                "forward_path" => self.forward_path.to_string(),
                "sweep_axis" => self
                    .sweep_axis
                    .map_or_else(String::new, |a| a.column_name().into()),
                "sweep_values" => self.sweep_values.as_deref().map_or_else(String::new, join),
                "sweep_start" => opt(self.sweep_start),
                "sweep_stop" => opt(self.sweep_stop),
                "sweep_count" => self.sweep_count.map_or_else(String::new, |c| c.to_string()),
                "sweep_spacing" => match self.sweep_spacing {
                    Spacing::Linear => "linear".into(),
                    Spacing::Log => "log".into(),
                },
                "sweep_outputs" => self
                    .sweep_outputs
                    .iter()
                    .map(|c| c.name())
                    .collect::<Vec<_>>()
                    .join(","),
                "oracle_alphas" => join(&self.oracle_alphas),
                "oracle_radii" => join(&self.oracle_radii),
                "seed" => self.seed.to_string(),
                _ => unreachable!("every key is rendered"),
            };
            let _ = writeln!(out, "{key} = {value}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_then_file_then_cli() {
        let cfg = RunConfig::from_sources(
            Some("# comment\nepsilon_d = 3\nR_nm=0.5   # inline\n\nkappa = 1\n"),
            &["epsilon_d=4".to_string()],
        )
        .unwrap();
        assert_eq!(cfg.model.epsilon_d, 4.0);
        assert_eq!(cfg.model.r_nm, 0.5);
        assert_eq!(cfg.model.kappa, 1.0);
        assert_eq!(cfg.model.omega_ev, 1.0);
    }

    #[test]
    fn unknown_and_malformed_keys_fail() {
        let err = RunConfig::from_sources(Some("epsilon = 3"), &[]).unwrap_err();
        assert!(err.0.contains("epsilon"));
        assert!(RunConfig::from_sources(Some("just words"), &[]).is_err());
        assert!(RunConfig::from_sources(None, &["R_nm".into()]).is_err());
        assert!(RunConfig::from_sources(None, &["R_nm=abc".into()])
            .unwrap_err()
            .0
            .contains("R_nm"));
        assert!(RunConfig::from_sources(Some("kappa=1\nkappa=2"), &[]).is_err());
    }

    #[test]
    fn render_round_trips() {
        let cfg = RunConfig::from_sources(
            None,
            &[
                "sweep_axis=R_nm".into(),
                "sweep_values=0.5,1,2".into(),
                "photon_energy_eV=0.8".into(),
                "observed_omega_s=0.93".into(),
                "sweep_outputs=alpha,omega_s".into(),
            ],
        )
        .unwrap();
        // unset optional keys render empty and are not valid input
        let text: String = cfg
            .render()
            .lines()
            .filter(|l| !l.ends_with("= "))
            .map(|l| format!("{l}\n"))
            .collect();
        assert_eq!(RunConfig::from_sources(Some(&text), &[]).unwrap(), cfg);
    }

    #[test]
    fn sweep_spec_needs_one_value_source() {
        let cfg = RunConfig::from_sources(None, &["sweep_axis=epsilon_d".into()]).unwrap();
        assert!(cfg.sweep_spec().is_err());
        let cfg = RunConfig::from_sources(
            None,
            &[
                "sweep_axis=R_nm".into(),
                "sweep_start=0.5".into(),
                "sweep_stop=4".into(),
                "sweep_count=4".into(),
                "sweep_spacing=log".into(),
            ],
        )
        .unwrap();
        let spec = cfg.sweep_spec().unwrap();
        assert_eq!(spec.values.resolve().unwrap().len(), 4);
    }
}
