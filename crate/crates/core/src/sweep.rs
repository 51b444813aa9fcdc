//! One-dimensional parameter sweeps over the full model.

use std::fmt;
use std::str::FromStr;

use crate::closed_form::{scattered_photon, BetaCoefficients, InitialCoefficients};
use crate::dipole::{
    near_field_check, DielectricSample, NearFieldCheck, TipDipole, DEFAULT_NEAR_FIELD_FACTOR,
};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_hamiltonians, effective_kappa, ModelConfig, RegimeWarning};
use crate::perturbation::rs_pt2_with;
use crate::Tolerances;

/// Every physical input of one model evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub epsilon_d: f64,
    pub r_nm: f64,
    pub omega_ev: f64,
    pub kappa: f64,
    pub n_max: usize,
    /// `None`: resonant with `omega_ev`
    pub photon_energy_ev: Option<f64>,
    pub ground_energy_ev: f64,
    pub moment_scale: f64,
    pub near_field_factor: f64,
    pub tolerances: Tolerances,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            epsilon_d: 1.0,
            r_nm: 1.0,
            omega_ev: 1.0,
            kappa: 0.05,
            n_max: 1,
            photon_energy_ev: None,
            ground_energy_ev: 0.0,
            moment_scale: 1.0,
            near_field_factor: DEFAULT_NEAR_FIELD_FACTOR,
            tolerances: Tolerances::default(),
        }
    }
}

/// Results for one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointEvaluation {
    pub alpha: f64,
    pub g: f64,
    pub delta_e_paper: f64,
    pub delta_e_oracle: f64,
    pub omega_s: f64,
    pub amplitude: f64,
    pub beta: BetaCoefficients,
    pub near_field: NearFieldCheck,
    pub warnings: Vec<RegimeWarning>,
}

impl ModelParams {
    pub fn tip(&self) -> Result<TipDipole> {
        TipDipole::new(self.omega_ev, self.r_nm)?
            .with_moment_scale(self.moment_scale)?
            .with_ground_energy(self.ground_energy_ev)
    }

    pub fn model_config(&self) -> Result<ModelConfig> {
        ModelConfig {
            n_max: self.n_max,
            photon_energy: self.photon_energy_ev,
            kappa: self.kappa,
        }
        .validated()
    }

    /// Range checks for every field, independent of any computation.
    pub fn validate(&self) -> Result<()> {
        DielectricSample::new(self.epsilon_d)?;
        self.tip()?;
        self.model_config()?;
        crate::dipole::positive("near_field_factor", self.near_field_factor)?;
        Ok(())
    }

    /// Closed-form shift, frequency and amplitude next to the engine's
    /// second-order shift for `|a,b,1>`, plus regime checks.
    pub fn evaluate(&self) -> Result<PointEvaluation> {
        self.validate()?;
        let sample = DielectricSample::new(self.epsilon_d)?;
        let tip = self.tip()?;
        let cfg = self.model_config()?;

        let pair = build_hamiltonians(&tip, &sample, &cfg)?;
        let near_field = near_field_check(&tip, &pair.image, self.near_field_factor);
        let mut warnings = Vec::new();
        if !near_field.passes {
            warnings.push(RegimeWarning::NearField {
                ratio: near_field.ratio,
                factor: self.near_field_factor,
            });
        }
        warnings.extend(pair.warnings.iter().copied());

        let alpha = sample.alpha();
        let photon = scattered_photon(
            &InitialCoefficients::ground(),
            self.r_nm,
            alpha,
            self.omega_ev,
            effective_kappa(&tip, &cfg),
        )?;
        let oracle = rs_pt2_with(
            &pair.h0,
            &pair.delta_h,
            cfg.basis_index(0, 0, 1),
            &self.tolerances,
        )?;

        Ok(PointEvaluation {
            alpha,
            g: pair.g,
            delta_e_paper: photon.delta_e,
            delta_e_oracle: oracle.e2,
            omega_s: photon.omega_s,
            amplitude: photon.amplitude,
            beta: photon.beta,
            near_field,
            warnings,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    EpsilonD,
    R,
    Omega,
    Kappa,
}

impl SweepAxis {
    pub fn column_name(&self) -> &'static str {
        match self {
            SweepAxis::EpsilonD => "epsilon_d",
            SweepAxis::R => "R_nm",
            SweepAxis::Omega => "omega_eV",
            SweepAxis::Kappa => "kappa",
        }
    }

    fn apply(&self, base: &ModelParams, value: f64) -> ModelParams {
        let mut p = *base;
        match self {
            SweepAxis::EpsilonD => p.epsilon_d = value,
            SweepAxis::R => p.r_nm = value,
            SweepAxis::Omega => p.omega_ev = value,
            SweepAxis::Kappa => p.kappa = value,
        }
        p
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "epsilon_d" => Ok(SweepAxis::EpsilonD),
            "R_nm" | "R" => Ok(SweepAxis::R),
            "omega_eV" | "omega" => Ok(SweepAxis::Omega),
            "kappa" => Ok(SweepAxis::Kappa),
            other => Err(Error::InvalidSweep(format!(
                "unknown axis '{other}' (expected epsilon_d|R_nm|omega_eV|kappa)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepValues {
    List(Vec<f64>),
    Range {
        start: f64,
        stop: f64,
        count: usize,
        spacing: Spacing,
    },
}

impl SweepValues {
    pub fn resolve(&self) -> Result<Vec<f64>> {
        let values = match *self {
            SweepValues::List(ref v) => v.clone(),
            SweepValues::Range {
                start,
                stop,
                count,
                spacing,
            } => {
                if count < 2 {
                    return Err(Error::InvalidSweep(format!(
                        "count must be >= 2, got {count}"
                    )));
                }
                let last = (count - 1) as f64;
                match spacing {
                    Spacing::Linear => (0..count)
                        .map(|i| start + (stop - start) * i as f64 / last)
                        .collect(),
                    Spacing::Log => {
                        if !(start > 0.0 && stop > 0.0) {
                            return Err(Error::InvalidSweep(
                                "log spacing needs positive endpoints".into(),
                            ));
                        }
                        let ratio = stop / start;
                        (0..count)
                            .map(|i| match i {
                                0 => start,
                                i if i == count - 1 => stop,
                                i => start * ratio.powf(i as f64 / last),
                            })
                            .collect()
                    }
                }
            }
        };
        if values.len() < 2 {
            return Err(Error::InvalidSweep(
                "a sweep needs at least two values".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSweep("sweep values must be finite".into()));
        }
        let increasing = values.windows(2).all(|w| w[1] > w[0]);
        let decreasing = values.windows(2).all(|w| w[1] < w[0]);
        if !(increasing || decreasing) {
            return Err(Error::InvalidSweep(
                "sweep values must be strictly monotone".into(),
            ));
        }
        Ok(values)
    }
}

/// Selectable output columns, in table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OutputColumn {
    Alpha,
    G,
    DeltaEPaper,
    DeltaEOracle,
    OmegaS,
    Amplitude,
    NearFieldRatio,
}

impl OutputColumn {
    pub const ALL: [OutputColumn; 7] = [
        OutputColumn::Alpha,
        OutputColumn::G,
        OutputColumn::DeltaEPaper,
        OutputColumn::DeltaEOracle,
        OutputColumn::OmegaS,
        OutputColumn::Amplitude,
        OutputColumn::NearFieldRatio,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            OutputColumn::Alpha => "alpha",
            OutputColumn::G => "g_eV",
            OutputColumn::DeltaEPaper => "delta_e_paper_eV",
            OutputColumn::DeltaEOracle => "delta_e_oracle_eV",
            OutputColumn::OmegaS => "omega_s",
            OutputColumn::Amplitude => "amplitude",
            OutputColumn::NearFieldRatio => "near_field_ratio",
        }
    }

    pub fn value(&self, p: &PointEvaluation) -> f64 {
        match self {
            OutputColumn::Alpha => p.alpha,
            OutputColumn::G => p.g,
            OutputColumn::DeltaEPaper => p.delta_e_paper,
            OutputColumn::DeltaEOracle => p.delta_e_oracle,
            OutputColumn::OmegaS => p.omega_s,
            OutputColumn::Amplitude => p.amplitude,
            OutputColumn::NearFieldRatio => p.near_field.ratio,
        }
    }
}

impl FromStr for OutputColumn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OutputColumn::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidSweep(format!("unknown output column '{s}'")))
    }
}

impl fmt::Display for OutputColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: SweepValues,
    pub fixed: ModelParams,
    pub outputs: Vec<OutputColumn>,
}

impl SweepSpec {
    pub fn new(axis: SweepAxis, values: SweepValues, fixed: ModelParams) -> Self {
        Self {
            axis,
            values,
            fixed,
            outputs: OutputColumn::ALL.to_vec(),
        }
    }

    /// Resolved axis values; fails on an empty output selection or bad values.
    pub fn validate(&self) -> Result<Vec<f64>> {
        if self.outputs.is_empty() {
            return Err(Error::InvalidSweep("output selection is empty".into()));
        }
        self.values.resolve()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub evaluation: Option<PointEvaluation>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub axis: SweepAxis,
    pub outputs: Vec<OutputColumn>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn column(&self, col: OutputColumn) -> Vec<Option<f64>> {
        self.rows
            .iter()
            .map(|r| r.evaluation.as_ref().map(|e| col.value(e)))
            .collect()
    }
}

/// Evaluates every axis value in order. A failing point is recorded in its
/// row and does not stop the sweep.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    let values = spec.validate()?;
    let rows = values
        .into_iter()
        .map(|v| match spec.axis.apply(&spec.fixed, v).evaluate() {
            Ok(e) => SweepRow {
                axis_value: v,
                evaluation: Some(e),
                error: None,
            },
            Err(err) => SweepRow {
                axis_value: v,
                evaluation: None,
                error: Some(err.to_string()),
            },
        })
        .collect();
    Ok(SweepTable {
        axis: spec.axis,
        outputs: spec.outputs.clone(),
        rows,
    })
}
