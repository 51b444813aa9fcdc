//! Sample, tip dipole, image dipole and the near-field condition.

use crate::error::{Error, Result};

/// Unit conventions. Energies are in eV, lengths in nm and `hbar = 1`, so an
/// angular frequency is numerically equal to its energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitContract;

impl UnitContract {
    /// `hbar * c` in eV nm.
    pub const HBAR_C_EV_NM: f64 = 197.326_980_4;
    pub const HBAR: f64 = 1.0;

    /// Angular frequency in eV/hbar.
    pub fn frequency(energy_ev: f64) -> f64 {
        energy_ev / Self::HBAR
    }

    pub fn energy(frequency: f64) -> f64 {
        frequency * Self::HBAR
    }

    /// `c / omega = hbar c / E`, in nm.
    pub fn reduced_wavelength_nm(energy_ev: f64) -> f64 {
        Self::HBAR_C_EV_NM / energy_ev
    }
}

/// Lossless dielectric half-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DielectricSample {
    epsilon_d: f64,
}

impl DielectricSample {
    pub fn new(epsilon_d: f64) -> Result<Self> {
        // NaN fails the comparison too
        if !epsilon_d.is_finite() || epsilon_d < 1.0 {
            return Err(Error::UnsupportedPermittivity(epsilon_d));
        }
        Ok(Self { epsilon_d })
    }

    pub fn vacuum() -> Self {
        Self { epsilon_d: 1.0 }
    }

    pub fn epsilon_d(&self) -> f64 {
        self.epsilon_d
    }

    pub fn alpha(&self) -> f64 {
        (self.epsilon_d - 1.0) / (self.epsilon_d + 1.0)
    }
}

/// Image-charge coefficient `(eps - 1)/(eps + 1)`.
pub fn image_alpha(sample: &DielectricSample) -> f64 {
    sample.alpha()
}

/// The two-level dipole carried by the AFM tip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TipDipole {
    /// gap `E'_a - E_a` in eV
    pub omega: f64,
    /// dimensionless multiplier on the transition dipole moment
    pub moment_scale: f64,
    /// tip-surface distance in nm
    pub height_r: f64,
    /// `E_a` in eV
    pub ground_energy: f64,
}

impl TipDipole {
    pub fn new(omega: f64, height_r: f64) -> Result<Self> {
        Self {
            omega,
            moment_scale: 1.0,
            height_r,
            ground_energy: 0.0,
        }
        .validated()
    }

    pub fn with_moment_scale(mut self, moment_scale: f64) -> Result<Self> {
        self.moment_scale = moment_scale;
        self.validated()
    }

    pub fn with_ground_energy(mut self, ground_energy: f64) -> Result<Self> {
        self.ground_energy = ground_energy;
        self.validated()
    }

    pub fn validated(self) -> Result<Self> {
        positive("omega", self.omega)?;
        positive("R", self.height_r)?;
        positive("moment_scale", self.moment_scale)?;
        if !self.ground_energy.is_finite() {
            return Err(Error::InvalidParameter {
                field: "ground_energy",
                value: self.ground_energy,
                reason: "must be finite",
            });
        }
        Ok(self)
    }

    pub fn excited_energy(&self) -> f64 {
        self.ground_energy + self.omega
    }

    /// Tip to image distance; the image sits as deep below the surface as
    /// the tip sits above it.
    pub fn separation(&self) -> f64 {
        2.0 * self.height_r
    }
}

pub(crate) fn positive(field: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            field,
            value,
            reason: "must be positive and finite",
        })
    }
}

/// The dipole induced in the sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageDipole {
    pub alpha: f64,
    /// `alpha^2 * Omega`
    pub omega_image: f64,
    /// `alpha * moment_scale`
    pub moment_scale_image: f64,
    pub ground_energy: f64,
    pub excited_energy: f64,
}

pub fn derive_image(tip: &TipDipole, sample: &DielectricSample) -> Result<ImageDipole> {
    let sample = DielectricSample::new(sample.epsilon_d())?;
    image_from_alpha(tip, sample.alpha())
}

/// Image dipole for a given coefficient, bypassing the permittivity. Useful
/// close to `alpha = 1`, where `eps` no longer resolves `alpha` in f64.
pub fn image_from_alpha(tip: &TipDipole, alpha: f64) -> Result<ImageDipole> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidParameter {
            field: "alpha",
            value: alpha,
            reason: "must lie in [0, 1)",
        });
    }
    let a2 = alpha * alpha;
    Ok(ImageDipole {
        alpha,
        omega_image: a2 * tip.omega,
        moment_scale_image: alpha * tip.moment_scale,
        ground_energy: a2 * tip.ground_energy,
        excited_energy: a2 * tip.excited_energy(),
    })
}

/// Outcome of the near-field test `2R << c/omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearFieldCheck {
    pub separation_nm: f64,
    /// shortest reduced wavelength among the dipole transitions
    pub reduced_wavelength_nm: f64,
    pub ratio: f64,
    pub factor: f64,
    pub passes: bool,
}

/// `factor` encodes "much smaller than"; 0.1 is the usual choice.
pub fn near_field_check(tip: &TipDipole, image: &ImageDipole, factor: f64) -> NearFieldCheck {
    let separation_nm = tip.separation();
    let reduced_wavelength_nm = [tip.omega, image.omega_image]
        .into_iter()
        .filter(|&e| e > 0.0)
        .map(UnitContract::reduced_wavelength_nm)
        .fold(f64::INFINITY, f64::min);
    let ratio = separation_nm / reduced_wavelength_nm;
    NearFieldCheck {
        separation_nm,
        reduced_wavelength_nm,
        ratio,
        factor,
        passes: ratio < factor,
    }
}

pub const DEFAULT_NEAR_FIELD_FACTOR: f64 = 0.1;
