//! Unperturbed Hamiltonian and the dipole-dipole perturbation on
//! `tip (2) x image (2) x photon (n_max + 1)`.

use std::fmt;

use crate::dipole::{derive_image, positive, DielectricSample, ImageDipole, TipDipole};
use crate::error::{Error, Result};
use crate::tensor::{kron, qubit, OperatorMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConfig {
    /// highest Fock number kept in the photon register
    pub n_max: usize,
    /// `hbar * omega_ph` in eV; `None` means resonant with the tip gap
    pub photon_energy: Option<f64>,
    /// `d_aa' d_bb' / eps0` (with any geometry factor) in eV nm^3
    pub kappa: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            n_max: 1,
            photon_energy: None,
            kappa: 0.05,
        }
    }
}

impl ModelConfig {
    pub fn validated(self) -> Result<Self> {
        if self.n_max < 1 {
            return Err(Error::InvalidParameter {
                field: "n_max",
                value: self.n_max as f64,
                reason: "must be at least 1",
            });
        }
        if let Some(e) = self.photon_energy {
            positive("photon_energy", e)?;
        }
        positive("kappa", self.kappa)?;
        Ok(self)
    }

    pub fn photon_energy_for(&self, tip: &TipDipole) -> f64 {
        self.photon_energy.unwrap_or(tip.omega)
    }

    pub fn dims(&self) -> Vec<usize> {
        vec![2, 2, self.n_max + 1]
    }

    /// Composite index of `|i_a, i_b, n>`; 0 is the ground level of each dipole.
    pub fn basis_index(&self, i_a: usize, i_b: usize, n: usize) -> usize {
        (i_a * 2 + i_b) * (self.n_max + 1) + n
    }
}

/// Coupling prefactor including the tip's moment scale (the image moment
/// scales with the same factor).
pub fn effective_kappa(tip: &TipDipole, cfg: &ModelConfig) -> f64 {
    cfg.kappa * tip.moment_scale * tip.moment_scale
}

/// `g = kappa * alpha / (2R)^3`.
pub fn coupling_constant(tip: &TipDipole, sample: &DielectricSample, cfg: &ModelConfig) -> f64 {
    effective_kappa(tip, cfg) * sample.alpha() / tip.separation().powi(3)
}

/// Diagonal `H0` with entries `E_a + i_a Omega + E_b + i_b Omega' + n hbar omega_ph`.
pub fn build_h0(tip: &TipDipole, image: &ImageDipole, cfg: &ModelConfig) -> OperatorMatrix {
    let photon = cfg.photon_energy_for(tip);
    let mut diag = Vec::with_capacity(4 * (cfg.n_max + 1));
    for i_a in 0..2 {
        for i_b in 0..2 {
            for n in 0..=cfg.n_max {
                diag.push(
                    tip.ground_energy
                        + i_a as f64 * tip.omega
                        + image.ground_energy
                        + i_b as f64 * image.omega_image
                        + n as f64 * photon,
                );
            }
        }
    }
    OperatorMatrix::from_real_diagonal(cfg.dims(), &diag).expect("dims match")
}

/// Dipole-pair part of `H0`, without the photon register.
pub fn build_pair_h0(tip: &TipDipole, image: &ImageDipole) -> OperatorMatrix {
    let diag: Vec<f64> = (0..4)
        .map(|k| {
            let (i_a, i_b) = (k / 2, k % 2);
            tip.ground_energy
                + i_a as f64 * tip.omega
                + image.ground_energy
                + i_b as f64 * image.omega_image
        })
        .collect();
    OperatorMatrix::from_real_diagonal(vec![2, 2], &diag).expect("dims match")
}

/// `-g (s+s+ + s+s- + s-s+ + s-s-)` on the dipole pair.
pub fn build_pair_delta_h(g: f64) -> OperatorMatrix {
    let (up, down) = (qubit::raising(), qubit::lowering());
    let terms = [
        kron(&up, &up),
        kron(&up, &down),
        kron(&down, &up),
        kron(&down, &down),
    ];
    let sum = terms
        .iter()
        .skip(1)
        .try_fold(terms[0].clone(), |acc, t| acc.add(t))
        .expect("same dims");
    sum.scale(-g)
}

/// Full `delta H`, the identity on the photon register.
pub fn build_delta_h(g: f64, cfg: &ModelConfig) -> OperatorMatrix {
    kron(
        &build_pair_delta_h(g),
        &OperatorMatrix::identity(vec![cfg.n_max + 1]),
    )
}

/// Photon number operator on the full space.
pub fn photon_number(cfg: &ModelConfig) -> OperatorMatrix {
    let counts: Vec<f64> = (0..=cfg.n_max).map(|n| n as f64).collect();
    let n_op = OperatorMatrix::from_real_diagonal(vec![cfg.n_max + 1], &counts).expect("dims");
    kron(&OperatorMatrix::identity(vec![2, 2]), &n_op)
}

/// Conditions under which results are still computed but should be read with care.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeWarning {
    /// `2R / lambdabar` is not below the near-field factor.
    NearField { ratio: f64, factor: f64 },
    /// `g` is not small against the smallest gap the perturbation couples.
    NonPerturbative { g: f64, min_gap: f64 },
}

impl fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegimeWarning::NearField { ratio, factor } => {
                write!(
                    f,
                    "near-field condition violated: 2R/lambdabar = {ratio:.6e} >= {factor}"
                )
            }
            RegimeWarning::NonPerturbative { g, min_gap } => {
                write!(
                    f,
                    "non-perturbative coupling: g = {g:.6e} eV > 0.1 * min gap {min_gap:.6e} eV"
                )
            }
        }
    }
}

impl RegimeWarning {
    /// Short tag used in CSV cells.
    pub fn tag(&self) -> &'static str {
        match self {
            RegimeWarning::NearField { .. } => "near_field",
            RegimeWarning::NonPerturbative { .. } => "non_perturbative",
        }
    }
}

#[derive(Debug, Clone)]
pub struct HamiltonianPair {
    pub h0: OperatorMatrix,
    pub delta_h: OperatorMatrix,
    pub g: f64,
    pub image: ImageDipole,
    pub warnings: Vec<RegimeWarning>,
}

/// Smallest nonzero `|E_m - E_n|` over pairs that `v` actually connects.
/// Near-degenerate levels that the perturbation never mixes do not count.
pub fn min_coupled_gap(h0: &OperatorMatrix, v: &OperatorMatrix) -> Option<f64> {
    let energies = h0.real_diagonal();
    let n = energies.len();
    let mut best: Option<f64> = None;
    for r in 0..n {
        for c in (r + 1)..n {
            if v.get(r, c).norm() == 0.0 {
                continue;
            }
            let gap = (energies[r] - energies[c]).abs();
            if gap > 0.0 {
                best = Some(best.map_or(gap, |b: f64| b.min(gap)));
            }
        }
    }
    best
}

/// Regime warning when `g` exceeds a tenth of the smallest coupled gap.
pub fn perturbative_guard(
    h0: &OperatorMatrix,
    v: &OperatorMatrix,
    g: f64,
) -> Option<RegimeWarning> {
    let min_gap = min_coupled_gap(h0, v)?;
    (g > 0.1 * min_gap).then_some(RegimeWarning::NonPerturbative { g, min_gap })
}

pub fn build_hamiltonians(
    tip: &TipDipole,
    sample: &DielectricSample,
    cfg: &ModelConfig,
) -> Result<HamiltonianPair> {
    let tip = tip.validated()?;
    let cfg = cfg.validated()?;
    let image = derive_image(&tip, sample)?;
    let g = coupling_constant(&tip, sample, &cfg);
    let h0 = build_h0(&tip, &image, &cfg);
    let delta_h = build_delta_h(g, &cfg);
    let warnings = perturbative_guard(&h0, &delta_h, g).into_iter().collect();
    Ok(HamiltonianPair {
        h0,
        delta_h,
        g,
        image,
        warnings,
    })
}
