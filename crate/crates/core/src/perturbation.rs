//! Second-order Rayleigh-Schrodinger perturbation theory on dense
//! Hermitian pairs, with an exact-diagonalization cross-check.
//!
//! `H0` must already be diagonal; its basis is the unperturbed eigenbasis.

use crate::error::{Error, Result};
use crate::tensor::{eigh_with, OperatorMatrix, C64};
use crate::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationResult {
    pub state_index: usize,
    pub e0: f64,
    /// `<n|V|n>`
    pub e1: f64,
    pub e2: f64,
    /// First-order corrected ket in the `H0` basis, `c_n = 1` (unnormalized).
    pub corrected_coefficients: Vec<C64>,
    /// `(m, E_n - E_m)` for every `m` coupled to the state.
    pub gap_report: Vec<(usize, f64)>,
}

impl PerturbationResult {
    /// Energy through second order.
    pub fn energy(&self) -> f64 {
        self.e0 + self.e1 + self.e2
    }

    /// Corrected ket scaled to unit norm.
    pub fn normalized_coefficients(&self) -> Vec<C64> {
        let norm = self
            .corrected_coefficients
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt();
        self.corrected_coefficients
            .iter()
            .map(|c| c / norm)
            .collect()
    }
}

pub fn rs_pt2(
    h0: &OperatorMatrix,
    v: &OperatorMatrix,
    state_index: usize,
) -> Result<PerturbationResult> {
    rs_pt2_with(h0, v, state_index, &Tolerances::default())
}

pub fn rs_pt2_with(
    h0: &OperatorMatrix,
    v: &OperatorMatrix,
    state_index: usize,
    tol: &Tolerances,
) -> Result<PerturbationResult> {
    check_inputs(h0, v, state_index, tol)?;
    let energies = h0.real_diagonal();
    let e0 = energies[state_index];
    let limit = tol.degeneracy * h0.max_abs();

    let mut e2 = 0.0;
    let mut coefficients = vec![C64::new(0.0, 0.0); h0.dim()];
    coefficients[state_index] = C64::new(1.0, 0.0);
    let mut gap_report = Vec::new();
    for (m, &em) in energies.iter().enumerate() {
        if m == state_index {
            continue;
        }
        let coupling = v.get(m, state_index);
        if coupling.norm() == 0.0 {
            continue;
        }
        let gap = e0 - em;
        if gap.abs() < limit || gap == 0.0 {
            return Err(Error::DegenerateGap {
                state: state_index,
                partner: m,
                gap: gap.abs(),
                limit,
            });
        }
        e2 += coupling.norm_sqr() / gap;
        coefficients[m] = coupling / gap;
        gap_report.push((m, gap));
    }

    Ok(PerturbationResult {
        state_index,
        e0,
        e1: v.get(state_index, state_index).re,
        e2,
        corrected_coefficients: coefficients,
        gap_report,
    })
}

fn check_inputs(
    h0: &OperatorMatrix,
    v: &OperatorMatrix,
    state_index: usize,
    tol: &Tolerances,
) -> Result<()> {
    if h0.dims() != v.dims() {
        return Err(Error::DimensionMismatch(format!(
            "H0 dims {:?} vs V dims {:?}",
            h0.dims(),
            v.dims()
        )));
    }
    if state_index >= h0.dim() {
        return Err(Error::StateIndexOutOfRange {
            index: state_index,
            dim: h0.dim(),
        });
    }
    if !h0.is_diagonal(tol.hermitian) {
        return Err(Error::NotDiagonal(h0.off_diagonal_max()));
    }
    let deviation = h0.hermiticity_defect();
    let limit = tol.hermitian * h0.max_abs();
    if deviation > limit {
        return Err(Error::NotHermitian { deviation, limit });
    }
    let deviation = v.hermiticity_defect();
    let limit = tol.hermitian * v.max_abs();
    if deviation > limit {
        return Err(Error::NotHermitian { deviation, limit });
    }
    Ok(())
}

/// Second-order estimate next to the exact eigenvalue it approximates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactComparison {
    pub pt2_energy: f64,
    pub exact_energy: f64,
    pub residual: f64,
    /// `|<n|v_k>|^2` of the matched exact eigenvector
    pub overlap: f64,
}

pub fn validate_against_exact(
    h0: &OperatorMatrix,
    v: &OperatorMatrix,
    state_index: usize,
) -> Result<ExactComparison> {
    validate_against_exact_with(h0, v, state_index, &Tolerances::default())
}

pub fn validate_against_exact_with(
    h0: &OperatorMatrix,
    v: &OperatorMatrix,
    state_index: usize,
    tol: &Tolerances,
) -> Result<ExactComparison> {
    let pt2 = rs_pt2_with(h0, v, state_index, tol)?;
    let pt2_energy = pt2.energy();

    if v.max_abs() == 0.0 {
        // H0 is already diagonal, its entries are the exact spectrum
        return Ok(ExactComparison {
            pt2_energy,
            exact_energy: pt2.e0,
            residual: (pt2.e0 - pt2_energy).abs(),
            overlap: 1.0,
        });
    }

    let eig = eigh_with(&h0.add(v)?, tol)?;
    let (best, overlap) = (0..eig.eigenvalues.len())
        .map(|k| (k, eig.eigenvectors[(state_index, k)].norm_sqr()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty spectrum");
    if overlap < tol.overlap_threshold {
        return Err(Error::AmbiguousMatching {
            state: state_index,
            overlap,
            threshold: tol.overlap_threshold,
        });
    }
    let exact_energy = eig.eigenvalues[best];
    Ok(ExactComparison {
        pt2_energy,
        exact_energy,
        residual: (exact_energy - pt2_energy).abs(),
        overlap,
    })
}
