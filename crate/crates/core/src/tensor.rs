//! Dense complex linear algebra on small composite Hilbert spaces.
//!
//! Every vector and operator carries the list of its subsystem dimensions.
//! The composite basis index is row-major over that list: the first
//! subsystem is the most significant digit.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::Tolerances;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// A ket on a composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        let dim: usize = dims.iter().product();
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for dims {:?}",
                amplitudes.len(),
                dims
            )));
        }
        Ok(Self {
            dims,
            amplitudes: DVector::from_vec(amplitudes),
        })
    }

    pub fn from_real(dims: Vec<usize>, amplitudes: &[f64]) -> Result<Self> {
        Self::new(dims, amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Computational basis state `index`.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let dim: usize = dims.iter().product();
        if index >= dim {
            return Err(Error::StateIndexOutOfRange { index, dim });
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Self::new(dims, amplitudes)
    }

    /// Tensor product, `self` as the more significant factor.
    pub fn kron(&self, other: &StateVector) -> StateVector {
        let dims = [self.dims.as_slice(), other.dims.as_slice()].concat();
        StateVector {
            dims,
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= 1e-12
    }

    pub fn normalized(&self) -> Result<StateVector> {
        let norm = self.norm_sqr().sqrt();
        if norm < 1e-15 {
            return Err(Error::ZeroState);
        }
        Ok(StateVector {
            dims: self.dims.clone(),
            amplitudes: self.amplitudes.unscale(norm),
        })
    }
}

/// A square operator on a composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    dims: Vec<usize>,
    entries: DMatrix<C64>,
}

impl OperatorMatrix {
    pub fn new(dims: Vec<usize>, entries: DMatrix<C64>) -> Result<Self> {
        let dim: usize = dims.iter().product();
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for dims {:?}",
                entries.nrows(),
                entries.ncols(),
                dims
            )));
        }
        Ok(Self { dims, entries })
    }

    /// Square matrix over a single subsystem of side `rows.len()`.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("rows of unequal length".into()));
        }
        let entries = DMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j], 0.0));
        Self::new(vec![n], entries)
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let dim = dims.iter().product();
        Self {
            dims,
            entries: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let dim = dims.iter().product();
        Self {
            dims,
            entries: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_real_diagonal(dims: Vec<usize>, diagonal: &[f64]) -> Result<Self> {
        let dv = DVector::from_iterator(diagonal.len(), diagonal.iter().map(|&d| C64::new(d, 0.0)));
        Self::new(dims, DMatrix::from_diagonal(&dv))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn adjoint(&self) -> OperatorMatrix {
        OperatorMatrix {
            dims: self.dims.clone(),
            entries: self.entries.adjoint(),
        }
    }

    /// `max|M - M^dagger|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermiticity_defect() <= rel_tol * self.max_abs()
    }

    pub fn is_diagonal(&self, rel_tol: f64) -> bool {
        self.off_diagonal_max() <= rel_tol * self.max_abs()
    }

    pub(crate) fn off_diagonal_max(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    worst = worst.max(self.entries[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// Real parts of the diagonal.
    pub fn real_diagonal(&self) -> Vec<f64> {
        self.entries.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn add(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.check_same_dims(other)?;
        Ok(OperatorMatrix {
            dims: self.dims.clone(),
            entries: &self.entries + &other.entries,
        })
    }

    pub fn sub(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.check_same_dims(other)?;
        Ok(OperatorMatrix {
            dims: self.dims.clone(),
            entries: &self.entries - &other.entries,
        })
    }

    pub fn matmul(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.check_same_dims(other)?;
        Ok(OperatorMatrix {
            dims: self.dims.clone(),
            entries: &self.entries * &other.entries,
        })
    }

    pub fn scale(&self, factor: f64) -> OperatorMatrix {
        OperatorMatrix {
            dims: self.dims.clone(),
            entries: self.entries.scale(factor),
        }
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.dims() != self.dims() {
            return Err(Error::DimensionMismatch(format!(
                "operator dims {:?} vs state dims {:?}",
                self.dims,
                psi.dims()
            )));
        }
        Ok(StateVector {
            dims: self.dims.clone(),
            amplitudes: &self.entries * psi.amplitudes(),
        })
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        (&self.entries * &self.entries).trace().re
    }

    fn check_same_dims(&self, other: &OperatorMatrix) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(())
    }
}

/// Eigenvalues in ascending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<C64>,
}

impl EigenDecomposition {
    /// `V diag(lambda) V^dagger`.
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let lambda = DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&l| C64::new(l, 0.0)),
        );
        &self.eigenvectors * DMatrix::from_diagonal(&lambda) * self.eigenvectors.adjoint()
    }

    pub fn eigenvector(&self, k: usize) -> DVector<C64> {
        self.eigenvectors.column(k).into_owned()
    }
}

/// Kronecker product; `a` is the most significant factor.
pub fn kron(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    OperatorMatrix {
        dims: [a.dims.as_slice(), b.dims.as_slice()].concat(),
        entries: a.entries.kronecker(&b.entries),
    }
}

pub fn eigh(m: &OperatorMatrix) -> Result<EigenDecomposition> {
    eigh_with(m, &Tolerances::default())
}

pub fn eigh_with(m: &OperatorMatrix, tol: &Tolerances) -> Result<EigenDecomposition> {
    let deviation = m.hermiticity_defect();
    let limit = tol.hermitian * m.max_abs();
    if deviation > limit {
        return Err(Error::NotHermitian { deviation, limit });
    }
    let eig = m.entries.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let n = m.dim();
    let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// `|psi><psi|`.
pub fn outer(psi: &StateVector) -> Result<OperatorMatrix> {
    let norm_sq = psi.norm_sqr();
    if (norm_sq - 1.0).abs() > Tolerances::default().normalization {
        return Err(Error::NotNormalized { norm_sq });
    }
    let a = psi.amplitudes();
    Ok(OperatorMatrix {
        dims: psi.dims.clone(),
        entries: a * a.adjoint(),
    })
}

/// Traces out every subsystem not listed in `keep`. The kept subsystems stay
/// in their original relative order.
pub fn partial_trace(rho: &OperatorMatrix, keep: &[usize]) -> Result<OperatorMatrix> {
    let count = rho.dims.len();
    if keep.is_empty() {
        return Err(Error::EmptySubsystemSelection);
    }
    if let Some(&index) = keep.iter().find(|&&k| k >= count) {
        return Err(Error::BadSubsystemIndex { index, count });
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();

    let kept_dims: Vec<usize> = kept.iter().map(|&k| rho.dims[k]).collect();
    let kept_dim: usize = kept_dims.iter().product();

    // For each composite index: (index within kept space, index within traced space).
    let n = rho.dim();
    let split: Vec<(usize, usize)> = (0..n)
        .map(|idx| {
            let mut rem = idx;
            let mut digits = vec![0usize; count];
            for s in (0..count).rev() {
                digits[s] = rem % rho.dims[s];
                rem /= rho.dims[s];
            }
            let (mut k, mut t) = (0usize, 0usize);
            for (s, (&d, &digit)) in rho.dims.iter().zip(&digits).enumerate() {
                if kept.binary_search(&s).is_ok() {
                    k = k * d + digit;
                } else {
                    t = t * d + digit;
                }
            }
            (k, t)
        })
        .collect();

    let mut out = DMatrix::<C64>::zeros(kept_dim, kept_dim);
    for (r, &(kr, tr)) in split.iter().enumerate() {
        for (c, &(kc, tc)) in split.iter().enumerate() {
            if tr == tc {
                out[(kr, kc)] += rho.entries[(r, c)];
            }
        }
    }
    OperatorMatrix::new(kept_dims, out)
}

/// Pauli and ladder operators on one two-level register, index 1 = excited.
pub mod qubit {
    use super::*;

    /// `|1><0|`
    pub fn raising() -> OperatorMatrix {
        OperatorMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]).expect("2x2")
    }

    /// `|0><1|`
    pub fn lowering() -> OperatorMatrix {
        OperatorMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).expect("2x2")
    }

    pub fn sigma_x() -> OperatorMatrix {
        OperatorMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).expect("2x2")
    }

    /// `|1><1|`
    pub fn excited_projector() -> OperatorMatrix {
        OperatorMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, 1.0]]).expect("2x2")
    }
}

#[cfg(test)]
mod tests {
    use super::qubit::*;
    use super::*;

    fn assert_close(a: &DMatrix<C64>, b: &DMatrix<C64>, tol: f64) {
        assert_eq!(a.shape(), b.shape());
        let diff = (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff <= tol, "max diff {diff:e} > {tol:e}\n{a}\n{b}");
    }

    #[test]
    fn kron_identities() {
        let i2 = OperatorMatrix::identity(vec![2]);
        let i4 = kron(&i2, &i2);
        assert_eq!(i4.dims(), &[2, 2]);
        assert_eq!(i4.entries(), &DMatrix::identity(4, 4));

        let p = kron(&excited_projector(), &i2);
        assert_eq!(p.real_diagonal(), vec![0.0, 0.0, 1.0, 1.0]);
        assert_eq!(p.off_diagonal_max(), 0.0);
    }

    #[test]
    fn kron_bit_flip() {
        let xx = kron(&sigma_x(), &sigma_x());
        let zero_zero = StateVector::basis(vec![2, 2], 0).unwrap();
        let out = xx.apply(&zero_zero).unwrap();
        assert_eq!(out, StateVector::basis(vec![2, 2], 3).unwrap());
    }

    #[test]
    fn eigh_diagonal_and_pauli() {
        let d = OperatorMatrix::from_real_diagonal(vec![3], &[3.0, 1.0, 2.0]).unwrap();
        let e = eigh(&d).unwrap();
        for (got, want) in e.eigenvalues.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        let e = eigh(&sigma_x()).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
        assert_close(&e.reconstruct(), sigma_x().entries(), 1e-14);
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = OperatorMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(eigh(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eigh_complex_hermitian() {
        // sigma_y
        let m = OperatorMatrix::new(
            vec![2],
            DMatrix::from_row_slice(2, 2, &[ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO]),
        )
        .unwrap();
        let e = eigh(&m).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert_close(&e.reconstruct(), m.entries(), 1e-14);
        let v = &e.eigenvectors;
        assert_close(&(v.adjoint() * v), &DMatrix::identity(2, 2), 1e-14);
    }

    #[test]
    fn partial_trace_bell_state() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::from_real(vec![2, 2], &[s, 0.0, 0.0, s]).unwrap();
        let rho = outer(&bell).unwrap();
        let reduced = partial_trace(&rho, &[1]).unwrap();
        assert_eq!(reduced.dims(), &[2]);
        assert_close(
            reduced.entries(),
            &DMatrix::identity(2, 2).scale(0.5),
            1e-15,
        );
    }

    #[test]
    fn partial_trace_product_state_keeps_photon() {
        let psi = StateVector::from_real(vec![2, 2], &[0.6, 0.0, 0.0, 0.8]).unwrap();
        let photon = StateVector::basis(vec![3], 1).unwrap();
        let rho = outer(&psi.kron(&photon)).unwrap();
        let reduced = partial_trace(&rho, &[2]).unwrap();
        let expected = outer(&photon).unwrap();
        assert_close(reduced.entries(), expected.entries(), 1e-15);
    }

    #[test]
    fn partial_trace_keeps_order_and_ignores_duplicates() {
        let a = StateVector::basis(vec![2], 1).unwrap();
        let b = StateVector::basis(vec![3], 2).unwrap();
        let c = StateVector::basis(vec![2], 0).unwrap();
        let rho = outer(&a.kron(&b).kron(&c)).unwrap();
        let reduced = partial_trace(&rho, &[2, 0, 2]).unwrap();
        assert_eq!(reduced.dims(), &[2, 2]);
        // |1>|0> in the (a, c) space is index 2
        assert_eq!(reduced.get(2, 2), ONE);
        assert!((reduced.trace() - ONE).norm() < 1e-15);
    }

    #[test]
    fn partial_trace_errors() {
        let rho = OperatorMatrix::identity(vec![2, 2]);
        assert_eq!(
            partial_trace(&rho, &[2]),
            Err(Error::BadSubsystemIndex { index: 2, count: 2 })
        );
        assert_eq!(
            partial_trace(&rho, &[]),
            Err(Error::EmptySubsystemSelection)
        );
    }

    #[test]
    fn outer_examples() {
        let zero = StateVector::basis(vec![2], 0).unwrap();
        assert_eq!(outer(&zero).unwrap().real_diagonal(), vec![1.0, 0.0]);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::from_real(vec![2], &[s, s]).unwrap();
        let rho = outer(&plus).unwrap();
        assert!(rho
            .entries()
            .iter()
            .all(|z| (z - C64::new(0.5, 0.0)).norm() < 1e-15));

        let uniform = StateVector::from_real(vec![2, 2], &[0.5; 4]).unwrap();
        let rho = outer(&uniform).unwrap();
        assert!(rho.entries().iter().all(|z| *z == C64::new(0.25, 0.0)));
        assert!(rho.is_hermitian(1e-12));
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        assert_close(&(rho.entries() * rho.entries()), rho.entries(), 1e-12);
    }

    #[test]
    fn outer_rejects_unnormalized() {
        let psi = StateVector::from_real(vec![2], &[1.0, 1.0]).unwrap();
        assert!(matches!(outer(&psi), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn state_vector_length_checked() {
        assert!(StateVector::from_real(vec![2, 3], &[1.0; 5]).is_err());
    }
}
