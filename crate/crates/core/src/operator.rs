//! Dense complex operator kernel.
//!
//! [`OperatorMatrix`] is the single representation used for Hamiltonians,
//! observables and unitaries. Matrices in this crate never exceed 512×512, so
//! everything is dense and `O(n³)` where it has to be.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative Hermiticity tolerance accepted by the spectral routines.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Square complex matrix. Indexing is `(row, column)`.
#[derive(Clone, PartialEq)]
pub struct OperatorMatrix {
    data: DMatrix<Complex64>,
}

impl fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OperatorMatrix({}x{})", self.dim(), self.dim())
    }
}

impl OperatorMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { data: DMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { data: DMatrix::identity(dim, dim) }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self { data: DMatrix::from_fn(dim, dim, f) }
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, |i, j| if i == j { diag[i] } else { ZERO })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, |i, j| if i == j { Complex64::new(diag[i], 0.0) } else { ZERO })
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be a
    /// perfect square.
    pub fn from_row_major(entries: &[Complex64]) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != entries.len() {
            return Err(Error::InvalidSize { what: "row-major entry count", size: entries.len() });
        }
        Ok(Self::from_fn(dim, |i, j| entries[i * dim + j]))
    }

    pub fn from_dmatrix(data: DMatrix<Complex64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::DimensionMismatch { expected: data.nrows(), found: data.ncols() });
        }
        Ok(Self { data })
    }

    pub fn pauli_x() -> Self {
        Self::from_fn(2, |i, j| if i != j { ONE } else { ZERO })
    }

    pub fn pauli_y() -> Self {
        Self::from_fn(2, |i, j| match (i, j) {
            (0, 1) => -I,
            (1, 0) => I,
            _ => ZERO,
        })
    }

    pub fn pauli_z() -> Self {
        Self::from_real_diagonal(&[1.0, -1.0])
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[(row, col)] = value;
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.data
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.data[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self { data: self.data.adjoint() }
    }

    pub fn transpose(&self) -> Self {
        Self { data: self.data.transpose() }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { data: self.data.scale(s) }
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self { data: &self.data * s }
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |a - b|` over all entries.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "max_abs_diff on mismatched dimensions");
        self.data.iter().zip(other.data.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `max |A[j,k] - conj(A[k,j])| / max |A|`, zero for the zero matrix.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim();
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut dev: f64 = 0.0;
        for j in 0..n {
            for k in j..n {
                dev = dev.max((self.data[(j, k)] - self.data[(k, j)].conj()).norm());
            }
        }
        dev / scale
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// `(A + A†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self { data: (&self.data + self.data.adjoint()).scale(0.5) }
    }

    /// `A B - B A`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        self * other
    }

    /// Applies the matrix to a vector.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(v.len(), n, "vector length does not match operator dimension");
        let mut out = vec![ZERO; n];
        // Column-major storage: accumulate column by column.
        for (k, &vk) in v.iter().enumerate() {
            if vk == ZERO {
                continue;
            }
            let col = self.data.column(k);
            for (o, a) in out.iter_mut().zip(col.iter()) {
                *o += a * vk;
            }
        }
        out
    }

    /// Principal `keep × keep` block, i.e. the compression onto the first
    /// `keep` basis vectors.
    pub fn leading_block(&self, keep: usize) -> Self {
        Self { data: self.data.view((0, 0), (keep, keep)).into_owned() }
    }

    /// Compression onto an arbitrary ordered subset of basis indices.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self::from_fn(indices.len(), |i, j| self.data[(indices[i], indices[j])])
    }

    pub fn real_part(&self) -> DMatrix<f64> {
        self.data.map(|z| z.re)
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix { data: &self.data + &rhs.data }
    }
}

impl Add for OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix { data: self.data + rhs.data }
    }
}

impl AddAssign<&OperatorMatrix> for OperatorMatrix {
    fn add_assign(&mut self, rhs: &OperatorMatrix) {
        self.data += &rhs.data;
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix { data: &self.data - &rhs.data }
    }
}

impl Sub for OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix { data: self.data - rhs.data }
    }
}

impl Neg for OperatorMatrix {
    type Output = OperatorMatrix;
    fn neg(self) -> OperatorMatrix {
        OperatorMatrix { data: -self.data }
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix { data: &self.data * &rhs.data }
    }
}

impl Mul for OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix { data: self.data * rhs.data }
    }
}

impl Mul<f64> for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: f64) -> OperatorMatrix {
        self.scale(rhs)
    }
}

impl Mul<f64> for OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: f64) -> OperatorMatrix {
        self.scale(rhs)
    }
}

/// `a ⊗ b` with `(a⊗b)[i·db + j, k·db + l] = a[i,k]·b[j,l]`.
pub fn kron(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    OperatorMatrix { data: a.data.kronecker(&b.data) }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: OperatorMatrix,
}

impl EigenSystem {
    pub fn lowest(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Eigenvector `k` as an owned column.
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.data.column(k).iter().copied().collect()
    }

    /// `V · diag(g(λ)) · V†`.
    fn reassemble(&self, values: impl Fn(f64) -> Complex64) -> OperatorMatrix {
        let v = &self.eigenvectors.data;
        let mut scaled = v.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let g = values(lambda);
            for z in scaled.column_mut(k).iter_mut() {
                *z *= g;
            }
        }
        OperatorMatrix { data: scaled * v.adjoint() }
    }
}

fn require_hermitian(a: &OperatorMatrix) -> Result<()> {
    let deviation = a.hermiticity_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation, tolerance: HERMITIAN_TOL });
    }
    Ok(())
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// Uses Householder tridiagonalization followed by implicit shifted QR
/// sweeps (nalgebra's `SymmetricEigen`) on the exactly symmetrized input.
pub fn hermitian_eig(a: &OperatorMatrix) -> Result<EigenSystem> {
    require_hermitian(a)?;
    let sym = a.hermitian_part();
    let eig = nalgebra::SymmetricEigen::try_new(sym.data, f64::EPSILON, 0)
        .ok_or_else(|| Error::Decomposition("symmetric eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let n = a.dim();
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(EigenSystem { eigenvalues, eigenvectors: OperatorMatrix { data: vectors } })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(a: &OperatorMatrix) -> Result<Vec<f64>> {
    require_hermitian(a)?;
    let sym = a.hermitian_part();
    let mut values: Vec<f64> = sym.data.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

const SCHUR_EPS: f64 = 1e-13;
const SCHUR_MAX_ITER_PER_DIM: usize = 200;

/// Eigenvalues of a general (possibly non-Hermitian) matrix, sorted by real
/// part and then by imaginary part.
pub fn general_eigenvalues(a: &OperatorMatrix) -> Result<Vec<Complex64>> {
    let schur = nalgebra::Schur::try_new(a.data.clone(), SCHUR_EPS, SCHUR_MAX_ITER_PER_DIM * a.dim().max(1))
        .ok_or_else(|| Error::Decomposition("Schur decomposition did not converge".into()))?;
    let values =
        schur.eigenvalues().ok_or_else(|| Error::Decomposition("Schur form has no complex eigenvalues".into()))?;
    let mut values: Vec<Complex64> = values.iter().copied().collect();
    values.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(values)
}

fn clamp_to_floor(lambda: f64, floor: f64) -> f64 {
    if floor > 0.0 && lambda.abs() < floor {
        floor
    } else {
        lambda
    }
}

/// `V · diag(f(λ)) · V†` for Hermitian `a`.
///
/// Eigenvalues with `|λ| < floor` are replaced by `floor` before `f` is
/// applied; pass `floor = 0.0` to disable clamping.
pub fn matrix_function(a: &OperatorMatrix, f: impl Fn(f64) -> f64, floor: f64) -> Result<OperatorMatrix> {
    let eig = hermitian_eig(a)?;
    Ok(eig.reassemble(|l| Complex64::new(f(clamp_to_floor(l, floor)), 0.0)))
}

/// Complex-valued variant of [`matrix_function`], used for principal-branch
/// powers of indefinite operators.
pub fn matrix_function_complex(a: &OperatorMatrix, f: impl Fn(f64) -> Complex64, floor: f64) -> Result<OperatorMatrix> {
    let eig = hermitian_eig(a)?;
    Ok(eig.reassemble(|l| f(clamp_to_floor(l, floor))))
}

/// `exp(-i h t)`, computed spectrally.
pub fn evolve_unitary(h: &OperatorMatrix, t: f64) -> Result<OperatorMatrix> {
    Propagator::new(h).map(|p| p.unitary(t))
}

/// Cached eigendecomposition of a Hamiltonian for repeated evolution at many
/// times.
#[derive(Clone, Debug)]
pub struct Propagator {
    eig: EigenSystem,
}

impl Propagator {
    pub fn new(h: &OperatorMatrix) -> Result<Self> {
        Ok(Self { eig: hermitian_eig(h)? })
    }

    pub fn eigensystem(&self) -> &EigenSystem {
        &self.eig
    }

    pub fn unitary(&self, t: f64) -> OperatorMatrix {
        self.eig.reassemble(|l| Complex64::from_polar(1.0, -l * t))
    }

    /// `exp(-i h t) ψ` in `O(n²)` using the cached eigenbasis.
    pub fn apply(&self, t: f64, psi: &[Complex64]) -> Vec<Complex64> {
        let v = &self.eig.eigenvectors.data;
        let n = v.nrows();
        assert_eq!(psi.len(), n, "state length does not match propagator dimension");
        let coeffs: Vec<Complex64> = (0..n)
            .map(|k| {
                let overlap: Complex64 = v.column(k).iter().zip(psi).map(|(a, b)| a.conj() * b).sum();
                overlap * Complex64::from_polar(1.0, -self.eig.eigenvalues[k] * t)
            })
            .collect();
        let mut out = vec![ZERO; n];
        for (k, c) in coeffs.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(v.column(k).iter()) {
                *o += a * c;
            }
        }
        out
    }
}
