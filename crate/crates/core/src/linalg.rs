//! Dense complex linear algebra: the matrix type every operator in the crate
//! is stored in, Hermitian eigendecomposition, spectral calculus, Kronecker
//! products and the qubit partial trace.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Entrywise tolerance on `max|M - M†|` for a matrix to count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Entrywise tolerance on `max|U†U - 1|` for a matrix to count as unitary.
pub const UNITARY_TOL: f64 = 1e-10;
/// Components below this magnitude are skipped when fixing eigenvector phases.
pub const PHASE_FIX_THRESHOLD: f64 = 1e-8;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Dense complex matrix.
#[derive(Clone, Debug)]
pub struct ComplexMatrix {
    inner: Mat<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            inner: Mat::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: Mat::identity(n, n),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self {
            inner: Mat::from_fn(rows, cols, f),
        }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(Self::from_fn(r, c, |i, j| rows[i][j]))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { ZERO })
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { ZERO })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let c = columns.len();
        let r = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|col| col.len() != r) {
            return Err(Error::Shape("columns of unequal length".into()));
        }
        Ok(Self::from_fn(r, c, |i, j| columns[j][i]))
    }

    /// The outer product `|ket⟩⟨bra|`.
    pub fn outer(ket: &[C64], bra: &[C64]) -> Self {
        Self::from_fn(ket.len(), bra.len(), |i, j| ket[i] * bra[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols(), self.rows(), |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self::from_fn(self.rows(), self.cols(), |i, j| self[(i, j)] * factor)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        Self::from_fn(self.rows(), self.cols(), |i, j| self[(i, j)] * factor)
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols(), rhs.rows(), "matmul dimension mismatch");
        Self {
            inner: &self.inner * &rhs.inner,
        }
    }

    /// `self · v`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols(), v.len(), "apply dimension mismatch");
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows().min(self.cols())).map(|i| self[(i, i)]).sum()
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows()).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows().min(self.cols())).map(|i| self[(i, i)]).collect()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for j in 0..self.cols() {
            for i in 0..self.rows() {
                m = m.max(self[(i, j)].norm());
            }
        }
        m
    }

    /// `max|self - other|` over all entries.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows(), self.cols()), (other.rows(), other.cols()));
        let mut m = 0.0f64;
        for j in 0..self.cols() {
            for i in 0..self.rows() {
                m = m.max((self[(i, j)] - other[(i, j)]).norm());
            }
        }
        m
    }

    /// Maximum absolute row sum; bounds the spectral radius from above.
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut m = 0.0f64;
        for j in 0..n {
            for i in 0..=j {
                m = m.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        m
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() < HERMITIAN_TOL
    }

    /// `max|U†U - 1|`.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.adjoint().matmul(self).max_abs_diff(&Self::identity(self.rows()))
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect() < UNITARY_TOL
    }

    /// `(M + M†) / 2`, used to remove rounding asymmetry from products.
    pub fn hermitian_part(&self) -> Self {
        let n = self.rows();
        Self::from_fn(n, n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// `⟨bra|self|ket⟩`.
    pub fn matrix_element(&self, bra: &[C64], ket: &[C64]) -> C64 {
        inner(bra, &self.apply(ket))
    }

    /// `⟨psi|self|psi⟩`.
    pub fn expectation(&self, psi: &[C64]) -> C64 {
        self.matrix_element(psi, psi)
    }

    /// Sub-matrix on the given row and column index sets.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    pub(crate) fn as_faer(&self) -> &Mat<C64> {
        &self.inner
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.inner[(i, j)]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.inner[(i, j)]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows(), self.cols()), (rhs.rows(), rhs.cols()));
        ComplexMatrix::from_fn(self.rows(), self.cols(), |i, j| self[(i, j)] + rhs[(i, j)])
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows(), self.cols()), (rhs.rows(), rhs.cols()));
        ComplexMatrix::from_fn(self.rows(), self.cols(), |i, j| self[(i, j)] - rhs[(i, j)])
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!((self.rows(), self.cols()), (rhs.rows(), rhs.cols()));
        for j in 0..self.cols() {
            for i in 0..self.rows() {
                self[(i, j)] += rhs[(i, j)];
            }
        }
    }
}

/// `[A, B] = AB - BA`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    &a.matmul(b) - &b.matmul(a)
}

/// `⟨a|b⟩`, conjugating the first argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    assert_eq!(a.len(), b.len(), "inner product of unequal lengths");
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(C64::norm_sqr).sum::<f64>().sqrt()
}

pub fn normalized(v: &[C64]) -> Vec<C64> {
    let n = norm(v);
    v.iter().map(|x| x / n).collect()
}

/// `|⟨a|b⟩|²` for normalised vectors.
pub fn fidelity(a: &[C64], b: &[C64]) -> f64 {
    inner(a, b).norm_sqr()
}

/// Kronecker product of two vectors, `a` as the slow index.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Kronecker product `A ⊗ B`; `A` carries the slow index.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Eigenvalues in ascending order with the matching phase-fixed eigenvectors
/// stored column-wise.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `V f(Λ) V†` for a complex-valued scalar function.
    pub fn map_complex(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let fv: Vec<C64> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        let scaled = ComplexMatrix::from_fn(v.rows(), v.cols(), |i, j| v[(i, j)] * fv[j]);
        scaled.matmul(&v.adjoint())
    }

    /// `V f(Λ) V†` for a real function; the result is Hermitian.
    pub fn map_real(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        self.map_complex(|x| C64::new(f(x), 0.0)).hermitian_part()
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_real(|x| x)
    }

    /// `exp(−i t M) ψ` without forming the propagator.
    pub fn evolve(&self, psi: &[C64], t: f64) -> Vec<C64> {
        let v = &self.vectors;
        let n = self.dim();
        let coeffs: Vec<C64> = (0..n)
            .map(|k| {
                let c: C64 = (0..n).map(|i| v[(i, k)].conj() * psi[i]).sum();
                c * C64::from_polar(1.0, -self.values[k] * t)
            })
            .collect();
        (0..n).map(|i| (0..n).map(|k| v[(i, k)] * coeffs[k]).sum()).collect()
    }
}

/// Makes the first component of modulus above [`PHASE_FIX_THRESHOLD`] real
/// and positive. Applying it twice is a no-op.
pub fn fix_phase(v: &mut [C64]) {
    if let Some(lead) = v.iter().copied().find(|z| z.norm() > PHASE_FIX_THRESHOLD) {
        let rot = lead.conj() / lead.norm();
        for z in v.iter_mut() {
            *z *= rot;
        }
    }
}

/// Runs the dense kernels on the calling thread only. Blocked kernels
/// otherwise split work by thread count, which changes rounding.
pub fn use_sequential_kernels() {
    faer::set_global_parallelism(faer::Par::Seq);
}

/// Hermitian eigendecomposition with ascending eigenvalues and
/// phase-fixed eigenvectors.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(Error::Shape(format!("{}x{} is not square", m.rows(), m.cols())));
    }
    let defect = m.hermiticity_defect();
    if defect >= HERMITIAN_TOL {
        return Err(Error::Precondition(format!(
            "matrix is not Hermitian (max|M - M†| = {defect:e})"
        )));
    }
    let n = m.rows();
    let evd = m
        .as_faer()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical {
            what: format!("eigensolver failed: {e:?}"),
            residual: f64::NAN,
        })?;
    let s = evd.S();
    let u = evd.U();
    let values: Vec<f64> = (0..n).map(|k| s[k].re).collect();
    let mut vectors = ComplexMatrix::from_fn(n, n, |i, j| u[(i, j)]);
    for k in 0..n {
        let mut col = vectors.column(k);
        fix_phase(&mut col);
        for (i, z) in col.into_iter().enumerate() {
            vectors[(i, k)] = z;
        }
    }

    let mv = m.matmul(&vectors);
    let mut residual = 0.0f64;
    for k in 0..n {
        let r: f64 = (0..n)
            .map(|i| (mv[(i, k)] - vectors[(i, k)] * values[k]).norm_sqr())
            .sum::<f64>()
            .sqrt();
        residual = residual.max(r);
    }
    if residual >= 1e-10 * n as f64 {
        return Err(Error::Numerical {
            what: "eigenvector residual above tolerance".into(),
            residual,
        });
    }
    Ok(EigenDecomposition { values, vectors })
}

/// `f(M)` for Hermitian `M` and real `f`, via `V f(Λ) V†`.
pub fn matrix_function(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(m)?.map_real(f))
}

/// `f(M)` for Hermitian `M` and complex-valued `f` (e.g. `exp(i t x)`).
pub fn matrix_function_complex(m: &ComplexMatrix, f: impl Fn(f64) -> C64) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(m)?.map_complex(f))
}

/// `exp(-i t M)` for Hermitian `M`.
pub fn unitary_exp(m: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    matrix_function_complex(m, |x| C64::from_polar(1.0, -x * t))
}

fn qubit_block_dim(rows: usize, cols: usize) -> Result<usize> {
    if rows != cols {
        return Err(Error::Shape(format!("{rows}x{cols} density matrix is not square")));
    }
    if rows == 0 || !rows.is_multiple_of(2) {
        return Err(Error::Shape(format!(
            "dimension {rows} is not divisible by the qubit dimension 2"
        )));
    }
    Ok(rows / 2)
}

/// Traces out everything but the qubit (the slow index) from a density
/// matrix on `qubit ⊗ bosons`.
pub fn partial_trace_boson(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let nb = qubit_block_dim(rho.rows(), rho.cols())?;
    let defect = rho.hermiticity_defect();
    if defect >= HERMITIAN_TOL {
        return Err(Error::Precondition(format!(
            "density matrix is not Hermitian (defect {defect:e})"
        )));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
        return Err(Error::Precondition(format!("density matrix trace is {tr}, not 1")));
    }
    Ok(ComplexMatrix::from_fn(2, 2, |a, b| {
        (0..nb).map(|n| rho[(a * nb + n, b * nb + n)]).sum()
    }))
}

/// Reduced qubit density matrix of a pure state, without forming `|ψ⟩⟨ψ|`.
pub fn reduced_qubit_state(psi: &[C64]) -> Result<ComplexMatrix> {
    let nb = qubit_block_dim(psi.len(), psi.len())?;
    let n2 = psi.iter().map(C64::norm_sqr).sum::<f64>();
    if (n2 - 1.0).abs() > 1e-10 {
        return Err(Error::Precondition(format!("state norm² is {n2}, not 1")));
    }
    Ok(ComplexMatrix::from_fn(2, 2, |a, b| {
        (0..nb).map(|n| psi[a * nb + n] * psi[b * nb + n].conj()).sum()
    }))
}

/// Eigenvalues of a 2x2 Hermitian matrix, ascending.
pub fn eigenvalues_2x2(m: &ComplexMatrix) -> [f64; 2] {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    let mean = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    [mean - r, mean + r]
}
