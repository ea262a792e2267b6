//! Small dense complex linear-algebra helpers shared by the simulator and
//! the readouts.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type RMatrix = DMatrix<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn hermiticity_error(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// `(m + m†) / 2`.
pub fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Eigendecomposition of a Hermitian matrix. Eigenvalues come back in
/// ascending order with matching eigenvector columns.
pub fn eigh(m: &CMatrix) -> (DVector<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (DVector::zeros(0), CMatrix::zeros(0, 0));
    }
    let eig = symmetrize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn eigvalsh(m: &CMatrix) -> DVector<f64> {
    eigh(m).0
}

/// `V diag(values) V†`.
pub fn reassemble(values: &DVector<f64>, vectors: &CMatrix) -> CMatrix {
    let mut scaled = vectors.clone();
    for (j, &v) in values.iter().enumerate() {
        scaled.column_mut(j).scale_mut(v);
    }
    scaled * vectors.adjoint()
}

/// `‖M†M − I‖_max`.
pub fn unitarity_error(m: &CMatrix) -> f64 {
    let n = m.nrows();
    max_abs_diff(&(m.adjoint() * m), &CMatrix::identity(n, n))
}

pub fn to_complex(m: &RMatrix) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}

/// Builds a real matrix from equal-length rows.
pub fn rows_to_matrix(rows: &[Vec<f64>]) -> RMatrix {
    let cols = rows.first().map_or(0, Vec::len);
    RMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j])
}

pub fn matrix_to_rows(m: &RMatrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}
