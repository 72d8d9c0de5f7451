//! Dense symmetric eigensolver used as an independent check on the
//! tridiagonal kernels.

use nalgebra::DMatrix;

use crate::model::SymTridiagonal;

/// All eigenvalues, ascending, from a dense symmetric decomposition.
pub fn dense_eigenvalues(t: &SymTridiagonal) -> Vec<f64> {
    let n = t.dim();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = t.diag[i];
        if i + 1 < n {
            m[(i, i + 1)] = t.offdiag[i];
            m[(i + 1, i)] = t.offdiag[i];
        }
    }
    let mut eig: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    eig
}
