//! Dense complex linear algebra: `nalgebra` matrices, Hermitian eigendecompositions from `faer`.
//!
//! Every spectral cutoff in the crate goes through [`cutoff`]: an eigenvalue
//! counts as zero when it is at most `tol * max(1, |H|_2)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Default relative rank tolerance.
pub const RANK_TOL: f64 = 1e-10;

/// Maximum allowed `|H - H^dag|_max` for Hermitian inputs.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Rebuilds `sum_i f(l_i) |v_i><v_i|`, skipping terms where `f` returns `None`.
    pub fn map(&self, f: impl Fn(f64) -> Option<f64>) -> ComplexMatrix {
        let n = self.eigenvectors.nrows();
        let mut out = ComplexMatrix::zeros(n, n);
        for (i, &l) in self.eigenvalues.iter().enumerate() {
            if let Some(w) = f(l) {
                let v = self.eigenvectors.column(i);
                out += v * v.adjoint() * re(w);
            }
        }
        out
    }

    /// Orthonormal basis (as columns) of the eigenvectors whose eigenvalue exceeds the cutoff.
    pub fn support_basis(&self, tol: f64) -> ComplexMatrix {
        let cut = cutoff(self.spectral_norm(), tol);
        let idx: Vec<usize> = (0..self.eigenvalues.len())
            .filter(|&i| self.eigenvalues[i] > cut)
            .collect();
        let cols: Vec<_> = idx.iter().map(|&i| self.eigenvectors.column(i).into_owned()).collect();
        if cols.is_empty() {
            ComplexMatrix::zeros(self.eigenvectors.nrows(), 0)
        } else {
            ComplexMatrix::from_columns(&cols)
        }
    }
}

pub fn cutoff(norm: f64, tol: f64) -> f64 {
    tol * norm.max(1.0)
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn hermitian_residual(m: &ComplexMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// Computational basis vector `|index>` in dimension `dim`.
pub fn basis_vector(dim: usize, index: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(dim);
    v[index] = ONE;
    v
}

pub fn outer(u: &ComplexVector, v: &ComplexVector) -> ComplexMatrix {
    u * v.adjoint()
}

pub fn hermitian_eig(h: &ComplexMatrix) -> Result<SpectralDecomposition> {
    if !h.is_square() {
        return Err(Error::dims("hermitian_eig", "square", format!("{}x{}", h.nrows(), h.ncols())));
    }
    // Relative to the entry scale: inverse square roots of small spectra carry large entries.
    let residual = hermitian_residual(h);
    if residual >= HERMITIAN_TOL * max_abs(h).max(1.0) {
        return Err(Error::NonHermitianInput { residual });
    }
    let n = h.nrows();
    if n == 0 {
        return Ok(SpectralDecomposition {
            eigenvalues: vec![],
            eigenvectors: ComplexMatrix::zeros(0, 0),
        });
    }
    // faer rather than nalgebra: nalgebra's complex solver loses orthogonality
    // inside large degenerate eigenspaces, which projectors built here cannot tolerate.
    let sym = faer::Mat::<C64>::from_fn(n, n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
    let evd = sym
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::NoConvergence(format!("Hermitian eigensolver: {e:?}")))?;
    let (values, vectors) = (evd.S().column_vector(), evd.U());
    Ok(SpectralDecomposition {
        eigenvalues: (0..n).map(|i| values[i].re).collect(),
        eigenvectors: ComplexMatrix::from_fn(n, n, |i, j| vectors[(i, j)]),
    })
}

fn psd_eig(h: &ComplexMatrix, tol: f64) -> Result<(SpectralDecomposition, f64)> {
    let eig = hermitian_eig(h)?;
    let cut = cutoff(eig.spectral_norm(), tol);
    if let Some(&min) = eig.eigenvalues.first() {
        if min < -cut {
            return Err(Error::NegativeSpectrum { min_eigenvalue: min });
        }
    }
    Ok((eig, cut))
}

/// Projector onto the span of eigenvectors with eigenvalue above the cutoff.
pub fn support_projector(h: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let (eig, cut) = psd_eig(h, tol)?;
    Ok(eig.map(|l| (l > cut).then_some(1.0)))
}

/// Orthonormal basis of the support, one column per retained eigenvector.
pub fn support_basis(h: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let (eig, _) = psd_eig(h, tol)?;
    Ok(eig.support_basis(tol))
}

/// `H^p` on the support of `H`, zero on its kernel (pseudo-power).
pub fn psd_power(h: &ComplexMatrix, p: f64, tol: f64) -> Result<ComplexMatrix> {
    let (eig, cut) = psd_eig(h, tol)?;
    Ok(eig.map(|l| (l > cut).then(|| l.powf(p))))
}

/// Orthonormal basis of the column span of `y`, computed as `y (y^dag y)^{-1/2}`.
///
/// The Gram matrix is rescaled to unit norm first, so the rank cutoff is
/// relative to the largest column weight rather than absolute.
pub fn orthonormal_columns(y: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let gram = y.adjoint() * y;
    let scale = gram.norm();
    if scale == 0.0 {
        return Ok(ComplexMatrix::zeros(y.nrows(), 0));
    }
    let eig = hermitian_eig(&(gram / re(scale)))?;
    let keep: Vec<usize> = (0..eig.eigenvalues.len()).filter(|&i| eig.eigenvalues[i] > tol).collect();
    let cols: Vec<_> = keep
        .iter()
        .map(|&i| (y * eig.eigenvectors.column(i)) / re((eig.eigenvalues[i] * scale).sqrt()))
        .collect();
    Ok(if cols.is_empty() { ComplexMatrix::zeros(y.nrows(), 0) } else { ComplexMatrix::from_columns(&cols) })
}

/// Polar decomposition `A = U S` with `S = sqrt(A^dag A)` and `U` a full unitary.
///
/// Built from the eigendecompositions of `A^dag A` and `A A^dag`: on the
/// support `U = A S^+`, and the kernel of `A` is sent onto the complement of
/// its range. `U` is arbitrary (but unitary) there; callers only use it
/// sandwiched by projectors onto the support. The rank cutoff is relative to
/// the largest eigenvalue of `A^dag A`.
pub fn polar_decompose(a: &ComplexMatrix, tol: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !a.is_square() {
        return Err(Error::dims("polar_decompose", "square", format!("{}x{}", a.nrows(), a.ncols())));
    }
    let n = a.nrows();
    let right = hermitian_eig(&(a.adjoint() * a))?;
    let top = right.eigenvalues.last().copied().unwrap_or(0.0);
    let cut = tol * top;
    let rank = right.eigenvalues.iter().filter(|&&l| l > cut && l > 0.0).count();
    let mut u = ComplexMatrix::zeros(n, n);
    let mut s = ComplexMatrix::zeros(n, n);
    for i in n - rank..n {
        let v = right.eigenvectors.column(i);
        let sigma = right.eigenvalues[i].sqrt();
        u += (a * v) * v.adjoint() * re(1.0 / sigma);
        s += v * v.adjoint() * re(sigma);
    }
    if rank < n {
        // Smallest eigenvalues of A A^dag span the complement of range(A).
        let left = hermitian_eig(&(a * a.adjoint()))?;
        for i in 0..n - rank {
            u += left.eigenvectors.column(i) * right.eigenvectors.column(i).adjoint();
        }
    }
    Ok((u, s))
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.ncols() != b.nrows() {
        return Err(Error::dims("matmul", a.ncols(), b.nrows()));
    }
    Ok(a * b)
}

/// `T_kl = sum_mu M[(k, mu), (l, mu)]` with `mu` the fast index of the composite `[mu, k]`.
pub fn partial_trace_logical(m: &ComplexMatrix, d: usize, n: usize) -> Result<ComplexMatrix> {
    if m.nrows() != d * n || m.ncols() != d * n {
        return Err(Error::dims(
            "partial_trace_logical",
            format!("{0}x{0}", d * n),
            format!("{}x{}", m.nrows(), m.ncols()),
        ));
    }
    Ok(ComplexMatrix::from_fn(n, n, |k, l| {
        (0..d).map(|mu| m[(k * d + mu, l * d + mu)]).sum()
    }))
}

/// Smallest eigenvalue of a Hermitian matrix (after symmetrization).
pub fn min_eigenvalue(h: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eig(h)?.eigenvalues.first().copied().unwrap_or(0.0))
}

pub fn max_eigenvalue(h: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eig(h)?.eigenvalues.last().copied().unwrap_or(0.0))
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.diagonal().sum()
}

/// `|A^dag A - I|_max`.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    max_abs(&(u.adjoint() * u - identity(u.ncols())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&DVector::from_vec(vec![ONE, -ONE]))
    }

    #[test]
    fn eigenvalues_come_back_ascending() {
        let z = pauli_z();
        let eig = hermitian_eig(&z).unwrap();
        assert_eq!(eig.eigenvalues, vec![-1.0, 1.0]);
        let eig = hermitian_eig(&identity(2)).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 1.0]);
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let mut m = identity(2);
        m[(0, 1)] = re(1e-6);
        assert!(matches!(hermitian_eig(&m), Err(Error::NonHermitianInput { .. })));
    }

    #[test]
    fn support_and_power_of_diagonal() {
        let h = ComplexMatrix::from_diagonal(&DVector::from_vec(vec![re(4.0), ZERO]));
        let p = support_projector(&h, RANK_TOL).unwrap();
        assert!(max_abs(&(p - ComplexMatrix::from_diagonal(&DVector::from_vec(vec![ONE, ZERO])))) < 1e-15);
        let inv_sqrt = psd_power(&h, -0.5, RANK_TOL).unwrap();
        assert!((inv_sqrt[(0, 0)] - re(0.5)).norm() < 1e-15);
        assert_eq!(inv_sqrt[(1, 1)], ZERO);
        assert_eq!(support_projector(&ComplexMatrix::zeros(3, 3), RANK_TOL).unwrap(), ComplexMatrix::zeros(3, 3));
    }

    #[test]
    fn negative_spectrum_is_reported() {
        let h = ComplexMatrix::from_diagonal(&DVector::from_vec(vec![re(1.0), re(-1e-3)]));
        assert!(matches!(support_projector(&h, RANK_TOL), Err(Error::NegativeSpectrum { .. })));
    }

    #[test]
    fn polar_of_positive_diagonal_is_trivial() {
        let d0 = ComplexMatrix::from_diagonal(&DVector::from_vec(vec![ONE, re(0.8)]));
        let (u, s) = polar_decompose(&d0, RANK_TOL).unwrap();
        assert!(max_abs(&(u - identity(2))) < 1e-14);
        assert!(max_abs(&(s - d0)) < 1e-14);
    }

    #[test]
    fn polar_of_rank_deficient_matrix_is_completed() {
        let mut a = ComplexMatrix::zeros(3, 3);
        a[(2, 0)] = c(0.0, 2.0);
        let (u, s) = polar_decompose(&a, RANK_TOL).unwrap();
        assert!(unitarity_residual(&u) < 1e-12);
        assert!(max_abs(&(&u * &s - &a)) < 1e-12);
    }

    #[test]
    fn zz_parity_on_basis_states() {
        let zz = kron(&pauli_z(), &pauli_z());
        for (idx, sign) in [(0, 1.0), (1, -1.0), (2, -1.0), (3, 1.0)] {
            let v = basis_vector(4, idx);
            assert!(((&zz * &v) - &v * re(sign)).norm() < 1e-15);
        }
        assert_eq!(kron(&identity(2), &identity(2)), identity(4));
    }

    #[test]
    fn partial_trace_of_identity() {
        let t = partial_trace_logical(&identity(6), 2, 3).unwrap();
        assert_eq!(t, identity(3) * re(2.0));
        let m = ComplexMatrix::from_fn(3, 3, |i, j| c(i as f64, j as f64));
        assert_eq!(partial_trace_logical(&m, 1, 3).unwrap(), m);
        assert!(partial_trace_logical(&m, 2, 3).is_err());
    }

    #[test]
    fn matmul_checks_shapes() {
        assert!(matmul(&identity(2), &identity(3)).is_err());
    }
}
