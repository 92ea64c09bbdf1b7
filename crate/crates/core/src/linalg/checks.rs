//! Eigenvalue routines and the unitarity / density-matrix predicates.

use nalgebra::{Schur, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::{Complex, Real};

const MAX_SWEEPS: usize = 10_000;

/// Eigenvalues of the Hermitian part `(A + A*)/2`, sorted ascending.
pub fn hermitian_eigenvalues<T: Real>(a: &ComplexMatrix<T>) -> Result<Vec<T>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "eigenvalues need a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let h = a.hermitian_part().to_nalgebra();
    let eig = SymmetricEigen::try_new(h, T::EPSILON, MAX_SWEEPS * a.rows())
        .ok_or(Error::Decomposition("hermitian eigensolver did not converge"))?;
    let mut vals: Vec<T> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    Ok(vals)
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_eigenvalue<T: Real>(a: &ComplexMatrix<T>) -> Result<T> {
    Ok(hermitian_eigenvalues(a)?[0])
}

/// All eigenvalues of a general square matrix (complex Schur form).
pub fn eigenvalues<T: Real>(a: &ComplexMatrix<T>) -> Result<Vec<Complex<T>>> {
    if !a.is_square() {
        return Err(Error::Dimension("eigenvalues need a square matrix".into()));
    }
    let schur = Schur::try_new(a.to_nalgebra(), T::EPSILON, MAX_SWEEPS * a.rows())
        .ok_or(Error::Decomposition("Schur iteration did not converge"))?;
    let (_, t) = schur.unpack();
    Ok((0..a.rows()).map(|i| t[(i, i)]).collect())
}

/// True iff `max |U U* - I| <= tol`. Non-square input is reported as not unitary.
pub fn is_unitary<T: Real>(u: &ComplexMatrix<T>, tol: T) -> bool {
    unitarity_defect(u).map(|d| d <= tol).unwrap_or(false)
}

/// `max |U U* - I|`.
pub fn unitarity_defect<T: Real>(u: &ComplexMatrix<T>) -> Result<T> {
    if !u.is_square() {
        return Err(Error::Dimension(format!(
            "unitary must be square, got {}x{}",
            u.rows(),
            u.cols()
        )));
    }
    let prod = u.matmul(&u.adjoint())?;
    Ok(prod.max_abs_diff(&ComplexMatrix::identity(u.rows())))
}

/// Why a matrix fails to be a density matrix, if it does.
#[derive(Debug, Clone, PartialEq)]
pub enum DensityDefect {
    NotSquare,
    NotHermitian(f64),
    NegativeEigenvalue(f64),
    TraceNotOne(f64),
}

impl std::fmt::Display for DensityDefect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DensityDefect::NotSquare => write!(f, "matrix is not square"),
            DensityDefect::NotHermitian(d) => write!(f, "Hermiticity defect {d:e}"),
            DensityDefect::NegativeEigenvalue(e) => write!(f, "negative eigenvalue {e:e}"),
            DensityDefect::TraceNotOne(t) => write!(f, "trace {t} differs from 1"),
        }
    }
}

/// Checks Hermiticity first, then the spectrum of `(Q + Q*)/2`, then the trace.
pub fn density_defect<T: Real>(q: &ComplexMatrix<T>, tol: T) -> Option<DensityDefect> {
    if !q.is_square() {
        return Some(DensityDefect::NotSquare);
    }
    let herm = q.hermiticity_defect();
    if herm > tol {
        return Some(DensityDefect::NotHermitian(herm.as_f64()));
    }
    match min_eigenvalue(q) {
        Ok(lo) if lo < -tol => return Some(DensityDefect::NegativeEigenvalue(lo.as_f64())),
        Ok(_) => {}
        Err(_) => return Some(DensityDefect::NegativeEigenvalue(f64::NAN)),
    }
    let tr = q.trace();
    if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
        return Some(DensityDefect::TraceNotOne(tr.re.as_f64()));
    }
    None
}

pub fn is_density<T: Real>(q: &ComplexMatrix<T>, tol: T) -> bool {
    density_defect(q, tol).is_none()
}
