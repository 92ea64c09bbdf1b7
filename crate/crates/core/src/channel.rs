//! The channel `Φ(Q) = Tr_2(U (Q ⊗ β) U*)` in its three computational forms.
//!
//! * Stinespring: form the joint operator and trace out the environment.
//! * Kraus: `Φ(Q) = Σ_{ij} K_ij Q K_ij*` with `K_ij = sqrt(λ_j) U^{ij}`, where
//!   `U^{ij}` is the system block of `U` with environment row `i` and
//!   environment column `j`.
//! * Superoperator: the `n² x n²` matrix `M` with `vec(Φ(Q)) = M vec(Q)` for the
//!   row-major flattening `(i, k) -> i * n + k`.
//!
//! All three are expressed in the eigenbasis of `β`. A non-diagonal `β = W Λ W*`
//! is handled once at construction by conjugating `U` with `I ⊗ W`.

use crate::error::{Error, Result};
use crate::linalg::{density_defect, kron, partial_trace_env, unitarity_defect, ComplexMatrix};
use crate::scalar::{Complex, Real};

use nalgebra::SymmetricEigen;

/// Interaction unitary on `C^n ⊗ C^n` together with a faithful environment state.
#[derive(Debug, Clone)]
pub struct ChannelSpec<T: Real> {
    n: usize,
    beta: ComplexMatrix<T>,
    unitary: ComplexMatrix<T>,
    spectrum: Option<Vec<T>>,
    frame_spectrum: Vec<T>,
    frame_unitary: ComplexMatrix<T>,
}

impl<T: Real> ChannelSpec<T> {
    /// Validates `U` (unitary) and `β` (density matrix, strictly positive).
    pub fn new(unitary: ComplexMatrix<T>, beta: ComplexMatrix<T>) -> Result<Self> {
        let tol = T::validation_tol();
        let n = beta.rows();
        if let Some(defect) = density_defect(&beta, tol) {
            return Err(Error::NotDensity(format!("environment state: {defect}")));
        }
        Self::check_unitary(&unitary, n)?;

        let (frame_spectrum, frame_unitary) = if is_diagonal(&beta) {
            let lambda: Vec<T> = (0..n).map(|q| beta.get(q, q).re).collect();
            (lambda, unitary.clone())
        } else {
            diagonal_frame(&unitary, &beta)?
        };
        let lowest = frame_spectrum
            .iter()
            .copied()
            .fold(T::max_value().unwrap_or_else(T::one), |a, b| a.min(b));
        if !(lowest > T::zero()) {
            return Err(Error::NotStrictlyPositive(lowest.as_f64()));
        }
        Ok(Self {
            n,
            beta,
            unitary,
            spectrum: None,
            frame_spectrum,
            frame_unitary,
        })
    }

    /// `β = diag(λ_1, ..., λ_n)` in the working basis.
    pub fn from_spectrum(unitary: ComplexMatrix<T>, spectrum: Vec<T>) -> Result<Self> {
        if spectrum.is_empty() {
            return Err(Error::InvalidArgument("empty environment spectrum".into()));
        }
        if let Some(&bad) = spectrum.iter().find(|&&l| !(l > T::zero())) {
            return Err(Error::NotStrictlyPositive(bad.as_f64()));
        }
        let beta = ComplexMatrix::from_real_diagonal(&spectrum);
        let mut spec = Self::new(unitary, beta)?;
        spec.spectrum = Some(spectrum);
        Ok(spec)
    }

    fn check_unitary(unitary: &ComplexMatrix<T>, n: usize) -> Result<()> {
        if !unitary.is_square() || unitary.rows() != n * n {
            return Err(Error::Dimension(format!(
                "interaction must be {0}x{0} for n = {n}, got {1}x{2}",
                n * n,
                unitary.rows(),
                unitary.cols()
            )));
        }
        let defect = unitarity_defect(unitary)?;
        if defect > T::validation_tol() {
            return Err(Error::NotUnitary(defect.as_f64()));
        }
        Ok(())
    }

    /// Dimension of the system space `V`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> &ComplexMatrix<T> {
        &self.beta
    }

    pub fn unitary(&self) -> &ComplexMatrix<T> {
        &self.unitary
    }

    /// The spectrum exactly as supplied, when `β` was given diagonally.
    pub fn spectrum(&self) -> Option<&[T]> {
        self.spectrum.as_deref()
    }

    /// Eigenvalues of `β` in the order used by the Kraus indexing.
    pub fn environment_spectrum(&self) -> &[T] {
        &self.frame_spectrum
    }

    /// `U` expressed in the eigenbasis of `β` (equal to `U` when `β` is diagonal).
    pub fn frame_unitary(&self) -> &ComplexMatrix<T> {
        &self.frame_unitary
    }

    /// Interaction coefficient `u_{i,j,k,l}` (zero-based) of `U = Σ u L_ik ⊗ L_jl`
    /// in the eigenbasis of `β`.
    #[inline]
    pub fn coefficient(&self, i: usize, j: usize, k: usize, l: usize) -> Complex<T> {
        let n = self.n;
        self.frame_unitary.get(i * n + j, k * n + l)
    }

    fn check_state(&self, q: &ComplexMatrix<T>) -> Result<()> {
        if q.rows() != self.n || q.cols() != self.n {
            return Err(Error::Dimension(format!(
                "state must be {0}x{0}, got {1}x{2}",
                self.n,
                q.rows(),
                q.cols()
            )));
        }
        Ok(())
    }

    /// `Tr_2(U (Q ⊗ β) U*)`.
    pub fn apply(&self, q: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        self.check_state(q)?;
        let joint = kron(q, &self.beta)?;
        let evolved = &(&self.unitary * &joint) * &self.unitary.adjoint();
        partial_trace_env(&evolved, self.n)
    }
}

fn is_diagonal<T: Real>(m: &ComplexMatrix<T>) -> bool {
    let zero = Complex::new(T::zero(), T::zero());
    (0..m.rows()).all(|i| (0..m.cols()).all(|j| i == j || m.get(i, j) == zero))
}

fn diagonal_frame<T: Real>(
    unitary: &ComplexMatrix<T>,
    beta: &ComplexMatrix<T>,
) -> Result<(Vec<T>, ComplexMatrix<T>)> {
    let n = beta.rows();
    let eig = SymmetricEigen::try_new(beta.hermitian_part().to_nalgebra(), T::EPSILON, 10_000 * n)
        .ok_or(Error::Decomposition("eigendecomposition of the environment state failed"))?;
    let w = ComplexMatrix::from_nalgebra(&eig.eigenvectors);
    let lambda: Vec<T> = eig.eigenvalues.iter().copied().collect();
    let lift = kron(&ComplexMatrix::identity(n), &w)?;
    let rotated = &(&lift.adjoint() * unitary) * &lift;
    Ok((lambda, rotated))
}

/// `Φ(Q) = Tr_2(U (Q ⊗ β) U*)`.
pub fn apply_stinespring<T: Real>(
    spec: &ChannelSpec<T>,
    q: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    spec.apply(q)
}

/// Kraus operators `K_ij = sqrt(λ_j) U^{ij}`, stored at index `i * n + j`.
#[derive(Debug, Clone)]
pub struct KrausSet<T: Real> {
    n: usize,
    operators: Vec<ComplexMatrix<T>>,
}

impl<T: Real> KrausSet<T> {
    pub fn from_spec(spec: &ChannelSpec<T>) -> Result<Self> {
        let n = spec.n();
        let u = spec.frame_unitary();
        let mut operators = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let lambda = spec.environment_spectrum()[j];
                if !(lambda > T::zero()) {
                    return Err(Error::NotStrictlyPositive(lambda.as_f64()));
                }
                let w = Complex::new(lambda.sqrt(), T::zero());
                operators.push(ComplexMatrix::from_fn(n, n, |r, s| {
                    u.get(r * n + i, s * n + j) * w
                }));
            }
        }
        Ok(Self { n, operators })
    }

    /// Wraps arbitrary `n x n` operators (no completeness check).
    pub fn from_operators(n: usize, operators: Vec<ComplexMatrix<T>>) -> Result<Self> {
        if operators.iter().any(|k| k.rows() != n || k.cols() != n) {
            return Err(Error::Dimension(format!("Kraus operators must be {n}x{n}")));
        }
        Ok(Self { n, operators })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn operators(&self) -> &[ComplexMatrix<T>] {
        &self.operators
    }

    /// `K_ij` (zero-based environment indices).
    pub fn get(&self, i: usize, j: usize) -> &ComplexMatrix<T> {
        &self.operators[i * self.n + j]
    }

    /// `max |Σ K* K - I|`.
    pub fn completeness_defect(&self) -> T {
        let mut sum = ComplexMatrix::zeros(self.n, self.n);
        for k in &self.operators {
            sum = &sum + &(&k.adjoint() * k);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(self.n))
    }

    /// `Σ K Q K*`.
    pub fn apply(&self, q: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        if q.rows() != self.n || q.cols() != self.n {
            return Err(Error::Dimension(format!(
                "state must be {0}x{0}, got {1}x{2}",
                self.n,
                q.rows(),
                q.cols()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.n, self.n);
        for k in &self.operators {
            out = &out + &(&(k * q) * &k.adjoint());
        }
        Ok(out)
    }
}

pub fn kraus_set<T: Real>(spec: &ChannelSpec<T>) -> Result<KrausSet<T>> {
    KrausSet::from_spec(spec)
}

pub fn apply_kraus<T: Real>(k: &KrausSet<T>, q: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    k.apply(q)
}

/// Matrix of `Φ` in the matrix-unit basis: column `r * n + s` holds the
/// coordinates of `Φ(L_rs)`.
#[derive(Debug, Clone)]
pub struct Superoperator<T: Real> {
    n: usize,
    matrix: ComplexMatrix<T>,
}

impl<T: Real> Superoperator<T> {
    /// Column-by-column application of the Stinespring form to each `L_rs`.
    pub fn from_spec(spec: &ChannelSpec<T>) -> Result<Self> {
        let n = spec.n();
        let d = n * n;
        let mut matrix = ComplexMatrix::zeros(d, d);
        for r in 0..n {
            for s in 0..n {
                let image = spec.apply(&ComplexMatrix::unit(n, r, s))?;
                for (row, &z) in image.entries().iter().enumerate() {
                    matrix.set(row, r * n + s, z);
                }
            }
        }
        Ok(Self { n, matrix })
    }

    /// Coordinate formula
    /// `Φ(L_rs) = Σ_{α,k} (Σ_{j,l} λ_j u_{α,l,r,j} conj(u_{k,l,s,j})) L_αk`
    /// evaluated in the eigenbasis of `β`.
    pub fn from_coordinates(spec: &ChannelSpec<T>) -> Self {
        let n = spec.n();
        let lambda = spec.environment_spectrum();
        let zero = Complex::new(T::zero(), T::zero());
        let mut matrix = ComplexMatrix::zeros(n * n, n * n);
        for r in 0..n {
            for s in 0..n {
                for alpha in 0..n {
                    for k in 0..n {
                        let mut acc = zero;
                        for (j, &lj) in lambda.iter().enumerate() {
                            for l in 0..n {
                                acc += spec.coefficient(alpha, l, r, j)
                                    * spec.coefficient(k, l, s, j).conj()
                                    * lj;
                            }
                        }
                        matrix.set(alpha * n + k, r * n + s, acc);
                    }
                }
            }
        }
        Self { n, matrix }
    }

    /// `M = Σ K ⊗ conj(K)` for the row-major flattening.
    pub fn from_kraus(kraus: &KrausSet<T>) -> Result<Self> {
        let n = kraus.n();
        let mut matrix = ComplexMatrix::zeros(n * n, n * n);
        for k in kraus.operators() {
            matrix = &matrix + &kron(k, &k.conj())?;
        }
        Ok(Self { n, matrix })
    }

    /// Wraps an existing `n² x n²` matrix.
    pub fn from_matrix(n: usize, matrix: ComplexMatrix<T>) -> Result<Self> {
        if matrix.rows() != n * n || matrix.cols() != n * n {
            return Err(Error::Dimension(format!(
                "superoperator for n = {n} must be {0}x{0}",
                n * n
            )));
        }
        Ok(Self { n, matrix })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    /// `M - I`.
    pub fn minus_identity(&self) -> ComplexMatrix<T> {
        &self.matrix - &ComplexMatrix::identity(self.n * self.n)
    }

    /// Coordinates of `Φ(L_rs)` (zero-based).
    pub fn column(&self, r: usize, s: usize) -> Vec<Complex<T>> {
        let c = r * self.n + s;
        (0..self.n * self.n).map(|row| self.matrix.get(row, c)).collect()
    }

    pub fn apply(&self, q: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        if q.rows() != self.n || q.cols() != self.n {
            return Err(Error::Dimension(format!(
                "state must be {0}x{0}, got {1}x{2}",
                self.n,
                q.rows(),
                q.cols()
            )));
        }
        let v = self.matrix.apply(q.entries())?;
        ComplexMatrix::from_vec_row_major(self.n, &v)
    }
}

pub fn superoperator<T: Real>(spec: &ChannelSpec<T>) -> Result<Superoperator<T>> {
    Superoperator::from_spec(spec)
}
