//! Fixed points of `Φ`: rank of `Φ - I`, extraction of a fixed density
//! matrix, uniqueness, and the dynamics of repeated application.

use nalgebra::DMatrix;

use crate::channel::{ChannelSpec, Superoperator};
use crate::error::{Error, Result};
use crate::linalg::{
    density_defect, eigenvalues, is_density, min_eigenvalue, rank_and_nullspace, ComplexMatrix,
    NumericalRank, RankPolicy,
};
use crate::scalar::{modulus, Complex, Real};

/// Outcome of the nullspace analysis of `M - I`.
#[derive(Debug, Clone)]
pub struct FixedPointReport<T: Real> {
    /// Numerical rank of `M - I`.
    pub rank: usize,
    pub kernel_dim: usize,
    /// Orthonormal basis of the numerical kernel of `M - I` (vectors of length `n²`).
    pub kernel_basis: Vec<Vec<Complex<T>>>,
    pub fixed_density: Option<ComplexMatrix<T>>,
    /// `kernel_dim == 1`.
    pub unique: bool,
    /// `max |Φ(Q*) - Q*|` for the reported fixed density.
    pub residual: T,
    /// Second-largest eigenvalue modulus of `M`. Iterates converge geometrically
    /// at this rate when it is below one.
    pub spectral_gap: T,
    /// Singular values of `M - I`, decreasing.
    pub singular_values: Vec<T>,
    pub threshold: T,
}

/// Fixed-point analysis with the default relative rank policy.
pub fn analyze<T: Real>(spec: &ChannelSpec<T>, policy: RankPolicy<T>) -> Result<FixedPointReport<T>> {
    analyze_superoperator(&Superoperator::from_spec(spec)?, policy)
}

pub fn analyze_superoperator<T: Real>(
    sup: &Superoperator<T>,
    policy: RankPolicy<T>,
) -> Result<FixedPointReport<T>> {
    let n = sup.n();
    let nr = rank_and_nullspace(&sup.minus_identity(), policy)?;
    let spectral_gap = second_largest_modulus(&eigenvalues(sup.matrix())?);

    let fixed = match nr.kernel_dim() {
        0 => {
            return Err(Error::Numerical(format!(
                "Φ - I has full rank {} at threshold {:e}; the rank policy is too strict",
                nr.rank,
                nr.threshold.as_f64()
            )))
        }
        1 => from_kernel_vector(sup, &nr)?,
        _ => ergodic_projection(&nr, &ComplexMatrix::identity(n).scale_real(T::one() / T::lit(n as f64)))?,
    };
    let residual = sup.apply(&fixed)?.max_abs_diff(&fixed);

    if nr.kernel_dim() == 1 && !is_density(&fixed, T::lit(1e-8)) {
        return Err(Error::Numerical(format!(
            "kernel of Φ - I contains no density matrix: {}",
            density_defect(&fixed, T::lit(1e-8)).map(|d| d.to_string()).unwrap_or_default()
        )));
    }

    Ok(FixedPointReport {
        rank: nr.rank,
        kernel_dim: nr.kernel_dim(),
        kernel_basis: nr.kernel.clone(),
        fixed_density: Some(fixed),
        unique: nr.kernel_dim() == 1,
        residual,
        spectral_gap,
        singular_values: nr.singular_values.clone(),
        threshold: nr.threshold,
    })
}

fn second_largest_modulus<T: Real>(ev: &[Complex<T>]) -> T {
    let mut m: Vec<T> = ev.iter().map(|&z| modulus(z)).collect();
    m.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    m.get(1).copied().unwrap_or_else(T::zero)
}

/// Hermitian, trace-normalised representative of a one-dimensional kernel.
fn from_kernel_vector<T: Real>(sup: &Superoperator<T>, nr: &NumericalRank<T>) -> Result<ComplexMatrix<T>> {
    let n = sup.n();
    let a = ComplexMatrix::from_vec_row_major(n, &nr.kernel[0])?;
    let mut h = a.hermitian_part();
    if h.max_abs() < T::lit(1e-8) * a.max_abs() {
        h = a.skew_hermitian_part_times_i();
    }
    let tr = h.trace().re;
    if tr.abs() <= T::lit(1e-10) * h.max_abs() {
        let start = ComplexMatrix::identity(n).scale_real(T::one() / T::lit(n as f64));
        return ergodic_projection(nr, &start);
    }
    Ok(h.scale_real(T::one() / tr).hermitian_part())
}

/// Limit of the Cesàro means of `Φ^k(Q0)`: the projection of `vec(Q0)` onto
/// `ker(M - I)` along `range(M - I)`.
///
/// For a trace-preserving positive map the eigenvalue 1 is semisimple, so the
/// two subspaces are complementary and this is the ergodic projection.
pub fn ergodic_projection<T: Real>(
    nr: &NumericalRank<T>,
    q0: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    let dim = nr.kernel.len() + nr.range.len();
    if q0.rows() * q0.cols() != dim {
        return Err(Error::Dimension("state does not match superoperator size".into()));
    }
    let basis = DMatrix::from_fn(dim, dim, |i, j| {
        if j < nr.kernel.len() {
            nr.kernel[j][i]
        } else {
            nr.range[j - nr.kernel.len()][i]
        }
    });
    let rhs = nalgebra::DVector::from_row_slice(q0.entries());
    let coords = basis
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("kernel and range of Φ - I are not complementary".into()))?;
    let zero = Complex::new(T::zero(), T::zero());
    let mut v = vec![zero; dim];
    for (k, kv) in nr.kernel.iter().enumerate() {
        for (dst, &x) in v.iter_mut().zip(kv) {
            *dst += x * coords[k];
        }
    }
    Ok(ComplexMatrix::from_vec_row_major(q0.rows(), &v)?.hermitian_part())
}

/// Repeated application `Q_{k+1} = Φ(Q_k)`.
#[derive(Debug, Clone)]
pub struct Trajectory<T: Real> {
    /// `Q_0, Q_1, ..., Q_steps`.
    pub states: Vec<ComplexMatrix<T>>,
    /// `deltas[k] = max |Q_{k+1} - Q_k|`.
    pub deltas: Vec<T>,
    pub converged: bool,
    pub steps: usize,
}

/// One CSV row of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow<T> {
    pub step: usize,
    pub delta: T,
    pub trace: T,
    pub min_eigenvalue: T,
}

impl<T: Real> Trajectory<T> {
    pub fn last(&self) -> &ComplexMatrix<T> {
        self.states.last().expect("trajectory holds at least Q0")
    }

    /// `(step, delta, trace, min eigenvalue)` for steps `1..=steps`.
    pub fn rows(&self) -> Result<Vec<TrajectoryRow<T>>> {
        self.deltas
            .iter()
            .enumerate()
            .map(|(k, &delta)| {
                let q = &self.states[k + 1];
                Ok(TrajectoryRow {
                    step: k + 1,
                    delta,
                    trace: q.trace().re,
                    min_eigenvalue: min_eigenvalue(q)?,
                })
            })
            .collect()
    }
}

fn check_initial_state<T: Real>(n: usize, q0: &ComplexMatrix<T>) -> Result<()> {
    if q0.rows() != n || q0.cols() != n {
        return Err(Error::Dimension(format!(
            "initial state must be {n}x{n}, got {}x{}",
            q0.rows(),
            q0.cols()
        )));
    }
    if let Some(defect) = density_defect(q0, T::validation_tol()) {
        return Err(Error::NotDensity(format!("initial state: {defect}")));
    }
    Ok(())
}

pub fn iterate<T: Real>(
    spec: &ChannelSpec<T>,
    q0: &ComplexMatrix<T>,
    max_steps: usize,
    eps: T,
) -> Result<Trajectory<T>> {
    iterate_superoperator(&Superoperator::from_spec(spec)?, q0, max_steps, eps)
}

/// Iterates until `max |Q_{k+1} - Q_k| <= eps` or `max_steps` applications.
pub fn iterate_superoperator<T: Real>(
    sup: &Superoperator<T>,
    q0: &ComplexMatrix<T>,
    max_steps: usize,
    eps: T,
) -> Result<Trajectory<T>> {
    check_initial_state(sup.n(), q0)?;
    let mut states = vec![q0.clone()];
    let mut deltas = Vec::new();
    let mut converged = false;
    for _ in 0..max_steps {
        let prev = states.last().expect("non-empty");
        let next = sup.apply(prev)?;
        let delta = next.max_abs_diff(prev);
        states.push(next);
        deltas.push(delta);
        if delta <= eps {
            converged = true;
            break;
        }
    }
    let steps = deltas.len();
    Ok(Trajectory {
        states,
        deltas,
        converged,
        steps,
    })
}

/// Final state of the iteration without storing the trajectory.
pub fn iterate_to_end<T: Real>(
    sup: &Superoperator<T>,
    q0: &ComplexMatrix<T>,
    max_steps: usize,
    eps: T,
) -> Result<(ComplexMatrix<T>, usize, bool)> {
    check_initial_state(sup.n(), q0)?;
    let mut q = q0.clone();
    for k in 1..=max_steps {
        let next = sup.apply(&q)?;
        let delta = next.max_abs_diff(&q);
        q = next;
        if delta <= eps {
            return Ok((q, k, true));
        }
    }
    Ok((q, max_steps, false))
}

/// `(1/steps) Σ_{k<steps} Φ^k(Q0)`.
pub fn cesaro_fixed_point<T: Real>(
    spec: &ChannelSpec<T>,
    q0: &ComplexMatrix<T>,
    steps: usize,
) -> Result<ComplexMatrix<T>> {
    cesaro_superoperator(&Superoperator::from_spec(spec)?, q0, steps)
}

pub fn cesaro_superoperator<T: Real>(
    sup: &Superoperator<T>,
    q0: &ComplexMatrix<T>,
    steps: usize,
) -> Result<ComplexMatrix<T>> {
    if steps == 0 {
        return Err(Error::InvalidArgument("Cesàro mean needs at least one step".into()));
    }
    check_initial_state(sup.n(), q0)?;
    let m = sup.matrix();
    let mut v = q0.to_vec();
    let mut acc = v.clone();
    for _ in 1..steps {
        v = m.apply(&v)?;
        for (a, &x) in acc.iter_mut().zip(&v) {
            *a += x;
        }
    }
    let scale = T::one() / T::lit(steps as f64);
    let mean: Vec<Complex<T>> = acc.into_iter().map(|z| z * scale).collect();
    ComplexMatrix::from_vec_row_major(sup.n(), &mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{haar_unitary_with, random_density};
    use crate::linalg::rng_from_seed;
    use crate::scalar::cplx;

    fn sigma_xx(theta: f64, p1: f64) -> ChannelSpec<f64> {
        let (c, s) = (theta.cos(), theta.sin());
        let u = ComplexMatrix::from_fn(4, 4, |i, j| match (i == j, i + j == 3) {
            (true, _) => cplx(c, 0.0),
            (_, true) => cplx(0.0, s),
            _ => cplx(0.0, 0.0),
        });
        ChannelSpec::from_spectrum(u, vec![p1, 1.0 - p1]).unwrap()
    }

    fn diag(values: &[f64]) -> ComplexMatrix<f64> {
        ComplexMatrix::from_real_diagonal(values)
    }

    #[test]
    fn identity_channel_has_full_kernel() {
        let spec = ChannelSpec::from_spectrum(ComplexMatrix::identity(4), vec![0.7, 0.3]).unwrap();
        let r = analyze(&spec, RankPolicy::Relative).unwrap();
        assert_eq!(r.rank, 0);
        assert_eq!(r.kernel_dim, 4);
        assert!(!r.unique);
        let q = r.fixed_density.unwrap();
        assert!(q.max_abs_diff(&diag(&[0.5, 0.5])) < 1e-14);
    }

    #[test]
    fn sigma_xx_quarter_turn_is_degenerate() {
        let r = analyze(&sigma_xx(std::f64::consts::FRAC_PI_4, 0.7), RankPolicy::Relative).unwrap();
        assert_eq!(r.kernel_dim, 2);
        assert_eq!(r.rank, 2);
        assert!(!r.unique);
        assert!(r.residual < 1e-12);
    }

    #[test]
    fn haar_channel_has_unique_fixed_point() {
        let mut rng = rng_from_seed(17);
        let u = haar_unitary_with::<f64, _>(9, &mut rng);
        let spec = ChannelSpec::from_spectrum(u, vec![0.5, 0.3, 0.2]).unwrap();
        let r = analyze(&spec, RankPolicy::Relative).unwrap();
        assert!(r.unique);
        assert_eq!(r.rank, 8);
        assert!(r.residual < 1e-12);
        assert!(r.spectral_gap < 1.0);
        let q = r.fixed_density.unwrap();
        assert!(is_density(&q, 1e-10));
        // the fixed point attracts a random start
        let sup = Superoperator::from_spec(&spec).unwrap();
        let q0 = random_density::<f64, _>(3, &mut rng);
        let (end, _, converged) = iterate_to_end(&sup, &q0, 10_000, 1e-14).unwrap();
        assert!(converged);
        assert!(end.max_abs_diff(&q) < 1e-10);
    }

    #[test]
    fn iteration_from_fixed_point_stops_at_first_step() {
        let mut rng = rng_from_seed(3);
        let u = haar_unitary_with::<f64, _>(4, &mut rng);
        let spec = ChannelSpec::from_spectrum(u, vec![0.6, 0.4]).unwrap();
        let q = analyze(&spec, RankPolicy::Relative).unwrap().fixed_density.unwrap();
        let t = iterate(&spec, &q, 100, 1e-10).unwrap();
        assert!(t.converged);
        assert_eq!(t.steps, 1);
        assert!(t.deltas[0] <= 1e-10);
    }

    #[test]
    fn half_turn_sigma_xx_swaps_populations() {
        let spec = sigma_xx(std::f64::consts::FRAC_PI_2, 0.7);
        let t = iterate(&spec, &diag(&[1.0, 0.0]), 50, 1e-10).unwrap();
        assert!(!t.converged);
        assert_eq!(t.steps, 50);
        for (k, q) in t.states.iter().enumerate() {
            let expected = if k % 2 == 0 { diag(&[1.0, 0.0]) } else { diag(&[0.0, 1.0]) };
            assert!(q.max_abs_diff(&expected) < 1e-14, "step {k}");
        }
        let mean = cesaro_fixed_point(&spec, &diag(&[1.0, 0.0]), 1000).unwrap();
        assert!(mean.max_abs_diff(&diag(&[0.5, 0.5])) < 1e-14);
    }

    #[test]
    fn cesaro_of_fixed_state_is_itself() {
        let spec = sigma_xx(0.3, 0.6);
        let q = diag(&[0.5, 0.5]);
        let mean = cesaro_fixed_point(&spec, &q, 257).unwrap();
        assert!(mean.max_abs_diff(&q) < 1e-14);
    }

    #[test]
    fn iterate_rejects_non_density_start() {
        let spec = sigma_xx(0.3, 0.6);
        assert!(matches!(
            iterate(&spec, &diag(&[1.2, -0.2]), 10, 1e-10),
            Err(Error::NotDensity(_))
        ));
        assert!(matches!(
            cesaro_fixed_point(&spec, &diag(&[0.5, 0.5]), 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn trajectory_rows_report_trace_and_spectrum() {
        let spec = sigma_xx(0.4, 0.8);
        let t = iterate(&spec, &diag(&[1.0, 0.0]), 20, 1e-12).unwrap();
        let rows = t.rows().unwrap();
        assert_eq!(rows.len(), t.steps);
        for row in rows {
            assert!((row.trace - 1.0).abs() < 1e-13);
            assert!(row.min_eigenvalue > -1e-12);
        }
    }
}
