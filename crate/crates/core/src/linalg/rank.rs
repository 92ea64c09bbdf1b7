use nalgebra::SVD;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::{Complex, Real};

/// Safety factor applied on top of the usual `max(rows, cols) * EPSILON * sigma_max`.
///
/// Superoperators assembled from `n²` products carry rounding of a few ulps per
/// entry, so the kernel singular value of `Φ - I` routinely lands at
/// `4-10 * EPSILON`, just above the bare cutoff.
pub const RELATIVE_SAFETY: f64 = 1e3;

/// How the numerical-rank cutoff is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
#[derive(Default)]
pub enum RankPolicy<T> {
    /// `RELATIVE_SAFETY * max(rows, cols) * EPSILON * sigma_max`.
    #[default]
    Relative,
    /// A fixed cutoff.
    Absolute(T),
}


impl<T: Real> RankPolicy<T> {
    pub fn threshold(&self, rows: usize, cols: usize, sigma_max: T) -> T {
        match *self {
            RankPolicy::Relative => {
                T::lit(RELATIVE_SAFETY * rows.max(cols) as f64) * T::EPSILON * sigma_max
            }
            RankPolicy::Absolute(t) => t,
        }
    }
}

/// Singular-value rank decision together with orthonormal bases of the
/// numerical kernel and range.
#[derive(Debug, Clone)]
pub struct NumericalRank<T: Real> {
    pub rank: usize,
    pub threshold: T,
    /// Sorted in decreasing order.
    pub singular_values: Vec<T>,
    /// Right singular vectors whose singular value is at or below the threshold.
    pub kernel: Vec<Vec<Complex<T>>>,
    /// Left singular vectors whose singular value is above the threshold.
    pub range: Vec<Vec<Complex<T>>>,
}

impl<T: Real> NumericalRank<T> {
    pub fn kernel_dim(&self) -> usize {
        self.kernel.len()
    }

    /// Smallest singular value above the threshold, if any.
    pub fn smallest_retained(&self) -> Option<T> {
        self.rank.checked_sub(1).map(|k| self.singular_values[k])
    }

    /// Largest singular value at or below the threshold, if any.
    pub fn largest_discarded(&self) -> Option<T> {
        self.singular_values.get(self.rank).copied()
    }
}

/// Numerical rank of a square matrix with kernel and range bases from the SVD.
pub fn rank_and_nullspace<T: Real>(
    m: &ComplexMatrix<T>,
    policy: RankPolicy<T>,
) -> Result<NumericalRank<T>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "rank analysis expects a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let dim = m.rows();
    let svd = SVD::try_new(m.to_nalgebra(), true, true, T::EPSILON, 10_000 * dim)
        .ok_or(Error::Decomposition("SVD did not converge"))?;
    let u = svd.u.as_ref().ok_or(Error::Decomposition("SVD returned no U"))?;
    let v_t = svd.v_t.as_ref().ok_or(Error::Decomposition("SVD returned no V*"))?;

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .expect("finite singular values")
    });
    let singular_values: Vec<T> = order.iter().map(|&k| svd.singular_values[k]).collect();
    let sigma_max = singular_values.first().copied().unwrap_or_else(T::zero);
    let threshold = policy.threshold(dim, dim, sigma_max);
    let rank = singular_values.iter().filter(|&&s| s > threshold).count();

    let range = order[..rank]
        .iter()
        .map(|&k| (0..dim).map(|i| u[(i, k)]).collect())
        .collect();
    let kernel = order[rank..]
        .iter()
        .map(|&k| (0..dim).map(|i| v_t[(k, i)].conj()).collect())
        .collect();

    Ok(NumericalRank {
        rank,
        threshold,
        singular_values,
        kernel,
        range,
    })
}
