//! Tensor-product structure of `V ⊗ V`.
//!
//! Basis ordering is fixed project-wide with the second (environment) factor
//! running fastest: `e_s ⊗ e_e` sits at position `s * n + e` (zero-based).
//! Under this ordering `kron` is the standard Kronecker product and
//! `partial_trace_env` sums the diagonal of every `n x n` block.

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::{Complex, Real};

/// Kronecker product `A ⊗ B`.
///
/// `(A ⊗ B)[a * rB + b, c * cB + d] = A[a, c] * B[b, d]`.
pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let rows = a
        .rows()
        .checked_mul(b.rows())
        .ok_or_else(|| Error::Dimension("kron row count overflows".into()))?;
    let cols = a
        .cols()
        .checked_mul(b.cols())
        .ok_or_else(|| Error::Dimension("kron column count overflows".into()))?;
    rows.checked_mul(cols)
        .ok_or_else(|| Error::Dimension("kron entry count overflows".into()))?;
    let (br, bc) = (b.rows(), b.cols());
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| {
        a.get(i / br, j / bc) * b.get(i % br, j % bc)
    }))
}

/// Partial trace over the environment factor:
/// `result[s, s'] = Σ_e T[s * n + e, s' * n + e]`.
pub fn partial_trace_env<T: Real>(t: &ComplexMatrix<T>, n: usize) -> Result<ComplexMatrix<T>> {
    if !t.is_square() {
        return Err(Error::Dimension(format!(
            "partial trace needs a square operator, got {}x{}",
            t.rows(),
            t.cols()
        )));
    }
    if n == 0 || n.checked_mul(n) != Some(t.rows()) {
        return Err(Error::Dimension(format!(
            "operator of size {} is not on C^{n} ⊗ C^{n}",
            t.rows()
        )));
    }
    Ok(ComplexMatrix::from_fn(n, n, |s, sp| {
        (0..n).fold(Complex::new(T::zero(), T::zero()), |acc, e| {
            acc + t.get(s * n + e, sp * n + e)
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    fn cplx(re: f64, im: f64) -> Complex<f64> {
        crate::scalar::cplx(re, im)
    }

    fn symbolic(n: usize, offset: f64) -> ComplexMatrix<f64> {
        // distinct integers so every product in the layout is identifiable
        ComplexMatrix::from_fn(n, n, |i, j| cplx(offset + (i * n + j) as f64, 0.0))
    }

    #[test]
    fn identity_kron_identity() {
        let i2 = ComplexMatrix::<f64>::identity(2);
        assert_eq!(kron(&i2, &i2).unwrap(), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_matches_displayed_block_layout() {
        // R = [[2,3],[4,5]], S = [[7,11],[13,17]] : primes make the products unique
        let r = ComplexMatrix::from_row_major(
            2,
            2,
            [2.0, 3.0, 4.0, 5.0].iter().map(|&x| cplx(x, 0.0)).collect(),
        )
        .unwrap();
        let s = ComplexMatrix::from_row_major(
            2,
            2,
            [7.0, 11.0, 13.0, 17.0].iter().map(|&x| cplx(x, 0.0)).collect(),
        )
        .unwrap();
        let k = kron(&r, &s).unwrap();
        let (r11, r12, r21, r22) = (2.0, 3.0, 4.0, 5.0);
        let (s11, s12, s21, s22) = (7.0, 11.0, 13.0, 17.0);
        let expected = [
            [r11 * s11, r11 * s12, r12 * s11, r12 * s12],
            [r11 * s21, r11 * s22, r12 * s21, r12 * s22],
            [r21 * s11, r21 * s12, r22 * s11, r22 * s12],
            [r21 * s21, r21 * s22, r22 * s21, r22 * s22],
        ];
        for (i, row) in expected.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(k.get(i, j), cplx(v, 0.0), "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn kron_of_matrix_units_maps_basis_vectors() {
        // L_12 ⊗ L_21 (one-based) sends e_2 ⊗ e_1 to e_1 ⊗ e_2.
        let n = 2;
        let op = kron(
            &ComplexMatrix::<f64>::unit(n, 0, 1),
            &ComplexMatrix::unit(n, 1, 0),
        )
        .unwrap();
        let mut input = vec![cplx(0.0, 0.0); 4];
        input[n] = cplx(1.0, 0.0); // e_2 ⊗ e_1
        let out = op.apply(&input).unwrap();
        let mut expected = vec![cplx(0.0, 0.0); 4];
        expected[1] = cplx(1.0, 0.0); // e_1 ⊗ e_2
        assert_eq!(out, expected);
    }

    #[test]
    fn partial_trace_of_4x4_matches_display() {
        let t = symbolic(4, 1.0); // T_ij (one-based) = 4(i-1) + j
        let tr = partial_trace_env(&t, 2).unwrap();
        let tv = |i: usize, j: usize| t.get(i - 1, j - 1);
        assert_eq!(tr.get(0, 0), tv(1, 1) + tv(2, 2));
        assert_eq!(tr.get(0, 1), tv(1, 3) + tv(2, 4));
        assert_eq!(tr.get(1, 0), tv(3, 1) + tv(4, 2));
        assert_eq!(tr.get(1, 1), tv(3, 3) + tv(4, 4));
    }

    #[test]
    fn partial_trace_of_identity() {
        let tr = partial_trace_env(&ComplexMatrix::<f64>::identity(4), 2).unwrap();
        assert_eq!(tr, ComplexMatrix::identity(2).scale_real(2.0));
    }

    #[test]
    fn partial_trace_of_product_is_scaled_first_factor() {
        let a = ComplexMatrix::from_fn(3, 3, |i, j| cplx(i as f64 - 0.5 * j as f64, (i * j) as f64));
        let b = ComplexMatrix::from_fn(3, 3, |i, j| cplx(1.0 + i as f64, j as f64 - 2.0));
        let tr = partial_trace_env(&kron(&a, &b).unwrap(), 3).unwrap();
        let expected = a.scale(b.trace());
        assert!(tr.max_abs_diff(&expected) < 1e-13);
    }

    #[test]
    fn partial_trace_rejects_bad_shapes() {
        assert!(partial_trace_env(&ComplexMatrix::<f64>::zeros(4, 3), 2).is_err());
        assert!(partial_trace_env(&ComplexMatrix::<f64>::identity(5), 2).is_err());
        assert!(partial_trace_env(&ComplexMatrix::<f64>::identity(4), 3).is_err());
    }
}
