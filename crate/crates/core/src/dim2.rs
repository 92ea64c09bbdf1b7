//! Closed-form analysis of the qubit case `n = 2`.
//!
//! A density matrix is parametrised by `(Q11, a, b)` with `Q12 = a + b i`,
//! `Q22 = 1 - Q11`. In these coordinates `Φ` becomes the affine map
//!
//! ```text
//! G(Q11, a, b) = ( α1 Q11 + β1 + (a11 + a12) a + i (a11 - a12) b,
//!                  Re/Im[ α2 Q11 + β2 + (a21 + a22) a + i (a21 - a22) b ] )
//! ```
//!
//! whose coefficients are sums over Kraus operators `K`:
//! `α1 = Σ |K11|² - |K12|²`, `β1 = Σ |K12|²`, `α2 = Σ K11 conj(K21) - K12 conj(K22)`,
//! `β2 = Σ K12 conj(K22)`, `a11 = Σ K11 conj(K12)`, `a12 = Σ K12 conj(K11)`,
//! `a21 = Σ K11 conj(K22)`, `a22 = Σ K12 conj(K21)` (one-based entries).
//! `a11, a12` weight `Q12, Q21` in `Φ(Q)11`; `a21, a22` weight them in `Φ(Q)12`.

use nalgebra::DMatrix;

use crate::channel::{ChannelSpec, KrausSet};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::{modulus, Complex, Real};

/// Default threshold on the row-normalised determinants.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Coefficients of the affine map `G` for a qubit channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Dim2Coefficients<T: Real> {
    pub alpha1: T,
    pub beta1: T,
    pub alpha2: Complex<T>,
    pub beta2: Complex<T>,
    pub a11: Complex<T>,
    pub a12: Complex<T>,
    pub a21: Complex<T>,
    pub a22: Complex<T>,
    pub p1: T,
    pub p2: T,
    /// Largest deviation between the linear map implied by the coefficients
    /// and the Stinespring form on the four matrix units.
    pub cross_check: T,
}

impl<T: Real> Dim2Coefficients<T> {
    /// `a11 + a12`.
    pub fn c11(&self) -> Complex<T> {
        self.a11 + self.a12
    }

    /// `i (a11 - a12)`.
    pub fn c12(&self) -> Complex<T> {
        (self.a11 - self.a12) * i_unit()
    }

    /// `a21 + a22 - 1`.
    pub fn c21(&self) -> Complex<T> {
        self.a21 + self.a22 - one()
    }

    /// `i (a21 - a22 - 1)`.
    pub fn c22(&self) -> Complex<T> {
        (self.a21 - self.a22 - one()) * i_unit()
    }

    /// Largest imaginary part among `a11 + a12` and `i (a11 - a12)`.
    pub fn reality_defect(&self) -> T {
        self.c11().im.abs().max(self.c12().im.abs())
    }
}

fn i_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

fn one<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

/// Reads the coefficients off the Kraus operators and validates them against
/// the Stinespring form.
pub fn coefficients<T: Real>(spec: &ChannelSpec<T>) -> Result<Dim2Coefficients<T>> {
    if spec.n() != 2 {
        return Err(Error::Dimension(format!("closed-form analysis needs n = 2, got {}", spec.n())));
    }
    let kraus = KrausSet::from_spec(spec)?;
    let zero = Complex::new(T::zero(), T::zero());
    let (mut alpha1, mut beta1) = (T::zero(), T::zero());
    let (mut alpha2, mut beta2) = (zero, zero);
    let (mut a11, mut a12, mut a21, mut a22) = (zero, zero, zero, zero);
    for k in kraus.operators() {
        let (k11, k12, k21, k22) = (k.get(0, 0), k.get(0, 1), k.get(1, 0), k.get(1, 1));
        alpha1 += k11.norm_sqr() - k12.norm_sqr();
        beta1 += k12.norm_sqr();
        alpha2 += k11 * k21.conj() - k12 * k22.conj();
        beta2 += k12 * k22.conj();
        a11 += k11 * k12.conj();
        a12 += k12 * k11.conj();
        a21 += k11 * k22.conj();
        a22 += k12 * k21.conj();
    }
    let lambda = spec.environment_spectrum();
    let mut c = Dim2Coefficients {
        alpha1,
        beta1,
        alpha2,
        beta2,
        a11,
        a12,
        a21,
        a22,
        p1: lambda[0],
        p2: lambda[1],
        cross_check: T::zero(),
    };
    c.cross_check = cross_check(&c, spec)?;
    if c.cross_check > T::lit(1e-9) {
        return Err(Error::Numerical(format!(
            "qubit coefficients disagree with the channel by {:e}",
            c.cross_check.as_f64()
        )));
    }
    Ok(c)
}

fn cross_check<T: Real>(c: &Dim2Coefficients<T>, spec: &ChannelSpec<T>) -> Result<T> {
    let real = |x: T| Complex::new(x, T::zero());
    // entries (1,1) and (1,2) of Φ(L_rs), linear in the matrix unit
    let predicted = |r: usize, s: usize| match (r, s) {
        (0, 0) => (real(c.alpha1 + c.beta1), c.alpha2 + c.beta2),
        (0, 1) => (c.a11, c.a21),
        (1, 0) => (c.a12, c.a22),
        _ => (real(c.beta1), c.beta2),
    };
    let mut worst = T::zero();
    for r in 0..2 {
        for s in 0..2 {
            let out = spec.apply(&ComplexMatrix::unit(2, r, s))?;
            let (p11, p12) = predicted(r, s);
            worst = worst.max(modulus(out.get(0, 0) - p11)).max(modulus(out.get(0, 1) - p12));
        }
    }
    Ok(worst)
}

/// `(Q11, Re Q12, Im Q12)` of a qubit state.
pub fn params<T: Real>(q: &ComplexMatrix<T>) -> (T, T, T) {
    let q12 = q.get(0, 1);
    (q.get(0, 0).re, q12.re, q12.im)
}

/// `[[Q11, a + b i], [a - b i, 1 - Q11]]`.
pub fn from_params<T: Real>(q11: T, a: T, b: T) -> ComplexMatrix<T> {
    let z = Complex::new(a, b);
    let data = vec![
        Complex::new(q11, T::zero()),
        z,
        z.conj(),
        Complex::new(T::one() - q11, T::zero()),
    ];
    ComplexMatrix::from_row_major(2, 2, data).expect("finite parameters")
}

/// One step of the channel in `(Q11, a, b)` coordinates.
pub fn g_map<T: Real>(c: &Dim2Coefficients<T>, q11: T, a: T, b: T) -> (T, T, T) {
    let first = c.c11() * a + c.c12() * b + c.alpha1 * q11 + c.beta1;
    let second = c.alpha2 * q11 + c.beta2 + (c.a21 + c.a22) * a + (c.a21 - c.a22) * i_unit() * b;
    (first.re, second.re, second.im)
}

/// `K = [[a11 + a12, i (a11 - a12)], [a21 + a22 - 1, i (a21 - a22 - 1)]]`.
pub fn k_matrix<T: Real>(c: &Dim2Coefficients<T>) -> ComplexMatrix<T> {
    ComplexMatrix::from_row_major(2, 2, vec![c.c11(), c.c12(), c.c21(), c.c22()])
        .expect("finite coefficients")
}

/// Which reduction of the homogeneous fixed-point system was used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateBranch {
    /// `α2 ≠ 0` and `α1 ≠ 1`: `Q11` eliminated through `z0 = (1 - α1)/α2`.
    Generic,
    /// `α1 ≈ 1`: `z0` vanishes; the full 3x3 real determinant is used.
    PopulationNeutral,
    /// `α2 ≈ 0`: the coherence equation decouples from `Q11`.
    CoherenceDecoupled,
}

/// Determinant conditions for uniqueness of the qubit fixed point.
#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessCertificate<T: Real> {
    pub det_k: Complex<T>,
    /// `(1 - α1) / α2`, absent when `|α2| <= tol`.
    pub z0: Option<Complex<T>>,
    /// Determinant of the real system left after eliminating `Q11`.
    pub det_real: T,
    /// `|det_k|` divided by the product of the row norms of `K`.
    pub det_k_relative: T,
    /// `|det_real|` divided by the product of its row norms.
    pub det_real_relative: T,
    pub branch: CertificateBranch,
    pub unique: bool,
}

fn relative_det<T: Real>(det: T, rows: &[T]) -> T {
    let scale = rows.iter().fold(T::one(), |acc, &r| acc * r);
    if scale > T::zero() {
        det.abs() / scale
    } else {
        T::zero()
    }
}

fn norm2<T: Real>(xs: &[T]) -> T {
    xs.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
}

fn cnorm2<T: Real>(xs: &[Complex<T>]) -> T {
    xs.iter().fold(T::zero(), |acc, &x| acc + x.norm_sqr()).sqrt()
}

/// Decides uniqueness from `det K` and the real reduced determinant, each
/// compared with `tol` after dividing by the product of its row norms.
///
/// With `z0 = α + β i` the homogeneous system reduces to
/// `C11 a + C12 b + z0 (C21 a + C22 b) = 0`, whose imaginary and real parts
/// give the rows `(β C21¹ + α C21², β C22¹ + α C22²)` and
/// `(C11 + α C21¹ - β C21², C12 + α C22¹ - β C22²)`.
pub fn uniqueness_certificate<T: Real>(c: &Dim2Coefficients<T>, tol: T) -> Result<UniquenessCertificate<T>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument("certificate tolerance must be positive".into()));
    }
    let (c11, c12, c21, c22) = (c.c11().re, c.c12().re, c.c21(), c.c22());
    let det_k = c.c11() * c22 - c.c12() * c21;
    let det_k_relative = if det_k.norm_sqr() > T::zero() {
        modulus(det_k) / (cnorm2(&[c.c11(), c.c12()]) * cnorm2(&[c21, c22]))
    } else {
        T::zero()
    };
    let one_minus = T::one() - c.alpha1;
    let alpha2_small = modulus(c.alpha2) <= tol;
    let population_neutral = one_minus.abs() <= tol;

    let (z0, det_real, det_real_relative, branch) = if alpha2_small {
        // (α1 - 1) Q11 + C11 a + C12 b = 0 and C21 a + C22 b = 0
        let d = c21.re * c22.im - c22.re * c21.im;
        let rel = relative_det(d, &[norm2(&[c21.re, c22.re]), norm2(&[c21.im, c22.im])]);
        let gate = if population_neutral { T::zero() } else { T::one() };
        (None, -one_minus * d, rel * gate, CertificateBranch::CoherenceDecoupled)
    } else if population_neutral {
        let rows = [
            [c.alpha1 - T::one(), c11, c12],
            [c.alpha2.re, c21.re, c22.re],
            [c.alpha2.im, c21.im, c22.im],
        ];
        let d = det3(&rows);
        let rel = relative_det(d, &[norm2(&rows[0]), norm2(&rows[1]), norm2(&rows[2])]);
        (Some(Complex::new(one_minus, T::zero()) / c.alpha2), d, rel, CertificateBranch::PopulationNeutral)
    } else {
        let z0 = Complex::new(one_minus, T::zero()) / c.alpha2;
        let (al, be) = (z0.re, z0.im);
        let r1 = [be * c21.re + al * c21.im, be * c22.re + al * c22.im];
        let r2 = [c11 + al * c21.re - be * c21.im, c12 + al * c22.re - be * c22.im];
        let d = r1[0] * r2[1] - r1[1] * r2[0];
        let rel = relative_det(d, &[norm2(&r1), norm2(&r2)]);
        (Some(z0), d, rel, CertificateBranch::Generic)
    };
    Ok(UniquenessCertificate {
        det_k,
        z0,
        det_real,
        det_k_relative,
        det_real_relative,
        branch,
        unique: det_k_relative > tol && det_real_relative > tol,
    })
}

fn det3<T: Real>(m: &[[T; 3]; 3]) -> T {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Solves `G(Q11, a, b) = (Q11, a, b)` as a 3x3 real linear system.
pub fn closed_form_fixed_point<T: Real>(c: &Dim2Coefficients<T>, tol: T) -> Result<ComplexMatrix<T>> {
    let cert = uniqueness_certificate(c, tol)?;
    if !cert.unique {
        return Err(Error::NotUnique);
    }
    let (c21, c22) = (c.c21(), c.c22());
    let a = DMatrix::from_row_slice(
        3,
        3,
        &[
            c.alpha1 - T::one(),
            c.c11().re,
            c.c12().re,
            c.alpha2.re,
            c21.re,
            c22.re,
            c.alpha2.im,
            c21.im,
            c22.im,
        ],
    );
    let rhs = nalgebra::DVector::from_row_slice(&[-c.beta1, -c.beta2.re, -c.beta2.im]);
    let x = a.lu().solve(&rhs).ok_or(Error::SingularSystem {
        det_k: modulus(cert.det_k).as_f64(),
        det_real: cert.det_real.as_f64(),
    })?;
    Ok(from_params(x[0], x[1], x[2]))
}

/// Coefficients, certificate and (when unique) the closed-form fixed point.
#[derive(Debug, Clone)]
pub struct Dim2Analysis<T: Real> {
    pub coefficients: Dim2Coefficients<T>,
    pub certificate: UniquenessCertificate<T>,
    pub fixed_point: Option<ComplexMatrix<T>>,
}

pub fn analyze2<T: Real>(spec: &ChannelSpec<T>, tol: T) -> Result<Dim2Analysis<T>> {
    let coefficients = coefficients(spec)?;
    let certificate = uniqueness_certificate(&coefficients, tol)?;
    let fixed_point = if certificate.unique {
        Some(closed_form_fixed_point(&coefficients, tol)?)
    } else {
        None
    };
    Ok(Dim2Analysis {
        coefficients,
        certificate,
        fixed_point,
    })
}

/// `U = cos θ I⊗I + i sin θ σˣ⊗σˣ` with `β = diag(p1, 1 - p1)`.
pub fn sigma_x_channel<T: Real>(theta: T, p1: T) -> Result<ChannelSpec<T>> {
    if !(p1 > T::zero() && p1 < T::one()) {
        return Err(Error::InvalidArgument(format!("p1 must lie in (0, 1), got {}", p1.as_f64())));
    }
    let (c, s) = (theta.cos(), theta.sin());
    let u = ComplexMatrix::from_fn(4, 4, |i, j| {
        if i == j {
            Complex::new(c, T::zero())
        } else if i + j == 3 {
            Complex::new(T::zero(), s)
        } else {
            Complex::new(T::zero(), T::zero())
        }
    });
    ChannelSpec::from_spectrum(u, vec![p1, T::one() - p1])
}
