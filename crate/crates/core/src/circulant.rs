//! Phase-decorated cyclic shifts on the product basis.
//!
//! With the basis vectors `e_k ⊗ e_l` numbered `idx = k * n + l` (zero-based),
//! the circulant unitary sends `e_idx` to `u_idx · e_{idx + 1 mod n²}`. When
//! the phases have pairwise distinct ratios `u_i ū_j` and the environment
//! spectrum is strictly positive, `Φ - I` has rank `n² - 1` and the channel has
//! the unique fixed point `I / n`.

use rand::Rng;

use crate::channel::ChannelSpec;
use crate::error::{Error, Result};
use crate::linalg::{rng_from_seed, ComplexMatrix};
use crate::scalar::{modulus, unit_phase, Complex, Real};

/// Random angle draws tried before switching to the Sidon-set construction.
pub const RANDOM_ATTEMPTS: usize = 64;

/// Default certificate threshold: `1e-3` up to `n = 6`, then scaled like `1/m²`.
pub fn default_min_margin(n: usize) -> f64 {
    let m = (n * n) as f64;
    if n <= 6 {
        1e-3
    } else {
        1e-3 * (36.0 / m).powi(2)
    }
}

/// Unimodular phases `u_1, ..., u_m` with their distinctness margin
/// `min |u_i ū_j - u_k ū_l|` over ordered pairs `(i, j) ≠ (k, l)`, `i ≠ j`, `k ≠ l`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector<T: Real> {
    pub m: usize,
    pub u: Vec<Complex<T>>,
    /// `u_k = exp(i angles[k])`.
    pub angles: Vec<T>,
    pub margin: T,
}

impl<T: Real> PhaseVector<T> {
    pub fn from_angles(angles: Vec<T>) -> Result<Self> {
        if angles.len() < 2 {
            return Err(Error::InvalidArgument("at least two phases are needed".into()));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument("phase angles must be finite".into()));
        }
        let u: Vec<Complex<T>> = angles.iter().map(|&a| unit_phase(a)).collect();
        let margin = phase_margin(&u);
        Ok(Self {
            m: u.len(),
            u,
            angles,
            margin,
        })
    }

    /// Accepts phases given as complex numbers; each must have modulus one.
    pub fn from_phases(u: Vec<Complex<T>>) -> Result<Self> {
        let tol = T::lit(1e-12).max(T::EPSILON * T::lit(100.0));
        if let Some(z) = u.iter().find(|&&z| (modulus(z) - T::one()).abs() > tol) {
            return Err(Error::InvalidArgument(format!(
                "phase {} + {}i is not unimodular",
                z.re.as_f64(),
                z.im.as_f64()
            )));
        }
        let angles = u.iter().map(|z| z.im.atan2(z.re)).collect();
        Self::from_angles(angles)
    }

    /// Fails unless the margin reaches `min_margin`.
    pub fn certify(&self, min_margin: T) -> Result<()> {
        if self.margin >= min_margin {
            Ok(())
        } else {
            Err(Error::MarginNotAchieved {
                achieved: self.margin.as_f64(),
                requested: min_margin.as_f64(),
            })
        }
    }
}

/// Brute-force `min |u_i ū_j - u_k ū_l|` over all admissible quadruples.
pub fn phase_margin<T: Real>(u: &[Complex<T>]) -> T {
    let m = u.len();
    let mut ratios = Vec::with_capacity(m * m.saturating_sub(1));
    for i in 0..m {
        for j in 0..m {
            if i != j {
                ratios.push(u[i] * u[j].conj());
            }
        }
    }
    let mut best: Option<T> = None;
    for (p, &x) in ratios.iter().enumerate() {
        for &y in &ratios[p + 1..] {
            let d = modulus(x - y);
            best = Some(match best {
                Some(b) if b <= d => b,
                _ => d,
            });
        }
    }
    best.unwrap_or_else(T::zero)
}

/// `n²` phases with certified margin `>= min_margin`, deterministic in `seed`.
///
/// Uniform random angles are tried first. Their margin shrinks roughly like
/// `1/m⁴`, so beyond `n = 3` the search falls back to angles on the grid
/// `2π/q` indexed by a randomly translated and dilated Bose–Chowla Sidon set
/// modulo `q = p² - 1`, whose differences are all distinct; that bounds the
/// margin below by `2 sin(π/q)`.
pub fn generic_phases<T: Real>(n: usize, seed: u64, min_margin: T) -> Result<PhaseVector<T>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("generic phases need n >= 2, got {n}")));
    }
    if !(min_margin > T::zero()) {
        return Err(Error::InvalidArgument("min_margin must be positive".into()));
    }
    let m = n * n;
    let mut rng = rng_from_seed(seed);
    let mut best = T::zero();
    for _ in 0..RANDOM_ATTEMPTS {
        let angles: Vec<T> = (0..m)
            .map(|_| T::lit(rng.random_range(0.0..std::f64::consts::TAU)))
            .collect();
        let pv = PhaseVector::from_angles(angles)?;
        if pv.margin >= min_margin {
            return Ok(pv);
        }
        best = best.max(pv.margin);
    }
    let pv = PhaseVector::from_angles(sidon_angles(m, &mut rng))?;
    if pv.margin >= min_margin {
        return Ok(pv);
    }
    Err(Error::MarginNotAchieved {
        achieved: best.max(pv.margin).as_f64(),
        requested: min_margin.as_f64(),
    })
}

fn sidon_angles<T: Real, R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<T> {
    let p = next_prime(m.max(3) as u64);
    let q = p * p - 1;
    let mut set = bose_chowla(p);
    // random m-subset
    for k in 0..m {
        let j = rng.random_range(k..set.len());
        set.swap(k, j);
    }
    set.truncate(m);
    let dilation = loop {
        let t = rng.random_range(1..q);
        if gcd(t, q) == 1 {
            break t;
        }
    };
    let shift = rng.random_range(0..q);
    set.iter()
        .map(|&s| {
            let r = (mul_mod(dilation, s, q) + shift) % q;
            T::lit(std::f64::consts::TAU * r as f64 / q as f64)
        })
        .collect()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

fn is_prime(x: u64) -> bool {
    x >= 2 && (2..).take_while(|d| d * d <= x).all(|d| !x.is_multiple_of(d))
}

fn next_prime(mut x: u64) -> u64 {
    while !is_prime(x) {
        x += 1;
    }
    x
}

fn prime_factors(mut x: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= x {
        if x.is_multiple_of(d) {
            out.push(d);
            while x.is_multiple_of(d) {
                x /= d;
            }
        }
        d += 1;
    }
    if x > 1 {
        out.push(x);
    }
    out
}

/// Element `a + b x` of `GF(p²) = GF(p)[x] / (x² - c)`.
#[derive(Clone, Copy, PartialEq, Eq)]
struct Gf2 {
    a: u64,
    b: u64,
}

struct Field {
    p: u64,
    c: u64,
}

impl Field {
    fn new(p: u64) -> Self {
        let c = (2..p)
            .find(|&c| pow_mod(c, (p - 1) / 2, p) == p - 1)
            .expect("odd primes have quadratic non-residues");
        Self { p, c }
    }

    fn mul(&self, x: Gf2, y: Gf2) -> Gf2 {
        let p = self.p;
        Gf2 {
            a: (mul_mod(x.a, y.a, p) + mul_mod(mul_mod(x.b, y.b, p), self.c, p)) % p,
            b: (mul_mod(x.a, y.b, p) + mul_mod(x.b, y.a, p)) % p,
        }
    }

    fn pow(&self, mut x: Gf2, mut e: u64) -> Gf2 {
        let mut acc = Gf2 { a: 1, b: 0 };
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, x);
            }
            x = self.mul(x, x);
            e >>= 1;
        }
        acc
    }

    fn primitive_element(&self) -> Gf2 {
        let order = self.p * self.p - 1;
        let factors = prime_factors(order);
        let one = Gf2 { a: 1, b: 0 };
        (0..self.p)
            .flat_map(|a| (1..self.p).map(move |b| Gf2 { a, b }))
            .find(|&g| factors.iter().all(|&f| self.pow(g, order / f) != one))
            .expect("the multiplicative group of a finite field is cyclic")
    }
}

/// `{k in [1, p² - 1) : g^k - g ∈ GF(p)}` for a primitive `g`: `p` residues
/// modulo `p² - 1` with pairwise distinct differences.
fn bose_chowla(p: u64) -> Vec<u64> {
    let field = Field::new(p);
    let g = field.primitive_element();
    let q = p * p - 1;
    let mut out = Vec::with_capacity(p as usize);
    let mut power = g;
    for k in 1..q {
        if power.b == g.b {
            out.push(k);
        }
        power = field.mul(power, g);
    }
    out
}

/// The `n² x n²` circulant unitary with `U[(idx + 1) mod n², idx] = u_idx`.
pub fn build_circulant<T: Real>(phases: &PhaseVector<T>, n: usize) -> Result<ComplexMatrix<T>> {
    let m = n * n;
    if phases.m != m || phases.u.len() != m {
        return Err(Error::Dimension(format!(
            "circulant on n = {n} needs {m} phases, got {}",
            phases.m
        )));
    }
    let mut u = ComplexMatrix::zeros(m, m);
    for (idx, &z) in phases.u.iter().enumerate() {
        u.set((idx + 1) % m, idx, z);
    }
    Ok(u)
}

/// `β = diag(n, n-1, ..., 1) / (n(n+1)/2)`: strictly decreasing and positive.
pub fn default_spectrum<T: Real>(n: usize) -> Vec<T> {
    let total = (n * (n + 1) / 2) as f64;
    (0..n).map(|j| T::lit((n - j) as f64 / total)).collect()
}

/// Channel of the circulant unitary for the given environment spectrum.
pub fn circulant_spec<T: Real>(phases: &PhaseVector<T>, n: usize, lambda: Vec<T>) -> Result<ChannelSpec<T>> {
    ChannelSpec::from_spectrum(build_circulant(phases, n)?, lambda)
}

/// Coefficients governing the off-diagonal action of the circulant channel.
#[derive(Debug, Clone)]
pub struct AbCoefficients<T: Real> {
    /// `a[r, s] = Σ_{j < n-1} u_{r,j+1,r,j} conj(u_{s,j+1,s,j}) λ_j`.
    pub a: ComplexMatrix<T>,
    /// `b[r, s] = u_{r+1,0,r,n-1} conj(u_{s+1,0,s,n-1}) λ_{n-1}`.
    pub b: ComplexMatrix<T>,
    /// `(λ_0 + ... + λ_{n-2}) - max_{r≠s} |a[r, s]|`.
    pub slack: T,
}

pub fn ab_coefficients<T: Real>(phases: &PhaseVector<T>, n: usize, lambda: &[T]) -> Result<AbCoefficients<T>> {
    if phases.m != n * n {
        return Err(Error::Dimension(format!("expected {} phases, got {}", n * n, phases.m)));
    }
    check_spectrum(lambda, n)?;
    let u = &phases.u;
    // phase on the step inside block r from column j to j+1, and the block exit
    let step = |r: usize, j: usize| u[r * n + j];
    let a = ComplexMatrix::from_fn(n, n, |r, s| {
        (0..n - 1).fold(Complex::new(T::zero(), T::zero()), |acc, j| {
            acc + step(r, j) * step(s, j).conj() * lambda[j]
        })
    });
    let b = ComplexMatrix::from_fn(n, n, |r, s| step(r, n - 1) * step(s, n - 1).conj() * lambda[n - 1]);
    let bound = lambda[..n - 1].iter().fold(T::zero(), |acc, &l| acc + l);
    let mut worst = T::zero();
    for r in 0..n {
        for s in 0..n {
            if r != s {
                worst = worst.max(modulus(a.get(r, s)));
            }
        }
    }
    Ok(AbCoefficients {
        a,
        b,
        slack: bound - worst,
    })
}

fn check_spectrum<T: Real>(lambda: &[T], n: usize) -> Result<()> {
    if lambda.len() != n {
        return Err(Error::Dimension(format!("spectrum has {} entries, expected {n}", lambda.len())));
    }
    if let Some(&bad) = lambda.iter().find(|&&l| !(l > T::zero())) {
        return Err(Error::NotStrictlyPositive(bad.as_f64()));
    }
    let total = lambda.iter().fold(T::zero(), |acc, &l| acc + l);
    if (total - T::one()).abs() > T::validation_tol() {
        return Err(Error::InvalidArgument(format!("spectrum sums to {}", total.as_f64())));
    }
    Ok(())
}

/// `Σ λ_j - |Σ λ_j z_j|`; zero exactly when all `z_j` coincide.
pub fn rigidity_deficit<T: Real>(lambda: &[T], z: &[Complex<T>]) -> T {
    let total = lambda.iter().fold(T::zero(), |acc, &l| acc + l);
    let sum = lambda
        .iter()
        .zip(z)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (&l, &w)| acc + w * l);
    total - modulus(sum)
}

/// Whether `|Σ λ_j z_j| = Σ λ_j` within `1e-12`.
pub fn unimodular_sum_rigidity<T: Real>(lambda: &[T], z: &[Complex<T>]) -> bool {
    rigidity_deficit(lambda, z) <= T::lit(1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::is_unitary;
    use crate::scalar::cplx;

    fn i_phases() -> PhaseVector<f64> {
        PhaseVector::from_phases(vec![cplx(0.0, 1.0), cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn n2_nonzero_pattern() {
        let pv = PhaseVector::from_angles(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let u = build_circulant(&pv, 2).unwrap();
        let spec = ChannelSpec::from_spectrum(u.clone(), vec![0.6, 0.4]).unwrap();
        // u_{1,2,1,1} = u1, u_{2,1,1,2} = u2, u_{2,2,2,1} = u3, u_{1,1,2,2} = u4
        assert_eq!(spec.coefficient(0, 1, 0, 0), pv.u[0]);
        assert_eq!(spec.coefficient(1, 0, 0, 1), pv.u[1]);
        assert_eq!(spec.coefficient(1, 1, 1, 0), pv.u[2]);
        assert_eq!(spec.coefficient(0, 0, 1, 1), pv.u[3]);
        let nonzero = u.entries().iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 4);
    }

    #[test]
    fn unit_phases_give_cyclic_permutation() {
        let pv = PhaseVector::<f64>::from_angles(vec![0.0; 9]).unwrap();
        let u = build_circulant(&pv, 3).unwrap();
        for col in 0..9 {
            for row in 0..9 {
                let expected = if row == (col + 1) % 9 { 1.0 } else { 0.0 };
                assert_eq!(u.get(row, col), cplx(expected, 0.0));
            }
        }
        assert!(build_circulant(&pv, 2).is_err());
    }

    #[test]
    fn certified_circulants_are_unitary() {
        for n in 2..=4 {
            let pv = generic_phases::<f64>(n, 5, default_min_margin(n)).unwrap();
            assert!(is_unitary(&build_circulant(&pv, n).unwrap(), 1e-14));
        }
    }

    #[test]
    fn margin_matches_naive_quadruple_loop() {
        let pv = generic_phases::<f64>(2, 9, 1e-3).unwrap();
        let u = &pv.u;
        let mut best = f64::INFINITY;
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        if i != j && k != l && (i, j) != (k, l) {
                            best = best.min((u[i] * u[j].conj() - u[k] * u[l].conj()).norm());
                        }
                    }
                }
            }
        }
        assert!((best - pv.margin).abs() < 1e-15);
        assert!(best >= 1e-3);
    }

    #[test]
    fn real_ratio_pair_is_rejected() {
        let pv = PhaseVector::from_angles(vec![0.3, 0.3 + std::f64::consts::PI]).unwrap();
        assert!(pv.margin < 1e-12);
        assert!(matches!(pv.certify(1e-3), Err(Error::MarginNotAchieved { .. })));
        assert!(PhaseVector::from_angles(vec![0.3, 1.1]).unwrap().certify(1e-3).is_ok());
    }

    #[test]
    fn generic_phases_are_deterministic() {
        assert_eq!(
            generic_phases::<f64>(3, 11, 1e-3).unwrap(),
            generic_phases::<f64>(3, 11, 1e-3).unwrap()
        );
        assert!(generic_phases::<f64>(1, 0, 1e-3).is_err());
        assert!(generic_phases::<f64>(2, 0, 0.0).is_err());
    }

    #[test]
    fn bose_chowla_differences_are_distinct() {
        for p in [5u64, 7, 11] {
            let set = bose_chowla(p);
            assert_eq!(set.len() as u64, p);
            let q = p * p - 1;
            let mut diffs: Vec<u64> = Vec::new();
            for &x in &set {
                for &y in &set {
                    if x != y {
                        diffs.push((x + q - y) % q);
                    }
                }
            }
            let total = diffs.len();
            diffs.sort_unstable();
            diffs.dedup();
            assert_eq!(diffs.len(), total);
        }
    }

    #[test]
    fn golden_coefficients() {
        let ab = ab_coefficients(&i_phases(), 2, &[0.7, 0.3]).unwrap();
        assert!((ab.a.get(0, 1) - cplx(0.0, 0.7)).norm() < 1e-15);
        assert!((ab.b.get(0, 1) - cplx(0.3, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn equal_phases_saturate_the_bound() {
        let pv = PhaseVector::<f64>::from_angles(vec![0.8; 9]).unwrap();
        let lambda = [0.5, 0.3, 0.2];
        let ab = ab_coefficients(&pv, 3, &lambda).unwrap();
        for r in 0..3 {
            for s in 0..3 {
                assert!((ab.a.get(r, s) - cplx(0.8, 0.0)).norm() < 1e-15);
            }
        }
        assert!(ab.slack.abs() < 1e-15);
    }

    #[test]
    fn b_has_modulus_lambda_n() {
        let pv = generic_phases::<f64>(4, 1, 1e-3).unwrap();
        let lambda = default_spectrum::<f64>(4);
        let ab = ab_coefficients(&pv, 4, &lambda).unwrap();
        for r in 0..4 {
            for s in 0..4 {
                assert!((ab.b.get(r, s).norm() - lambda[3]).abs() < 1e-15);
            }
        }
        assert!(ab.slack > 0.0);
    }

    #[test]
    fn rigidity_examples() {
        let one = cplx::<f64>(1.0, 0.0);
        assert!(unimodular_sum_rigidity(&[0.2, 0.3, 0.5], &[one; 3]));
        assert!(!unimodular_sum_rigidity(&[0.5, 0.5], &[one, -one]));
        assert!((rigidity_deficit(&[0.5, 0.5], &[one, -one]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn default_spectrum_is_decreasing() {
        let s = default_spectrum::<f64>(4);
        assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(s.windows(2).all(|w| w[0] > w[1]));
    }
}
