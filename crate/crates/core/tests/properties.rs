use proptest::prelude::*;

use repchan::channel::{KrausSet, Superoperator};
use repchan::circulant::{ab_coefficients, build_circulant, circulant_spec, generic_phases, default_spectrum};
use repchan::dim2::{self, closed_form_fixed_point, coefficients, uniqueness_certificate, DEFAULT_TOL};
use repchan::fixed_point::{analyze, analyze_superoperator, iterate_to_end};
use repchan::linalg::random::{ginibre, random_density, random_hermitian, random_spectrum};
use repchan::linalg::{
    haar_unitary, hermitian_eigenvalues, is_unitary, kron, partial_trace_env, rank_and_nullspace,
    rng_from_seed, RankPolicy,
};
use repchan::{cplx, CMatrix, Spec, C64};

fn max_entry(a: &CMatrix) -> f64 {
    a.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn haar_spec(n: usize, seed: u64) -> Spec {
    let mut rng = rng_from_seed(seed ^ 0x5eed);
    Spec::from_spectrum(haar_unitary(n * n, seed), random_spectrum(n, &mut rng)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_trace_preserves_trace(n in 2usize..=4, seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let t = ginibre::<f64, _>(n * n, &mut rng);
        let reduced = partial_trace_env(&t, n).unwrap();
        prop_assert!((reduced.trace() - t.trace()).norm() <= 1e-12);
    }

    #[test]
    fn partial_trace_keeps_hermiticity_and_positivity(n in 2usize..=4, seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let h = random_hermitian::<f64, _>(n * n, &mut rng);
        prop_assert!(partial_trace_env(&h, n).unwrap().hermiticity_defect() <= 1e-13);
        let s = ginibre::<f64, _>(n * n, &mut rng);
        let psd = &s * &s.adjoint();
        let lo = hermitian_eigenvalues(&partial_trace_env(&psd, n).unwrap()).unwrap()[0];
        prop_assert!(lo >= -1e-10);
    }

    #[test]
    fn kron_is_associative(a in 1usize..=3, b in 1usize..=3, c in 1usize..=3, seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let (x, y, z) = (ginibre::<f64, _>(a, &mut rng), ginibre::<f64, _>(b, &mut rng), ginibre::<f64, _>(c, &mut rng));
        let left = kron(&kron(&x, &y).unwrap(), &z).unwrap();
        let right = kron(&x, &kron(&y, &z).unwrap()).unwrap();
        prop_assert_eq!((left.rows(), left.cols()), (a * b * c, a * b * c));
        prop_assert!(left.max_abs_diff(&right) <= 1e-13);
    }

    #[test]
    fn kernel_vectors_are_small(dim in 2usize..=8, rank in 0usize..=8, seed in any::<u64>()) {
        let rank = rank.min(dim);
        let mut rng = rng_from_seed(seed);
        let a = ginibre::<f64, _>(dim, &mut rng);
        let b = ginibre::<f64, _>(dim, &mut rng);
        let mask: Vec<f64> = (0..dim).map(|k| if k < rank { 1.0 } else { 0.0 }).collect();
        let m = &(&a * &CMatrix::from_real_diagonal(&mask)) * &b;
        let r = rank_and_nullspace(&m, RankPolicy::Relative).unwrap();
        prop_assert_eq!(r.rank + r.kernel_dim(), dim);
        for v in &r.kernel {
            let mv = m.apply(v).unwrap();
            let norm = mv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(norm <= 10.0 * r.threshold);
        }
    }

    #[test]
    fn channel_is_cptp_and_forms_agree(n in 2usize..=4, seed in any::<u64>()) {
        let spec = haar_spec(n, seed);
        let mut rng = rng_from_seed(seed.wrapping_add(1));
        let q = random_density::<f64, _>(n, &mut rng);
        let out = spec.apply(&q).unwrap();
        prop_assert!((out.trace() - cplx(1.0, 0.0)).norm() <= 1e-12);
        prop_assert!(out.hermiticity_defect() <= 1e-12);
        prop_assert!(hermitian_eigenvalues(&out).unwrap()[0] >= -1e-10);
        let kraus = KrausSet::from_spec(&spec).unwrap();
        prop_assert!(kraus.completeness_defect() <= 1e-10);
        prop_assert!(out.max_abs_diff(&kraus.apply(&q).unwrap()) <= 1e-12);
        prop_assert!(out.max_abs_diff(&Superoperator::from_spec(&spec).unwrap().apply(&q).unwrap()) <= 1e-12);
    }

    #[test]
    fn channel_is_linear_and_hermiticity_preserving(n in 2usize..=3, seed in any::<u64>(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let spec = haar_spec(n, seed);
        let mut rng = rng_from_seed(seed.wrapping_mul(3));
        let a = ginibre::<f64, _>(n, &mut rng);
        let b = ginibre::<f64, _>(n, &mut rng);
        let alpha: C64 = cplx(re, im);
        let lhs = spec.apply(&(&a.scale(alpha) + &b)).unwrap();
        let rhs = &spec.apply(&a).unwrap().scale(alpha) + &spec.apply(&b).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
        let h = random_hermitian::<f64, _>(n, &mut rng);
        prop_assert!(spec.apply(&h).unwrap().hermiticity_defect() <= 1e-12);
    }

    #[test]
    fn non_diagonal_environment_matches_stinespring(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let beta = random_density::<f64, _>(2, &mut rng);
        let spec = Spec::new(haar_unitary(4, seed), beta).unwrap();
        let q = random_density::<f64, _>(2, &mut rng);
        let out = spec.apply(&q).unwrap();
        prop_assert!(out.max_abs_diff(&KrausSet::from_spec(&spec).unwrap().apply(&q).unwrap()) <= 1e-12);
        prop_assert!(out.max_abs_diff(&Superoperator::from_coordinates(&spec).apply(&q).unwrap()) <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fixed_point_exists_and_attracts(n in 2usize..=3, seed in any::<u64>()) {
        let spec = haar_spec(n, seed);
        let sup = Superoperator::from_spec(&spec).unwrap();
        let r = analyze_superoperator(&sup, RankPolicy::Relative).unwrap();
        prop_assert!(r.kernel_dim >= 1);
        prop_assert_eq!(r.rank + r.kernel_dim, n * n);
        prop_assert_eq!(r.unique, r.kernel_dim == 1);
        if r.unique {
            prop_assert!(r.residual <= 1e-9);
            let q = r.fixed_density.unwrap();
            if r.spectral_gap < 1.0 - 1e-6 {
                let mut rng = rng_from_seed(seed.wrapping_add(17));
                for _ in 0..5 {
                    let q0 = random_density::<f64, _>(n, &mut rng);
                    let (end, _, _) = iterate_to_end(&sup, &q0, 100_000, 1e-14).unwrap();
                    prop_assert!(end.max_abs_diff(&q) <= 1e-7);
                }
            }
        }
    }

    #[test]
    fn trajectories_stay_in_the_state_space(seed in any::<u64>()) {
        let spec = haar_spec(2, seed);
        let mut rng = rng_from_seed(seed);
        let t = repchan::fixed_point::iterate(&spec, &random_density::<f64, _>(2, &mut rng), 50, 0.0).unwrap();
        for q in &t.states {
            prop_assert!(repchan::linalg::is_density(q, 1e-8));
        }
    }

    #[test]
    fn certified_circulants_have_corank_one(n in 2usize..=5, seed in any::<u64>()) {
        let phases = generic_phases::<f64>(n, seed, 1e-3).unwrap();
        let u = build_circulant(&phases, n).unwrap();
        prop_assert!(is_unitary(&u, 1e-14));
        let lambda = default_spectrum::<f64>(n);
        let spec = circulant_spec(&phases, n, lambda.clone()).unwrap();
        let sup = Superoperator::from_spec(&spec).unwrap();
        let r = analyze_superoperator(&sup, RankPolicy::Relative).unwrap();
        prop_assert_eq!(r.rank, n * n - 1);
        // diagonal action (1 - λ_n) L_rr + λ_n L_(r+1)(r+1), exactly
        let ln = lambda[n - 1];
        for r in 0..n {
            let col = sup.column(r, r);
            for (idx, z) in col.iter().enumerate() {
                let expected = if idx == r * n + r {
                    1.0 - ln
                } else if idx == ((r + 1) % n) * (n + 1) {
                    ln
                } else {
                    0.0
                };
                prop_assert!((z - cplx(expected, 0.0)).norm() <= 1e-15);
            }
        }
        // |a_rs - 1| >= 1 - |a_rs| > λ_n = |b_rs| for r != s
        let ab = ab_coefficients(&phases, n, &lambda).unwrap();
        for r in 0..n {
            for s in 0..n {
                if r != s {
                    let a = ab.a.get(r, s);
                    prop_assert!((a - cplx(1.0, 0.0)).norm() >= 1.0 - a.norm() - 1e-15);
                    prop_assert!((ab.b.get(r, s).norm() - ln).abs() <= 1e-15);
                    if n > 2 {
                        prop_assert!(1.0 - a.norm() > ln);
                    }
                }
            }
        }
    }

    #[test]
    fn qubit_coefficients_match_the_channel(seed in any::<u64>(), p1 in 0.05f64..0.95) {
        let spec = Spec::from_spectrum(haar_unitary(4, seed), vec![p1, 1.0 - p1]).unwrap();
        let c = coefficients(&spec).unwrap();
        prop_assert!(c.cross_check <= 1e-11);
        prop_assert!(c.reality_defect() <= 1e-12);
        prop_assert!(c.alpha1.abs() < 1.0 && c.beta1 > 0.0 && c.beta1 < 1.0);
        let cert = uniqueness_certificate(&c, DEFAULT_TOL).unwrap();
        let report = analyze(&spec, RankPolicy::Relative).unwrap();
        if cert.unique {
            prop_assert_eq!(report.kernel_dim, 1);
            let q = closed_form_fixed_point(&c, DEFAULT_TOL).unwrap();
            prop_assert!(q.max_abs_diff(report.fixed_density.as_ref().unwrap()) <= 1e-9);
        }
        if report.kernel_dim == 1 {
            prop_assert!(cert.unique);
        }
    }

    #[test]
    fn sigma_x_fixed_family(theta in -3.0f64..3.0, p1 in 0.05f64..0.95) {
        prop_assume!(theta.sin().abs() > 1e-6);
        let spec = dim2::sigma_x_channel(theta, p1).unwrap();
        // non-kernel singular values are 2 sin²θ; an absolute cutoff keeps them apart from rounding
        let r = analyze(&spec, RankPolicy::Absolute(1e-13)).unwrap();
        prop_assert_eq!(r.kernel_dim, 2);
        let half = CMatrix::identity(2).scale_real(0.5);
        let sx = CMatrix::from_row_major(2, 2, vec![cplx(0.0, 0.0), cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(0.0, 0.0)]).unwrap();
        prop_assert!(max_entry(&(&spec.apply(&half).unwrap() - &half)) <= 1e-12);
        prop_assert!(max_entry(&(&spec.apply(&sx).unwrap() - &sx)) <= 1e-12);
    }
}
