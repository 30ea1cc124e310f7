use hme_core::assembly::{assemble_a, assemble_d, assemble_d_inv, linearize};
use hme_core::collision::CollisionModel;
use hme_core::linalg::{max_abs, real_eigenvalues, RMatrix};
use hme_core::ohme::{assemble_ohme_linearized, build_projection};
use hme_core::stability::{lemma_trial, space_dispersion_1d, time_dispersion};
use hme_core::yong::{build_a0, check_condition3, random_rest_states, YongTolerances};
use hme_core::{LinearModel, MomentBasis, MomentState};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A state with the given macroscopic fields and random `|f_α| ≤ 0.1` for `|α| ≥ 3`.
fn perturbed_state(dim: usize, order: usize, rho: f64, u: &[f64], theta: f64, seed: u64) -> MomentState {
    let b = MomentBasis::new(dim, order).unwrap();
    let mut s = MomentState::equilibrium(b.clone(), rho, &u[..dim], theta).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for a in b.indices().iter().filter(|a| a.degree() >= 3) {
        s = s.with_entry(a, rng.random_range(-0.1..0.1)).unwrap();
    }
    s
}

fn relaxation(kind: usize, tau: f64, pr: f64) -> CollisionModel {
    match kind % 3 {
        0 => CollisionModel::Bgk { tau },
        1 => CollisionModel::Shakhov { tau, pr },
        _ => CollisionModel::EsBgk { tau, pr },
    }
}

fn velocity() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0..1.0f64, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn d_inverse_is_exact(dim in 1usize..=3, order in 3usize..=5, rho in 0.2..3.0f64, theta in 0.2..3.0f64,
                          u in velocity(), seed in any::<u64>()) {
        let s = perturbed_state(dim, order, rho, &u, theta, seed);
        let prod = assemble_d(&s) * assemble_d_inv(&s);
        let n = prod.nrows();
        prop_assert!(max_abs(&(prod - RMatrix::identity(n, n))) < 1e-12);
    }

    #[test]
    fn flux_spectrum_stays_real(dim in 1usize..=3, order in 3usize..=6, rho in 0.2..3.0f64, theta in 0.2..3.0f64,
                                u in velocity(), seed in any::<u64>(), axis in 0usize..3) {
        prop_assume!(dim < 3 || order <= 5);
        let s = perturbed_state(dim, order, rho, &u, theta, seed);
        let ev = real_eigenvalues(&assemble_a(&s, axis % dim).unwrap()).unwrap();
        let scale = ev.iter().fold(1.0f64, |a, z| a.max(z.norm()));
        prop_assert!(ev.iter().all(|z| z.im.abs() <= 1e-6 * scale), "{ev:?}");
    }

    #[test]
    fn relaxation_jacobians_are_symmetric_nsd(dim in 1usize..=3, order in 3usize..=5, kind in 0usize..3,
                                              tau in 0.01..100.0f64, pr in 0.1..1.5f64) {
        let b = MomentBasis::new(dim, order).unwrap();
        let j = relaxation(kind, tau, pr).jacobian(&b).unwrap();
        prop_assert!(j.symmetry_residual <= 1e-12 / tau.min(1.0));
        prop_assert!(j.max_eig <= 1e-10 / tau);
        prop_assert_eq!(j.kernel_dim, dim + 2);
    }

    #[test]
    fn time_dispersion_is_damped(dim in 1usize..=2, order in 3usize..=6, kind in 0usize..3, tau in 0.01..100.0f64,
                                 k in proptest::collection::vec(-100.0..100.0f64, 2)) {
        let b = MomentBasis::new(dim, order).unwrap();
        let lin = linearize(&b, 1.0, 1.0).unwrap();
        let m = LinearModel::hme(&lin, relaxation(kind, tau, 2.0 / 3.0).qbar(&b).unwrap()).unwrap();
        let p = time_dispersion(&m, &k[..dim]).unwrap();
        prop_assert!(p.min_im >= -1e-9, "min Im {}", p.min_im);
    }

    #[test]
    fn space_dispersion_is_damped(order in 3usize..=6, kind in 0usize..3, tau in 0.01..100.0f64, omega in 0.01..100.0f64) {
        let b = MomentBasis::new(1, order).unwrap();
        let lin = linearize(&b, 1.0, 1.0).unwrap();
        let m = LinearModel::hme(&lin, relaxation(kind, tau, 2.0 / 3.0).qbar(&b).unwrap()).unwrap();
        let p = space_dispersion_1d(&m, omega).unwrap();
        prop_assert!(p.worst_product <= 1e-9);
        prop_assert!(p.max_det_residual <= 1e-8);
        prop_assert_eq!(p.ks.len() + p.infinite_count, b.len());
    }

    #[test]
    fn lemmas_hold_for_random_matrices(n in 1usize..10, rank in 0usize..10, seed in any::<u64>(), lambda in 0.01..100.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = RMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let c = RMatrix::from_fn(rank.min(n), n, |_, _| rng.random_range(-1.0..1.0));
        let a = (&x + x.transpose()) * 0.5;
        let b = -(c.transpose() * c);
        let s = lemma_trial(&a, &b, lambda).unwrap();
        prop_assert!(s.eigenvalue_violations == 0 && s.wavenumber_violations == 0, "{s:?}");
    }

    #[test]
    fn symmetrizer_works_away_from_equilibrium(dim in 1usize..=3, order in 3usize..=5, seed in any::<u64>()) {
        let b = MomentBasis::new(dim, order).unwrap();
        let s = &random_rest_states(&b, 1, seed).unwrap()[0];
        let a0 = build_a0(s).unwrap();
        let scale = max_abs(&a0);
        for d in 0..dim {
            let p = &a0 * assemble_a(s, d).unwrap();
            prop_assert!(max_abs(&(&p - p.transpose())) <= 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn condition3_at_any_equilibrium(dim in 1usize..=3, order in 3usize..=4, kind in 0usize..3, tau in 0.05..20.0f64,
                                     rho0 in 0.2..5.0f64, theta0 in 0.2..5.0f64) {
        let b = MomentBasis::new(dim, order).unwrap();
        let lin = linearize(&b, rho0, theta0).unwrap();
        let m = LinearModel::hme(&lin, relaxation(kind, tau, 2.0 / 3.0).qbar(&b).unwrap()).unwrap();
        let c3 = check_condition3(&m, &YongTolerances::default());
        prop_assert!(c3.pass, "{c3:?}");
        prop_assert!(c3.identity_residual < 1e-11);
    }

    #[test]
    fn one_dimensional_ordered_system_is_the_full_system(order in 3usize..=7, rho0 in 0.2..5.0f64, theta0 in 0.2..5.0f64,
                                                         tau in 0.05..20.0f64) {
        let b = MomentBasis::new(1, order).unwrap();
        let lin = linearize(&b, rho0, theta0).unwrap();
        let q = CollisionModel::Bgk { tau }.qbar(&b).unwrap();
        let o = assemble_ohme_linearized(&lin, &q, &build_projection(&b).unwrap()).unwrap();
        let h = LinearModel::hme(&lin, q).unwrap();
        prop_assert_eq!(o.abar, h.abar);
        prop_assert_eq!(o.source, h.source);
        prop_assert_eq!(o.scaling.lambda1, h.scaling.lambda1);
    }
}
