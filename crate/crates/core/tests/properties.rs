use proptest::prelude::*;

use sppt_core::bipartite::partial_transpose_a;
use sppt_core::discord::{
    classical_correlation_a, commutator_criterion, cq_detect, discord_a, von_neumann_entropy,
    OptimizerConfig,
};
use sppt_core::factorization::{factorize_2xn, factorize_3xn, is_sppt};
use sppt_core::families::{
    predicted_s, s12_generators, xstate, xstate_is_positive, xstate_is_ppt, xstate_is_sppt,
    XStateParams,
};
use sppt_core::linalg::{psd_sqrt, pseudo_inverse};
use sppt_core::random::{
    random_cq, random_cq_spec, random_ginibre_density, random_ginibre_state, random_pure,
    random_sppt, random_unitary,
};
use sppt_core::{c64, BipartiteState, ComplexMatrix, Tolerance};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn small_opt() -> OptimizerConfig {
    OptimizerConfig {
        grid_theta: 24,
        grid_phi: 48,
        ..OptimizerConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partial_transpose_is_an_involution(seed: u64, m in 2usize..=3, n in 1usize..=4) {
        let s = random_ginibre_state(m, n, seed, &tol()).unwrap();
        let pt = s.partial_transpose_a();
        prop_assert!(partial_transpose_a(&pt, m, n).max_abs_diff(s.rho()) == 0.0);
        prop_assert!((pt.trace() - s.rho().trace()).norm() < 1e-14);
        prop_assert!(pt.hermiticity_defect() < 1e-14);
    }

    #[test]
    fn partial_traces_have_unit_trace(seed: u64, m in 2usize..=3, n in 1usize..=5) {
        let s = random_ginibre_state(m, n, seed, &tol()).unwrap();
        prop_assert!((s.partial_trace_a().trace().re - 1.0).abs() < 1e-12);
        prop_assert!((s.partial_trace_b().trace().re - 1.0).abs() < 1e-12);
        prop_assert_eq!(s.partial_trace_a().rows(), n);
        prop_assert_eq!(s.partial_trace_b().rows(), m);
    }

    #[test]
    fn psd_sqrt_squares_back(seed: u64, n in 1usize..=8) {
        let a = random_ginibre_density(n, seed);
        let r = psd_sqrt(&a, &tol()).unwrap();
        prop_assert!((&r * &r).max_abs_diff(&a) < 1e-12);
        prop_assert!(r.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn pseudo_inverse_penrose(seed: u64, n in 2usize..=6, rank in 1usize..=6) {
        let rank = rank.min(n);
        let u = random_unitary(n, seed);
        let d: Vec<f64> = (0..n).map(|i| if i < rank { 1.0 + i as f64 } else { 0.0 }).collect();
        let a = &(&u * &ComplexMatrix::diag_real(&d)) * &u.dagger();
        let p = pseudo_inverse(&a, &tol()).unwrap();
        prop_assert!((&(&a * &p) * &a).max_abs_diff(&a) < 1e-10);
        prop_assert!((&(&p * &a) * &p).max_abs_diff(&p) < 1e-10);
    }

    #[test]
    fn factorization_reconstructs_and_is_gauge_invariant(seed: u64, n in 1usize..=5) {
        let s = random_ginibre_state(2, n, seed, &tol()).unwrap();
        let f = factorize_2xn(&s, &tol()).unwrap();
        prop_assert!(f.reconstruction_residual <= 1e-8);
        let g1 = random_unitary(n, seed ^ 1);
        let g2 = random_unitary(n, seed ^ 2);
        let g = f.gauge_transform(&g1, &g2, &tol()).unwrap();
        prop_assert!(g.reconstruct().max_abs_diff(s.rho()) <= 1e-8);
        prop_assert!((g.normality_residual - f.normality_residual).abs() <= 1e-8);
    }

    #[test]
    fn sppt_by_construction_and_implies_ppt(seed: u64, n in 1usize..=5) {
        let s = random_sppt(n, seed, &tol()).unwrap();
        let v = is_sppt(&s, &tol()).unwrap();
        prop_assert!(v.is_sppt, "{:?}", v);
        prop_assert!(v.is_ppt && s.is_ppt(&tol()).unwrap().is_ppt);
        let f = factorize_2xn(&s, &tol()).unwrap();
        prop_assert!(f.canonical_y().max_abs_diff(&s.partial_transpose_a()) < 1e-8);
    }

    #[test]
    fn sppt_verdicts_never_contradict_ppt(seed: u64, n in 1usize..=4) {
        let s = random_ginibre_state(2, n, seed, &tol()).unwrap();
        let v = is_sppt(&s, &tol()).unwrap();
        prop_assert!(v.consistent());
    }

    #[test]
    fn cq_states_are_sppt_with_predicted_s(seed: u64, n in 1usize..=6) {
        let spec = random_cq_spec(2, n, seed);
        let s = sppt_core::families::build_cq_state(&spec, &tol()).unwrap();
        let v = is_sppt(&s, &tol()).unwrap();
        prop_assert!(v.is_sppt, "{:?}", v);
        let f = factorize_2xn(&s, &tol()).unwrap();
        prop_assert!(f.normality_residual <= 1e-8);
        prop_assert!(f.s.max_abs_diff(&predicted_s(&spec, &tol()).unwrap()) < 1e-7);
    }

    #[test]
    fn cq_states_pass_detection_and_commutator(seed: u64, m in 2usize..=3, n in 1usize..=4) {
        let s = random_cq(m, n, seed, &tol()).unwrap();
        let v = cq_detect(&s, &tol()).unwrap();
        prop_assert!(v.is_cq, "{:?}", v);
        prop_assert!(commutator_criterion(&s) <= tol().eps_residual);
    }

    #[test]
    fn generic_states_are_not_cq(seed: u64, m in 2usize..=3, n in 2usize..=4) {
        let s = random_ginibre_state(m, n, seed, &tol()).unwrap();
        prop_assert!(!cq_detect(&s, &tol()).unwrap().is_cq);
    }

    #[test]
    fn s12_commutator_identity(seed: u64, n in 1usize..=4) {
        let spec = random_cq_spec(3, n, seed);
        let s = sppt_core::families::build_cq_state(&spec, &tol()).unwrap();
        let f = factorize_3xn(&s, &tol()).unwrap();
        let g = s12_generators(&spec, &tol()).unwrap();
        prop_assert!(g.s12().max_abs_diff(&f.s12) < 1e-7);
        let lhs = f.s12.commutator(&f.s12.dagger()).unwrap();
        prop_assert!(lhs.max_abs_diff(&g.predicted_commutator()) < 1e-7);
    }

    #[test]
    fn xstate_predicates_match_pipeline(
        a in proptest::array::uniform4(0.0f64..1.0),
        c in proptest::array::uniform4(-0.5f64..0.5),
        tie in 0u8..3,
    ) {
        let t: f64 = a.iter().sum();
        let mut p = XStateParams {
            a11: a[0] / t, a22: a[1] / t, b11: a[2] / t, b22: a[3] / t,
            a12: c64(c[0], c[1]) * 0.5, b12: c64(c[2], c[3]) * 0.5,
        };
        if tie == 0 {
            p.b12 = c64(0.0, p.a12.norm());
        }
        let positive = xstate_is_positive(&p).unwrap();
        let built = xstate(&p, &tol());
        prop_assert_eq!(positive, built.is_ok());
        if let Ok(s) = built {
            prop_assert_eq!(xstate_is_ppt(&p).unwrap(), s.is_ppt(&tol()).unwrap().is_ppt);
            prop_assert_eq!(xstate_is_sppt(&p).unwrap(), is_sppt(&s, &tol()).unwrap().is_sppt);
        }
    }

    #[test]
    fn generators_are_reproducible(seed: u64) {
        prop_assert_eq!(random_ginibre_density(3, seed), random_ginibre_density(3, seed));
        prop_assert_eq!(random_cq(3, 2, seed, &tol()).unwrap(), random_cq(3, 2, seed, &tol()).unwrap());
        prop_assert_eq!(random_sppt(2, seed, &tol()).unwrap(), random_sppt(2, seed, &tol()).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn cq_states_have_zero_discord(seed: u64, m in 2usize..=3, n in 1usize..=3) {
        let s = random_cq(m, n, seed, &tol()).unwrap();
        let d = discord_a(&s, &OptimizerConfig::default(), &tol()).unwrap();
        prop_assert!(d.discord <= tol().eps_opt, "{}", d.discord);
    }

    #[test]
    fn pure_state_discord_is_entanglement_entropy(seed: u64, n in 2usize..=4) {
        let s = random_pure(2, n, seed, &tol()).unwrap();
        let d = discord_a(&s, &small_opt(), &tol()).unwrap();
        let e = von_neumann_entropy(&s.partial_trace_b(), &tol()).unwrap();
        prop_assert!((d.discord - e).abs() <= tol().eps_opt, "{} vs {}", d.discord, e);
    }

    #[test]
    fn discord_is_local_unitary_invariant(seed: u64, n in 2usize..=3) {
        let s = random_ginibre_state(2, n, seed, &tol()).unwrap();
        let u = random_unitary(2, seed ^ 0xa);
        let v = random_unitary(n, seed ^ 0xb);
        let rotated = BipartiteState::validate(s.local_unitary(&u, &v).hermitian_part(), 2, n, &tol()).unwrap();
        let d0 = discord_a(&s, &OptimizerConfig::default(), &tol()).unwrap().discord;
        let d1 = discord_a(&rotated, &OptimizerConfig::default(), &tol()).unwrap().discord;
        prop_assert!((d0 - d1).abs() <= 2.0 * tol().eps_opt, "{} vs {}", d0, d1);
    }

    #[test]
    fn refinement_never_loses_value(seed: u64, m in 2usize..=3, n in 1usize..=3) {
        let s = random_ginibre_state(m, n, seed, &tol()).unwrap();
        let c = classical_correlation_a(&s, &small_opt(), &tol()).unwrap();
        prop_assert!(c.value >= c.coarse_value);
    }
}
