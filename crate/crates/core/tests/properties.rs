mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use common::{frobenius, random_density, random_state, rng};
use lossqfi_core::channel::{drho_dphi, evolve, evolve_pure, loss_reparametrize, LossCoordinate};
use lossqfi_core::estimation::{
    classical_fisher_of_density, optimal_measurement, photon_counting, qfi_of_state, qfi_routes, sld,
};
use lossqfi_core::fock::{hermitian_eig, CMatrix};
use lossqfi_core::text::{fmt_sig12, parse_real};
use lossqfi_core::{build_probe, fidelity, CatParity, CutoffPolicy, LossParameter, ProbeSpec, C64};
use proptest::prelude::*;

fn phi_strategy() -> impl Strategy<Value = f64> {
    0.02..FRAC_PI_2 - 0.02
}

fn coeff_strategy(max_dim: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..=max_dim)
        .prop_map(|v| v.into_iter().map(|(a, b)| C64::new(a, b)).collect())
        .prop_filter("non-zero", |v: &Vec<C64>| v.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-3)
}

fn spec_strategy() -> impl Strategy<Value = ProbeSpec> {
    let c = || (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| C64::new(a, b));
    prop_oneof![
        (0usize..12).prop_map(|n| ProbeSpec::Fock { n }),
        (0.0..FRAC_PI_2, -PI..PI).prop_map(|(theta, varphi)| ProbeSpec::Qubit { theta, varphi }),
        (0.0..1.0f64, 0.0..FRAC_PI_2, -PI..PI, -PI..PI)
            .prop_map(|(nbar, beta, mu, nu)| ProbeSpec::Qutrit { nbar, beta, mu, nu }),
        coeff_strategy(6).prop_map(|coefficients| ProbeSpec::Superposition { coefficients }),
        c().prop_map(|alpha| ProbeSpec::Coherent { alpha }),
        (0.1..2.0f64, any::<bool>()).prop_map(|(alpha, even)| ProbeSpec::Cat {
            alpha,
            parity: if even { CatParity::Even } else { CatParity::Odd },
        }),
        (c(), -1.2..1.2f64, -PI..PI).prop_map(|(eta, r, theta_rel)| ProbeSpec::Gaussian { eta, r, theta_rel }),
        (0.05..2.0f64, -1.0..1.0f64).prop_map(|(eta, r)| ProbeSpec::PhotonSubtracted { eta, r }),
        (0.05..2.0f64, -1.0..1.0f64, 1usize..6)
            .prop_map(|(eta, r, levels)| ProbeSpec::TruncatedSubtracted { eta, r, levels }),
    ]
}

fn lp(phi: f64) -> LossParameter {
    LossParameter::new(phi).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn built_probes_are_normalized(spec in spec_strategy()) {
        let psi = build_probe(&spec, &CutoffPolicy::default()).unwrap();
        let norm: f64 = psi.amplitudes().iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn probe_text_round_trips(spec in spec_strategy()) {
        let back: ProbeSpec = spec.to_string().parse().unwrap();
        prop_assert_eq!(back, spec);
    }

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), dim in 1usize..=64) {
        let mut g = rng(seed);
        let a = CMatrix::from_fn(dim, dim, |_, _| {
            let v = random_state(&mut g, 1).amplitude(0);
            v * 3.0
        });
        let m = (&a + a.adjoint()) * C64::new(0.5, 0.0);
        let s = hermitian_eig(&m).unwrap();
        let scale = frobenius(&m).max(1e-300);
        prop_assert!(frobenius(&(s.reconstruct() - &m)) <= 1e-10 * scale);
        let gram = s.vectors.adjoint() * &s.vectors;
        prop_assert!(frobenius(&(gram - CMatrix::identity(dim, dim))) <= 1e-10);
        prop_assert!(s.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(seed in any::<u64>(), dim in 1usize..12) {
        let mut g = rng(seed);
        let a = random_density(&mut g, dim, 2);
        let b = random_state(&mut g, dim);
        let f1 = fidelity(&a, &b);
        let f2 = fidelity(&b, &a);
        prop_assert!((f1 - f2).abs() < 1e-10);
        prop_assert!((-1e-12..=1.0 + 1e-10).contains(&f1));
        prop_assert!((fidelity(&b, &b) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn evolution_preserves_trace_and_positivity(seed in any::<u64>(), dim in 1usize..=64, phi in 1e-3..FRAC_PI_2 - 1e-3) {
        let mut g = rng(seed);
        let out = evolve(&random_density(&mut g, dim, 3), &lp(phi));
        prop_assert!((out.trace() - 1.0).abs() <= 1e-10);
        prop_assert!(*out.spectrum().values.last().unwrap() >= -1e-10);
    }

    #[test]
    fn qfi_within_ultimate_bound(c in coeff_strategy(8), phi in phi_strategy()) {
        let psi = lossqfi_core::FockVector::new(c).unwrap();
        let h = qfi_of_state(&psi, &lp(phi)).unwrap();
        prop_assert!(h >= -1e-12);
        prop_assert!(h <= 4.0 * psi.mean_photon() * (1.0 + 1e-6) + 1e-12);
    }

    #[test]
    fn qfi_routes_agree(c in coeff_strategy(8), phi in phi_strategy()) {
        let psi = lossqfi_core::FockVector::new(c).unwrap();
        let (a, b) = qfi_routes(&psi.density(), &lp(phi)).unwrap();
        prop_assert!((a - b).abs() <= 1e-8 * a.max(1e-6));
    }

    #[test]
    fn sld_solves_its_defining_equation(seed in any::<u64>(), dim in 2usize..10, phi in phi_strategy()) {
        let mut g = rng(seed);
        let p = lp(phi);
        let rho = evolve(&random_density(&mut g, dim, dim), &p);
        let d = drho_dphi(&rho, &p);
        let l = sld(&rho, &d, &p).unwrap();
        let lm = l.matrix.matrix();
        let lhs = (rho.matrix() * lm + lm * rho.matrix()) * C64::new(0.5, 0.0);
        prop_assert!(frobenius(&(lhs - d.matrix())) <= 1e-8 * frobenius(d.matrix()).max(1e-12));
    }

    #[test]
    fn classical_fisher_bounded_by_qfi(c in coeff_strategy(6), phi in phi_strategy()) {
        let psi = lossqfi_core::FockVector::new(c).unwrap();
        let p = lp(phi);
        let h = qfi_of_state(&psi, &p).unwrap();
        let counting = classical_fisher_of_density(&photon_counting(psi.cutoff()), &psi.density(), &p).unwrap();
        prop_assert!(counting.value <= h * (1.0 + 1e-8) + 1e-10);

        let rho = evolve_pure(&psi, &p);
        let l = sld(&rho, &drho_dphi(&rho, &p), &p).unwrap();
        let povm: Vec<CMatrix> = optimal_measurement(&l).iter().map(|e| e.matrix()).collect();
        let attained = classical_fisher_of_density(&povm, &psi.density(), &p).unwrap();
        prop_assert!(!attained.unbounded);
        prop_assert!((attained.value - h).abs() <= 1e-6 * h.max(1e-9));
    }

    #[test]
    fn sig12_round_trips(x in prop::num::f64::NORMAL) {
        let back = parse_real(&fmt_sig12(x)).unwrap();
        prop_assert!((back - x).abs() <= 1e-11 * x.abs());
    }

    #[test]
    fn reparametrization_round_trips(phi in 1e-3..FRAC_PI_2 - 1e-3) {
        use LossCoordinate::*;
        for c in [GammaT, Z, Transmissivity] {
            let v = loss_reparametrize(phi, Phi, c).unwrap();
            let back = loss_reparametrize(v, c, Phi).unwrap();
            prop_assert!((back - phi).abs() < 1e-9, "{c}: {back} vs {phi}");
        }
    }
}
