use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scd_core::distill::{estimate_p, is_distillable, is_scd, Distillability, ScdVerdict};
use scd_core::hamiltonian::{
    build, closed_form_spectrum, interaction_part, local_part, state_energy_bounds_closed_form,
    state_energy_bounds_numeric, target_energy_bounds_analytic, EnergyRange, Family, Model, ModelSpec, TargetName,
};
use scd_core::range::{
    target_energy, target_energy_range, DressingMode, LocalUnitarySet, RangeOptions, SiteUnitary, UNITARY_TOL,
};
use scd_core::states::{bell_diagonal, bell_diagonal_weights, random_mixed, target_state, StateSampler, PSD_TOL};
use scd_core::tensor::{
    hermitian_eig, hermitian_eigenvalues, kron, partial_trace, partial_transpose, ComplexMatrix, C64,
};

fn hermitian_from(dim: usize, entries: &[(f64, f64)]) -> ComplexMatrix {
    let m = ComplexMatrix::from_fn(dim, |i, j| {
        let (re, im) = entries[i * dim + j];
        C64::new(re, im)
    });
    &(&m + &m.adjoint()) * 0.5
}

fn hermitian(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim * dim).prop_map(move |e| hermitian_from(dim, &e))
}

fn density(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim * dim).prop_map(move |e| {
        let a = ComplexMatrix::from_fn(dim, |i, j| C64::new(e[i * dim + j].0, e[i * dim + j].1));
        let p = &a * &a.adjoint();
        let tr = p.trace().re;
        p.scale_real(1.0 / tr)
    })
}

fn unit3() -> impl Strategy<Value = [f64; 3]> {
    (0.0..std::f64::consts::PI, 0.0..std::f64::consts::TAU)
        .prop_map(|(t, p)| [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()])
}

fn any_spec() -> impl Strategy<Value = ModelSpec> {
    let g = -3.0..3.0f64;
    prop_oneof![
        (-3.0..3.0f64, g.clone()).prop_map(|(a, g)| ModelSpec::transverse_xy(a, g)),
        (-3.0..3.0f64, g.clone()).prop_map(|(a, g)| ModelSpec::longitudinal_xy(a, g)),
        (-3.0..3.0f64, g.clone()).prop_map(|(d, g)| ModelSpec::xxz(d, g)),
        (0.0..std::f64::consts::TAU, g.clone()).prop_map(|(t, g)| ModelSpec::bilinear_biquadratic(t, g)),
        (-2.0..2.0f64, g.clone()).prop_map(|(a, g)| ModelSpec::ring_xy(3, a, g)),
        (2usize..4, unit3(), unit3(), 0.1..3.0f64).prop_map(|(d, a, b, g)| ModelSpec {
            g,
            ..ModelSpec::non_interacting(d, a, b)
        }),
        (2usize..4, unit3(), unit3(), unit3(), unit3(), g)
            .prop_map(|(d, n1, n2, a, b, g)| { ModelSpec::minimal_interaction(d, n1, n2, a, b, g) }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigen_reconstruction(h in prop_oneof![hermitian(4), hermitian(8), hermitian(9)]) {
        let s = hermitian_eig(&h).unwrap();
        prop_assert!(s.map(|x| x).max_abs_diff(&h) < 1e-10);
        prop_assert!(s.max_residual(&h) < 1e-10);
        let v = &s.eigenvectors;
        prop_assert!((v * &v.adjoint()).max_abs_diff(&ComplexMatrix::identity(h.dim())) < 1e-10);
        prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn partial_trace_of_product(a in hermitian(2), b in hermitian(3)) {
        let ab = kron(&a, &b);
        let left = partial_trace(&ab, &[0]).unwrap();
        prop_assert!(left.max_abs_diff(&a.scale(b.trace())) < 1e-12);
        let right = partial_trace(&ab, &[1]).unwrap();
        prop_assert!(right.max_abs_diff(&b.scale(a.trace())) < 1e-12);
    }

    #[test]
    fn partial_transpose_keeps_trace_and_hermiticity(rho in density(4), site in 0usize..2) {
        let rho = rho.with_subsystems(&[2, 2]).unwrap();
        let pt = partial_transpose(&rho, site).unwrap();
        prop_assert_eq!(pt.trace(), rho.trace());
        prop_assert!(pt.hermiticity_deviation() == rho.hermiticity_deviation());
    }

    #[test]
    fn build_is_interaction_plus_field(spec in any_spec()) {
        let h = build(&spec).unwrap();
        let parts = &interaction_part(&spec).unwrap() + &local_part(&spec).unwrap().scale_real(spec.g);
        prop_assert!(h.max_abs_diff(&parts) < 1e-14);
        prop_assert!(h.is_hermitian(1e-14));
    }

    #[test]
    fn hamiltonians_are_traceless(spec in any_spec()) {
        // The bilinear-biquadratic family carries the trace of its quadratic term.
        prop_assume!(spec.family != Family::BilinearBiquadratic);
        prop_assert!(build(&spec).unwrap().trace().norm() < 1e-12);
    }

    #[test]
    fn closed_forms_match_numerics(spec in any_spec()) {
        if let Some(closed) = closed_form_spectrum(&spec) {
            let numeric = hermitian_eigenvalues(&build(&spec).unwrap()).unwrap();
            for (a, b) in closed.iter().zip(&numeric) {
                prop_assert!((a - b).abs() < 1e-10, "{:?} vs {:?}", closed, numeric);
            }
            let r = state_energy_bounds_closed_form(&spec).unwrap();
            let n = state_energy_bounds_numeric(&spec).unwrap();
            prop_assert!((r.lo - n.lo).abs() < 1e-10 && (r.hi - n.hi).abs() < 1e-10);
        }
    }

    #[test]
    fn analytic_targets_fit_interaction_spectrum(spec in any_spec()) {
        for target in [TargetName::PsiMinus, TargetName::PhiD(2), TargetName::PhiD(3), TargetName::Ghz3] {
            if let Some(r) = target_energy_bounds_analytic(&spec, target) {
                let ev = hermitian_eigenvalues(&interaction_part(&spec).unwrap()).unwrap();
                prop_assert!(r.lo >= ev[0] - 1e-12 && r.hi <= ev[ev.len() - 1] + 1e-12);
            }
        }
    }

    #[test]
    fn bell_acceptance_matches_weights(c in prop::array::uniform3(-1.0..=1.0f64)) {
        let ok = bell_diagonal_weights(c[0], c[1], c[2]).iter().all(|&w| w >= 0.0);
        prop_assert_eq!(bell_diagonal(c[0], c[1], c[2]).is_ok(), ok);
    }

    #[test]
    fn local_fields_are_invisible_to_symmetric_targets(
        angles in prop::collection::vec(-3.2..3.2f64, 9),
        g in -3.0..3.0f64,
    ) {
        let sites = |n: usize| LocalUnitarySet {
            sites: (0..n).map(|k| SiteUnitary::Qubit([angles[3 * k], angles[3 * k + 1], angles[3 * k + 2]])).collect(),
        };
        let psi = target_state(TargetName::PsiMinus).unwrap();
        let a = target_energy(&Model::new(ModelSpec::transverse_xy(1.3, g)).unwrap(), &psi, &sites(2)).unwrap();
        let b = target_energy(&Model::new(ModelSpec::transverse_xy(1.3, 0.0)).unwrap(), &psi, &sites(2)).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
        let ghz = target_state(TargetName::Ghz3).unwrap();
        let a = target_energy(&Model::new(ModelSpec::ring_xy(3, 0.6, g)).unwrap(), &ghz, &sites(3)).unwrap();
        let b = target_energy(&Model::new(ModelSpec::ring_xy(3, 0.6, 0.0)).unwrap(), &ghz, &sites(3)).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
        prop_assert!(sites(3).unitarity_deviation() < UNITARY_TOL);
    }

    #[test]
    fn scd_implies_distillable(seed in any::<u64>(), rank in 1usize..=4, g in 0.0..3.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = Model::new(ModelSpec::transverse_xy(1.0, g)).unwrap();
        let rho = random_mixed(&[2, 2], rank, &mut rng).unwrap();
        if is_scd(&rho, &m, &EnergyRange::symmetric(1.0)).unwrap() == ScdVerdict::Scd {
            prop_assert_eq!(is_distillable(&rho).verdict, Distillability::Distillable);
        }
    }
}

#[test]
fn sampler_outputs_are_valid_states() {
    let samplers = [
        StateSampler::HaarPure { dims: vec![2, 2] },
        StateSampler::HaarPure { dims: vec![3, 3] },
        StateSampler::Induced {
            dims: vec![2, 2],
            rank: 3,
        },
        StateSampler::Induced {
            dims: vec![2, 3],
            rank: 6,
        },
        StateSampler::GhzClass,
        StateSampler::WClass,
        StateSampler::BellDiagonal,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for s in &samplers {
        for _ in 0..10_000 {
            let rho = s.sample(&mut rng);
            assert!((rho.trace() - 1.0).abs() < 1e-12, "{}", s.name());
            if !rho.is_pure() {
                assert!(rho.eigenvalues().unwrap()[0] >= -PSD_TOL, "{}", s.name());
            }
        }
    }
}

#[test]
fn sampling_is_seed_deterministic() {
    for s in [
        StateSampler::Induced {
            dims: vec![2, 2],
            rank: 2,
        },
        StateSampler::GhzClass,
        StateSampler::WClass,
    ] {
        let mut a = ChaCha8Rng::seed_from_u64(5);
        let mut b = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            assert_eq!(s.sample(&mut a), s.sample(&mut b));
        }
    }
}

#[test]
fn induced_rank_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for rank in 2..=4 {
        for _ in 0..10_000 {
            assert_eq!(
                random_mixed(&[2, 2], rank, &mut rng).unwrap().numerical_rank().unwrap(),
                rank
            );
        }
    }
}

#[test]
fn one_sided_dressing_matches_two_sided() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let psi = target_state(TargetName::PsiMinus).unwrap();
    let opts = RangeOptions {
        restarts: 8,
        ..RangeOptions::default()
    };
    let one = RangeOptions {
        mode: DressingMode::FirstSiteOnly,
        ..opts
    };
    for _ in 0..100 {
        let entries: Vec<(f64, f64)> = (0..16)
            .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let model = Model {
            spec: ModelSpec::default(),
            hamiltonian: hermitian_from(4, &entries).with_subsystems(&[2, 2]).unwrap(),
        };
        let a = target_energy_range(&model, &psi, &opts).unwrap();
        let b = target_energy_range(&model, &psi, &one).unwrap();
        assert!((a.range.lo - b.range.lo).abs() < 1e-8, "{:?} vs {:?}", a.range, b.range);
        assert!((a.range.hi - b.range.hi).abs() < 1e-8, "{:?} vs {:?}", a.range, b.range);
    }
}

#[test]
fn more_restarts_never_shrink_the_range() {
    let phi = target_state(TargetName::PhiD(3)).unwrap();
    let model = Model::new(ModelSpec::bilinear_biquadratic(0.9, 0.0)).unwrap();
    let few = target_energy_range(
        &model,
        &phi,
        &RangeOptions {
            restarts: 8,
            ..RangeOptions::default()
        },
    )
    .unwrap();
    let many = target_energy_range(
        &model,
        &phi,
        &RangeOptions {
            restarts: 64,
            ..RangeOptions::default()
        },
    )
    .unwrap();
    assert!(many.range.lo <= few.range.lo && many.range.hi >= few.range.hi);
}

#[test]
fn p_is_non_increasing_in_field() {
    let sampler = StateSampler::HaarPure { dims: vec![2, 2] };
    let range = EnergyRange::symmetric(1.0);
    let reports: Vec<_> = (0..=6)
        .map(|k| {
            let m = Model::new(ModelSpec::transverse_xy(1.0, 0.5 * k as f64)).unwrap();
            estimate_p(&sampler, &m, &range, 50_000, 31 + k).unwrap()
        })
        .collect();
    for w in reports.windows(2) {
        let sigma = (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt();
        assert!(w[1].estimate <= w[0].estimate + 2.0 * sigma);
    }
}

#[test]
fn non_interacting_models_have_no_scd_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let opts = RangeOptions::default();
    for sampler in [
        StateSampler::HaarPure { dims: vec![2, 2] },
        StateSampler::Induced {
            dims: vec![2, 2],
            rank: 3,
        },
    ] {
        let t: f64 = rng.random_range(-1.0..1.0);
        let spec = ModelSpec::non_interacting(2, [0.0, 0.6, 0.8], [t.cos(), 0.0, t.sin()]);
        let m = Model::new(spec).unwrap();
        let (range, _) = scd_core::range::target_range(&m, TargetName::PsiMinus, &opts).unwrap();
        assert_eq!(estimate_p(&sampler, &m, &range, 100_000, 4).unwrap().estimate, 0.0);
    }
}

#[test]
fn minimal_interaction_has_scd_states() {
    let opts = RangeOptions::default();
    for g in [0.1, 1.0, 10.0] {
        let spec =
            ModelSpec::minimal_interaction(2, [0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], g);
        let m = Model::new(spec).unwrap();
        let (range, _) = scd_core::range::target_range(&m, TargetName::PsiMinus, &opts).unwrap();
        let p = estimate_p(&StateSampler::HaarPure { dims: vec![2, 2] }, &m, &range, 20_000, 6).unwrap();
        assert!(p.estimate > 0.0);
    }
}

#[test]
fn bell_diagonal_states_satisfy_wcec_for_transverse_xy() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let sampler = StateSampler::BellDiagonal;
    for gamma in [0.5, 1.0, 2.0] {
        let m = Model::new(ModelSpec::transverse_xy(gamma, 2.0)).unwrap();
        let range = EnergyRange::symmetric(f64::max(1.0, gamma));
        for _ in 0..10_000 {
            let rho = sampler.sample(&mut rng);
            assert!(scd_core::distill::wcec_satisfied(&rho, &m, &range).unwrap());
        }
    }
}
