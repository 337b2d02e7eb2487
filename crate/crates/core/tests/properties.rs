use std::f64::consts::SQRT_2;

use proptest::prelude::*;

use nh_entangle::analytic::{
    amplitudes, concurrence, entangling_time_2q, no_jump_state, success_probability_2q,
    success_probability_3q, w_time_3q, InitialState,
};
use nh_entangle::model::{
    analytic_eigensystem, match_by_energy, numeric_eigensystem, ModelParams, NhModel, System,
};
use nh_entangle::numerics::{integrate_nojump, IntegratorOptions};
use nh_entangle::quantum::{
    outer, partial_trace, wootters_concurrence, DensityMatrix, OperatorMatrix, PureState, C64,
};

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn state(n: usize) -> impl Strategy<Value = PureState> {
    proptest::collection::vec(complex(), 1 << n)
        .prop_filter("non-zero", |v| {
            v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3
        })
        .prop_map(|v| PureState::from_amps(v).unwrap().normalized().unwrap())
}

/// Convex mixture of a few random pure states.
fn mixed(n: usize) -> impl Strategy<Value = DensityMatrix> {
    proptest::collection::vec((state(n), 0.01..1.0f64), 1..4).prop_map(move |parts| {
        let total: f64 = parts.iter().map(|(_, w)| w).sum();
        let mut m = OperatorMatrix::zeros(1 << n);
        for (s, w) in &parts {
            m = m.add(&outer(s).scale(C64::from(w / total))).unwrap();
        }
        DensityMatrix::new(m).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn wootters_of_single_excitation_state(a in complex(), b in complex()) {
        prop_assume!(a.norm_sqr() + b.norm_sqr() > 1e-3);
        let s = PureState::superposition(&[(a, "10"), (b, "01")]).unwrap().normalized().unwrap();
        let (a, b) = (s.amp("10").unwrap(), s.amp("01").unwrap());
        let c = wootters_concurrence(&DensityMatrix::new(outer(&s)).unwrap()).unwrap();
        prop_assert!((c - 2.0 * (a * b).norm()).abs() < 1e-10);
    }
}

proptest! {
    #[test]
    fn partial_trace_preserves_trace(rho in mixed(3), keep in prop::sample::subsequence(vec![1usize, 2, 3], 1..3)) {
        let reduced = partial_trace(&rho, &keep).unwrap();
        prop_assert!((reduced.trace() - 1.0).norm() < 1e-12);
        prop_assert!(reduced.eigenvalues()[0] > -1e-12);
    }

    #[test]
    fn concurrence_is_bounded(rho in mixed(2)) {
        let c = wootters_concurrence(&rho).unwrap();
        prop_assert!((0.0..=1.0).contains(&c));
    }

    #[test]
    fn closed_form_concurrence_bounded(r in 0.0..5.0f64, t in 0.0..10.0f64, three in any::<bool>()) {
        let system = if three { System::ThreeQubit } else { System::TwoQubit };
        let p = ModelParams::from_ratio(1.0, r).unwrap();
        let e = concurrence(system, p, t, InitialState::NhExcited).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&e));
        let amp = amplitudes(system, p, t, InitialState::NhExcited).unwrap();
        prop_assert!(amp.norm_sq_unnormalized <= 1.0 + 1e-12);
    }

    #[test]
    fn success_probability_in_unit_interval(r in 0.0..20.0f64) {
        let p = ModelParams::from_ratio(1.0, r).unwrap();
        for prob in [success_probability_2q(p), success_probability_3q(p)] {
            prop_assert!(prob > 0.0 && prob <= 1.0 + 1e-12);
        }
    }
}

/// Closed-form no-jump states against the propagated Schrödinger equation
/// on both sides of each exceptional point.
#[test]
fn closed_forms_match_propagation() {
    let ts: Vec<f64> = (0..200).map(|k| 10.0 * k as f64 / 199.0).collect();
    let cases = [
        (
            System::TwoQubit,
            InitialState::NhExcited,
            [0.0, 0.3, 0.7, 0.999, 1.0, 1.001, 1.5, 2.0, 3.0],
        ),
        (
            System::TwoQubit,
            InitialState::HermitianExcited,
            [0.0, 0.3, 0.7, 0.999, 1.0, 1.001, 1.5, 2.0, 3.0],
        ),
        (
            System::ThreeQubit,
            InitialState::NhExcited,
            [0.0, 0.3, 0.7, 1.413, SQRT_2, 1.415, 1.5, 2.0, 3.0],
        ),
    ];
    for (system, initial, ratios) in cases {
        for r in ratios {
            let p = ModelParams::from_ratio(1.0, r).unwrap();
            let model = NhModel::build(system, p);
            let psi0 = PureState::basis(initial.label(system).unwrap()).unwrap();
            let states =
                integrate_nojump(&model, &psi0, &ts, IntegratorOptions::precise()).unwrap();
            for (&t, psi) in ts.iter().zip(&states) {
                let closed = no_jump_state(system, p, t, initial).unwrap();
                let err = closed
                    .amps()
                    .iter()
                    .zip(psi.amps())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                assert!(err < 1e-8, "{system} {initial} R={r} t={t}: {err:e}");
            }
        }
    }
}

#[test]
fn eigensystems_agree() {
    for system in [System::TwoQubit, System::ThreeQubit] {
        for k in 0..=30 {
            let r = 0.1 * k as f64;
            if (r - system.threshold()).abs() < 1e-3 {
                continue;
            }
            let model = NhModel::build(system, ModelParams::from_ratio(1.0, r).unwrap());
            let reference = analytic_eigensystem(model.params, system).unwrap();
            let numeric = match_by_energy(&numeric_eigensystem(&model, 1).unwrap(), &reference);
            for (a, b) in reference.iter().zip(&numeric) {
                assert!((a.energy - b.energy).norm() < 1e-9, "{system} R={r}");
                assert!(b.residual(&model.hamiltonian).unwrap() < 1e-9);
                assert!(a.residual(&model.hamiltonian).unwrap() < 1e-9);
            }
        }
    }
}

#[test]
fn entangling_time_monotone_in_ratio() {
    let times: Vec<(f64, f64)> = (0..=100)
        .map(|k| {
            let p = ModelParams::from_ratio(1.0, 0.05 * k as f64).unwrap();
            (
                entangling_time_2q(p, InitialState::NhExcited)
                    .unwrap()
                    .t_rescaled,
                w_time_3q(p).t_rescaled,
            )
        })
        .collect();
    assert!(times.windows(2).all(|w| w[1].0 < w[0].0 && w[1].1 < w[0].1));
}
