mod common;

use scatter_entangle_core::purity::{
    discretize, gram_purity, joint_grid, purity_adaptive, purity_from_matrix, purity_out, purity_out_joint, reflected_grid,
    transmitted_grid, EngineSettings,
};
use scatter_entangle_core::{AmplitudeModel, Complex64, GaussianInState, GridSpec, MassPartition, Mode, ModeWavefunction};

fn mp(mu1: f64) -> MassPartition {
    MassPartition::from_fraction(mu1, 1.0).unwrap()
}

fn settings() -> EngineSettings {
    EngineSettings::default()
}

#[test]
fn spectral_purity_matches_four_index_sum() {
    let f = |x: f64, y: f64| Complex64::from_polar((-(x * x + y * y + x * y)).exp(), x * y * y);
    let wam = discretize(&f, &GridSpec::rect(0.0, 4.0, 0.0, 4.0, 32).unwrap()).unwrap();
    let brute = common::four_index_purity(&common::resample(&f, &wam));
    let (p, spec) = purity_from_matrix(&wam).unwrap();
    assert!((p - brute).abs() < 1e-10, "{p} vs {brute}");
    assert!((gram_purity(&wam).unwrap() - p).abs() < 1e-12);
    assert!((spec.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!(spec.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn local_phases_do_not_change_purity() {
    let st = GaussianInState::new(1.0, 0.1, 0.2, mp(0.2)).unwrap();
    let model = AmplitudeModel::delta(1.0 / 0.16, mp(0.2)).unwrap();
    let out = ModeWavefunction::new(Mode::Out, st, Some(model)).unwrap();
    let grid = joint_grid(&st, &settings()).unwrap().with_n(96).unwrap();
    let base = gram_purity(&discretize(&out, &grid).unwrap()).unwrap();
    let phased = |x: f64, y: f64| {
        use scatter_entangle_core::wavefunction::BiMomentum;
        out.eval(x, y) * Complex64::from_polar(1.0, 3.0 * x.sin() + 40.0 * y * y)
    };
    let p = gram_purity(&discretize(&phased, &grid).unwrap()).unwrap();
    assert!((p - base).abs() < 1e-12);

    // displacing the particles only adds local phases
    let moved = GaussianInState::with_positions(1.0, 0.1, 0.2, -25.0, 40.0, mp(0.2)).unwrap();
    let hard = AmplitudeModel::hard_core(mp(0.2));
    let a = purity_out(&st, &hard, &settings()).unwrap().purity;
    let b = purity_out(&moved, &hard, &settings()).unwrap().purity;
    assert!((a - b).abs() < 1e-9, "{a} {b}");
}

#[test]
fn refinement_converges_monotonically() {
    let st = GaussianInState::new(1.0, 0.2, 0.1, mp(0.2)).unwrap();
    let model = AmplitudeModel::double_delta(1.0, 1.6 / 0.16, mp(0.2)).unwrap();
    let tra = ModeWavefunction::new(Mode::Transmitted, st, Some(model)).unwrap();
    let g = transmitted_grid(&st, &settings()).unwrap();
    let at = |n| gram_purity(&discretize(&tra, &g.with_n(n).unwrap()).unwrap()).unwrap();
    let reference = at(512);
    let errors: Vec<f64> = [32, 64, 128].iter().map(|&n| (at(n) - reference).abs()).collect();
    assert!(errors[0] >= errors[1] && errors[1] >= errors[2], "{errors:?}");
    assert!(errors[2] < 1e-8);
}

#[test]
fn scattering_conserves_norm() {
    let st = GaussianInState::new(1.0, 0.1, 0.2, mp(0.3)).unwrap();
    let models = [
        AmplitudeModel::hard_core(mp(0.3)),
        AmplitudeModel::delta(2.0, mp(0.3)).unwrap(),
        AmplitudeModel::double_delta(2.0, 4.0, mp(0.3)).unwrap(),
    ];
    for m in models {
        let rep = purity_out(&st, &m, &settings()).unwrap();
        assert!((rep.norm - 1.0).abs() < 1e-8, "{:?}: {}", m.kind(), rep.norm);
        assert!(rep.purity > 0.0 && rep.purity <= 1.0 + 1e-6);
        assert!(rep.converged);
        assert!(rep.out_of_convention_weight < 1e-12);
        let spec_purity: f64 = rep.schmidt_spectrum.iter().map(|s| s * s).sum();
        assert!((spec_purity - rep.purity).abs() < 1e-6);
    }
}

#[test]
fn reflected_in_state_matches_hard_core_out_state() {
    let st = GaussianInState::new(1.0, 0.1, 0.15, mp(0.35)).unwrap();
    let refl = ModeWavefunction::new(Mode::ReflectedIn, st, None).unwrap();
    let a = purity_adaptive(&refl, &reflected_grid(&st, &settings()).unwrap(), &settings()).unwrap();
    let b = purity_out(&st, &AmplitudeModel::hard_core(mp(0.35)), &settings()).unwrap();
    assert!((a.purity - b.purity).abs() < 1e-10);
}

#[test]
fn split_and_joint_evaluation_agree() {
    let st = GaussianInState::new(1.0, 0.2, 0.1, mp(0.2)).unwrap();
    let m = AmplitudeModel::delta(1.0 / 0.16, mp(0.2)).unwrap();
    let split = purity_out(&st, &m, &settings()).unwrap();
    let joint = purity_out_joint(&st, &m, &settings()).unwrap();
    assert!((split.purity - joint.purity).abs() < 1e-6);
    assert!(split.overlap_diagnostic.unwrap() < 1e-8);
    let tra = split.purity_tra.unwrap();
    let refl = split.purity_ref.unwrap();
    assert!(tra > 0.0 && refl > 0.0);
}

#[test]
fn weak_potential_leaves_state_pure() {
    let st = GaussianInState::new(1.0, 0.1, 0.2, mp(0.2)).unwrap();
    let m = AmplitudeModel::delta(1e-9, mp(0.2)).unwrap();
    let rep = purity_out(&st, &m, &settings()).unwrap();
    assert!((rep.purity - 1.0).abs() < 1e-6);
}

#[test]
fn narrow_packets_at_resonance_approach_unit_purity() {
    // separation 10 / (M alpha): the first resonance is wide
    let masses = MassPartition::from_masses(1.0, 4.0).unwrap();
    let model = AmplitudeModel::double_delta(1.0, 10.0 / masses.total(), masses).unwrap();
    let b = masses.reduced();
    let q = scatter_entangle_core::amplitudes::find_resonances(&model, 1e-3 * b, 2.0 * b, 1).unwrap()[0];
    let purities: Vec<f64> = [50.0, 200.0, 500.0]
        .iter()
        .map(|f| {
            let st = GaussianInState::new(q, q / f, q / f, masses).unwrap();
            purity_out(&st, &model, &settings()).unwrap().purity
        })
        .collect();
    assert!(purities.windows(2).all(|w| w[0] < w[1]), "{purities:?}");
    assert!((purities[1] - 1.0).abs() < 0.02, "{purities:?}");
    assert!((purities[2] - 1.0).abs() < 1e-3, "{purities:?}");
}
