mod common;

use common::{m, mix, random_jta, rng, small_grid};
use nalgebra::DMatrix;
use tqe::optics::{
    apply_beam_splitter, detect, hom_bunching, hom_coincidence, hom_coincidence_mixed, BeamSplitterConvention,
    MixedSinglePhoton, TwoPhotonState,
};
use tqe::oracle::{condition_on_pattern, Constraint, FockBasis, FockVector};
use tqe::spdc::{spdc_joint_amplitude, SpdcModel};
use tqe::temporal::{
    make_gaussian_pulse, overlap, reduced_purity_quadrature, schmidt_analysis, symmetry_decompose, JointAmplitude,
    Pulse, TimeGrid, C64,
};

fn grid200() -> TimeGrid {
    TimeGrid::new(-5.0, 5.0, 200).unwrap()
}

fn ab() -> (tqe::temporal::Mode, tqe::temporal::Mode) {
    (m("a"), m("b"))
}

#[test]
fn gaussian_pulse_examples() {
    let g = grid200();
    let f = make_gaussian_pulse(g, 0.0, 1.0).unwrap();
    assert!((f.norm_sqr() - 1.0).abs() < 1e-10);
    assert!((overlap(&f, &f).unwrap() - 1.0).norm() < 1e-10);

    let wide = TimeGrid::new(-8.0, 11.0, 800).unwrap();
    let f = make_gaussian_pulse(wide, 0.0, 1.0).unwrap();
    let h = make_gaussian_pulse(wide, 3.0, 1.0).unwrap();
    // ∫ e^{-t²/4} e^{-(t-3)²/4} / √(2π) = e^{-9/8}.
    let o = overlap(&f, &h).unwrap();
    assert!((o.norm() - (-9.0f64 / 8.0).exp()).abs() < 1e-6);
    assert!(o.im.abs() < 1e-12);
}

#[test]
fn hermite_gauss_modes_are_orthogonal() {
    let g = grid200();
    let h0 = Pulse::from_fn(g, |t| C64::new((-t * t / 2.0).exp(), 0.0)).normalized().unwrap();
    let h1 = Pulse::from_fn(g, |t| C64::new(t * (-t * t / 2.0).exp(), 0.0)).normalized().unwrap();
    assert!(overlap(&h0, &h1).unwrap().norm() < 1e-8);
}

#[test]
fn symmetry_decompose_examples() {
    let g = grid200();
    let f = make_gaussian_pulse(g, -0.5, 1.0).unwrap();
    let h = make_gaussian_pulse(g, 0.7, 0.8).unwrap();

    let d = symmetry_decompose(&JointAmplitude::product(&f, &f, ab()).unwrap()).unwrap();
    assert!((d.weight_sym - 1.0).abs() < 1e-12 && d.weight_antisym < 1e-12);

    let h0 = Pulse::from_fn(g, |t| C64::new((-t * t / 2.0).exp(), 0.0)).normalized().unwrap();
    let h1 = Pulse::from_fn(g, |t| C64::new(t * (-t * t / 2.0).exp(), 0.0)).normalized().unwrap();
    let amp = (JointAmplitude::product(&h0, &h1, ab()).unwrap().into_amp()
        - JointAmplitude::product(&h1, &h0, ab()).unwrap().into_amp())
        * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let d = symmetry_decompose(&JointAmplitude::new(g, ab(), amp).unwrap()).unwrap();
    assert!((d.weight_antisym - 1.0).abs() < 1e-8);

    // ‖f⊗g + g⊗f‖²/4 = (1 + |c|²)/2.
    let c = overlap(&f, &h).unwrap().norm();
    let jta = JointAmplitude::product(&f, &h, ab()).unwrap();
    let d = symmetry_decompose(&jta).unwrap();
    assert!((d.weight_sym - (1.0 + c * c) / 2.0).abs() < 1e-10);
    let direct = (jta.amp() + jta.amp().transpose()).iter().map(|x| x.norm_sqr()).sum::<f64>()
        * g.dt()
        * g.dt()
        / 4.0;
    assert!((d.weight_sym - direct).abs() < 1e-12);
}

#[test]
fn schmidt_examples() {
    let g = grid200();
    let f = make_gaussian_pulse(g, -0.5, 1.0).unwrap();
    let h = make_gaussian_pulse(g, 0.7, 0.8).unwrap();
    let s = schmidt_analysis(&JointAmplitude::product(&f, &h, ab()).unwrap());
    assert!((s.purity - 1.0).abs() < 1e-10 && (s.schmidt_number - 1.0).abs() < 1e-10);

    let h0 = Pulse::from_fn(g, |t| C64::new((-t * t / 2.0).exp(), 0.0)).normalized().unwrap();
    let h1 = Pulse::from_fn(g, |t| C64::new(t * (-t * t / 2.0).exp(), 0.0)).normalized().unwrap();
    let amp = (JointAmplitude::product(&h0, &h0, ab()).unwrap().into_amp()
        + JointAmplitude::product(&h1, &h1, ab()).unwrap().into_amp())
        * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let s = schmidt_analysis(&JointAmplitude::new(g, ab(), amp).unwrap());
    assert!((s.purity - 0.5).abs() < 1e-8 && (s.schmidt_number - 2.0).abs() < 1e-7);

    // SVD route against Tr ρ² by direct quadrature of the reduced density.
    let g = TimeGrid::new(-6.0, 6.0, 160).unwrap();
    let phi = spdc_joint_amplitude(&SpdcModel::new(g, 1.2, 0.4, 0.0).unwrap()).unwrap();
    let s = schmidt_analysis(&phi);
    assert!((s.purity - reduced_purity_quadrature(&phi)).abs() < 1e-6);
}

#[test]
fn beam_splitter_sorts_by_symmetry() {
    let g = small_grid(4);
    let bs = BeamSplitterConvention::hadamard(ab(), (m("c"), m("d")));
    for (sign, same_mode) in [(1.0, true), (-1.0, false)] {
        let mut amp = DMatrix::zeros(4, 4);
        amp[(1, 3)] = C64::new(1.0, 0.0);
        amp[(3, 1)] = C64::new(sign, 0.0);
        let st = TwoPhotonState::from_jta(&JointAmplitude::new(g, ab(), amp).unwrap()).normalized().unwrap();
        let out = apply_beam_splitter(&st, &bs).unwrap();
        let cross = out.pair_weight(&m("c"), &m("d"));
        let same = out.pair_weight(&m("c"), &m("c")) + out.pair_weight(&m("d"), &m("d"));
        if same_mode {
            assert!(cross < 1e-20 && (same - 1.0).abs() < 1e-12);
            // c†c† − d†d†.
            let cc = out.term(&m("c"), &m("c")).unwrap();
            let dd = out.term(&m("d"), &m("d")).unwrap();
            assert!((cc.amp() + dd.amp()).iter().all(|x| x.norm() < 1e-12));
        } else {
            assert!(same < 1e-20 && (cross - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn beam_splitter_on_other_modes_is_a_noop() {
    let g = small_grid(3);
    let f = Pulse::new(g, vec![C64::new(0.3, 0.1), C64::new(0.8, 0.0), C64::new(0.2, -0.4)]).unwrap().normalized().unwrap();
    let st = TwoPhotonState::from_jta(&JointAmplitude::product(&f, &f, (m("a"), m("a"))).unwrap());
    let mut wide = TwoPhotonState::new(g, [m("a"), m("b"), m("c")]);
    for ((p, q), a) in st.terms() {
        wide.add_jta(&JointAmplitude::new(g, (p.clone(), q.clone()), a.clone()).unwrap()).unwrap();
    }
    let bs = BeamSplitterConvention::hadamard((m("b"), m("c")), (m("b"), m("c")));
    let out = apply_beam_splitter(&wide, &bs).unwrap();
    assert!((out.inner(&wide).unwrap().norm() - wide.norm_sqr()).abs() < 1e-12);
}

#[test]
fn hom_anchor_examples() {
    let g = TimeGrid::new(-30.0, 30.0, 600).unwrap();
    let f = make_gaussian_pulse(g, -0.4, 1.0).unwrap();
    let h = make_gaussian_pulse(g, 0.6, 1.3).unwrap();
    let jta = JointAmplitude::product(&f, &h, ab()).unwrap();
    let d = symmetry_decompose(&jta).unwrap();
    assert!(hom_coincidence(&d.sym.normalized().unwrap(), 0.0).unwrap().abs() < 1e-9);
    assert!((hom_coincidence(&d.antisym.normalized().unwrap(), 0.0).unwrap() - 1.0).abs() < 1e-9);
    assert!((hom_coincidence(&jta, 20.0).unwrap() - 0.5).abs() < 1e-3);
    let c = overlap(&f, &h).unwrap();
    assert!(c.im.abs() < 1e-12);
    assert!((hom_coincidence(&jta, 0.0).unwrap() - 0.5 * (1.0 - c.re * c.re)).abs() < 1e-10);
}

/// Separable input `f⊗g` on a 3-bin grid: coincidence after the
/// beam splitter read off the Fock register.
#[test]
fn separable_hom_matches_oracle() {
    let g = small_grid(3);
    let f = Pulse::new(g, vec![C64::new(0.5, 0.0), C64::new(0.7, 0.0), C64::new(0.2, 0.0)]).unwrap().normalized().unwrap();
    let h = Pulse::new(g, vec![C64::new(0.1, 0.0), C64::new(0.6, 0.0), C64::new(0.9, 0.0)]).unwrap().normalized().unwrap();
    let jta = JointAmplitude::product(&f, &h, ab()).unwrap();
    let basis = FockBasis::new(vec![m("a"), m("b")], 3, 2).unwrap();
    let v = mix(&FockVector::from_two_photon(&basis, &TwoPhotonState::from_jta(&jta)).unwrap(), "a", "b");
    let oracle = condition_on_pattern(
        &v,
        &[
            Constraint::ModeTotal { mode: m("a"), count: 1 },
            Constraint::ModeTotal { mode: m("b"), count: 1 },
        ],
    )
    .unwrap()
    .probability;
    let c = overlap(&f, &h).unwrap().re;
    assert!((oracle - 0.5 * (1.0 - c * c)).abs() < 1e-12);
    assert!((hom_coincidence(&jta, 0.0).unwrap() - oracle).abs() < 1e-12);
}

#[test]
fn mixed_hom_examples() {
    let g = grid200();
    let h0 = Pulse::from_fn(g, |t| C64::new((-t * t / 2.0).exp(), 0.0)).normalized().unwrap();
    let h1 = Pulse::from_fn(g, |t| C64::new(t * (-t * t / 2.0).exp(), 0.0)).normalized().unwrap();
    let p0 = MixedSinglePhoton::pure(&h0).unwrap();
    let p1 = MixedSinglePhoton::pure(&h1).unwrap();
    assert!(hom_coincidence_mixed(&p0, &p0).unwrap().abs() < 1e-10);
    assert!((hom_coincidence_mixed(&p0, &p1).unwrap() - 0.5).abs() < 1e-8);
    let mixed = MixedSinglePhoton::new(g, (p0.rho() + p1.rho()) * C64::new(0.5, 0.0)).unwrap();
    assert!((mixed.purity() - 0.5).abs() < 1e-8);
    assert!((hom_coincidence_mixed(&mixed, &mixed).unwrap() - 0.25).abs() < 1e-8);
}

#[test]
fn detect_examples() {
    let g = grid200();
    let f = make_gaussian_pulse(g, 0.3, 0.9).unwrap();
    let st = TwoPhotonState::from_jta(&JointAmplitude::product(&f, &f, ab()).unwrap());
    let k = 90;
    let d = detect(&st, &m("a"), k).unwrap();
    assert!((d.prob_density - f.amp()[k].norm_sqr()).abs() < 1e-12);
    let (mode, rest) = &d.remaining[0];
    assert_eq!(mode, &m("b"));
    assert!((overlap(rest, &f).unwrap().norm() - 1.0).abs() < 1e-10);

    // Antisymmetric h0∧h1 at a bin where both vanish to rounding.
    let g = TimeGrid::new(-20.0, 20.0, 400).unwrap();
    let h0 = Pulse::from_fn(g, |t| C64::new((-t * t / 2.0).exp(), 0.0)).normalized().unwrap();
    let h1 = Pulse::from_fn(g, |t| C64::new(t * (-t * t / 2.0).exp(), 0.0)).normalized().unwrap();
    let amp = (JointAmplitude::product(&h0, &h1, ab()).unwrap().into_amp()
        - JointAmplitude::product(&h1, &h0, ab()).unwrap().into_amp())
        * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let st = TwoPhotonState::from_jta(&JointAmplitude::new(g, ab(), amp).unwrap());
    assert!(detect(&st, &m("a"), 0).unwrap().prob_density < 1e-30);
}

#[test]
fn detection_density_integrates_to_the_photon_number() {
    let mut r = rng(11);
    for _ in 0..5 {
        let g = small_grid(5);
        let st = TwoPhotonState::from_jta(&random_jta(&mut r, g, ("a", "b")));
        let total: f64 = ["a", "b"]
            .iter()
            .flat_map(|md| (0..5).map(move |k| (*md, k)))
            .map(|(md, k)| detect(&st, &m(md), k).unwrap().prob_density * g.dt())
            .sum();
        assert!((total - 2.0).abs() < 1e-8);
    }
}

#[test]
fn bunching_complements_coincidence_over_delays() {
    let g = TimeGrid::new(-12.0, 12.0, 240).unwrap();
    let f = make_gaussian_pulse(g, 0.0, 1.0).unwrap();
    let h = make_gaussian_pulse(g, 0.5, 1.5).unwrap();
    let jta = JointAmplitude::product(&f, &h, ab()).unwrap();
    for tau in [-3.0, -1.0, 0.0, 0.4, 2.5] {
        let s = hom_coincidence(&jta, tau).unwrap() + hom_bunching(&jta, tau).unwrap();
        assert!((s - 1.0).abs() < 1e-8);
    }
}
