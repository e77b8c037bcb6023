mod common;

use common::{m, mix, pair_kernel, random_jta, rng, small_grid};
use tqe::fusion::{build_resource, fidelity_vs_distinguishability};
use tqe::lambda::bins::BinModel;
use tqe::lambda::{
    cat_state_from_hom, extracted_density_matrix, extraction_norm, loss_sensitivity, mzi_tqe_herald,
    parity_given_times, CatState, ExtractionModel, HomOutcome, Parity,
};
use tqe::optics::{apply_beam_splitter, hom_coincidence_mixed, BeamSplitterConvention, TwoPhotonState};
use tqe::oracle::{
    apply_pair_creation, coherent_inject, condition_on_pattern, Constraint, FockBasis, FockVector,
};
use tqe::spdc::{
    herald_statistics, spdc_joint_amplitude, tqe_herald_cross, tqe_herald_double_pair, SpdcModel, IDLER_A, IDLER_B,
    SIGNAL_A, SIGNAL_B,
};
use tqe::temporal::{make_gaussian_pulse, schmidt_analysis, symmetry_decompose, Pulse, Symmetry, TimeGrid, C64};

fn gaussian_model(n: usize, nbar: f64) -> ExtractionModel {
    let g = TimeGrid::new(-5.0, 5.0, n).unwrap();
    ExtractionModel::new(make_gaussian_pulse(g, 0.0, 1.0).unwrap(), nbar).unwrap()
}

#[test]
fn coherent_injection_is_poissonian() {
    let basis = FockBasis::new(vec![m("a")], 1, 4).unwrap();
    let (v, _) = coherent_inject(&FockVector::vacuum(&basis), &[C64::new(0.3, 0.0)]).unwrap();
    let p = v.mode_count_distribution(&m("a")).unwrap();
    let mut poisson = (-0.09f64).exp();
    for (n, pn) in p.iter().enumerate() {
        assert!((pn - poisson).abs() < 1e-6, "n={n}");
        poisson *= 0.09 / (n + 1) as f64;
    }
    let (same, _) = coherent_inject(&FockVector::vacuum(&basis), &[C64::new(0.0, 0.0)]).unwrap();
    assert!((same.amplitude(&[0]) - 1.0).norm() < 1e-15);
}

#[test]
fn split_coherent_field_recombines() {
    let basis = FockBasis::new(vec![m("a"), m("b")], 1, 4).unwrap();
    let h = C64::new(0.5 * std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let (v, _) = coherent_inject(&FockVector::vacuum(&basis), &[h, h]).unwrap();
    let out = mix(&v, "a", "b");
    assert!(out.mean_count(&m("b")).unwrap() < 1e-12);
    assert!((out.mean_count(&m("a")).unwrap() - 0.25).abs() < 1e-4);
}

#[test]
fn oracle_beam_splitter_matches_optics() {
    let mut r = rng(5);
    let g = small_grid(3);
    let basis = FockBasis::new(vec![m("a"), m("b")], 3, 2).unwrap();
    for _ in 0..4 {
        let st = TwoPhotonState::from_jta(&random_jta(&mut r, g, ("a", "b")));
        let bs = BeamSplitterConvention::hadamard((m("a"), m("b")), (m("a"), m("b")));
        let analytic = FockVector::from_two_photon(&basis, &apply_beam_splitter(&st, &bs).unwrap()).unwrap();
        let oracle = mix(&FockVector::from_two_photon(&basis, &st).unwrap(), "a", "b");
        let d: f64 = analytic.amplitudes().iter().zip(oracle.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(d < 1e-9);
    }
}

#[test]
fn conditioning_above_cutoff_is_impossible() {
    let basis = FockBasis::new(vec![m("a"), m("b")], 2, 2).unwrap();
    let (v, _) = coherent_inject(&FockVector::vacuum(&basis), &[C64::new(0.05, 0.0); 4]).unwrap();
    assert_eq!(condition_on_pattern(&v, &[Constraint::Total(3)]).unwrap().probability, 0.0);
}

/// Two-source state at 3 bins, idlers mixed, conditioned on clicks in
/// definite bins; returns the signal amplitude matrix `M[j][k]` over
/// `(s_a at j, s_b at k)`.
fn conditional_signal(clicks: &[(&str, usize)]) -> Vec<Vec<C64>> {
    let n = 3;
    let g = small_grid(n);
    let phi = random_jta(&mut rng(9), g, (IDLER_A, SIGNAL_A));
    let basis = FockBasis::new([IDLER_A, SIGNAL_A, IDLER_B, SIGNAL_B].map(m).to_vec(), n, 4).unwrap();
    let ka = pair_kernel(&basis, &phi);
    let kb = pair_kernel(&basis, &phi.clone().with_modes((m(IDLER_B), m(SIGNAL_B))).unwrap());
    let (v, _) = apply_pair_creation(&FockVector::vacuum(&basis), &ka).unwrap();
    let (v, _) = apply_pair_creation(&v, &kb).unwrap();
    let v = mix(&v, IDLER_A, IDLER_B);
    let mut pattern: Vec<Constraint> = Vec::new();
    let mut per_site = std::collections::BTreeMap::new();
    for (md, bin) in clicks {
        *per_site.entry((md.to_string(), *bin)).or_insert(0u8) += 1;
    }
    for ((md, bin), count) in per_site {
        pattern.push(Constraint::Site { mode: m(&md), bin, count });
    }
    for md in [IDLER_A, IDLER_B] {
        let count = clicks.iter().filter(|(x, _)| *x == md).count() as u8;
        pattern.push(Constraint::ModeTotal { mode: m(md), count });
    }
    let c = condition_on_pattern(&v, &pattern).unwrap();
    assert!(c.probability > 0.0);
    let mut out = vec![vec![C64::new(0.0, 0.0); n]; n];
    for (occ, a) in basis.states().iter().zip(c.state.amplitudes()) {
        if a.norm() == 0.0 {
            continue;
        }
        let j = (0..n).find(|&j| occ[basis.site(&m(SIGNAL_A), j).unwrap()] == 1).unwrap();
        let k = (0..n).find(|&k| occ[basis.site(&m(SIGNAL_B), k).unwrap()] == 1).unwrap();
        out[j][k] += a;
    }
    out
}

#[test]
fn idler_coincidence_leaves_antisymmetric_signals() {
    let a = conditional_signal(&[(IDLER_A, 0), (IDLER_B, 2)]);
    for j in 0..3 {
        for k in 0..3 {
            assert!((a[j][k] + a[k][j]).norm() < 1e-10);
        }
    }
    let s = conditional_signal(&[(IDLER_A, 0), (IDLER_A, 2)]);
    for j in 0..3 {
        for k in 0..3 {
            assert!((s[j][k] - s[k][j]).norm() < 1e-10);
        }
    }
}

#[test]
fn spdc_model_examples() {
    let g = TimeGrid::new(-6.0, 6.0, 200).unwrap();
    let phi = spdc_joint_amplitude(&SpdcModel::new(g, 0.8, 0.8, 0.0).unwrap()).unwrap();
    assert!((schmidt_analysis(&phi).purity - 1.0).abs() < 1e-10);
    assert!((phi.amp() - phi.amp().transpose()).iter().all(|x| x.norm() < 1e-12));

    let model = SpdcModel::new(g, 1.5, 0.5, 0.0).unwrap();
    let k = schmidt_analysis(&spdc_joint_amplitude(&model).unwrap()).schmidt_number;
    assert!(k > 1.0);
    assert!((k - 1.0 / model.analytic_purity()).abs() < 1e-6);
}

#[test]
fn cross_herald_examples() {
    let g = TimeGrid::new(-6.0, 6.0, 160).unwrap();
    let heralds = tqe_herald_cross(&SpdcModel::new(g, 0.8, 0.8, 0.0).unwrap()).unwrap();
    assert_eq!(heralds.len(), 1);
    assert_eq!(heralds[0].symmetry, Symmetry::Symmetric);

    let model = SpdcModel::with_schmidt_number(g, 0.5, 2.0, 0.0).unwrap();
    let heralds = tqe_herald_cross(&model).unwrap();
    let anti = heralds.iter().find(|h| h.symmetry == Symmetry::Antisymmetric).unwrap();
    assert!((anti.herald_prob - 0.25).abs() < 1e-6);
    assert!((anti.ensemble.hom_coincidence().unwrap() - 1.0).abs() < 1e-9);
    let total: f64 = heralds.iter().map(|h| h.herald_prob).sum();
    assert!((total - 1.0).abs() < 1e-8);
}

#[test]
fn double_pair_examples() {
    let g = TimeGrid::new(-6.0, 6.0, 120).unwrap();
    let model = SpdcModel::with_schmidt_number(g, 0.6, 1.5, 0.0).unwrap();
    for h in tqe_herald_double_pair(&model).unwrap() {
        for (_, st) in h.ensemble.components() {
            assert!(st.pair_weight(&m(SIGNAL_A), &m(SIGNAL_B)) < 1e-20);
        }
        if h.symmetry == Symmetry::Symmetric {
            assert!(h.ensemble.hom_coincidence().unwrap().abs() < 1e-9);
        }
    }
}

#[test]
fn herald_statistics_examples() {
    let g = TimeGrid::new(-6.0, 6.0, 120).unwrap();
    let model = SpdcModel::with_schmidt_number(g, 0.6, 1.5, 0.0).unwrap();
    let s = herald_statistics(&model, 0.0).unwrap();
    assert_eq!(s.no_herald, 1.0);
    for p in [0.01, 0.1, 0.3] {
        let s = herald_statistics(&model, p).unwrap();
        assert!((s.cross + s.double_pair + s.no_herald - 1.0).abs() < 1e-10);
        assert!((s.cross_coincident + s.cross_coalescent - s.cross).abs() < 1e-12);
    }
}

#[test]
fn extraction_norm_examples() {
    assert_eq!(extraction_norm(&gaussian_model(100, 0.0)), 0.0);
    assert!((extraction_norm(&gaussian_model(100, 2.0)) - 0.864665).abs() < 1e-6);
    assert!((extraction_norm(&gaussian_model(100, 20.0)) - 1.0).abs() < 1e-8);
}

#[test]
fn extracted_photon_examples() {
    let rho = extracted_density_matrix(&gaussian_model(200, 1e-4)).unwrap();
    assert!(rho.purity() > 1.0 - 1e-4);

    let mut last = 0.0;
    for n in [0.5, 1.0, 2.0, 4.0, 8.0] {
        let rho = extracted_density_matrix(&gaussian_model(300, n)).unwrap();
        let r = hom_coincidence_mixed(&rho, &rho).unwrap();
        assert!(r > last, "n̄ = {n}");
        last = r;
    }
    let rho = extracted_density_matrix(&gaussian_model(600, 20.0)).unwrap();
    assert!((hom_coincidence_mixed(&rho, &rho).unwrap() - 0.25).abs() < 0.02);
}

#[test]
fn dark_port_herald_examples() {
    let model = gaussian_model(80, 6.0);
    for h in mzi_tqe_herald(&model).unwrap() {
        let target = if h.parity == Parity::Even { 0.0 } else { 1.0 };
        assert!((h.ensemble.hom_coincidence().unwrap() - target).abs() < 1e-9);
        let d = symmetry_decompose(&h.extracted_jta).unwrap();
        let w = if h.parity == Parity::Even { d.weight_sym } else { d.weight_antisym };
        assert!((w - 1.0).abs() < 1e-12);
    }
    for j in [0, 40, 79] {
        let (_, odd, b) = parity_given_times(&model, j, j).unwrap();
        assert_eq!((odd, b), (0.0, 0.0));
    }
}

#[test]
fn cat_examples() {
    let g = TimeGrid::new(0.0, 1.0, 2).unwrap();
    let env = Pulse::new(g, vec![C64::new(1.0, 0.0); 2]).unwrap();
    let model = gaussian_model(60, 3.0);
    let odd = cat_state_from_hom(&model, HomOutcome::Antibunch).unwrap();
    assert_eq!(odd.parity, Parity::Odd);
    let s = odd.samples.iter().max_by(|a, b| a.weight.total_cmp(&b.weight)).unwrap();
    let dist = odd.cat(s).unwrap().photon_number_distribution(30);
    assert!(dist.iter().step_by(2).sum::<f64>() < 1e-10);

    let vac = CatState::new(C64::new(0.0, 0.0), Parity::Even, env.clone()).unwrap();
    assert!((vac.photon_number_distribution(10)[0] - 1.0).abs() < 1e-15);

    for beta in [0.2, 0.7, 1.1, 1.6, 2.3] {
        let cat = CatState::new(C64::new(beta, 0.0), Parity::Even, env.clone()).unwrap();
        let b2: f64 = beta * beta;
        assert!((cat.mean_photon_number() - b2 * b2.tanh()).abs() < 1e-6);
    }
}

#[test]
fn loss_examples() {
    let model = gaussian_model(60, 4.0);
    let odd = mzi_tqe_herald(&model).unwrap().into_iter().find(|h| h.parity == Parity::Odd).unwrap();
    let blind = loss_sensitivity(&model, 0.0).unwrap();
    assert!((blind.p_declared_even - 1.0).abs() < 1e-12);
    assert!((blind.parity_error - odd.prob).abs() < 1e-12);
    assert!(loss_sensitivity(&model, 1.0).unwrap().parity_error.abs() < 1e-15);

    // Binomial thinning, continuum closed form against the bin-exact sum.
    let fine = gaussian_model(160, 4.0);
    let exact = BinModel::new(&fine).unwrap().parity_table(0.9).unwrap();
    let cont = loss_sensitivity(&fine, 0.9).unwrap();
    assert!((cont.parity_error - exact.parity_error).abs() < 5e-3);
}

#[test]
fn fusion_resource_examples() {
    let g = TimeGrid::new(-4.0, 4.0, 8).unwrap();
    let f = make_gaussian_pulse(g, 0.0, 1.0).unwrap();
    let sym = tqe::temporal::JointAmplitude::product(&f, &f, (m("a"), m("b"))).unwrap();
    let r = build_resource(Symmetry::Symmetric, &sym).unwrap();
    assert!((r.norm_sqr() - 1.0).abs() < 1e-10);
    assert!(build_resource(Symmetry::Antisymmetric, &sym).is_err());

    for tqe in [false, true] {
        let rep = fidelity_vs_distinguishability(&sym, tqe).unwrap();
        assert!((rep.fidelity - 1.0).abs() < 1e-8);
    }
}

/// Photons from different signal Schmidt modes of an impure source are
/// fully distinguishable: half symmetric, half antisymmetric.
#[test]
fn eraser_restores_fusion_fidelity_for_impure_spdc_pairs() {
    let g = TimeGrid::new(-4.0, 4.0, 14).unwrap();
    let model = SpdcModel::with_schmidt_number(g, 1.8, 1.5, 0.0).unwrap();
    let (_, _, signal) = tqe::temporal::schmidt_modes(&spdc_joint_amplitude(&model).unwrap(), 1e-12);
    let raw = tqe::temporal::JointAmplitude::product(&signal[0], &signal[1], (m("a"), m("b"))).unwrap();
    let plain = fidelity_vs_distinguishability(&raw, false).unwrap();
    assert!((plain.weight_sym - 0.5).abs() < 1e-10);
    assert!((plain.fidelity - 0.5).abs() < 1e-8);
    let erased = fidelity_vs_distinguishability(&raw, true).unwrap();
    for h in &erased.heralds {
        assert!((h.fidelity - 1.0).abs() < 1e-8);
    }
}
