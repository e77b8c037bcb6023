mod common;

use common::*;
use tqe::oracle::{apply_pair_creation, condition_on_pattern, reduced_density, Constraint, FockBasis, FockVector};
use tqe::spdc::*;
use tqe::temporal::schmidt_analysis;

fn cross_state(phi: &tqe::temporal::JointAmplitude) -> FockVector {
    let n = phi.grid().n_bins();
    let basis = FockBasis::new([IDLER_A, SIGNAL_A, IDLER_B, SIGNAL_B].map(m).to_vec(), n, 4).unwrap();
    let ka = pair_kernel(&basis, phi);
    let kb = pair_kernel(&basis, &phi.clone().with_modes((m(IDLER_B), m(SIGNAL_B))).unwrap());
    let (v, lost) = apply_pair_creation(&FockVector::vacuum(&basis), &ka).unwrap();
    assert_eq!(lost, 0.0);
    let (v, _) = apply_pair_creation(&v, &kb).unwrap();
    mix(&v, IDLER_A, IDLER_B)
}

#[test]
fn cross_herald_matches_oracle_at_three_bins() {
    let mut r = rng(7);
    for _ in 0..4 {
        let phi = random_jta(&mut r, small_grid(3), (IDLER_A, SIGNAL_A));
        let v = cross_state(&phi);
        let purity = schmidt_analysis(&phi).purity;
        let heralds = tqe_herald_cross_for(&phi).unwrap();
        for h in &heralds {
            let pattern = match h.symmetry {
                Symmetry::Antisymmetric => vec![
                    Constraint::ModeTotal { mode: m(IDLER_A), count: 1 },
                    Constraint::ModeTotal { mode: m(IDLER_B), count: 1 },
                ],
                Symmetry::Symmetric => vec![Constraint::ModeTotal { mode: m(IDLER_A), count: 2 }],
            };
            let c = condition_on_pattern(&v, &pattern).unwrap();
            let p = match h.symmetry {
                Symmetry::Antisymmetric => c.probability,
                Symmetry::Symmetric => 2.0 * c.probability,
            };
            assert!((p - h.herald_prob).abs() < 1e-10, "{p} vs {}", h.herald_prob);
            let (kept, rho) = reduced_density(&c.state, &[m(SIGNAL_A), m(SIGNAL_B)]).unwrap();
            let ens = ensemble_density(&kept, &[SIGNAL_A, SIGNAL_B], 3, h.ensemble.components());
            assert!(max_diff(&rho, &ens) < 1e-9, "{}", max_diff(&rho, &ens));
        }
        assert!((heralds[1].herald_prob - 0.5 * (1.0 - purity)).abs() < 1e-12);
    }
}

fn source_kernels(phi: &tqe::temporal::JointAmplitude, basis: &FockBasis) -> (nalgebra::DMatrix<tqe::temporal::C64>, nalgebra::DMatrix<tqe::temporal::C64>) {
    let ka = pair_kernel(basis, phi);
    let kb = pair_kernel(basis, &phi.clone().with_modes((m(IDLER_B), m(SIGNAL_B))).unwrap());
    (ka, kb)
}

#[test]
fn double_pair_heralds_match_oracle_at_two_bins() {
    let mut r = rng(11);
    for _ in 0..4 {
        let phi = random_jta(&mut r, small_grid(2), (IDLER_A, SIGNAL_A));
        let basis = FockBasis::new([IDLER_A, SIGNAL_A, IDLER_B, SIGNAL_B].map(m).to_vec(), 2, 4).unwrap();
        let (ka, kb) = source_kernels(&phi, &basis);
        let vac = FockVector::vacuum(&basis);
        let aa = apply_pair_creation(&apply_pair_creation(&vac, &ka).unwrap().0, &ka).unwrap().0;
        let bb = apply_pair_creation(&apply_pair_creation(&vac, &kb).unwrap().0, &kb).unwrap().0;
        let v = mix(&aa.add(&bb).unwrap(), IDLER_A, IDLER_B);
        for h in tqe_herald_double_pair_for(&phi).unwrap() {
            let pattern = match h.symmetry {
                Symmetry::Antisymmetric => vec![
                    Constraint::ModeTotal { mode: m(IDLER_A), count: 1 },
                    Constraint::ModeTotal { mode: m(IDLER_B), count: 1 },
                ],
                Symmetry::Symmetric => vec![Constraint::ModeTotal { mode: m(IDLER_A), count: 2 }],
            };
            let c = condition_on_pattern(&v, &pattern).unwrap();
            let p = match h.symmetry {
                Symmetry::Antisymmetric => c.probability,
                Symmetry::Symmetric => 2.0 * c.probability,
            };
            assert!((p - h.herald_prob).abs() < 1e-10, "{p} vs {}", h.herald_prob);
            let (kept, rho) = reduced_density(&c.state, &[m(SIGNAL_A), m(SIGNAL_B)]).unwrap();
            let ens = ensemble_density(&kept, &[SIGNAL_A, SIGNAL_B], 2, h.ensemble.components());
            assert!(max_diff(&rho, &ens) < 1e-9, "{}", max_diff(&rho, &ens));
        }
    }
}

#[test]
fn herald_statistics_match_oracle_enumeration() {
    let mut r = rng(5);
    let phi = random_jta(&mut r, small_grid(2), (IDLER_A, SIGNAL_A));
    let basis = FockBasis::new([IDLER_A, SIGNAL_A, IDLER_B, SIGNAL_B].map(m).to_vec(), 2, 4).unwrap();
    let (ka, kb) = source_kernels(&phi, &basis);
    for p in [0.0, 0.01, 0.1, 0.3] {
        let k = (&ka + &kb) * tqe::temporal::C64::new(f64::sqrt(p), 0.0);
        let vac = FockVector::vacuum(&basis);
        let one = apply_pair_creation(&vac, &k).unwrap().0;
        let two = apply_pair_creation(&one, &k).unwrap().0.scaled(tqe::temporal::C64::new(0.5, 0.0));
        let v = vac.add(&one).unwrap().add(&two).unwrap();
        let prob = |pat: Vec<Constraint>| condition_on_pattern(&v, &pat).unwrap().probability;
        let cross = prob(vec![
            Constraint::ModeTotal { mode: m(SIGNAL_A), count: 1 },
            Constraint::ModeTotal { mode: m(SIGNAL_B), count: 1 },
        ]);
        let dp = prob(vec![Constraint::ModeTotal { mode: m(SIGNAL_A), count: 2 }])
            + prob(vec![Constraint::ModeTotal { mode: m(SIGNAL_B), count: 2 }]);
        let s = herald_statistics_for(&phi, p).unwrap();
        assert!((s.cross - cross).abs() < 1e-12, "{} vs {cross}", s.cross);
        assert!((s.double_pair - dp).abs() < 1e-12, "{} vs {dp}", s.double_pair);
        assert!((s.no_herald - (1.0 - cross - dp)).abs() < 1e-12);
    }
}

#[test]
fn combined_coincident_herald_still_antibunches() {
    // cross and double-pair channels both feed the coincident herald; the
    // two signal sectors add coherently but both exit the signal beam
    // splitter one photon per port.
    let mut r = rng(3);
    let phi = random_jta(&mut r, small_grid(2), (IDLER_A, SIGNAL_A));
    let basis = FockBasis::new([IDLER_A, SIGNAL_A, IDLER_B, SIGNAL_B].map(m).to_vec(), 2, 4).unwrap();
    let (ka, kb) = source_kernels(&phi, &basis);
    let k = &ka + &kb;
    let vac = FockVector::vacuum(&basis);
    let two = apply_pair_creation(&apply_pair_creation(&vac, &k).unwrap().0, &k).unwrap().0;
    let v = mix(&two, IDLER_A, IDLER_B);
    let c = condition_on_pattern(
        &v,
        &[
            Constraint::ModeTotal { mode: m(IDLER_A), count: 1 },
            Constraint::ModeTotal { mode: m(IDLER_B), count: 1 },
        ],
    )
    .unwrap();
    let out = mix(&c.state, SIGNAL_A, SIGNAL_B);
    let coinc = condition_on_pattern(
        &out,
        &[
            Constraint::ModeTotal { mode: m(SIGNAL_A), count: 1 },
            Constraint::ModeTotal { mode: m(SIGNAL_B), count: 1 },
        ],
    )
    .unwrap();
    assert!((coinc.probability - 1.0).abs() < 1e-12);
}
