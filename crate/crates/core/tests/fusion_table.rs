mod common;

use common::{m, rng, small_grid};
use nalgebra::{DMatrix, Matrix2};
use rand::Rng;
use tqe::fusion::{
    build_resource, fidelity_vs_distinguishability, fuse_failure, fuse_type1, fuse_type2, photonic_mode,
    FusionKind, ResourceState,
};
use tqe::oracle::{apply_linear_unitary, mode_mixer, FockBasis, FockVector};
use tqe::temporal::{JointAmplitude, Symmetry, TimeGrid, C64};

fn random_jta(seed: u64, grid: TimeGrid, sym: Symmetry) -> JointAmplitude {
    let mut r = rng(seed);
    let n = grid.n_bins();
    let raw = DMatrix::from_fn(n, n, |_, _| C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)));
    let amp = &raw + raw.transpose() * C64::new(sym.sign(), 0.0);
    JointAmplitude::new(grid, (m("a"), m("b")), amp).unwrap().normalized().unwrap()
}

fn resource(sym: Symmetry, n: usize) -> ResourceState {
    build_resource(sym, &random_jta(7 + sym.m() as u64, small_grid(n), sym)).unwrap()
}

fn sign(e: u8) -> i8 {
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

#[test]
fn type1_signs_follow_the_table() {
    for sym in [Symmetry::Symmetric, Symmetry::Antisymmetric] {
        let r = resource(sym, 4);
        for j in 1..=2u8 {
            for bin in 0..4 {
                let o = fuse_type1(&r, j, bin).unwrap();
                assert_eq!(o.kind, FusionKind::TypeI);
                // |A0,B1,0⟩ + (−1)^j|A1,B0,1⟩ for m=0, opposite sign for m=1.
                assert_eq!(o.relative_phase, sign(sym.m() + j));
                assert!((o.output.concurrence() - 1.0).abs() < 1e-8);
                assert!(o.envelope_residual < 1e-12);
                let a = o.output.amplitude(&[0, 1, 0]).norm_sqr();
                let b = o.output.amplitude(&[1, 0, 1]).norm_sqr();
                assert!((a - 0.5).abs() < 1e-12 && (b - 0.5).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn type2_signs_follow_the_table() {
    for sym in [Symmetry::Symmetric, Symmetry::Antisymmetric] {
        let r = resource(sym, 3);
        let mut total = 0.0;
        for i in 1..=2u8 {
            for j in 1..=2u8 {
                for t in 0..3 {
                    for u in 0..3 {
                        let Ok(o) = fuse_type2(&r, i, j, (t, u)) else {
                            continue;
                        };
                        total += o.probability;
                        assert_eq!(o.relative_phase, sign(sym.m() + i + j), "m={} i={i} j={j}", sym.m());
                        assert!((o.output.concurrence() - 1.0).abs() < 1e-8);
                    }
                }
            }
        }
        assert!((total - 0.5).abs() < 1e-8, "{total}");
    }
}

#[test]
fn failure_selection_rules() {
    for sym in [Symmetry::Symmetric, Symmetry::Antisymmetric] {
        let r = resource(sym, 3);
        let mut total = 0.0;
        for k in 0..=1u8 {
            for (i, j) in [(1u8, 1u8), (1, 2), (2, 2)] {
                let allowed = sign(sym.m() + i + j) == 1;
                for t in 0..3 {
                    for u in 0..3 {
                        if i == j && u < t {
                            continue;
                        }
                        let o = fuse_failure(&r, k, i, j, (t, u)).unwrap();
                        total += o.probability;
                        if !allowed {
                            assert!(o.probability < 1e-30);
                            continue;
                        }
                        if o.probability == 0.0 {
                            continue;
                        }
                        // Product |A_k⟩|B_k⟩.
                        assert!((o.output.amplitude(&[k, k]).norm_sqr() - 1.0).abs() < 1e-12);
                        assert!(o.output.concurrence() < 1e-8);
                    }
                }
            }
        }
        assert!((total - 0.5).abs() < 1e-8, "{total}");
    }
}

#[test]
fn type1_success_probability_is_one_half() {
    let r = resource(Symmetry::Antisymmetric, 4);
    let total: f64 = (1..=2u8)
        .flat_map(|j| (0..4).map(move |b| (j, b)))
        .filter_map(|(j, b)| fuse_type1(&r, j, b).ok())
        .map(|o| o.probability)
        .sum();
    assert!((total - 0.5).abs() < 1e-8);
}

#[test]
fn outputs_do_not_depend_on_click_times() {
    let r = resource(Symmetry::Symmetric, 4);
    let a = fuse_type2(&r, 1, 2, (0, 3)).unwrap();
    let b = fuse_type2(&r, 1, 2, (2, 1)).unwrap();
    assert!((a.output.fidelity(&b.output) - 1.0).abs() < 1e-9);
    let a = fuse_type1(&r, 2, 0).unwrap();
    let b = fuse_type1(&r, 2, 3).unwrap();
    assert!((a.output.fidelity(&b.output) - 1.0).abs() < 1e-9);
}

#[test]
fn type1_envelope_is_the_conditional_jta_row() {
    let r = resource(Symmetry::Antisymmetric, 4);
    let o = fuse_type1(&r, 1, 2).unwrap();
    let env = o.envelope.unwrap();
    let row: Vec<C64> = r.jta().amp().row(2).iter().copied().collect();
    let norm: f64 = row.iter().map(|x| x.norm_sqr()).sum::<f64>() * env.grid().dt();
    let ov: C64 = row.iter().zip(env.amp()).map(|(x, y)| x.conj() * y).sum::<C64>() * env.grid().dt();
    assert!((ov.norm_sqr() / norm - 1.0).abs() < 1e-10);
}

#[test]
fn distinguishable_input_loses_fidelity_without_the_eraser() {
    let grid = small_grid(5);
    let s = random_jta(3, grid, Symmetry::Symmetric);
    let a = random_jta(4, grid, Symmetry::Antisymmetric);
    // weight_sym = 0.75.
    let amp = s.amp() * C64::new(0.75f64.sqrt(), 0.0) + a.amp() * C64::new(0.25f64.sqrt(), 0.0);
    let raw = JointAmplitude::new(grid, (m("a"), m("b")), amp).unwrap();
    let plain = fidelity_vs_distinguishability(&raw, false).unwrap();
    assert!((plain.weight_sym - 0.75).abs() < 1e-12);
    assert!((plain.fidelity - 0.75).abs() < 1e-8);
    assert!((plain.concurrence - 0.5).abs() < 1e-8);
    let erased = fidelity_vs_distinguishability(&raw, true).unwrap();
    assert_eq!(erased.heralds.len(), 2);
    for h in &erased.heralds {
        assert!((h.fidelity - 1.0).abs() < 1e-8);
        assert!((h.concurrence - 1.0).abs() < 1e-8);
    }

    let half = s.amp() * C64::new(0.5f64.sqrt(), 0.0) + a.amp() * C64::new(0.5f64.sqrt(), 0.0);
    let raw = JointAmplitude::new(grid, (m("a"), m("b")), half).unwrap();
    assert!(fidelity_vs_distinguishability(&raw, false).unwrap().concurrence < 1e-8);
}

/// Oracle: each `(A_i, B_j)` branch as a Fock vector over the four photonic
/// modes, both beam splitters as site unitaries, click amplitudes read off
/// directly.
#[test]
fn two_bin_fusion_matches_fock_oracle() {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let u = Matrix2::new(h, -h, h, h);
    for sym in [Symmetry::Symmetric, Symmetry::Antisymmetric] {
        let r = resource(sym, 2);
        let modes = vec![
            photonic_mode('a', 0),
            photonic_mode('a', 1),
            photonic_mode('b', 0),
            photonic_mode('b', 1),
        ];
        let basis = FockBasis::new(modes, 2, 2).unwrap();
        let mut mixer = mode_mixer(&basis, &photonic_mode('a', 0), &photonic_mode('b', 0), &u).unwrap();
        mixer = mode_mixer(&basis, &photonic_mode('a', 1), &photonic_mode('b', 1), &u).unwrap() * mixer;
        let branches: Vec<((u8, u8), FockVector)> = r
            .branches()
            .iter()
            .map(|(k, s)| (*k, apply_linear_unitary(&FockVector::from_two_photon(&basis, s).unwrap(), &mixer).unwrap()))
            .collect();
        // In-place relabeling: a_k sites carry d_k^1, b_k sites d_k^2.
        let site = |k: u8, j: u8, bin: usize| {
            let mode = if j == 1 { photonic_mode('a', k) } else { photonic_mode('b', k) };
            basis.site(&mode, bin).unwrap()
        };
        let amplitude = |clicks: [(u8, u8, usize); 2]| -> Vec<C64> {
            let mut occ = vec![0u8; basis.n_sites()];
            for (k, j, b) in clicks {
                occ[site(k, j, b)] += 1;
            }
            let mut out = vec![C64::new(0.0, 0.0); 4];
            for ((ia, ib), v) in &branches {
                out[(*ia as usize) * 2 + *ib as usize] += v.amplitude(&occ);
            }
            out
        };
        let compare = |oracle: Vec<C64>, probability: f64, amplitudes: &[C64]| {
            let p: f64 = oracle.iter().map(|x| x.norm_sqr()).sum();
            assert!((p - probability).abs() < 1e-9, "{p} {probability}");
            if p > 1e-20 {
                let ov: C64 = oracle.iter().zip(amplitudes).map(|(x, y)| x.conj() * y).sum();
                assert!((ov.norm_sqr() / p - 1.0).abs() < 1e-9);
            }
        };
        for i in 1..=2u8 {
            for j in 1..=2u8 {
                for t in 0..2 {
                    for s in 0..2 {
                        match fuse_type2(&r, i, j, (t, s)) {
                            Ok(o) => compare(amplitude([(0, i, t), (1, j, s)]), o.probability, &o.output.amplitudes),
                            Err(_) => compare(amplitude([(0, i, t), (1, j, s)]), 0.0, &[]),
                        }
                        for k in 0..=1u8 {
                            if i == j && s < t {
                                continue;
                            }
                            let o = fuse_failure(&r, k, i, j, (t, s)).unwrap();
                            compare(amplitude([(k, i, t), (k, j, s)]), o.probability, &o.output.amplitudes);
                        }
                    }
                }
            }
        }
    }
}
