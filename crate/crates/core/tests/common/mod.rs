#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::{DMatrix, Matrix2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tqe::optics::TwoPhotonState;
use tqe::oracle::{apply_linear_unitary, mode_mixer, FockBasis, FockVector, Occupation};
use tqe::temporal::{JointAmplitude, Mode, TimeGrid, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_grid(n: usize) -> TimeGrid {
    TimeGrid::new(0.0, n as f64, n).unwrap()
}

pub fn m(s: &str) -> Mode {
    Mode::new(s)
}

pub fn random_jta(rng: &mut ChaCha8Rng, grid: TimeGrid, modes: (&str, &str)) -> JointAmplitude {
    let n = grid.n_bins();
    let amp = DMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    JointAmplitude::new(grid, (m(modes.0), m(modes.1)), amp)
        .unwrap()
        .normalized()
        .unwrap()
}

pub fn hadamard() -> Matrix2<C64> {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Matrix2::new(h, h, h, -h)
}

/// Site-space kernel `K[(p,j),(q,k)] = A[j][k]·dt` of `∫A p†q†`.
pub fn pair_kernel(basis: &FockBasis, jta: &JointAmplitude) -> DMatrix<C64> {
    let s = basis.n_sites();
    let dt = jta.grid().dt();
    let (p, q) = jta.modes();
    let mut k = DMatrix::zeros(s, s);
    for j in 0..basis.n_bins() {
        for l in 0..basis.n_bins() {
            k[(basis.site(p, j).unwrap(), basis.site(q, l).unwrap())] += jta.amp()[(j, l)] * dt;
        }
    }
    k
}

pub fn mix(v: &FockVector, a: &str, b: &str) -> FockVector {
    let u = mode_mixer(v.basis(), &m(a), &m(b), &hadamard()).unwrap();
    apply_linear_unitary(v, &u).unwrap()
}

/// Density matrix of a weighted two-photon ensemble expressed on the
/// occupation patterns `kept` of `modes`.
pub fn ensemble_density(
    kept: &[Occupation],
    modes: &[&str],
    n_bins: usize,
    components: impl Iterator<Item = (f64, TwoPhotonState)>,
) -> DMatrix<C64> {
    let basis: Arc<FockBasis> = FockBasis::new(modes.iter().map(|s| m(s)).collect(), n_bins, 2).unwrap();
    let pos: HashMap<&Occupation, usize> = kept.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let mut rho = DMatrix::zeros(kept.len(), kept.len());
    for (w, st) in components {
        let v = FockVector::from_two_photon(&basis, &st).unwrap();
        let idx: Vec<(usize, C64)> = basis
            .states()
            .iter()
            .zip(v.amplitudes())
            .filter(|(_, a)| a.norm() > 0.0)
            .map(|(s, a)| (*pos.get(s).expect("pattern present in oracle state"), *a))
            .collect();
        for &(i, a) in &idx {
            for &(j, b) in &idx {
                rho[(i, j)] += a * b.conj() * w;
            }
        }
    }
    rho
}

pub fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|x| x.norm()).fold(0.0, f64::max)
}
