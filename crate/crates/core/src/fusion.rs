//! Type-I and type-II fusion of two path-encoded photonic qubits whose
//! two-photon temporal state has a heralded exchange symmetry.
//!
//! Photon `a` sits in `a_0`/`a_1` entangled with qubit set `A`, photon `b`
//! in `b_0`/`b_1` with `B`:
//! `|ψ_m⟩ = ½ ∫φ_m(t,t') (|A_0⟩a_0† + |A_1⟩a_1†)(|B_0⟩b_0† + |B_1⟩b_1†)|0⟩`.
//! Beam splitter `k` mixes `a_k, b_k` into ports `d_k^1, d_k^2` with
//! `a_k† → (d¹† + d²†)/√2`, `b_k† → (−d¹† + d²†)/√2`.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, Matrix2, Matrix4};

use crate::error::{invalid, Error, Result};
use crate::optics::{apply_beam_splitter, BeamSplitterConvention, TwoPhotonState};
use crate::temporal::{symmetry_decompose, JointAmplitude, Mode, Pulse, Symmetry, C64, ZERO};

const SYMMETRY_TOL: f64 = 1e-9;
const PHASE_TOL: f64 = 1e-9;

pub fn photonic_mode(photon: char, k: u8) -> Mode {
    Mode::new(format!("{photon}_{k}"))
}

fn photonic_modes() -> [Mode; 4] {
    [
        photonic_mode('a', 0),
        photonic_mode('a', 1),
        photonic_mode('b', 0),
        photonic_mode('b', 1),
    ]
}

/// Detector `d_k^j`, `k ∈ {0,1}` the beam splitter, `j ∈ {1,2}` the port.
pub fn port(k: u8, j: u8) -> Mode {
    Mode::new(format!("d{k}^{j}"))
}

fn splitter(k: u8) -> BeamSplitterConvention {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    BeamSplitterConvention {
        inputs: (photonic_mode('a', k), photonic_mode('b', k)),
        outputs: (port(k, 1), port(k, 2)),
        u: Matrix2::new(h, -h, h, h),
    }
}

fn check_port(name: &'static str, j: u8) -> Result<()> {
    if j == 1 || j == 2 {
        Ok(())
    } else {
        Err(invalid(name, format!("port index must be 1 or 2, got {j}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResourceState {
    symmetry: Symmetry,
    jta: JointAmplitude,
    /// `(A index, B index)` → photonic branch.
    branches: Vec<((u8, u8), TwoPhotonState)>,
}

/// Resource state for a two-photon JTA with declared symmetry `m`.
pub fn build_resource(symmetry: Symmetry, jta: &JointAmplitude) -> Result<ResourceState> {
    let d = symmetry_decompose(jta)?;
    let w = match symmetry {
        Symmetry::Symmetric => d.weight_sym,
        Symmetry::Antisymmetric => d.weight_antisym,
    };
    if (w - 1.0).abs() > SYMMETRY_TOL {
        return Err(Error::Symmetry(format!(
            "declared {symmetry:?} but the JTA has weight {w:.3e} on that sector"
        )));
    }
    Ok(resource_unchecked(symmetry, jta))
}

fn resource_unchecked(symmetry: Symmetry, jta: &JointAmplitude) -> ResourceState {
    let mut branches = Vec::with_capacity(4);
    for i in 0..2u8 {
        for j in 0..2u8 {
            let term = jta
                .clone()
                .with_modes((photonic_mode('a', i), photonic_mode('b', j)))
                .expect("distinct modes")
                .scaled(C64::new(0.5, 0.0));
            let mut st = TwoPhotonState::new(*jta.grid(), photonic_modes());
            st.add_jta(&term).expect("declared modes");
            branches.push(((i, j), st));
        }
    }
    ResourceState {
        symmetry,
        jta: jta.clone(),
        branches,
    }
}

impl ResourceState {
    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn jta(&self) -> &JointAmplitude {
        &self.jta
    }

    pub fn branches(&self) -> &[((u8, u8), TwoPhotonState)] {
        &self.branches
    }

    pub fn norm_sqr(&self) -> f64 {
        self.branches.iter().map(|(_, s)| s.norm_sqr()).sum()
    }

    fn mixed(&self, splitters: &[u8]) -> Result<Vec<((u8, u8), TwoPhotonState)>> {
        self.branches
            .iter()
            .map(|(k, s)| {
                let mut s = s.clone();
                for &b in splitters {
                    s = apply_beam_splitter(&s, &splitter(b))?;
                }
                Ok((*k, s))
            })
            .collect()
    }
}

/// Pure state of labeled qubits, amplitudes in binary order with the
/// first label most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitState {
    pub labels: Vec<String>,
    pub amplitudes: Vec<C64>,
}

impl QubitState {
    fn new(labels: &[&str], amplitudes: Vec<C64>) -> Result<Self> {
        let n: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if n == 0.0 {
            return Err(invalid("detection", "pattern has zero probability"));
        }
        let s = 1.0 / n.sqrt();
        Ok(QubitState {
            labels: labels.iter().map(|l| l.to_string()).collect(),
            amplitudes: amplitudes.into_iter().map(|a| a * s).collect(),
        })
    }

    pub fn amplitude(&self, bits: &[u8]) -> C64 {
        let idx = bits.iter().fold(0usize, |acc, &b| acc * 2 + b as usize);
        self.amplitudes[idx]
    }

    /// Concurrence between the first qubit and the rest, `2√det ρ_1`
    /// (the two-qubit concurrence for two qubits).
    pub fn concurrence(&self) -> f64 {
        let half = self.amplitudes.len() / 2;
        let (lo, hi) = self.amplitudes.split_at(half);
        let r00: f64 = lo.iter().map(|a| a.norm_sqr()).sum();
        let r11: f64 = hi.iter().map(|a| a.norm_sqr()).sum();
        let r01: C64 = lo.iter().zip(hi).map(|(a, b)| a * b.conj()).sum();
        2.0 * (r00 * r11 - r01.norm_sqr()).max(0.0).sqrt()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &QubitState) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FusionKind {
    TypeI,
    TypeII,
    Failure,
}

/// Detector click `(k, j, bin)`.
pub type Click = (u8, u8, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct FusionOutcome {
    pub kind: FusionKind,
    pub detections: Vec<Click>,
    /// Probability of this exact detection record.
    pub probability: f64,
    /// Labels `A, B` (plus `N`, the new photonic qubit, for type I; `N=0`
    /// is a photon in `a_0`, `N=1` in `b_0`).
    pub output: QubitState,
    /// Sign of the second term relative to the first for successes
    /// (`|A_0 B_1 …⟩ ± |A_1 B_0 …⟩`), `0` for failures.
    pub relative_phase: i8,
    /// Envelope of the new photonic qubit (type I).
    pub envelope: Option<Pulse>,
    /// Relative weight not captured by one envelope shared by all qubit
    /// components (type I), zero when the time dependence factorizes.
    pub envelope_residual: f64,
}

fn relative_phase(first: C64, second: C64) -> Result<i8> {
    let r = second / first;
    if (r - 1.0).norm() < PHASE_TOL {
        Ok(1)
    } else if (r + 1.0).norm() < PHASE_TOL {
        Ok(-1)
    } else {
        Err(invalid("relative_phase", format!("ratio {r} is not ±1")))
    }
}

/// Single click at `d_1^j` in `bin`, with the other photon left in
/// `a_0`/`b_0`.
pub fn fuse_type1(state: &ResourceState, j: u8, bin: usize) -> Result<FusionOutcome> {
    check_port("j", j)?;
    let n = state.jta.grid().n_bins();
    if bin >= n {
        return Err(invalid("bin", format!("{bin} outside {n} bins")));
    }
    let mixed = state.mixed(&[1])?;
    let d = port(1, j);
    // Rows: (A, B, N); columns: bin of the remaining photon.
    let mut m = DMatrix::from_element(8, n, ZERO);
    for ((ia, ib), s) in &mixed {
        for (nq, mode) in [(0usize, photonic_mode('a', 0)), (1, photonic_mode('b', 0))] {
            let row = (*ia as usize) * 4 + (*ib as usize) * 2 + nq;
            for t in 0..n {
                m[(row, t)] += s.pair_amplitude(&d, bin, &mode, t);
            }
        }
    }
    let probability = m.iter().map(|a| a.norm_sqr()).sum::<f64>();
    if probability == 0.0 {
        return Err(invalid("detection", "pattern has zero probability"));
    }
    let svd = m.clone().svd(true, true);
    let (top, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, 0.0), |best, (i, &s)| if s > best.1 { (i, s) } else { best });
    let sv = svd.singular_values[top];
    let u = svd.u.as_ref().expect("requested");
    let v_t = svd.v_t.as_ref().expect("requested");
    let residual = 1.0 - sv * sv / probability;
    let mut logical: Vec<C64> = u.column(top).iter().copied().collect();
    // Fix the global phase on the |A_0 B_1 0⟩ component.
    let anchor = logical[0b010];
    if anchor.norm() > 0.0 {
        let ph = anchor.conj() / anchor.norm();
        logical.iter_mut().for_each(|a| *a *= ph);
    }
    let s = 1.0 / state.jta.grid().dt().sqrt();
    let env: Vec<C64> = v_t.row(top).iter().map(|x| x * s).collect();
    let output = QubitState::new(&["A", "B", "N"], logical)?;
    let relative_phase = relative_phase(output.amplitude(&[0, 1, 0]), output.amplitude(&[1, 0, 1]))?;
    Ok(FusionOutcome {
        kind: FusionKind::TypeI,
        detections: vec![(1, j, bin)],
        probability,
        output,
        relative_phase,
        envelope: Some(Pulse::new(*state.jta.grid(), env)?),
        envelope_residual: residual.max(0.0),
    })
}

/// Clicks `d_0^i` at `bins.0` and `d_1^j` at `bins.1`.
pub fn fuse_type2(state: &ResourceState, i: u8, j: u8, bins: (usize, usize)) -> Result<FusionOutcome> {
    check_port("i", i)?;
    check_port("j", j)?;
    let mixed = state.mixed(&[0, 1])?;
    let (d0, d1) = (port(0, i), port(1, j));
    let mut amp = vec![ZERO; 4];
    for ((ia, ib), s) in &mixed {
        amp[(*ia as usize) * 2 + *ib as usize] += s.pair_amplitude(&d0, bins.0, &d1, bins.1);
    }
    let probability = amp.iter().map(|a| a.norm_sqr()).sum::<f64>();
    let output = QubitState::new(&["A", "B"], amp)?;
    let relative_phase = relative_phase(output.amplitude(&[0, 1]), output.amplitude(&[1, 0]))?;
    Ok(FusionOutcome {
        kind: FusionKind::TypeII,
        detections: vec![(0, i, bins.0), (1, j, bins.1)],
        probability,
        output,
        relative_phase,
        envelope: None,
        envelope_residual: 0.0,
    })
}

/// Both clicks at beam splitter `k`: `d_k^i` at `bins.0`, `d_k^j` at
/// `bins.1`. Zero-probability records are returned with an empty output.
pub fn fuse_failure(state: &ResourceState, k: u8, i: u8, j: u8, bins: (usize, usize)) -> Result<FusionOutcome> {
    if k > 1 {
        return Err(invalid("k", format!("beam splitter index must be 0 or 1, got {k}")));
    }
    check_port("i", i)?;
    check_port("j", j)?;
    let mixed = state.mixed(&[0, 1])?;
    let (p, q) = (port(k, i), port(k, j));
    let mut amp = vec![ZERO; 4];
    for ((ia, ib), s) in &mixed {
        amp[(*ia as usize) * 2 + *ib as usize] += s.pair_amplitude(&p, bins.0, &q, bins.1);
    }
    let probability = amp.iter().map(|a| a.norm_sqr()).sum::<f64>();
    let output = if probability > 1e-300 {
        QubitState::new(&["A", "B"], amp)?
    } else {
        QubitState {
            labels: vec!["A".into(), "B".into()],
            amplitudes: vec![ZERO; 4],
        }
    };
    Ok(FusionOutcome {
        kind: FusionKind::Failure,
        detections: vec![(k, i, bins.0), (k, j, bins.1)],
        probability,
        output,
        relative_phase: 0,
        envelope: None,
        envelope_residual: 0.0,
    })
}

/// Two-qubit Bell state `(|0 1⟩ + s|1 0⟩)/√2`.
pub fn bell(sign: f64) -> QubitState {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    QubitState {
        labels: vec!["A".into(), "B".into()],
        amplitudes: vec![ZERO, h, h * sign, ZERO],
    }
}

/// Wootters concurrence of a two-qubit density matrix.
pub fn concurrence(rho: &Matrix4<C64>) -> f64 {
    let y = Matrix4::from_fn(|r, c| {
        // σ_y ⊗ σ_y is the anti-diagonal (−1, 1, 1, −1).
        if r + c == 3 {
            C64::new(if r == 0 || r == 3 { -1.0 } else { 1.0 }, 0.0)
        } else {
            ZERO
        }
    });
    let tilde = y * rho.conjugate() * y;
    let eig = rho.symmetric_eigen();
    let sqrt_rho = eig.eigenvectors
        * Matrix4::from_diagonal(&eig.eigenvalues.map(|l| C64::new(l.max(0.0).sqrt(), 0.0)))
        * eig.eigenvectors.adjoint();
    let r = sqrt_rho * tilde * sqrt_rho;
    let r = (r + r.adjoint()) * C64::new(0.5, 0.0);
    let mut l: Vec<f64> = r.symmetric_eigenvalues().iter().map(|x| x.max(0.0).sqrt()).collect();
    l.sort_by(|a, b| b.total_cmp(a));
    (l[0] - l[1] - l[2] - l[3]).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeraldedFidelity {
    /// `None` when no symmetry herald is available.
    pub symmetry: Option<Symmetry>,
    pub probability: f64,
    pub fidelity: f64,
    pub concurrence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistinguishabilityReport {
    pub use_tqe: bool,
    pub weight_sym: f64,
    pub weight_antisym: f64,
    pub heralds: Vec<HeraldedFidelity>,
    /// Herald-averaged Bell fidelity.
    pub fidelity: f64,
    pub concurrence: f64,
}

/// Type-II fusion (record `d_0^1 d_1^1`, times unresolved) of a raw JTA.
/// Without the eraser the AB state is the time-averaged density matrix of
/// the raw input, compared with the better of the two Bell targets; with
/// it each symmetry herald is fused and interpreted with its own sign.
pub fn fidelity_vs_distinguishability(jta_raw: &JointAmplitude, use_tqe: bool) -> Result<DistinguishabilityReport> {
    let d = symmetry_decompose(jta_raw)?;
    let mut heralds = Vec::new();
    if use_tqe {
        for (sym, part, w) in [
            (Symmetry::Symmetric, &d.sym, d.weight_sym),
            (Symmetry::Antisymmetric, &d.antisym, d.weight_antisym),
        ] {
            if w < 1e-14 {
                continue;
            }
            let part = part.clone().normalized()?;
            let rho = fused_density(&resource_unchecked(sym, &part))?;
            let target = bell(sym.sign());
            heralds.push(HeraldedFidelity {
                symmetry: Some(sym),
                probability: w,
                fidelity: bell_fidelity(&rho, &target),
                concurrence: concurrence(&rho),
            });
        }
    } else {
        let rho = fused_density(&resource_unchecked(Symmetry::Symmetric, jta_raw))?;
        let fidelity = bell_fidelity(&rho, &bell(-1.0)).max(bell_fidelity(&rho, &bell(1.0)));
        heralds.push(HeraldedFidelity {
            symmetry: None,
            probability: 1.0,
            fidelity,
            concurrence: concurrence(&rho),
        });
    }
    let fidelity = heralds.iter().map(|h| h.probability * h.fidelity).sum();
    let concurrence = heralds.iter().map(|h| h.probability * h.concurrence).sum();
    Ok(DistinguishabilityReport {
        use_tqe,
        weight_sym: d.weight_sym,
        weight_antisym: d.weight_antisym,
        heralds,
        fidelity,
        concurrence,
    })
}

/// Normalized AB density after the `d_0^1 d_1^1` record, summed over the
/// unresolved click times.
fn fused_density(state: &ResourceState) -> Result<Matrix4<C64>> {
    let mixed = state.mixed(&[0, 1])?;
    let (d0, d1) = (port(0, 1), port(1, 1));
    let n = state.jta.grid().n_bins();
    let mut rho = Matrix4::<C64>::zeros();
    for t in 0..n {
        for u in 0..n {
            let mut amp = [ZERO; 4];
            for ((ia, ib), s) in &mixed {
                amp[(*ia as usize) * 2 + *ib as usize] += s.pair_amplitude(&d0, t, &d1, u);
            }
            for r in 0..4 {
                for c in 0..4 {
                    rho[(r, c)] += amp[r] * amp[c].conj();
                }
            }
        }
    }
    let tr = rho.trace().re;
    if tr == 0.0 {
        return Err(invalid("jta", "fusion record has zero probability"));
    }
    Ok(rho / C64::new(tr, 0.0))
}

fn bell_fidelity(rho: &Matrix4<C64>, target: &QubitState) -> f64 {
    let v = nalgebra::Vector4::from_iterator(target.amplitudes.iter().copied());
    (v.adjoint() * rho * v)[(0, 0)].re
}
