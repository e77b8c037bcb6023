//! Λ-emitter single-photon extraction and the Mach-Zehnder temporal
//! quantum eraser with dark-port parity heralding.
//!
//! Continuum quantities follow the traced extraction state
//! `ρ(t,t') ∝ n̄ f(t) f*(t') e^{−n̄ L(max(t,t'))}`, `L(t) = ∫_{−∞}^t |f|²`,
//! evaluated with midpoint cumulative weights. [`bins`] holds the exact
//! bin-level model that the Fock oracle reproduces.

use nalgebra::DMatrix;

use crate::error::{invalid, Result};
use crate::optics::{MixedSinglePhoton, PairEnsemble, PairLayout};
use crate::temporal::{JointAmplitude, Pulse, Symmetry, TimeGrid, C64, ZERO};

pub mod bins;

pub const TRANSMITTED_A: &str = "a_l";
pub const TRANSMITTED_B: &str = "b_l";
pub const EXTRACTED_A: &str = "a_r";
pub const EXTRACTED_B: &str = "b_r";

const MIN_PAIR_WEIGHT: f64 = 1e-15;

/// Coherent pulse `f(t)` with mean photon number `n̄` incident on an ideal
/// SPRINT emitter prepared to reflect the first photon.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionModel {
    pulse: Pulse,
    nbar: f64,
}

impl ExtractionModel {
    pub fn new(pulse: Pulse, nbar: f64) -> Result<Self> {
        if !(nbar >= 0.0) || !nbar.is_finite() {
            return Err(invalid("nbar", format!("must be finite and >= 0, got {nbar}")));
        }
        let n = pulse.norm_sqr();
        if (n - 1.0).abs() > 1e-10 {
            return Err(invalid("pulse", format!("norm² {n} is not 1")));
        }
        Ok(ExtractionModel { pulse, nbar })
    }

    pub fn grid(&self) -> &TimeGrid {
        self.pulse.grid()
    }

    pub fn pulse(&self) -> &Pulse {
        &self.pulse
    }

    pub fn nbar(&self) -> f64 {
        self.nbar
    }

    /// One arm of the balanced interferometer (`n̄/2`).
    pub fn arm(&self) -> ExtractionModel {
        ExtractionModel {
            pulse: self.pulse.clone(),
            nbar: self.nbar / 2.0,
        }
    }

    /// `|f_k|² dt` per bin.
    pub fn bin_weights(&self) -> Vec<f64> {
        let dt = self.grid().dt();
        self.pulse.amp().iter().map(|a| a.norm_sqr() * dt).collect()
    }

    /// `L(t_k)` at bin centers (half of bin `k`'s own weight included).
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.bin_weights()
            .into_iter()
            .map(|w| {
                let l = acc + 0.5 * w;
                acc += w;
                l
            })
            .collect()
    }

    /// Continuum extraction-time distribution per bin, normalized to one.
    fn extraction_times(&self) -> Vec<f64> {
        let n = self.nbar;
        let p: Vec<f64> = self
            .bin_weights()
            .iter()
            .zip(self.cumulative())
            .map(|(w, l)| n * w * (-n * l).exp())
            .collect();
        let z: f64 = p.iter().sum();
        p.into_iter().map(|x| x / z).collect()
    }
}

/// Squared norm of the extraction branch: the probability that the pulse
/// holds at least one photon. Each bin contributes the exact probability
/// that the first photon arrives there, `e^{−n̄ L_k⁻}(1 − e^{−n̄ w_k})`.
pub fn extraction_norm(model: &ExtractionModel) -> f64 {
    let n = model.nbar;
    let mut before = 0.0;
    let mut total = 0.0;
    for w in model.bin_weights() {
        total += (-n * before).exp() * -(-n * w).exp_m1();
        before += w;
    }
    total
}

/// Plain midpoint quadrature of the extraction norm density
/// `n̄|f(t)|² e^{−n̄ L(t)}`.
pub fn extraction_norm_midpoint(model: &ExtractionModel) -> f64 {
    let n = model.nbar;
    model
        .bin_weights()
        .iter()
        .zip(model.cumulative())
        .map(|(w, l)| n * w * (-n * l).exp())
        .sum()
}

/// Single photon left after tracing the transmitted field.
pub fn extracted_density_matrix(model: &ExtractionModel) -> Result<MixedSinglePhoton> {
    if !(model.nbar > 0.0) {
        return Err(invalid("nbar", "no photon is extracted from an empty pulse"));
    }
    let n = model.nbar;
    let f = model.pulse.amp();
    let l = model.cumulative();
    let k = f.len();
    let mut rho = DMatrix::from_fn(k, k, |i, j| f[i] * f[j].conj() * (n * (-n * l[i].max(l[j])).exp()));
    let tr = rho.trace().re * model.grid().dt();
    rho /= C64::new(tr, 0.0);
    MixedSinglePhoton::new(*model.grid(), rho)
}

/// Closed-form purity of the extracted photon,
/// `2n̄² ∫₀¹ u e^{−2n̄u} du / (1 − e^{−n̄})²`, independent of the pulse shape.
pub fn extracted_purity_closed_form(nbar: f64) -> f64 {
    if nbar < 1e-6 {
        return 1.0 - nbar * nbar / 12.0;
    }
    let a = 2.0 * nbar;
    let integral = (1.0 - (-a).exp() * (1.0 + a)) / (a * a);
    2.0 * nbar * nbar * integral / (-(-nbar).exp_m1()).powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn symmetry(self) -> Symmetry {
        match self {
            Parity::Even => Symmetry::Symmetric,
            Parity::Odd => Symmetry::Antisymmetric,
        }
    }

    pub fn of(n: usize) -> Self {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DarkPortHerald {
    pub parity: Parity,
    /// Probability given that both arms extracted.
    pub prob: f64,
    /// Heaviest component of the heralded pair over `(a_r, b_r)`.
    pub extracted_jta: JointAmplitude,
    /// Mean dark-port count given this parity.
    pub mean_dark_count: f64,
    pub ensemble: PairEnsemble,
}

/// Dark-port coherent intensity `|β|² = (n̄/4)|L(t) − L(t')|` between the
/// two extraction times, for every bin pair.
fn dark_intensity(model: &ExtractionModel) -> (Vec<f64>, Vec<f64>) {
    let arm = model.arm();
    (arm.extraction_times(), arm.cumulative())
}

fn for_time_pairs(model: &ExtractionModel, mut f: impl FnMut(usize, usize, f64, f64)) {
    let (p, l) = dark_intensity(model);
    let q = model.nbar / 4.0;
    for j in 0..p.len() {
        for k in 0..p.len() {
            f(j, k, p[j] * p[k], q * (l[j] - l[k]).abs());
        }
    }
}

/// `P(even | t, t')`, `P(odd | t, t')` and `|β|²` for first and second
/// extraction bins `(j, k)`.
pub fn parity_given_times(model: &ExtractionModel, j: usize, k: usize) -> Result<(f64, f64, f64)> {
    let n = model.grid().n_bins();
    if j >= n || k >= n {
        return Err(invalid("bin", format!("({j},{k}) outside {n} bins")));
    }
    let l = model.arm().cumulative();
    let b = model.nbar / 4.0 * (l[j] - l[k]).abs();
    let e = (-2.0 * b).exp();
    Ok((0.5 * (1.0 + e), 0.5 * (1.0 - e), b))
}

/// Both parity heralds of the MZI eraser. Even dark-port counts herald the
/// exchange-symmetric extracted pair, odd counts the antisymmetric one;
/// the heralded states are `Π_±(ρ⊗ρ)Π_±` with `ρ` the single-arm
/// extraction state at `n̄/2`.
pub fn mzi_tqe_herald(model: &ExtractionModel) -> Result<Vec<DarkPortHerald>> {
    if !(model.nbar > 0.0) {
        return Err(invalid("nbar", "no photon is extracted from an empty pulse"));
    }
    if (-model.nbar / 2.0).exp() > 0.01 {
        log::warn!(
            "n̄ = {} leaves vacuum weight {:.3} per arm; heralds are conditioned on double extraction",
            model.nbar,
            (-model.nbar / 2.0).exp()
        );
    }
    let (mut p_even, mut p_odd, mut n_even, mut n_odd) = (0.0, 0.0, 0.0, 0.0);
    for_time_pairs(model, |_, _, w, b| {
        let e = (-b).exp();
        p_even += w * e * b.cosh();
        p_odd += w * e * b.sinh();
        n_even += w * e * b * b.sinh();
        n_odd += w * e * b * b.cosh();
    });
    let rho = extracted_density_matrix(&model.arm())?;
    let (weights, pulses) = eigen_modes(&rho);
    let mut out = Vec::new();
    for (parity, prob, dark) in [(Parity::Even, p_even, n_even), (Parity::Odd, p_odd, n_odd)] {
        let ensemble = PairEnsemble::new(
            (EXTRACTED_A.into(), EXTRACTED_B.into()),
            PairLayout::CrossMode,
            parity.symmetry(),
            weights.clone(),
            pulses.clone(),
            MIN_PAIR_WEIGHT,
        )?;
        let Some(dominant) = ensemble.dominant() else { continue };
        let extracted_jta = dominant
            .term(&EXTRACTED_A.into(), &EXTRACTED_B.into())
            .expect("cross-mode component");
        out.push(DarkPortHerald {
            parity,
            prob,
            extracted_jta,
            mean_dark_count: if prob > 0.0 { dark / prob } else { 0.0 },
            ensemble,
        });
    }
    Ok(out)
}

/// Eigenvalues (descending, of `ρ·dt`) and grid-normalized eigenpulses.
pub fn eigen_modes(rho: &MixedSinglePhoton) -> (Vec<f64>, Vec<Pulse>) {
    let grid = *rho.grid();
    let dt = grid.dt();
    let eig = rho.rho().scale(dt).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let s = 1.0 / dt.sqrt();
    let mut weights = Vec::new();
    let mut pulses = Vec::new();
    for i in order {
        let w = eig.eigenvalues[i];
        if w <= 0.0 {
            break;
        }
        weights.push(w);
        pulses.push(Pulse::new(grid, eig.eigenvectors.column(i).iter().map(|x| x * s).collect()).expect("grid length"));
    }
    (weights, pulses)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomOutcome {
    Bunch,
    Antibunch,
}

/// Even or odd superposition of the coherent states `|±β⟩` of one
/// temporal mode.
#[derive(Debug, Clone, PartialEq)]
pub struct CatState {
    pub beta: C64,
    pub parity: Parity,
    pub envelope: Pulse,
}

impl CatState {
    pub fn new(beta: C64, parity: Parity, envelope: Pulse) -> Result<Self> {
        if parity == Parity::Odd && beta.norm() == 0.0 {
            return Err(invalid("beta", "the odd cat needs a nonzero amplitude"));
        }
        Ok(CatState { beta, parity, envelope })
    }

    /// `‖|β⟩ ± |−β⟩‖² = 2(1 ± e^{−2|β|²})`.
    pub fn unnormalized_norm_sqr(&self) -> f64 {
        let e = (-2.0 * self.beta.norm_sqr()).exp();
        match self.parity {
            Parity::Even => 2.0 * (1.0 + e),
            Parity::Odd => -2.0 * (-2.0 * self.beta.norm_sqr()).exp_m1(),
        }
    }

    /// Normalized Fock amplitudes `c_0 … c_{n_max}`.
    pub fn amplitudes(&self, n_max: usize) -> Vec<C64> {
        let b2 = self.beta.norm_sqr();
        let norm = self.unnormalized_norm_sqr().sqrt();
        let mut term = C64::new((-b2 / 2.0).exp(), 0.0);
        let mut out = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            if n > 0 {
                term *= self.beta / (n as f64).sqrt();
            }
            let keep = Parity::of(n) == self.parity;
            out.push(if keep { term * 2.0 / norm } else { ZERO });
        }
        out
    }

    fn cutoff(&self) -> usize {
        let b2 = self.beta.norm_sqr();
        let mut n = 8usize;
        while (n as f64) < b2 + 12.0 * b2.sqrt() + 30.0 {
            n += 8;
        }
        n
    }

    pub fn photon_number_distribution(&self, n_max: usize) -> Vec<f64> {
        self.amplitudes(n_max).iter().map(|c| c.norm_sqr()).collect()
    }

    /// `Σ n P(n)` summed to convergence.
    pub fn mean_photon_number(&self) -> f64 {
        self.photon_number_distribution(self.cutoff())
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    /// `|β|² tanh|β|²` (even) or `|β|² coth|β|²` (odd).
    pub fn mean_photon_number_closed_form(&self) -> f64 {
        let b2 = self.beta.norm_sqr();
        match self.parity {
            Parity::Even => b2 * b2.tanh(),
            Parity::Odd => b2 / b2.tanh(),
        }
    }

    /// `|⟨self|other⟩|²` over the shared temporal mode.
    pub fn fidelity(&self, other: &CatState) -> f64 {
        let n = self.cutoff().max(other.cutoff());
        let a = self.amplitudes(n);
        let b = other.amplitudes(n);
        a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum::<C64>().norm_sqr()
    }
}

/// One `(t < t')` cell of the cat-state distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatSample {
    pub first: usize,
    pub second: usize,
    /// Joint probability of this extraction cell and the HOM outcome,
    /// given double extraction.
    pub weight: f64,
    /// Real dark-port amplitude `|β(t,t')|`; the sign of the coherent
    /// amplitude follows which arm extracted first and is absorbed in the
    /// superposition.
    pub beta: f64,
    /// `|⟨ideal cat|conditional dark-port state⟩|²`.
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatDistribution {
    pub outcome: HomOutcome,
    pub parity: Parity,
    pub probability: f64,
    pub samples: Vec<CatSample>,
    pulse: Pulse,
}

impl CatDistribution {
    /// Cat state of a sample, with the pulse envelope restricted to the
    /// bins strictly between the two extractions.
    pub fn cat(&self, s: &CatSample) -> Result<CatState> {
        let amp: Vec<C64> = self
            .pulse
            .amp()
            .iter()
            .enumerate()
            .map(|(k, a)| if k > s.first && k < s.second { *a } else { ZERO })
            .collect();
        let env = Pulse::new(*self.pulse.grid(), amp)?;
        let env = if env.norm_sqr() > 0.0 { env.normalized()? } else { env };
        CatState::new(C64::new(s.beta, 0.0), self.parity, env)
    }
}

/// Dark-port states heralded by a HOM measurement on the extracted pair:
/// bunching projects the dark port on the even cat, antibunching on the
/// odd cat, cell by cell in the extraction times.
pub fn cat_state_from_hom(model: &ExtractionModel, outcome: HomOutcome) -> Result<CatDistribution> {
    if !(model.nbar > 0.0) {
        return Err(invalid("nbar", "no photon is extracted from an empty pulse"));
    }
    let parity = match outcome {
        HomOutcome::Bunch => Parity::Even,
        HomOutcome::Antibunch => Parity::Odd,
    };
    let mut samples = Vec::new();
    let mut probability = 0.0;
    let mut err = None;
    for_time_pairs(model, |j, k, w, b| {
        if j > k || err.is_some() {
            return;
        }
        let w = if j == k { w } else { 2.0 * w };
        let e = (-2.0 * b).exp();
        let p = match parity {
            Parity::Even => 0.5 * (1.0 + e),
            Parity::Odd => 0.5 * (1.0 - e),
        };
        if p * w == 0.0 {
            return;
        }
        let beta = b.sqrt();
        let fidelity = match conditional_fidelity(beta, parity) {
            Ok(f) => f,
            Err(e) => {
                err = Some(e);
                return;
            }
        };
        probability += p * w;
        samples.push(CatSample {
            first: j,
            second: k,
            weight: p * w,
            beta,
            fidelity,
        });
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(CatDistribution {
        outcome,
        parity,
        probability,
        samples,
        pulse: model.pulse.clone(),
    })
}

/// Projects `(|S⟩(|β⟩+|−β⟩) + |A⟩(|β⟩−|−β⟩))/2` on the heralded pair
/// sector and compares the dark-port remainder with the ideal cat.
fn conditional_fidelity(beta: f64, parity: Parity) -> Result<f64> {
    let ideal = CatState::new(C64::new(beta, 0.0), parity, Pulse::new(TimeGrid::new(0.0, 1.0, 2)?, vec![ZERO; 2])?)?;
    let n = ideal.cutoff();
    let coherent = |b: f64| -> Vec<f64> {
        let mut t = (-b * b / 2.0).exp();
        (0..=n)
            .map(|k| {
                if k > 0 {
                    t *= b / (k as f64).sqrt();
                }
                t
            })
            .collect()
    };
    let (plus, minus) = (coherent(beta), coherent(-beta));
    let s = if parity == Parity::Even { 1.0 } else { -1.0 };
    let cond: Vec<f64> = plus.iter().zip(&minus).map(|(a, b)| 0.5 * (a + s * b)).collect();
    let norm: f64 = cond.iter().map(|c| c * c).sum::<f64>().sqrt();
    let a = ideal.amplitudes(n);
    Ok(a.iter().zip(&cond).map(|(x, y)| x.re * y / norm).sum::<f64>().powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossReport {
    pub eta: f64,
    /// `P(declared parity ≠ true parity)` given double extraction.
    pub parity_error: f64,
    pub p_declared_even: f64,
    pub p_declared_odd: f64,
    /// HOM coincidence of the pair heralded by a declared even count
    /// (ideally 0).
    pub hom_coincidence_declared_even: f64,
    /// HOM coincidence of the pair heralded by a declared odd count
    /// (ideally 1).
    pub hom_coincidence_declared_odd: f64,
}

/// Parity heralding when each dark-port photon is detected with
/// probability `eta`. Given the extraction times the dark-port count is
/// Poissonian within each parity sector, so thinning acts on the even and
/// odd cats in closed form.
pub fn loss_sensitivity(model: &ExtractionModel, eta: f64) -> Result<LossReport> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(invalid("eta", format!("must lie in [0, 1], got {eta}")));
    }
    if !(model.nbar > 0.0) {
        return Err(invalid("nbar", "no photon is extracted from an empty pulse"));
    }
    let y = 1.0 - 2.0 * eta;
    // joint[true][declared]
    let mut joint = [[0.0; 2]; 2];
    for_time_pairs(model, |_, _, w, b| {
        let e = (-b).exp();
        let (pe, po) = (e * b.cosh(), e * b.sinh());
        // ⟨(1−2η)^N⟩ within each cat sector.
        let de = e * (y * b).cosh();
        let dd = e * (y * b).sinh();
        let even_decl_even = 0.5 * (pe + de);
        let odd_decl_even = 0.5 * (po + dd);
        joint[0][0] += w * even_decl_even;
        joint[0][1] += w * (pe - even_decl_even);
        joint[1][0] += w * odd_decl_even;
        joint[1][1] += w * (po - odd_decl_even);
    });
    let p_even = joint[0][0] + joint[1][0];
    let p_odd = joint[0][1] + joint[1][1];
    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };
    Ok(LossReport {
        eta,
        parity_error: joint[0][1] + joint[1][0],
        p_declared_even: p_even,
        p_declared_odd: p_odd,
        hom_coincidence_declared_even: ratio(joint[1][0], p_even),
        hom_coincidence_declared_odd: ratio(joint[1][1], p_odd),
    })
}
