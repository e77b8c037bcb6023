//! Parametric pair sources and the idler-side temporal quantum eraser.
//!
//! Two identical sources emit `∫Φ(t1,t2) a_i†(t1) a_s†(t2)` and the same in
//! `b_i, b_s`. The idlers meet on a Hadamard beam splitter (`a_i → c, d`)
//! and are counted by bucket detectors; the topology of the two clicks
//! (one in each port, or both in one) heralds the exchange symmetry of the
//! signal pair.
//!
//! With `Φ·dt = Σ_k s_k u_k v_kᵀ` the bucket-heralded signal is a mixture
//! over Schmidt pairs, kept as a [`PairEnsemble`].

use nalgebra::DMatrix;

use crate::error::{invalid, Result};
use crate::optics::{PairEnsemble, PairLayout, TwoPhotonState};
pub use crate::temporal::Symmetry;
use crate::temporal::{schmidt_analysis, schmidt_modes, JointAmplitude, TimeGrid, C64};

pub const IDLER_A: &str = "a_i";
pub const IDLER_B: &str = "b_i";
pub const SIGNAL_A: &str = "a_s";
pub const SIGNAL_B: &str = "b_s";
pub const PORT_C: &str = "c";
pub const PORT_D: &str = "d";

/// Schmidt modes and mode pairs lighter than these are dropped from
/// heralded ensembles.
const MIN_SCHMIDT_WEIGHT: f64 = 1e-13;
const MIN_PAIR_WEIGHT: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpdcModel {
    pub grid: TimeGrid,
    pub sigma_sum: f64,
    pub sigma_diff: f64,
    pub t0: f64,
}

impl SpdcModel {
    pub fn new(grid: TimeGrid, sigma_sum: f64, sigma_diff: f64, t0: f64) -> Result<Self> {
        for (name, s) in [("sigma_sum", sigma_sum), ("sigma_diff", sigma_diff)] {
            if !(s > 0.0) || !s.is_finite() {
                return Err(invalid(name, format!("must be positive, got {s}")));
            }
            if s < 3.0 * grid.dt() {
                return Err(invalid(
                    name,
                    format!("{s} spans fewer than 3 bins of width {}", grid.dt()),
                ));
            }
        }
        if !t0.is_finite() {
            return Err(invalid("t0", "must be finite"));
        }
        Ok(SpdcModel {
            grid,
            sigma_sum,
            sigma_diff,
            t0,
        })
    }

    /// Model whose closed-form Schmidt number is `k`, with `σ_sum ≥ σ_diff`.
    pub fn with_schmidt_number(grid: TimeGrid, sigma_diff: f64, k: f64, t0: f64) -> Result<Self> {
        if !(k >= 1.0) {
            return Err(invalid("schmidt_number", format!("must be >= 1, got {k}")));
        }
        let p = 1.0 / k;
        let r = (1.0 + (1.0 - p * p).sqrt()) / p;
        SpdcModel::new(grid, r * sigma_diff, sigma_diff, t0)
    }

    /// `2σ_sum σ_diff / (σ_sum² + σ_diff²)`.
    pub fn analytic_purity(&self) -> f64 {
        let (a, b) = (self.sigma_sum, self.sigma_diff);
        2.0 * a * b / (a * a + b * b)
    }
}

/// Normalized double-Gaussian `Φ(t1,t2)` over `(a_i, a_s)`.
pub fn spdc_joint_amplitude(model: &SpdcModel) -> Result<JointAmplitude> {
    let SpdcModel {
        sigma_sum: ss,
        sigma_diff: sd,
        t0,
        ..
    } = *model;
    JointAmplitude::from_fn(model.grid, (IDLER_A.into(), SIGNAL_A.into()), |t1, t2| {
        let u = t1 + t2 - 2.0 * t0;
        let v = t1 - t2;
        C64::new((-u * u / (4.0 * ss * ss) - v * v / (4.0 * sd * sd)).exp(), 0.0)
    })?
    .normalized()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    CrossSource,
    DoublePair,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeraldedPair {
    pub symmetry: Symmetry,
    pub channel: Channel,
    /// Probability of this herald given the channel produced two idlers.
    pub herald_prob: f64,
    /// Heaviest ensemble component (the exact state for a separable source).
    pub signal_state: TwoPhotonState,
    pub ensemble: PairEnsemble,
}

fn ensemble(phi: &JointAmplitude, channel: Channel, symmetry: Symmetry) -> PairEnsemble {
    let (coeffs, _, signal) = schmidt_modes(phi, MIN_SCHMIDT_WEIGHT);
    let layout = match channel {
        Channel::CrossSource => PairLayout::CrossMode,
        Channel::DoublePair => PairLayout::SameMode,
    };
    PairEnsemble::new(
        (SIGNAL_A.into(), SIGNAL_B.into()),
        layout,
        symmetry,
        coeffs.iter().map(|s| s * s).collect(),
        signal,
        MIN_PAIR_WEIGHT,
    )
    .expect("distinct signal modes")
}

/// Herald probabilities `(symmetric, antisymmetric)` for a normalized `Φ`.
pub fn cross_herald_probabilities(phi: &JointAmplitude) -> (f64, f64) {
    let p = schmidt_analysis(phi).purity;
    (0.5 * (1.0 + p), 0.5 * (1.0 - p))
}

fn heralds(phi: &JointAmplitude, channel: Channel, probs: (f64, f64)) -> Vec<HeraldedPair> {
    [(Symmetry::Symmetric, probs.0), (Symmetry::Antisymmetric, probs.1)]
        .into_iter()
        .filter_map(|(symmetry, herald_prob)| {
            let ensemble = ensemble(phi, channel, symmetry);
            let signal_state = ensemble.dominant()?;
            (herald_prob > 0.0).then_some(HeraldedPair {
                symmetry,
                channel,
                herald_prob,
                signal_state,
                ensemble,
            })
        })
        .collect()
}

/// Cross-source heralds from one pair per source. Coalescent idler clicks
/// herald the symmetric signal state with probability `½(1 + Tr ρ_i²)`,
/// coincident clicks the antisymmetric one with `½(1 − Tr ρ_i²)`. Heralds of
/// zero probability are omitted.
pub fn tqe_herald_cross(model: &SpdcModel) -> Result<Vec<HeraldedPair>> {
    tqe_herald_cross_for(&spdc_joint_amplitude(model)?)
}

pub fn tqe_herald_cross_for(phi: &JointAmplitude) -> Result<Vec<HeraldedPair>> {
    let phi = phi.clone().normalized()?;
    let probs = cross_herald_probabilities(&phi);
    let probs = (probs.0, if probs.1 < 1e-14 { 0.0 } else { probs.1 });
    Ok(heralds(&phi, Channel::CrossSource, probs))
}

/// Double-pair heralds from two pairs in one source (sources in the
/// symmetric pump-phase superposition). Coalescent clicks herald
/// `a_s a_s + b_s b_s`, coincident clicks `a_s a_s − b_s b_s`, each with
/// probability ½.
pub fn tqe_herald_double_pair(model: &SpdcModel) -> Result<Vec<HeraldedPair>> {
    tqe_herald_double_pair_for(&spdc_joint_amplitude(model)?)
}

pub fn tqe_herald_double_pair_for(phi: &JointAmplitude) -> Result<Vec<HeraldedPair>> {
    let phi = phi.clone().normalized()?;
    Ok(heralds(&phi, Channel::DoublePair, (0.5, 0.5)))
}

/// Idler click topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdlerClicks {
    /// Both idlers in port `c` at bins `(x, y)`.
    CoalescentC(usize, usize),
    /// Both idlers in port `d`.
    CoalescentD(usize, usize),
    /// One idler in `c` at bin `x`, one in `d` at bin `y`.
    Coincident(usize, usize),
}

/// Pure signal state after time-resolved idler detection in the
/// cross-source channel: `ψ(t2,t4) ∝ Φ(x,t2)Φ(y,t4) ± Φ(y,t2)Φ(x,t4)`.
/// Returns the normalized state and the click density, normalized so that
/// summing `density·dt²` over ordered bin pairs gives the herald probability.
pub fn herald_cross_resolved(phi: &JointAmplitude, clicks: IdlerClicks) -> Result<(TwoPhotonState, f64)> {
    let n = phi.grid().n_bins();
    let (x, y, sign, coef) = match clicks {
        IdlerClicks::CoalescentC(x, y) => (x, y, 1.0, 0.5),
        IdlerClicks::CoalescentD(x, y) => (x, y, 1.0, -0.5),
        IdlerClicks::Coincident(x, y) => (x, y, -1.0, -0.5),
    };
    if x >= n || y >= n {
        return Err(invalid("bin", format!("click bins ({x},{y}) outside {n} bins")));
    }
    let a = phi.amp();
    let m = DMatrix::from_fn(n, n, |j, k| (a[(x, j)] * a[(y, k)] + a[(y, j)] * a[(x, k)] * sign) * coef);
    let grid = *phi.grid();
    let jta = JointAmplitude::new(grid, (SIGNAL_A.into(), SIGNAL_B.into()), m)?;
    let density = match clicks {
        IdlerClicks::Coincident(..) => jta.norm_sqr(),
        _ => 0.5 * jta.norm_sqr(),
    };
    let st = TwoPhotonState::from_jta(&jta.normalized()?);
    Ok((st, density))
}

/// One branch of the symmetry-resolved two-source amplitude,
/// `½[Φ(t1,t2)Φ(t3,t4) + (−1)^m Φ(t3,t2)Φ(t1,t4)]` with photon order
/// `(a_i, a_s, b_i, b_s)`; the two branches sum to `Φ(t1,t2)Φ(t3,t4)`.
pub fn cross_source_branch(phi: &JointAmplitude, m: Symmetry, bins: [usize; 4]) -> C64 {
    let a = phi.amp();
    let [t1, t2, t3, t4] = bins;
    (a[(t1, t2)] * a[(t3, t4)] + a[(t3, t2)] * a[(t1, t4)] * m.sign()) * 0.5
}

/// Outcome table of [`herald_statistics`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeraldStatistics {
    pub pair_gen_prob: f64,
    /// One pair from each source; both idlers clicked.
    pub cross: f64,
    /// Two pairs from one source; both idlers clicked.
    pub double_pair: f64,
    /// Vacuum or a single pair.
    pub no_herald: f64,
    pub cross_coincident: f64,
    pub cross_coalescent: f64,
    pub double_pair_coincident: f64,
    pub double_pair_coalescent: f64,
}

impl HeraldStatistics {
    /// Cross-source share of all double heralds, `1 / (2 + Tr ρ_i²)`.
    pub fn cross_fraction(&self) -> f64 {
        self.cross / (self.cross + self.double_pair)
    }
}

/// Outcome probabilities to second order in the pair probability `p` of
/// `exp(√p (A_a† + A_b†))|0⟩`: vacuum `1`, single pair `2p`, cross `p²`,
/// double pair `p²(1 + Tr ρ_i²)`, normalized over these terms.
pub fn herald_statistics(model: &SpdcModel, pair_gen_prob: f64) -> Result<HeraldStatistics> {
    herald_statistics_for(&spdc_joint_amplitude(model)?, pair_gen_prob)
}

pub fn herald_statistics_for(phi: &JointAmplitude, pair_gen_prob: f64) -> Result<HeraldStatistics> {
    let p = pair_gen_prob;
    if !(0.0..0.5).contains(&p) {
        return Err(invalid("pair_gen_prob", format!("must lie in [0, 0.5), got {p}")));
    }
    let purity = schmidt_analysis(&phi.clone().normalized()?).purity;
    let cross = p * p;
    let double_pair = p * p * (1.0 + purity);
    let none = 1.0 + 2.0 * p;
    let z = cross + double_pair + none;
    let (cs, ca) = (0.5 * (1.0 + purity), 0.5 * (1.0 - purity));
    Ok(HeraldStatistics {
        pair_gen_prob: p,
        cross: cross / z,
        double_pair: double_pair / z,
        no_herald: none / z,
        cross_coincident: ca * cross / z,
        cross_coalescent: cs * cross / z,
        double_pair_coincident: 0.5 * double_pair / z,
        double_pair_coalescent: 0.5 * double_pair / z,
    })
}

/// Signal pair of the unheralded two-source state, `Φ ⊗ Φ` restricted to
/// one signal per source: `Σ_k s_k² |v_k⟩⟨v_k|` in each arm.
pub fn raw_signal_antisym_weight(phi: &JointAmplitude) -> f64 {
    0.5 * (1.0 - schmidt_analysis(phi).purity)
}
