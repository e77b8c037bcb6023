//! Linear optics on two-photon states with labeled spatial modes.
//!
//! A [`TwoPhotonState`] stores one amplitude matrix per unordered mode pair
//! `p ≤ q`. Cross-mode terms are `∫A_pq(t1,t2) p†(t1) q†(t2)|0⟩`; same-mode
//! terms carry the bosonic factor, `(1/√2)∫A_pp p†p†|0⟩` with `A_pp`
//! transpose-symmetric, so every term's `‖A‖²dt²` is directly its outcome
//! probability.
//!
//! Internally transformations use the symmetric first-quantized kernel
//! `F_pq(t1,t2)` with `|ψ⟩ = Σ_{p,q}∫F_pq p†q†|0⟩` and `F_qp = F_pqᵀ`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, Matrix2};

use crate::error::{invalid, Error, Result};
use crate::temporal::{max_abs, JointAmplitude, Mode, Pulse, Symmetry, TimeGrid, C64, ZERO};

#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonState {
    grid: TimeGrid,
    modes: Vec<Mode>,
    terms: BTreeMap<(usize, usize), DMatrix<C64>>,
}

impl TwoPhotonState {
    /// Empty state over a declared (sorted, deduplicated) mode set.
    pub fn new(grid: TimeGrid, modes: impl IntoIterator<Item = Mode>) -> Self {
        let mut modes: Vec<Mode> = modes.into_iter().collect();
        modes.sort();
        modes.dedup();
        TwoPhotonState {
            grid,
            modes,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_jta(jta: &JointAmplitude) -> Self {
        let (a, b) = jta.modes().clone();
        let mut s = TwoPhotonState::new(*jta.grid(), [a, b]);
        s.add_jta(jta).expect("modes declared above");
        s
    }

    /// Adds `jta` (with its own normalization) as a term. Amplitudes for a
    /// pair already present are summed.
    pub fn add_jta(&mut self, jta: &JointAmplitude) -> Result<()> {
        self.grid.ensure_same(jta.grid())?;
        let p = self.index(&jta.modes().0)?;
        let q = self.index(&jta.modes().1)?;
        let amp = if p <= q { jta.amp().clone() } else { jta.amp().transpose() };
        let key = (p.min(q), p.max(q));
        match self.terms.get_mut(&key) {
            Some(m) => *m += amp,
            None => {
                self.terms.insert(key, amp);
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn index(&self, mode: &Mode) -> Result<usize> {
        self.modes
            .binary_search(mode)
            .map_err(|_| Error::UnknownMode(mode.to_string()))
    }

    /// Canonical term for a mode pair, `None` when absent.
    pub fn term(&self, a: &Mode, b: &Mode) -> Option<JointAmplitude> {
        let p = self.index(a).ok()?;
        let q = self.index(b).ok()?;
        let m = self.terms.get(&(p.min(q), p.max(q)))?;
        let m = if p <= q { m.clone() } else { m.transpose() };
        JointAmplitude::new(self.grid, (a.clone(), b.clone()), m).ok()
    }

    pub fn terms(&self) -> impl Iterator<Item = ((&Mode, &Mode), &DMatrix<C64>)> {
        self.terms
            .iter()
            .map(|(&(p, q), m)| ((&self.modes[p], &self.modes[q]), m))
    }

    /// Probability weight of a mode pair (order irrelevant).
    pub fn pair_weight(&self, a: &Mode, b: &Mode) -> f64 {
        let dt2 = self.grid.dt().powi(2);
        match (self.index(a), self.index(b)) {
            (Ok(p), Ok(q)) => self
                .terms
                .get(&(p.min(q), p.max(q)))
                .map_or(0.0, |m| m.norm_squared() * dt2),
            _ => 0.0,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        let dt2 = self.grid.dt().powi(2);
        self.terms.values().map(|m| m.norm_squared()).sum::<f64>() * dt2
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n > 0.0) {
            return Err(invalid("state", "zero norm"));
        }
        let s = C64::new(1.0 / n.sqrt(), 0.0);
        self.terms.values_mut().for_each(|m| *m *= s);
        Ok(self)
    }

    pub fn scaled(mut self, c: C64) -> Self {
        self.terms.values_mut().for_each(|m| *m *= c);
        self
    }

    /// `⟨self|other⟩`; both states must share grid and mode set.
    pub fn inner(&self, other: &TwoPhotonState) -> Result<C64> {
        self.grid.ensure_same(&other.grid)?;
        if self.modes != other.modes {
            return Err(Error::Shape("inner product over different mode sets".into()));
        }
        let dt2 = self.grid.dt().powi(2);
        let mut s = ZERO;
        for (k, m) in &self.terms {
            if let Some(o) = other.terms.get(k) {
                s += m.iter().zip(o.iter()).map(|(a, b)| a.conj() * b).sum::<C64>();
            }
        }
        Ok(s * dt2)
    }

    /// Normalized Fock-basis amplitude of one photon in `(a, bin j)` and one
    /// in `(b, bin k)`, with bin operators `√dt·a(t_j)`.
    pub fn pair_amplitude(&self, a: &Mode, j: usize, b: &Mode, k: usize) -> C64 {
        let dt = self.grid.dt();
        let (Ok(p), Ok(q)) = (self.index(a), self.index(b)) else {
            return ZERO;
        };
        let (p, j, q, k) = if p <= q { (p, j, q, k) } else { (q, k, p, j) };
        let Some(m) = self.terms.get(&(p, q)) else {
            return ZERO;
        };
        if p != q {
            m[(j, k)] * dt
        } else if j != k {
            m[(j, k)] * dt * std::f64::consts::SQRT_2
        } else {
            m[(j, j)] * dt
        }
    }

    fn kernel(&self) -> BTreeMap<(usize, usize), DMatrix<C64>> {
        let mut f = BTreeMap::new();
        for (&(p, q), m) in &self.terms {
            if p == q {
                f.insert((p, p), m * C64::new(FRAC_1_SQRT_2, 0.0));
            } else {
                let h = m * C64::new(0.5, 0.0);
                f.insert((q, p), h.transpose());
                f.insert((p, q), h);
            }
        }
        f
    }

    fn from_kernel(grid: TimeGrid, modes: Vec<Mode>, f: BTreeMap<(usize, usize), DMatrix<C64>>) -> Self {
        let mut terms = BTreeMap::new();
        for ((p, q), m) in f {
            if p == q {
                terms.insert((p, p), m * C64::new(std::f64::consts::SQRT_2, 0.0));
            } else if p < q {
                terms.insert((p, q), m * C64::new(2.0, 0.0));
            }
        }
        TwoPhotonState { grid, modes, terms }
    }

    /// Applies a linear map on creation operators, `old_p† → Σ_r v[r][p] new_r†`,
    /// producing a state over `new_modes` (sorted and deduplicated by caller).
    fn map_modes(&self, new_modes: Vec<Mode>, v: &DMatrix<C64>) -> Self {
        let f = self.kernel();
        let n = self.grid.n_bins();
        let mut out: BTreeMap<(usize, usize), DMatrix<C64>> = BTreeMap::new();
        for (&(p, q), m) in &f {
            for r in 0..new_modes.len() {
                let vr = v[(r, p)];
                if vr == ZERO {
                    continue;
                }
                for s in 0..new_modes.len() {
                    let c = vr * v[(s, q)];
                    if c == ZERO {
                        continue;
                    }
                    let e = out.entry((r, s)).or_insert_with(|| DMatrix::zeros(n, n));
                    *e += m * c;
                }
            }
        }
        TwoPhotonState::from_kernel(self.grid, new_modes, out)
    }

    /// Multiplies every creation operator in `mode` by `e^{iφ}`.
    pub fn apply_phase(&self, mode: &Mode, phi: f64) -> Result<Self> {
        let p = self.index(mode)?;
        let n = self.modes.len();
        let mut v = DMatrix::identity(n, n);
        v[(p, p)] = C64::from_polar(1.0, phi);
        Ok(self.map_modes(self.modes.clone(), &v))
    }

    /// Delays every photon in `mode` by `shift` bins (positive = later).
    /// Returns the shifted state and the norm² pushed off the grid.
    pub fn delay(&self, mode: &Mode, shift: i64) -> Result<(Self, f64)> {
        let p = self.index(mode)?;
        let n = self.grid.n_bins();
        if shift.unsigned_abs() as usize >= n {
            return Err(Error::DelayTooLarge { shift, n_bins: n });
        }
        let before = self.norm_sqr();
        let mut f = self.kernel();
        let shift_rows = |m: &DMatrix<C64>| -> DMatrix<C64> {
            DMatrix::from_fn(n, m.ncols(), |j, k| {
                let src = j as i64 - shift;
                if (0..n as i64).contains(&src) {
                    m[(src as usize, k)]
                } else {
                    ZERO
                }
            })
        };
        for ((a, b), m) in f.iter_mut() {
            if *a == p {
                *m = shift_rows(m);
            }
            if *b == p {
                *m = shift_rows(&m.transpose()).transpose();
            }
        }
        let out = TwoPhotonState::from_kernel(self.grid, self.modes.clone(), f);
        let lost = before - out.norm_sqr();
        Ok((out, lost.max(0.0)))
    }
}

/// Two-input, two-output linear element, `in_p† → Σ_r u[r][p] out_r†`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamSplitterConvention {
    pub inputs: (Mode, Mode),
    pub outputs: (Mode, Mode),
    pub u: Matrix2<C64>,
}

impl BeamSplitterConvention {
    /// Real Hadamard, `a† → (c† + d†)/√2`, `b† → (c† − d†)/√2`.
    pub fn hadamard(inputs: (Mode, Mode), outputs: (Mode, Mode)) -> Self {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        BeamSplitterConvention {
            inputs,
            outputs,
            u: Matrix2::new(h, h, h, -h),
        }
    }

    pub fn unitarity_error(&self) -> f64 {
        max_abs(&(self.u.adjoint() * self.u - Matrix2::identity()))
    }
}

pub fn apply_beam_splitter(state: &TwoPhotonState, bs: &BeamSplitterConvention) -> Result<TwoPhotonState> {
    if bs.unitarity_error() > 1e-12 {
        return Err(invalid("beam_splitter", "matrix is not unitary"));
    }
    let pa = state.index(&bs.inputs.0)?;
    let pb = state.index(&bs.inputs.1)?;
    if pa == pb {
        return Err(invalid("beam_splitter", "input modes coincide"));
    }
    let mut new_modes: Vec<Mode> = state
        .modes
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != pa && i != pb)
        .map(|(_, m)| m.clone())
        .collect();
    for o in [&bs.outputs.0, &bs.outputs.1] {
        if new_modes.contains(o) {
            return Err(invalid("beam_splitter", format!("output `{o}` collides with a spectator mode")));
        }
        new_modes.push(o.clone());
    }
    new_modes.sort();
    let pos = |m: &Mode| new_modes.binary_search(m).expect("just inserted");
    let mut v = DMatrix::zeros(new_modes.len(), state.modes.len());
    for (i, m) in state.modes.iter().enumerate() {
        if i == pa || i == pb {
            let col = usize::from(i == pb);
            v[(pos(&bs.outputs.0), i)] = bs.u[(0, col)];
            v[(pos(&bs.outputs.1), i)] = bs.u[(1, col)];
        } else {
            v[(pos(m), i)] = C64::new(1.0, 0.0);
        }
    }
    Ok(state.map_modes(new_modes, &v))
}

fn delay_jta(jta: &JointAmplitude, tau: f64) -> Result<JointAmplitude> {
    let grid = *jta.grid();
    let shift = (tau / grid.dt()).round() as i64;
    if shift.unsigned_abs() as usize >= grid.n_bins() {
        return Err(Error::DelayTooLarge {
            shift,
            n_bins: grid.n_bins(),
        });
    }
    let (out, lost) = TwoPhotonState::from_jta(jta).delay(&jta.modes().1, shift)?;
    if lost > 1e-6 {
        return Err(Error::DelayLeakage { lost });
    }
    Ok(out.term(&jta.modes().0, &jta.modes().1).expect("pair kept"))
}

/// Coincidence probability behind a 50:50 beam splitter when the photon in
/// `modes.1` is delayed by `tau` (rounded to whole bins).
pub fn hom_coincidence(jta: &JointAmplitude, tau: f64) -> Result<f64> {
    if jta.modes().0 == jta.modes().1 {
        return Err(invalid("jta", "HOM needs the photons in two distinct inputs"));
    }
    let delayed = delay_jta(jta, tau)?;
    let norm = delayed.norm_sqr();
    Ok(0.5 * (1.0 - delayed.exchange_overlap() / norm))
}

/// Bunching probability from the same-mode output weights after a Hadamard
/// beam splitter; the complement of [`hom_coincidence`].
pub fn hom_bunching(jta: &JointAmplitude, tau: f64) -> Result<f64> {
    let delayed = delay_jta(jta, tau)?;
    let (c, d): (Mode, Mode) = ("hom.c".into(), "hom.d".into());
    let bs = BeamSplitterConvention::hadamard(delayed.modes().clone(), (c.clone(), d.clone()));
    let out = apply_beam_splitter(&TwoPhotonState::from_jta(&delayed), &bs)?;
    Ok((out.pair_weight(&c, &c) + out.pair_weight(&d, &d)) / out.norm_sqr())
}

/// Coincidence probability of an arbitrary two-photon state fed to `bs`.
pub fn hom_coincidence_state(state: &TwoPhotonState, bs: &BeamSplitterConvention) -> Result<f64> {
    let out = apply_beam_splitter(state, bs)?;
    Ok(out.pair_weight(&bs.outputs.0, &bs.outputs.1) / out.norm_sqr())
}

/// Single photon in a mixed temporal state, `ρ(t_j, t_k)` with `Σ ρ_jj dt = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedSinglePhoton {
    grid: TimeGrid,
    rho: DMatrix<C64>,
}

impl MixedSinglePhoton {
    pub fn new(grid: TimeGrid, rho: DMatrix<C64>) -> Result<Self> {
        let n = grid.n_bins();
        if rho.nrows() != n || rho.ncols() != n {
            return Err(Error::Shape(format!("{}x{} density on {n} bins", rho.nrows(), rho.ncols())));
        }
        let herm = max_abs(&(&rho - rho.adjoint()));
        if herm > 1e-10 {
            return Err(invalid("rho", format!("not Hermitian ({herm:.2e})")));
        }
        let tr = rho.trace().re * grid.dt();
        if (tr - 1.0).abs() > 1e-8 {
            return Err(invalid("rho", format!("trace {tr} != 1")));
        }
        Ok(MixedSinglePhoton { grid, rho })
    }

    pub fn pure(p: &Pulse) -> Result<Self> {
        let n = p.grid().n_bins();
        let a = p.amp();
        MixedSinglePhoton::new(*p.grid(), DMatrix::from_fn(n, n, |j, k| a[j] * a[k].conj()))
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn rho(&self) -> &DMatrix<C64> {
        &self.rho
    }

    /// Eigenvalues of the dimensionless operator `ρ·dt`, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.rho.scale(self.grid.dt()).symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    pub fn purity(&self) -> f64 {
        let dt = self.grid.dt();
        self.rho.iter().map(|x| x.norm_sqr()).sum::<f64>() * dt * dt
    }
}

/// `½(1 − Re Tr[ρ_a ρ_b])`.
pub fn hom_coincidence_mixed(rho_a: &MixedSinglePhoton, rho_b: &MixedSinglePhoton) -> Result<f64> {
    rho_a.grid.ensure_same(&rho_b.grid)?;
    let dt = rho_a.grid.dt();
    let tr: C64 = rho_a
        .rho
        .iter()
        .zip(rho_b.rho.transpose().iter())
        .map(|(a, b)| a * b)
        .sum();
    Ok(0.5 * (1.0 - tr.re * dt * dt))
}

/// `⟨ψ|S|ψ⟩/⟨ψ|ψ⟩` for the operator `S` swapping spatial modes `a` and `b`
/// (all other modes are left alone). For a cross term `∫A a†b†` this is the
/// temporal exchange overlap; for `a†a† ± b†b†` it is `±1`.
pub fn mode_swap_expectation(state: &TwoPhotonState, a: &Mode, b: &Mode) -> Result<f64> {
    let pa = state.index(a)?;
    let pb = state.index(b)?;
    let swap = |i: usize| if i == pa { pb } else if i == pb { pa } else { i };
    let dt2 = state.grid.dt().powi(2);
    let mut s = ZERO;
    for (&(p, q), m) in &state.terms {
        let (p2, q2) = (swap(p), swap(q));
        let key = (p2.min(q2), p2.max(q2));
        let Some(o) = state.terms.get(&key) else { continue };
        let o = if p2 <= q2 { o.clone() } else { o.transpose() };
        s += o.iter().zip(m.iter()).map(|(x, y)| x.conj() * y).sum::<C64>();
    }
    Ok(s.re * dt2 / state.norm_sqr())
}

/// How a pair `(v_k, v_l)` of single-photon modes becomes a two-photon state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairLayout {
    /// One photon in each spatial mode, `(v_k⊗v_l ± v_l⊗v_k)/√2`.
    CrossMode,
    /// Both photons in one spatial mode, `(a†a† ± b†b†)` over the
    /// symmetrized `v_k⊗v_l`.
    SameMode,
}

/// Mixture `Σ w_k w_l |ψ_kl⟩⟨ψ_kl|` over unordered pairs of orthonormal
/// single-photon modes; components are built on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct PairEnsemble {
    modes: (Mode, Mode),
    layout: PairLayout,
    symmetry: Symmetry,
    weights: Vec<f64>,
    pulses: Vec<Pulse>,
    /// Pair weight dropped by the `min_pair_weight` cut.
    pub truncated_weight: f64,
}

impl PairEnsemble {
    /// `weights` sorted descending with matching grid-normalized, mutually
    /// orthogonal `pulses`. Pairs lighter than `min_pair_weight` are dropped.
    pub fn new(
        modes: (Mode, Mode),
        layout: PairLayout,
        symmetry: Symmetry,
        weights: Vec<f64>,
        pulses: Vec<Pulse>,
        min_pair_weight: f64,
    ) -> Result<Self> {
        if weights.len() != pulses.len() {
            return Err(Error::Shape(format!("{} weights for {} pulses", weights.len(), pulses.len())));
        }
        if modes.0 == modes.1 {
            return Err(invalid("modes", "ensemble needs two distinct spatial modes"));
        }
        let mut e = PairEnsemble {
            modes,
            layout,
            symmetry,
            weights,
            pulses,
            truncated_weight: 0.0,
        };
        let all: f64 = e.all_pairs().map(|(k, l)| e.weights[k] * e.weights[l]).sum();
        let w0 = e.weights.first().copied().unwrap_or(0.0);
        let n = e.weights.iter().take_while(|&&w| w * w0 >= min_pair_weight).count();
        e.weights.truncate(n);
        e.pulses.truncate(n);
        let kept: f64 = e.pairs().map(|(k, l)| e.weights[k] * e.weights[l]).sum();
        e.truncated_weight = if all > 0.0 { (1.0 - kept / all).max(0.0) } else { 0.0 };
        Ok(e)
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn layout(&self) -> PairLayout {
        self.layout
    }

    fn all_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.weights.len();
        let strict = self.layout == PairLayout::CrossMode && self.symmetry == Symmetry::Antisymmetric;
        (0..n).flat_map(move |k| ((if strict { k + 1 } else { k })..n).map(move |l| (k, l)))
    }

    fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.all_pairs()
    }

    /// Normalized `(weight, state)` components; weights sum to one.
    pub fn components(&self) -> impl Iterator<Item = (f64, TwoPhotonState)> + '_ {
        let total: f64 = self.pairs().map(|(k, l)| self.weights[k] * self.weights[l]).sum();
        self.pairs()
            .map(move |(k, l)| (self.weights[k] * self.weights[l] / total, self.component(k, l)))
    }

    pub fn len(&self) -> usize {
        self.pairs().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The heaviest component.
    pub fn dominant(&self) -> Option<TwoPhotonState> {
        let (k, l) = self.pairs().next()?;
        Some(self.component(k, l))
    }

    /// Symmetrized (or antisymmetrized) normalized amplitude of pair `(k, l)`.
    fn pair_amp(&self, k: usize, l: usize, sign: f64) -> DMatrix<C64> {
        let (vk, vl) = (self.pulses[k].amp(), self.pulses[l].amp());
        let n = vk.len();
        if k == l {
            DMatrix::from_fn(n, n, |i, j| vk[i] * vk[j])
        } else {
            DMatrix::from_fn(n, n, |i, j| (vk[i] * vl[j] + vl[i] * vk[j] * sign) * FRAC_1_SQRT_2)
        }
    }

    fn component(&self, k: usize, l: usize) -> TwoPhotonState {
        let grid = *self.pulses[k].grid();
        let sign = self.symmetry.sign();
        let (a, b) = self.modes.clone();
        let mut st = TwoPhotonState::new(grid, [a.clone(), b.clone()]);
        match self.layout {
            PairLayout::CrossMode => {
                let m = self.pair_amp(k, l, sign);
                st.add_jta(&JointAmplitude::new(grid, (a, b), m).expect("square")).expect("declared");
            }
            PairLayout::SameMode => {
                let m = self.pair_amp(k, l, 1.0);
                let h = C64::new(FRAC_1_SQRT_2, 0.0);
                let aa = JointAmplitude::new(grid, (a.clone(), a), &m * h).expect("symmetric");
                let bb = JointAmplitude::new(grid, (b.clone(), b), &m * (h * sign)).expect("symmetric");
                st.add_jta(&aa).expect("declared");
                st.add_jta(&bb).expect("declared");
            }
        }
        st
    }

    /// Mixture HOM coincidence probability with the two modes mixed on a
    /// Hadamard beam splitter.
    pub fn hom_coincidence(&self) -> Result<f64> {
        let bs = BeamSplitterConvention::hadamard(self.modes.clone(), ("hom.c".into(), "hom.d".into()));
        let mut r = 0.0;
        if self.layout == PairLayout::CrossMode {
            let total: f64 = self.pairs().map(|(k, l)| self.weights[k] * self.weights[l]).sum();
            let sign = self.symmetry.sign();
            for (k, l) in self.pairs() {
                let m = self.pair_amp(k, l, sign);
                let norm: f64 = m.iter().map(|x| x.norm_sqr()).sum();
                let swap: f64 = (0..m.nrows())
                    .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
                    .map(|(i, j)| (m[(i, j)].conj() * m[(j, i)]).re)
                    .sum();
                r += self.weights[k] * self.weights[l] / total * 0.5 * (1.0 - swap / norm);
            }
            return Ok(r);
        }
        for (w, st) in self.components() {
            r += w * hom_coincidence_state(&st, &bs)?;
        }
        Ok(r)
    }

    /// Weight of the mixture on its declared sector of the mode swap,
    /// `Σ w (1 ± ⟨S⟩)/2`.
    pub fn declared_symmetry_weight(&self) -> Result<f64> {
        let mut s = 0.0;
        for (w, st) in self.components() {
            s += w * 0.5 * (1.0 + self.symmetry.sign() * mode_swap_expectation(&st, &self.modes.0, &self.modes.1)?);
        }
        Ok(s)
    }
}

/// Outcome of annihilating one photon at `(mode, bin)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    /// Remaining photon, normalized jointly across modes; empty when the
    /// detection has zero density.
    pub remaining: Vec<(Mode, Pulse)>,
    /// `‖a(t_k)|ψ⟩‖²`, the photon-counting density at `t_k` in `mode`.
    pub prob_density: f64,
}

pub fn detect(state: &TwoPhotonState, mode: &Mode, bin: usize) -> Result<Detection> {
    let p = state.index(mode)?;
    let n = state.grid.n_bins();
    if bin >= n {
        return Err(invalid("bin", format!("{bin} outside {n} bins")));
    }
    let dt = state.grid.dt();
    let f = state.kernel();
    let mut remaining = Vec::new();
    let mut density = 0.0;
    for (q, m) in state.modes.iter().enumerate() {
        let Some(k) = f.get(&(p, q)) else { continue };
        let amp: Vec<C64> = k.row(bin).iter().map(|x| x * 2.0).collect();
        density += amp.iter().map(|a| a.norm_sqr()).sum::<f64>() * dt;
        remaining.push((m.clone(), Pulse::new(state.grid, amp)?));
    }
    if density > 0.0 {
        let s = C64::new(1.0 / density.sqrt(), 0.0);
        remaining = remaining
            .into_iter()
            .map(|(m, pl)| {
                let a = pl.amp().iter().map(|x| x * s).collect();
                (m, Pulse::new(state.grid, a).expect("same length"))
            })
            .collect();
    } else {
        remaining.clear();
    }
    Ok(Detection {
        remaining,
        prob_density: density,
    })
}
