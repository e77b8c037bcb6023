//! Exact brute-force Fock-space simulator over (spatial mode × time bin).
//!
//! Sites are indexed `mode_index · n_bins + bin`; bin operators are the
//! normalized `√dt·a(t_k)`. The basis holds every occupation pattern with at
//! most `cutoff` photons, sorted lexicographically.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::optics::TwoPhotonState;
use crate::temporal::{Mode, C64, ZERO};

/// Size caps of the oracle regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_bins: usize,
    pub max_cutoff: usize,
    pub max_states: usize,
}

impl Limits {
    pub const DEFAULT: Limits = Limits {
        max_bins: 6,
        max_cutoff: 4,
        max_states: 10_000,
    };
}

impl Default for Limits {
    fn default() -> Self {
        Limits::DEFAULT
    }
}

pub type Occupation = Vec<u8>;

#[derive(Debug, PartialEq)]
pub struct FockBasis {
    modes: Vec<Mode>,
    n_bins: usize,
    cutoff: usize,
    states: Vec<Occupation>,
    index: HashMap<Occupation, usize>,
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

impl FockBasis {
    pub fn new(modes: Vec<Mode>, n_bins: usize, cutoff: usize) -> Result<Arc<Self>> {
        FockBasis::with_limits(modes, n_bins, cutoff, Limits::DEFAULT)
    }

    pub fn with_limits(modes: Vec<Mode>, n_bins: usize, cutoff: usize, limits: Limits) -> Result<Arc<Self>> {
        if modes.is_empty() || n_bins == 0 {
            return Err(invalid("basis", "needs at least one mode and one bin"));
        }
        let mut seen = modes.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != modes.len() {
            return Err(invalid("modes", "duplicate mode label"));
        }
        if n_bins > limits.max_bins {
            return Err(Error::CapExceeded(format!("{n_bins} bins > {}", limits.max_bins)));
        }
        if cutoff > limits.max_cutoff {
            return Err(Error::CapExceeded(format!("cutoff {cutoff} > {}", limits.max_cutoff)));
        }
        let sites = modes.len() * n_bins;
        let size = binomial(sites + cutoff, cutoff);
        if size > limits.max_states {
            return Err(Error::CapExceeded(format!("{size} basis states > {}", limits.max_states)));
        }
        let mut states = Vec::with_capacity(size);
        let mut occ = vec![0u8; sites];
        enumerate(&mut occ, 0, cutoff, &mut states);
        states.sort();
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(Arc::new(FockBasis {
            modes,
            n_bins,
            cutoff,
            states,
            index,
        }))
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn n_sites(&self) -> usize {
        self.modes.len() * self.n_bins
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Occupation] {
        &self.states
    }

    pub fn index_of(&self, occ: &[u8]) -> Option<usize> {
        self.index.get(occ).copied()
    }

    pub fn mode_index(&self, mode: &Mode) -> Result<usize> {
        self.modes
            .iter()
            .position(|m| m == mode)
            .ok_or_else(|| Error::UnknownMode(mode.to_string()))
    }

    pub fn site(&self, mode: &Mode, bin: usize) -> Result<usize> {
        if bin >= self.n_bins {
            return Err(invalid("bin", format!("{bin} outside {} bins", self.n_bins)));
        }
        Ok(self.mode_index(mode)? * self.n_bins + bin)
    }
}

fn enumerate(occ: &mut Vec<u8>, site: usize, left: usize, out: &mut Vec<Occupation>) {
    if site == occ.len() {
        out.push(occ.clone());
        return;
    }
    for n in 0..=left {
        occ[site] = n as u8;
        enumerate(occ, site + 1, left - n, out);
    }
    occ[site] = 0;
}

fn factorial(n: u8) -> f64 {
    (1..=n as u64).map(|k| k as f64).product()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    basis: Arc<FockBasis>,
    amp: Vec<C64>,
}

/// Sparse intermediate used while expanding products of creation operators;
/// ordered so that floating-point accumulation is reproducible.
type Sparse = BTreeMap<Occupation, C64>;

impl FockVector {
    pub fn zeros(basis: &Arc<FockBasis>) -> Self {
        FockVector {
            basis: basis.clone(),
            amp: vec![ZERO; basis.len()],
        }
    }

    pub fn vacuum(basis: &Arc<FockBasis>) -> Self {
        let mut v = FockVector::zeros(basis);
        let vac = vec![0u8; basis.n_sites()];
        v.amp[basis.index_of(&vac).expect("vacuum enumerated")] = C64::new(1.0, 0.0);
        v
    }

    pub fn from_amplitudes(basis: &Arc<FockBasis>, amp: Vec<C64>) -> Result<Self> {
        if amp.len() != basis.len() {
            return Err(Error::Shape(format!("{} amplitudes for {} states", amp.len(), basis.len())));
        }
        Ok(FockVector {
            basis: basis.clone(),
            amp,
        })
    }

    /// Embeds a two-photon state whose modes all belong to the basis and
    /// whose grid has `basis.n_bins()` bins.
    pub fn from_two_photon(basis: &Arc<FockBasis>, state: &TwoPhotonState) -> Result<Self> {
        let n = basis.n_bins();
        if state.grid().n_bins() != n {
            return Err(Error::Shape(format!("{}-bin state in a {n}-bin basis", state.grid().n_bins())));
        }
        if basis.cutoff() < 2 {
            return Err(Error::CapExceeded("two photons need cutoff >= 2".into()));
        }
        let mut v = FockVector::zeros(basis);
        let modes = state.modes();
        for (ia, a) in modes.iter().enumerate() {
            for b in &modes[ia..] {
                let sa = basis.site(a, 0)?;
                let sb = basis.site(b, 0)?;
                for j in 0..n {
                    let k0 = if a == b { j } else { 0 };
                    for k in k0..n {
                        let c = state.pair_amplitude(a, j, b, k);
                        if c == ZERO {
                            continue;
                        }
                        let mut occ = vec![0u8; basis.n_sites()];
                        occ[sa + j] += 1;
                        occ[sb + k] += 1;
                        v.amp[basis.index_of(&occ).expect("two-photon state")] += c;
                    }
                }
            }
        }
        Ok(v)
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amp
    }

    pub fn amplitude(&self, occ: &[u8]) -> C64 {
        self.basis.index_of(occ).map_or(ZERO, |i| self.amp[i])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n > 0.0) {
            return Err(invalid("fock vector", "zero norm"));
        }
        let s = 1.0 / n.sqrt();
        self.amp.iter_mut().for_each(|a| *a *= s);
        Ok(self)
    }

    pub fn inner(&self, other: &FockVector) -> Result<C64> {
        self.same_basis(other)?;
        Ok(self.amp.iter().zip(&other.amp).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn add(&self, other: &FockVector) -> Result<FockVector> {
        self.same_basis(other)?;
        let amp = self.amp.iter().zip(&other.amp).map(|(a, b)| a + b).collect();
        Ok(FockVector {
            basis: self.basis.clone(),
            amp,
        })
    }

    pub fn scaled(mut self, c: C64) -> Self {
        self.amp.iter_mut().for_each(|a| *a *= c);
        self
    }

    fn same_basis(&self, other: &FockVector) -> Result<()> {
        if Arc::ptr_eq(&self.basis, &other.basis) || self.basis == other.basis {
            Ok(())
        } else {
            Err(Error::Shape("different Fock bases".into()))
        }
    }

    fn to_sparse(&self) -> Sparse {
        self.basis
            .states
            .iter()
            .zip(&self.amp)
            .filter(|(_, a)| **a != ZERO)
            .map(|(s, a)| (s.clone(), *a))
            .collect()
    }

    /// Writes a sparse vector back, returning the norm² that fell outside
    /// the cutoff.
    fn from_sparse(basis: &Arc<FockBasis>, sparse: Sparse) -> (Self, f64) {
        let mut v = FockVector::zeros(basis);
        let mut lost = 0.0;
        for (occ, a) in sparse {
            match basis.index_of(&occ) {
                Some(i) => v.amp[i] += a,
                None => lost += a.norm_sqr(),
            }
        }
        (v, lost)
    }

    /// Total photon number of every basis state with nonzero amplitude.
    pub fn photon_numbers(&self) -> Vec<usize> {
        let mut ns: Vec<usize> = self
            .basis
            .states
            .iter()
            .zip(&self.amp)
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(s, _)| s.iter().map(|&n| n as usize).sum())
            .collect();
        ns.sort_unstable();
        ns.dedup();
        ns
    }

    /// Distribution of the photon count summed over all bins of `mode`.
    pub fn mode_count_distribution(&self, mode: &Mode) -> Result<Vec<f64>> {
        let m = self.basis.mode_index(mode)?;
        let nb = self.basis.n_bins;
        let mut p = vec![0.0; self.basis.cutoff + 1];
        for (s, a) in self.basis.states.iter().zip(&self.amp) {
            let n: usize = s[m * nb..(m + 1) * nb].iter().map(|&x| x as usize).sum();
            p[n] += a.norm_sqr();
        }
        Ok(p)
    }

    /// Mean photon count summed over all bins of `mode`.
    pub fn mean_count(&self, mode: &Mode) -> Result<f64> {
        let p = self.mode_count_distribution(mode)?;
        Ok(p.iter().enumerate().map(|(n, w)| n as f64 * w).sum::<f64>() / self.norm_sqr())
    }
}

fn create(sparse: &Sparse, coeffs: &[(usize, C64)]) -> Sparse {
    let mut out = Sparse::new();
    for (occ, a) in sparse {
        for &(site, c) in coeffs {
            let mut o = occ.clone();
            o[site] += 1;
            let f = (o[site] as f64).sqrt();
            *out.entry(o).or_insert(ZERO) += a * c * f;
        }
    }
    out
}

fn annihilate(sparse: &Sparse, coeffs: &[(usize, C64)]) -> Sparse {
    let mut out = Sparse::new();
    for (occ, a) in sparse {
        for &(site, c) in coeffs {
            if occ[site] == 0 {
                continue;
            }
            let f = (occ[site] as f64).sqrt();
            let mut o = occ.clone();
            o[site] -= 1;
            *out.entry(o).or_insert(ZERO) += a * c * f;
        }
    }
    out
}

fn nonzero(coeffs: &[C64]) -> Vec<(usize, C64)> {
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != ZERO)
        .map(|(i, c)| (i, *c))
        .collect()
}

/// Second-quantized lift of a single-particle unitary `u` (site × site):
/// every creation operator `a_i† → Σ_r u[r][i] a_r†`.
pub fn apply_linear_unitary(v: &FockVector, u: &DMatrix<C64>) -> Result<FockVector> {
    let s = v.basis.n_sites();
    if u.nrows() != s || u.ncols() != s {
        return Err(Error::Shape(format!("{}x{} unitary on {s} sites", u.nrows(), u.ncols())));
    }
    let err = crate::temporal::max_abs(&(u.adjoint() * u - DMatrix::identity(s, s)));
    if err > 1e-12 {
        return Err(invalid("u", format!("not unitary ({err:.2e})")));
    }
    let columns: Vec<Vec<(usize, C64)>> = (0..s)
        .map(|i| nonzero(&u.column(i).iter().copied().collect::<Vec<_>>()))
        .collect();
    let mut acc = Sparse::new();
    for (occ, a) in v.basis.states.iter().zip(&v.amp) {
        if *a == ZERO {
            continue;
        }
        let norm: f64 = occ.iter().map(|&n| factorial(n)).product();
        let mut part: Sparse = BTreeMap::from([(vec![0u8; s], a / norm.sqrt())]);
        for (site, &n) in occ.iter().enumerate() {
            for _ in 0..n {
                part = create(&part, &columns[site]);
            }
        }
        for (o, c) in part {
            *acc.entry(o).or_insert(ZERO) += c;
        }
    }
    let (out, lost) = FockVector::from_sparse(&v.basis, acc);
    debug_assert!(lost == 0.0, "photon number is conserved");
    Ok(out)
}

/// `Σ_i c_i a_i† |v⟩`; returns the norm² lost to the cutoff.
pub fn apply_creation(v: &FockVector, coeffs: &[C64]) -> Result<(FockVector, f64)> {
    check_sites(v, coeffs)?;
    Ok(FockVector::from_sparse(&v.basis, create(&v.to_sparse(), &nonzero(coeffs))))
}

/// `Σ_i c_i a_i |v⟩`.
pub fn apply_annihilation(v: &FockVector, coeffs: &[C64]) -> Result<FockVector> {
    check_sites(v, coeffs)?;
    Ok(FockVector::from_sparse(&v.basis, annihilate(&v.to_sparse(), &nonzero(coeffs))).0)
}

/// `Σ_{ij} K_ij a_i† a_j† |v⟩`; returns the norm² lost to the cutoff.
pub fn apply_pair_creation(v: &FockVector, kernel: &DMatrix<C64>) -> Result<(FockVector, f64)> {
    let s = v.basis.n_sites();
    if kernel.nrows() != s || kernel.ncols() != s {
        return Err(Error::Shape(format!("{}x{} kernel on {s} sites", kernel.nrows(), kernel.ncols())));
    }
    let mut acc = Sparse::new();
    let src = v.to_sparse();
    for j in 0..s {
        let col = nonzero(&kernel.column(j).iter().copied().collect::<Vec<_>>());
        if col.is_empty() {
            continue;
        }
        let once = create(&src, &[(j, C64::new(1.0, 0.0))]);
        for (o, c) in create(&once, &col) {
            *acc.entry(o).or_insert(ZERO) += c;
        }
    }
    Ok(FockVector::from_sparse(&v.basis, acc))
}

fn check_sites(v: &FockVector, coeffs: &[C64]) -> Result<()> {
    if coeffs.len() != v.basis.n_sites() {
        return Err(Error::Shape(format!("{} coefficients for {} sites", coeffs.len(), v.basis.n_sites())));
    }
    Ok(())
}

/// Largest truncated-tail weight `coherent_inject` accepts.
pub const COHERENT_TAIL_THRESHOLD: f64 = 1e-4;

/// Displaces `v` by the site amplitudes `alpha`,
/// `D(α) = e^{−|α|²/2} e^{Σα_i a_i†} e^{−Σα_i* a_i}`, within the cutoff.
/// Returns the displaced vector and the truncated norm².
pub fn coherent_inject(v: &FockVector, alpha: &[C64]) -> Result<(FockVector, f64)> {
    let (out, tail) = coherent_inject_truncated(v, alpha)?;
    if tail > COHERENT_TAIL_THRESHOLD {
        return Err(Error::Truncation {
            tail,
            threshold: COHERENT_TAIL_THRESHOLD,
        });
    }
    Ok((out, tail))
}

/// [`coherent_inject`] without the tail guard. Amplitudes in every kept
/// total-photon-number sector are exact; the sectors above the cutoff are
/// dropped and their weight returned.
pub fn coherent_inject_truncated(v: &FockVector, alpha: &[C64]) -> Result<(FockVector, f64)> {
    check_sites(v, alpha)?;
    let plus = nonzero(alpha);
    if plus.is_empty() {
        return Ok((v.clone(), 0.0));
    }
    let minus: Vec<(usize, C64)> = plus.iter().map(|&(i, a)| (i, -a.conj())).collect();
    let total: f64 = alpha.iter().map(|a| a.norm_sqr()).sum();

    let mut acc = v.to_sparse();
    let mut term = acc.clone();
    for k in 1..=v.basis.cutoff {
        term = annihilate(&term, &minus);
        let inv = 1.0 / k as f64;
        term.values_mut().for_each(|c| *c *= inv);
        for (o, c) in &term {
            *acc.entry(o.clone()).or_insert(ZERO) += c;
        }
    }

    let mut out = acc.clone();
    let mut term = acc;
    for k in 1..=v.basis.cutoff {
        let inv = 1.0 / k as f64;
        term = create(&term, &plus);
        let total_photons = |o: &Occupation| o.iter().map(|&n| n as usize).sum::<usize>();
        term.retain(|o, _| total_photons(o) <= v.basis.cutoff);
        term.values_mut().for_each(|c| *c *= inv);
        for (o, c) in &term {
            *out.entry(o.clone()).or_insert(ZERO) += c;
        }
    }
    let scale = (-total / 2.0).exp();
    out.values_mut().for_each(|c| *c *= scale);
    let (out, _) = FockVector::from_sparse(&v.basis, out);
    let tail = (v.norm_sqr() - out.norm_sqr()).max(0.0);
    Ok((out, tail))
}

/// Time-resolved or bucket detection record used for conditioning.
#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    /// Exactly `count` photons at `(mode, bin)`.
    Site { mode: Mode, bin: usize, count: u8 },
    /// Exactly `count` photons summed over all bins of `mode`.
    ModeTotal { mode: Mode, count: u8 },
    /// Photon count in `mode` (all bins) has the given parity.
    ModeParity { mode: Mode, odd: bool },
    /// Exactly `count` photons in the whole register.
    Total(u8),
}

#[derive(Debug, Clone)]
pub struct Conditioned {
    pub state: FockVector,
    pub probability: f64,
    pub empty: bool,
}

/// Projects onto the basis states satisfying every constraint and
/// renormalizes; `probability` is relative to the input norm².
pub fn condition_on_pattern(v: &FockVector, pattern: &[Constraint]) -> Result<Conditioned> {
    let nb = v.basis.n_bins;
    let mut checks: Vec<Box<dyn Fn(&[u8]) -> bool>> = Vec::new();
    for c in pattern {
        match c {
            Constraint::Site { mode, bin, count } => {
                let s = v.basis.site(mode, *bin)?;
                let count = *count;
                checks.push(Box::new(move |o| o[s] == count));
            }
            Constraint::ModeTotal { mode, count } => {
                let m = v.basis.mode_index(mode)?;
                let count = *count as usize;
                checks.push(Box::new(move |o| {
                    o[m * nb..(m + 1) * nb].iter().map(|&x| x as usize).sum::<usize>() == count
                }));
            }
            Constraint::ModeParity { mode, odd } => {
                let m = v.basis.mode_index(mode)?;
                let odd = *odd;
                checks.push(Box::new(move |o| {
                    (o[m * nb..(m + 1) * nb].iter().map(|&x| x as usize).sum::<usize>() % 2 == 1) == odd
                }));
            }
            Constraint::Total(n) => {
                let n = *n as usize;
                checks.push(Box::new(move |o| o.iter().map(|&x| x as usize).sum::<usize>() == n));
            }
        }
    }
    condition_where(v, |o| checks.iter().all(|f| f(o)))
}

pub fn condition_where(v: &FockVector, keep: impl Fn(&[u8]) -> bool) -> Result<Conditioned> {
    let total = v.norm_sqr();
    let mut out = FockVector::zeros(&v.basis);
    for (i, s) in v.basis.states.iter().enumerate() {
        if keep(s) {
            out.amp[i] = v.amp[i];
        }
    }
    let p = out.norm_sqr();
    let probability = if total > 0.0 { p / total } else { 0.0 };
    if p == 0.0 {
        return Ok(Conditioned {
            state: out,
            probability: 0.0,
            empty: true,
        });
    }
    Ok(Conditioned {
        state: out.normalized()?,
        probability,
        empty: false,
    })
}

/// Reduced density matrix over the sites of `keep` (tracing the rest).
/// Returns the kept occupation patterns (sorted) and `ρ`.
pub fn reduced_density(v: &FockVector, keep: &[Mode]) -> Result<(Vec<Occupation>, DMatrix<C64>)> {
    let nb = v.basis.n_bins;
    let kept_sites: Vec<usize> = keep
        .iter()
        .map(|m| v.basis.mode_index(m).map(|i| (i * nb..(i + 1) * nb).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?
        .concat();
    let split = |o: &[u8]| -> (Occupation, Occupation) {
        let k: Occupation = kept_sites.iter().map(|&s| o[s]).collect();
        let r: Occupation = o
            .iter()
            .enumerate()
            .filter(|(i, _)| !kept_sites.contains(i))
            .map(|(_, &n)| n)
            .collect();
        (k, r)
    };
    let mut kept: Vec<Occupation> = Vec::new();
    let mut groups: BTreeMap<Occupation, Vec<(Occupation, C64)>> = BTreeMap::new();
    for (s, a) in v.basis.states.iter().zip(&v.amp) {
        if *a == ZERO {
            continue;
        }
        let (k, r) = split(s);
        kept.push(k.clone());
        groups.entry(r).or_default().push((k, *a));
    }
    kept.sort();
    kept.dedup();
    let pos: HashMap<&Occupation, usize> = kept.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let mut rho = DMatrix::zeros(kept.len(), kept.len());
    for members in groups.values() {
        for (ki, ai) in members {
            for (kj, aj) in members {
                rho[(pos[ki], pos[kj])] += ai * aj.conj();
            }
        }
    }
    Ok((kept, rho))
}

/// Ideal single-photon extraction by a Λ emitter watching `from`: in every
/// basis state the first photon of the earliest occupied bin of `from` is
/// moved to the same bin of `to` (which must be empty). Returns the
/// extracted and the untouched (no photon in `from`) branches.
pub fn extract_first_photon(v: &FockVector, from: &Mode, to: &Mode) -> Result<(FockVector, FockVector)> {
    let nb = v.basis.n_bins;
    let f = v.basis.mode_index(from)? * nb;
    let t = v.basis.mode_index(to)? * nb;
    let mut hit = FockVector::zeros(&v.basis);
    let mut miss = FockVector::zeros(&v.basis);
    for (s, a) in v.basis.states.iter().zip(&v.amp) {
        if *a == ZERO {
            continue;
        }
        match (0..nb).find(|&b| s[f + b] > 0) {
            None => miss.amp[v.basis.index_of(s).expect("own state")] += a,
            Some(b) => {
                if s[t..t + nb].iter().any(|&n| n > 0) {
                    return Err(invalid("to", format!("extraction target `{to}` is already occupied")));
                }
                let mut o = s.clone();
                o[f + b] -= 1;
                o[t + b] += 1;
                hit.amp[v.basis.index_of(&o).expect("same photon number")] += a;
            }
        }
    }
    Ok((hit, miss))
}

/// Single-particle unitary on the basis sites that mixes two modes bin by
/// bin, `in_p† → Σ_r u[r][p] out_r†`, relabeling them in place (the first
/// input's sites become the first output, and so on).
pub fn mode_mixer(basis: &FockBasis, a: &Mode, b: &Mode, u: &nalgebra::Matrix2<C64>) -> Result<DMatrix<C64>> {
    let s = basis.n_sites();
    let nb = basis.n_bins;
    let ia = basis.mode_index(a)? * nb;
    let ib = basis.mode_index(b)? * nb;
    let mut m = DMatrix::identity(s, s);
    for k in 0..nb {
        m[(ia + k, ia + k)] = u[(0, 0)];
        m[(ib + k, ia + k)] = u[(1, 0)];
        m[(ia + k, ib + k)] = u[(0, 1)];
        m[(ib + k, ib + k)] = u[(1, 1)];
    }
    Ok(m)
}

#[derive(Serialize)]
struct GoldenEntry<'a>(&'a [u8], f64, f64);

/// Golden dump: JSON array of `[occupation, re, im]` in basis order,
/// skipping amplitudes below `1e-15`.
pub fn golden_json(v: &FockVector) -> String {
    let entries: Vec<GoldenEntry> = v
        .basis
        .states
        .iter()
        .zip(&v.amp)
        .filter(|(_, a)| a.norm() > 1e-15)
        .map(|(s, a)| GoldenEntry(s, a.re, a.im))
        .collect();
    serde_json::to_string_pretty(&entries).expect("plain data serializes")
}
