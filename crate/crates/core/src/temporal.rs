//! Discretized time axis, single-photon envelopes and two-photon joint
//! temporal amplitudes.
//!
//! All integrals are midpoint sums on a uniform grid: a function `g(t)` is
//! sampled at bin centers and `∫ g dt ≈ Σ_k g(t_k)·dt`.

use std::fmt;

use log::warn;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);

/// Largest elementwise modulus.
pub fn max_abs<R: nalgebra::Dim, C: nalgebra::Dim, S: nalgebra::RawStorage<C64, R, C>>(
    m: &nalgebra::Matrix<C64, R, C, S>,
) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Uniform grid of `n_bins` bins covering `[t_start, t_end)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_start: f64,
    t_end: f64,
    n_bins: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_bins: usize) -> Result<Self> {
        if n_bins < 2 {
            return Err(invalid("n_bins", format!("need at least 2 bins, got {n_bins}")));
        }
        if !(t_end > t_start) || !t_start.is_finite() || !t_end.is_finite() {
            return Err(invalid("t_end", format!("empty or non-finite span [{t_start}, {t_end})")));
        }
        Ok(TimeGrid {
            t_start,
            t_end,
            n_bins,
        })
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn dt(&self) -> f64 {
        (self.t_end - self.t_start) / self.n_bins as f64
    }

    /// Center of bin `k`.
    pub fn t(&self, k: usize) -> f64 {
        self.t_start + (k as f64 + 0.5) * self.dt()
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_bins).map(move |k| self.t(k))
    }

    pub(crate) fn ensure_same(&self, other: &TimeGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// Spatial mode label (a waveguide, a beam-splitter port, ...).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mode(pub String);

impl Mode {
    pub fn new(label: impl Into<String>) -> Self {
        Mode(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Mode {
    fn from(s: &str) -> Self {
        Mode(s.to_string())
    }
}

/// Complex single-photon envelope sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Pulse {
    grid: TimeGrid,
    amp: Vec<C64>,
}

impl Pulse {
    pub fn new(grid: TimeGrid, amp: Vec<C64>) -> Result<Self> {
        if amp.len() != grid.n_bins() {
            return Err(Error::Shape(format!(
                "pulse has {} samples on a {}-bin grid",
                amp.len(),
                grid.n_bins()
            )));
        }
        Ok(Pulse { grid, amp })
    }

    /// Samples `f` at the bin centers (not normalized).
    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> C64) -> Self {
        let amp = grid.centers().map(f).collect();
        Pulse { grid, amp }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn amp(&self) -> &[C64] {
        &self.amp
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dt()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n > 0.0) {
            return Err(invalid("pulse", "zero norm"));
        }
        let s = 1.0 / n.sqrt();
        self.amp.iter_mut().for_each(|a| *a *= s);
        Ok(self)
    }

    /// Tail weight `U_k = Σ_{j>k} |f_j|² dt`, the weight strictly after bin `k`.
    pub fn tail_weights(&self) -> Vec<f64> {
        let dt = self.grid.dt();
        let mut out = vec![0.0; self.amp.len()];
        let mut acc = 0.0;
        for k in (0..self.amp.len()).rev() {
            out[k] = acc;
            acc += self.amp[k].norm_sqr() * dt;
        }
        out
    }
}

/// Normalized Gaussian envelope with intensity standard deviation `sigma`,
/// `f(t) ∝ exp(−(t − t0)²/(4σ²))`.
pub fn make_gaussian_pulse(grid: TimeGrid, t0: f64, sigma: f64) -> Result<Pulse> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(invalid("sigma", format!("must be positive, got {sigma}")));
    }
    if t0 - 4.0 * sigma < grid.t_start() || t0 + 4.0 * sigma > grid.t_end() {
        warn!("gaussian pulse at t0={t0}, sigma={sigma} is clipped by the grid");
    }
    Pulse::from_fn(grid, |t| {
        let x = t - t0;
        C64::new((-x * x / (4.0 * sigma * sigma)).exp(), 0.0)
    })
    .normalized()
}

/// `⟨f|g⟩ = Σ_k conj(f_k) g_k dt`.
pub fn overlap(f: &Pulse, g: &Pulse) -> Result<C64> {
    f.grid.ensure_same(&g.grid)?;
    let s: C64 = f.amp.iter().zip(&g.amp).map(|(a, b)| a.conj() * b).sum();
    Ok(s * f.grid.dt())
}

/// Two-photon amplitude `Φ(t1, t2)`: row index is the photon in
/// `modes.0`, column index the photon in `modes.1`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointAmplitude {
    grid: TimeGrid,
    modes: (Mode, Mode),
    amp: DMatrix<C64>,
}

impl JointAmplitude {
    pub fn new(grid: TimeGrid, modes: (Mode, Mode), amp: DMatrix<C64>) -> Result<Self> {
        let n = grid.n_bins();
        if amp.nrows() != n || amp.ncols() != n {
            return Err(Error::Shape(format!(
                "{}x{} amplitude on a {n}-bin grid",
                amp.nrows(),
                amp.ncols()
            )));
        }
        if modes.0 == modes.1 {
            let asym = max_abs(&(&amp - amp.transpose()));
            if asym > 1e-10 {
                return Err(Error::Symmetry(format!(
                    "same-mode amplitude in `{}` is not transpose-symmetric ({asym:.2e})",
                    modes.0
                )));
            }
        }
        Ok(JointAmplitude { grid, modes, amp })
    }

    pub fn from_fn(grid: TimeGrid, modes: (Mode, Mode), f: impl Fn(f64, f64) -> C64) -> Result<Self> {
        let n = grid.n_bins();
        let amp = DMatrix::from_fn(n, n, |j, k| f(grid.t(j), grid.t(k)));
        JointAmplitude::new(grid, modes, amp)
    }

    /// Outer product `f(t1)·g(t2)`.
    pub fn product(f: &Pulse, g: &Pulse, modes: (Mode, Mode)) -> Result<Self> {
        f.grid.ensure_same(&g.grid)?;
        let n = f.grid.n_bins();
        let amp = DMatrix::from_fn(n, n, |j, k| f.amp[j] * g.amp[k]);
        JointAmplitude::new(f.grid, modes, amp)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn modes(&self) -> &(Mode, Mode) {
        &self.modes
    }

    pub fn amp(&self) -> &DMatrix<C64> {
        &self.amp
    }

    pub fn into_amp(self) -> DMatrix<C64> {
        self.amp
    }

    pub fn norm_sqr(&self) -> f64 {
        let dt = self.grid.dt();
        self.amp.norm_squared() * dt * dt
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n > 0.0) {
            return Err(invalid("amplitude", "zero norm"));
        }
        self.amp /= C64::new(n.sqrt(), 0.0);
        Ok(self)
    }

    pub fn with_modes(mut self, modes: (Mode, Mode)) -> Result<Self> {
        if modes.0 == modes.1 && self.modes.0 != self.modes.1 {
            return JointAmplitude::new(self.grid, modes, self.amp);
        }
        self.modes = modes;
        Ok(self)
    }

    pub fn scaled(mut self, c: C64) -> Self {
        self.amp *= c;
        self
    }

    /// Exchange of the two temporal arguments, `Φ(t1,t2) → Φ(t2,t1)`.
    pub fn exchanged(&self) -> Self {
        JointAmplitude {
            grid: self.grid,
            modes: self.modes.clone(),
            amp: self.amp.transpose(),
        }
    }

    /// `Σ Φ(t1,t2)·conj(Φ(t2,t1)) dt²`, the overlap with the exchanged
    /// amplitude; real for any input.
    pub fn exchange_overlap(&self) -> f64 {
        let dt = self.grid.dt();
        let s: C64 = self
            .amp
            .iter()
            .zip(self.amp.transpose().iter())
            .map(|(a, b)| a * b.conj())
            .sum();
        s.re * dt * dt
    }
}

/// Exchange-symmetric and antisymmetric parts of a two-photon amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryDecomposition {
    pub sym: JointAmplitude,
    pub antisym: JointAmplitude,
    pub weight_sym: f64,
    pub weight_antisym: f64,
}

const EMPTY_WEIGHT: f64 = 1e-14;

pub fn symmetry_decompose(jta: &JointAmplitude) -> Result<SymmetryDecomposition> {
    if jta.modes.0 == jta.modes.1 {
        return Err(Error::Symmetry(format!(
            "both photons in `{}`; the exchange split is trivial",
            jta.modes.0
        )));
    }
    let dt2 = jta.grid.dt().powi(2);
    let t = jta.amp.transpose();
    let half = C64::new(0.5, 0.0);
    let part = |m: DMatrix<C64>| -> (JointAmplitude, f64) {
        let m = m * half;
        let w = m.norm_squared() * dt2;
        let amp = if w < EMPTY_WEIGHT {
            DMatrix::zeros(m.nrows(), m.ncols())
        } else {
            m / C64::new(w.sqrt(), 0.0)
        };
        let w = if w < EMPTY_WEIGHT { 0.0 } else { w };
        (
            JointAmplitude {
                grid: jta.grid,
                modes: jta.modes.clone(),
                amp,
            },
            w,
        )
    };
    let (sym, weight_sym) = part(&jta.amp + &t);
    let (antisym, weight_antisym) = part(&jta.amp - &t);
    Ok(SymmetryDecomposition {
        sym,
        antisym,
        weight_sym,
        weight_antisym,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtAnalysis {
    /// Singular values of `A·dt`, descending.
    pub coeffs: Vec<f64>,
    pub purity: f64,
    pub schmidt_number: f64,
}

pub fn schmidt_analysis(jta: &JointAmplitude) -> SchmidtAnalysis {
    let scaled = jta.amp.scale(jta.grid.dt());
    let mut coeffs: Vec<f64> = scaled.singular_values().iter().copied().collect();
    coeffs.sort_by(|a, b| b.total_cmp(a));
    let purity: f64 = coeffs.iter().map(|s| s.powi(4)).sum();
    SchmidtAnalysis {
        coeffs,
        purity,
        schmidt_number: 1.0 / purity,
    }
}

/// Schmidt modes of a normalized amplitude: `A·dt = Σ s_k u_k v_kᵀ` with
/// `u_k`, `v_k` returned as grid-normalized pulses (`Σ|u|²dt = 1`).
/// Modes with `s_k² < min_weight` are dropped.
pub fn schmidt_modes(jta: &JointAmplitude, min_weight: f64) -> (Vec<f64>, Vec<Pulse>, Vec<Pulse>) {
    let dt = jta.grid.dt();
    let svd = jta.amp.scale(dt).svd(true, true);
    let u = svd.u.expect("requested u");
    let v_t = svd.v_t.expect("requested v_t");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let scale = 1.0 / dt.sqrt();
    let mut coeffs = Vec::new();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for i in order {
        let s = svd.singular_values[i];
        if s * s < min_weight {
            continue;
        }
        coeffs.push(s);
        left.push(Pulse {
            grid: jta.grid,
            amp: u.column(i).iter().map(|x| x * scale).collect(),
        });
        right.push(Pulse {
            grid: jta.grid,
            amp: v_t.row(i).iter().map(|x| x * scale).collect(),
        });
    }
    (coeffs, left, right)
}

/// Purity of photon 1's reduced state, `Tr[ρ₁²]` with `ρ₁ = (A dt)(A dt)†`,
/// computed by direct quadrature rather than through singular values.
pub fn reduced_purity_quadrature(jta: &JointAmplitude) -> f64 {
    let a = jta.amp.scale(jta.grid.dt());
    let rho = &a * a.adjoint();
    rho.norm_squared()
}

/// Exchange symmetry label `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symmetry {
    Symmetric,
    Antisymmetric,
}

impl Symmetry {
    pub fn m(self) -> u8 {
        match self {
            Symmetry::Symmetric => 0,
            Symmetry::Antisymmetric => 1,
        }
    }

    /// `(−1)^m`.
    pub fn sign(self) -> f64 {
        match self {
            Symmetry::Symmetric => 1.0,
            Symmetry::Antisymmetric => -1.0,
        }
    }

    pub fn from_m(m: u8) -> Self {
        if m % 2 == 0 {
            Symmetry::Symmetric
        } else {
            Symmetry::Antisymmetric
        }
    }
}
