//! Exact bin-level model of the MZI eraser.
//!
//! Each arm carries a coherent state with bin amplitudes
//! `β_j = √(n̄/2) f_j √dt`. The emitter removes the first photon of the
//! earliest occupied bin, so given extraction in bin `e` an arm is left in
//! `⊗_{j<e}|0⟩ ⊗ χ(β_e) ⊗ ⊗_{j>e}|β_j⟩` (times the vacuum weight of the
//! earlier bins), where `χ(β) = e^{−|β|²/2} Σ_{n≥1} βⁿ/√n! |n−1⟩`.
//!
//! Observables of the transmitted light after the output beam splitter are
//! products of per-bin two-mode Fock overlaps. The generating functions
//! `D(x) = Σ_{e,e'} ⟨T_e T_e'| x^{N_d} |T_e T_e'⟩` and its arm-exchanged
//! partner `E(x)` give every parity, loss and HOM quantity; a fugacity
//! `z^{N}` on the total photon number resolves photon-number sectors.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::{ExtractionModel, Parity};
use crate::error::{invalid, Result};
use crate::optics::MixedSinglePhoton;
use crate::temporal::{C64, ZERO};

const TAIL: f64 = 1e-18;
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Per-bin single-arm state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    /// Before the extraction bin: vacuum.
    V = 0,
    /// The extraction bin: one photon removed.
    X = 1,
    /// After the extraction bin: untouched coherent state.
    C = 2,
}
use Slot::*;

/// Value and `x`-derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Dual {
    v: C64,
    d: C64,
}

impl Dual {
    const ONE: Dual = Dual { v: ONE, d: ZERO };
    const ZERO: Dual = Dual { v: ZERO, d: ZERO };
}

impl std::ops::Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual {
            v: self.v * o.v,
            d: self.v * o.d + self.d * o.v,
        }
    }
}

impl std::ops::Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual {
            v: self.v + o.v,
            d: self.d + o.d,
        }
    }
}

impl std::ops::AddAssign for Dual {
    fn add_assign(&mut self, o: Dual) {
        *self = *self + o;
    }
}

impl std::ops::MulAssign for Dual {
    fn mul_assign(&mut self, o: Dual) {
        *self = *self * o;
    }
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Coefficients of `|N − n_d, n_d⟩_{cd}` in `U|n_a, N − n_a⟩_{ab}` for the
/// output beam splitter `a → (c + d)/√2`, `b → (c − d)/√2`.
fn bs_table(n_total: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; n_total + 1]; n_total + 1];
    let binom = |n: usize, k: usize| -> f64 {
        if k > n {
            0.0
        } else {
            (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp().round()
        }
    };
    for (nd, row) in out.iter_mut().enumerate() {
        let nc = n_total - nd;
        for (na, slot) in row.iter_mut().enumerate() {
            let nb = n_total - na;
            let mut s = 0.0;
            for k in 0..=nd.min(na) {
                if nd - k > nb {
                    continue;
                }
                let sign = if (nd - k) % 2 == 0 { 1.0 } else { -1.0 };
                s += sign * binom(na, k) * binom(nb, nd - k);
            }
            let scale = (0.5 * (ln_factorial(nc) + ln_factorial(nd) - ln_factorial(na) - ln_factorial(nb))
                - 0.5 * n_total as f64 * 2f64.ln())
            .exp();
            *slot = s * scale;
        }
    }
    out
}

/// Bin-exact MZI eraser for a fixed pulse and `n̄`.
#[derive(Debug, Clone)]
pub struct BinModel {
    n_bins: usize,
    dim: usize,
    /// Per-bin arm amplitudes.
    beta: Vec<C64>,
    /// `kets[j][3·ta + tb]`, indexed by total number then dark count.
    kets: Vec<Vec<Vec<Vec<C64>>>>,
}

impl BinModel {
    pub fn new(model: &ExtractionModel) -> Result<Self> {
        if !(model.nbar() > 0.0) {
            return Err(invalid("nbar", "no photon is extracted from an empty pulse"));
        }
        let arm = (model.nbar() / 2.0).sqrt() * model.grid().dt().sqrt();
        let beta: Vec<C64> = model.pulse().amp().iter().map(|f| f * arm).collect();
        let bmax = beta.iter().map(|b| b.norm_sqr()).fold(0.0, f64::max);
        let mut dim = 2usize;
        while (-bmax + dim as f64 * bmax.max(1e-300).ln() - ln_factorial(dim)).exp() > TAIL {
            dim += 1;
        }
        let tables: Vec<Vec<Vec<f64>>> = (0..=2 * (dim - 1)).map(bs_table).collect();
        let kets = beta
            .iter()
            .map(|&b| {
                let arms = slots(b, dim);
                let mut out = Vec::with_capacity(9);
                for ta in &arms {
                    for tb in &arms {
                        out.push(transform(ta, tb, &tables));
                    }
                }
                out
            })
            .collect();
        Ok(BinModel {
            n_bins: beta.len(),
            dim,
            beta,
            kets,
        })
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    /// Fock dimension kept per arm and bin.
    pub fn fock_dim(&self) -> usize {
        self.dim
    }

    /// Single-arm extraction Gram matrix `⟨T_{e'}|T_e⟩` (unnormalized,
    /// trace `1 − e^{−n̄/2}`).
    pub fn arm_gram(&self) -> DMatrix<C64> {
        let n = self.n_bins;
        let arms: Vec<[Vec<C64>; 3]> = self.beta.iter().map(|&b| slots(b, self.dim)).collect();
        let ip = |j: usize, bra: Slot, ket: Slot| -> C64 {
            let (x, y) = (&arms[j][bra as usize], &arms[j][ket as usize]);
            x.iter().zip(y).map(|(p, q)| p.conj() * q).sum()
        };
        let mut pre = vec![ONE; n + 1];
        for j in 0..n {
            pre[j + 1] = pre[j] * ip(j, V, V);
        }
        let mut suf = vec![ONE; n + 1];
        for j in (0..n).rev() {
            suf[j] = suf[j + 1] * ip(j, C, C);
        }
        let mut g = DMatrix::from_element(n, n, ZERO);
        for e in 0..n {
            g[(e, e)] = pre[e] * ip(e, X, X) * suf[e + 1];
            let mut mid = ONE;
            for e2 in e + 1..n {
                // ⟨T_{e2}|T_e⟩: bra has V at e, X at e2; ket X at e, C at e2.
                let v = pre[e] * ip(e, V, X) * mid * ip(e2, X, C) * suf[e2 + 1];
                g[(e, e2)] = v;
                g[(e2, e)] = v.conj();
                mid *= ip(e2, V, C);
            }
        }
        g
    }

    /// Normalized single-arm extracted photon, `ρ_{jk} = ⟨T_k|T_j⟩/dt`.
    pub fn arm_density(&self, model: &ExtractionModel) -> Result<MixedSinglePhoton> {
        let g = self.arm_gram();
        let tr = g.trace().re;
        MixedSinglePhoton::new(*model.grid(), g / C64::new(tr * model.grid().dt(), 0.0))
    }

    /// `(D(x), E(x))` with photon-number fugacity `z` (extracted photons
    /// included), with `x`-derivatives.
    fn generating(&self, x: f64, z: C64) -> (Dual, Dual) {
        let n = self.n_bins;
        let w = |j: usize, bra: (Slot, Slot), ket: (Slot, Slot)| -> Dual {
            let b = &self.kets[j][bra.0 as usize * 3 + bra.1 as usize];
            let k = &self.kets[j][ket.0 as usize * 3 + ket.1 as usize];
            let mut out = Dual::ZERO;
            let mut zn = ONE;
            for (bn, kn) in b.iter().zip(k) {
                let mut xp = 1.0;
                let mut xd = 0.0;
                for (nd, (p, q)) in bn.iter().zip(kn).enumerate() {
                    let c = p.conj() * q * zn;
                    out.v += c * xp;
                    out.d += c * xd;
                    xd = (nd + 1) as f64 * xp;
                    xp *= x;
                }
                zn *= z;
            }
            out
        };
        let row = |bra: (Slot, Slot), ket: (Slot, Slot)| -> Vec<Dual> { (0..n).map(|j| w(j, bra, ket)).collect() };
        let vv = row((V, V), (V, V));
        let cc = row((C, C), (C, C));
        let xx = row((X, X), (X, X));
        let mut pre = vec![Dual::ONE; n + 1];
        for j in 0..n {
            pre[j + 1] = pre[j] * vv[j];
        }
        let mut suf = vec![Dual::ONE; n + 1];
        for j in (0..n).rev() {
            suf[j] = suf[j + 1] * cc[j];
        }
        // Arm a extracts first: (X,V) … (C,V) … (C,X); arm b first mirrors.
        let a_first = [(X, V), (C, V), (C, X)];
        let b_first = [(V, X), (V, C), (X, C)];
        let swap = |s: (Slot, Slot)| (s.1, s.0);
        let sum = |exchange: bool| -> Dual {
            let rows: Vec<[Vec<Dual>; 3]> = [a_first, b_first]
                .iter()
                .map(|case| {
                    case.map(|k| {
                        let bra = if exchange { swap(k) } else { k };
                        row(bra, k)
                    })
                })
                .collect();
            let mut total = Dual::ZERO;
            for lo in 0..n {
                total += pre[lo] * xx[lo] * suf[lo + 1];
                for r in &rows {
                    let head = pre[lo] * r[0][lo];
                    let mut mid = Dual::ONE;
                    for hi in lo + 1..n {
                        total += head * mid * r[2][hi] * suf[hi + 1];
                        mid *= r[1][hi];
                    }
                }
            }
            let z2 = z * z;
            Dual {
                v: total.v * z2,
                d: total.d * z2,
            }
        };
        (sum(false), sum(true))
    }

    /// Full-sector generating values at `x`.
    pub fn generating_full(&self, x: f64) -> Generating {
        let (d, e) = self.generating(x, ONE);
        Generating::from_duals(d, e)
    }

    /// Generating values restricted to total photon number `≤ cutoff`,
    /// the content of a truncated Fock register.
    pub fn generating_truncated(&self, x: f64, cutoff: usize) -> Generating {
        let k = (2 * (cutoff + 1)).max(2 * self.n_bins * 2 * self.dim + 8).next_power_of_two();
        let mut acc = [Dual::ZERO, Dual::ZERO];
        for r in 0..k {
            let zr = C64::from_polar(1.0, 2.0 * PI * r as f64 / k as f64);
            let (d, e) = self.generating(x, zr);
            // Σ_{N≤cutoff} z^{−N}, projecting onto the kept sectors.
            let mut proj = ZERO;
            let mut p = ONE;
            for _ in 0..=cutoff {
                proj += p;
                p /= zr;
            }
            let s = Dual { v: proj, d: ZERO };
            acc[0] += d * s;
            acc[1] += e * s;
        }
        let inv = Dual {
            v: C64::new(1.0 / k as f64, 0.0),
            d: ZERO,
        };
        Generating::from_duals(acc[0] * inv, acc[1] * inv)
    }

    /// Parity and loss table over the full photon-number space.
    pub fn parity_table(&self, eta: f64) -> Result<ParityTable> {
        self.table(eta, None)
    }

    /// Parity and loss table restricted to total photon number `≤ cutoff`.
    pub fn parity_table_truncated(&self, eta: f64, cutoff: usize) -> Result<ParityTable> {
        self.table(eta, Some(cutoff))
    }

    fn table(&self, eta: f64, cutoff: Option<usize>) -> Result<ParityTable> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(invalid("eta", format!("must lie in [0, 1], got {eta}")));
        }
        let g = |x: f64| match cutoff {
            Some(c) => self.generating_truncated(x, c),
            None => self.generating_full(x),
        };
        let y = 1.0 - 2.0 * eta;
        let (p, m, l) = (g(1.0), g(-1.0), g(y));
        let dbl = p.d;
        let even = 0.5 * (p.d + m.d);
        let odd = 0.5 * (p.d - m.d);
        let declared = |s: f64| 0.5 * (p.d + s * l.d);
        let hom = |s: f64| {
            let den = 2.0 * declared(s);
            (p.d - p.e + s * (l.d - l.e)) / (2.0 * den)
        };
        Ok(ParityTable {
            double: dbl,
            p_even: even / dbl,
            p_odd: odd / dbl,
            mean_dark_even: if even > 0.0 { 0.5 * (p.dd - m.dd) / even } else { 0.0 },
            mean_dark_odd: if odd > 0.0 { 0.5 * (p.dd + m.dd) / odd } else { 0.0 },
            hom_coincidence: (p.d - p.e) / (2.0 * dbl),
            hom_coincidence_even: (p.d - p.e + m.d - m.e) / (2.0 * (p.d + m.d)),
            hom_coincidence_odd: (p.d - p.e - m.d + m.e) / (2.0 * (p.d - m.d)),
            eta,
            parity_error: 0.5 * (p.d - g(-y).d) / dbl,
            p_declared_even: declared(1.0) / dbl,
            hom_coincidence_declared_even: hom(1.0),
            hom_coincidence_declared_odd: hom(-1.0),
        })
    }
}

/// Real parts of `D`, `E` and `dD/dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Generating {
    pub d: f64,
    pub e: f64,
    pub dd: f64,
}

impl Generating {
    fn from_duals(d: Dual, e: Dual) -> Self {
        Generating {
            d: d.v.re,
            e: e.v.re,
            dd: d.d.re,
        }
    }
}

/// Dark-port parity statistics conditioned on both arms extracting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParityTable {
    /// Probability that both arms extracted.
    pub double: f64,
    pub p_even: f64,
    pub p_odd: f64,
    pub mean_dark_even: f64,
    pub mean_dark_odd: f64,
    /// Unconditioned HOM coincidence of the extracted pair.
    pub hom_coincidence: f64,
    pub hom_coincidence_even: f64,
    pub hom_coincidence_odd: f64,
    pub eta: f64,
    pub parity_error: f64,
    pub p_declared_even: f64,
    pub hom_coincidence_declared_even: f64,
    pub hom_coincidence_declared_odd: f64,
}

impl ParityTable {
    pub fn probability(&self, parity: Parity) -> f64 {
        match parity {
            Parity::Even => self.p_even,
            Parity::Odd => self.p_odd,
        }
    }
}

/// `V`, `X` and `C` single-arm vectors for amplitude `b`.
fn slots(b: C64, dim: usize) -> [Vec<C64>; 3] {
    let e = (-b.norm_sqr() / 2.0).exp();
    let mut coh = Vec::with_capacity(dim + 1);
    let mut t = C64::new(e, 0.0);
    for n in 0..=dim {
        if n > 0 {
            t *= b / (n as f64).sqrt();
        }
        coh.push(t);
    }
    let mut v = vec![ZERO; dim];
    v[0] = C64::new(e, 0.0);
    let x: Vec<C64> = (0..dim).map(|m| coh[m + 1]).collect();
    let c: Vec<C64> = coh[..dim].to_vec();
    [v, x, c]
}

fn transform(a: &[C64], b: &[C64], tables: &[Vec<Vec<f64>>]) -> Vec<Vec<C64>> {
    let dim = a.len();
    tables
        .iter()
        .enumerate()
        .map(|(total, table)| {
            (0..=total)
                .map(|nd| {
                    let mut s = ZERO;
                    for na in total.saturating_sub(dim - 1)..=total.min(dim - 1) {
                        s += a[na] * b[total - na] * table[nd][na];
                    }
                    s
                })
                .collect()
        })
        .collect()
}
