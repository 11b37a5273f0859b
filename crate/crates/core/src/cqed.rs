//! Third-order effective coupling through virtual intermediate states, and
//! an exact-diagonalization check on two atoms sharing one cavity mode.
//!
//! For an initial state `i` and a degenerate final state `f`,
//!
//! ```text
//! Ω_eff = − Σ_{m,n} V_fn V_nm V_mi / ((E_i − E_m)(E_i − E_n))
//! ```
//!
//! where `V_kj` is the coupling from `j` to `k` and `m, n` run over the
//! off-resonant intermediate states.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Intermediate energies closer than this (relative to `max|E|`) to `E_i`
/// make a channel resonant.
pub const DEGENERACY_RTOL: f64 = 1e-9;

/// Allowed imaginary residue of Ω_eff relative to the summed channel
/// magnitudes.
pub const IMAG_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphNode {
    pub label: String,
    pub energy: f64,
}

/// Energy-labelled states with Hermitian couplings between them.
#[derive(Debug, Clone, PartialEq)]
pub struct StateGraph {
    nodes: Vec<GraphNode>,
    /// `(k, j) → V_kj`, stored in both directions.
    couplings: BTreeMap<(usize, usize), C64>,
    initial: usize,
    final_: usize,
}

impl StateGraph {
    /// `edges` are `(from, to, V_to,from)`; the reverse direction is filled
    /// in with the conjugate. An edge listed in both directions must be
    /// consistent.
    pub fn new(
        nodes: Vec<(String, f64)>,
        edges: Vec<(String, String, C64)>,
        initial: &str,
        final_: &str,
    ) -> Result<Self> {
        let nodes: Vec<GraphNode> =
            nodes.into_iter().map(|(label, energy)| GraphNode { label, energy }).collect();
        for (k, n) in nodes.iter().enumerate() {
            if !n.energy.is_finite() {
                return Err(Error::Graph(format!("node `{}` has a non-finite energy", n.label)));
            }
            if nodes[..k].iter().any(|o| o.label == n.label) {
                return Err(Error::Graph(format!("duplicate node `{}`", n.label)));
            }
        }
        let find = |label: &str| {
            nodes
                .iter()
                .position(|n| n.label == label)
                .ok_or_else(|| Error::Graph(format!("unknown node `{label}`")))
        };
        let mut couplings = BTreeMap::new();
        for (from, to, v) in edges {
            let j = find(&from)?;
            let k = find(&to)?;
            if j == k {
                return Err(Error::Graph(format!("self-coupling on `{from}`")));
            }
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Graph(format!("non-finite coupling {from} → {to}")));
            }
            if let Some(prev) = couplings.get(&(k, j)) {
                let prev: &C64 = prev;
                if (prev - v).norm() > 1e-12 * prev.norm().max(v.norm()) {
                    return Err(Error::Graph(format!(
                        "couplings {from} → {to} are not Hermitian ({prev} vs {v})"
                    )));
                }
            }
            couplings.insert((k, j), v);
            couplings.insert((j, k), v.conj());
        }
        let graph = Self { initial: find(initial)?, final_: find(final_)?, nodes, couplings };
        if graph.initial == graph.final_ {
            return Err(Error::Graph("initial and final state coincide".into()));
        }
        let (ei, ef) = (graph.nodes[graph.initial].energy, graph.nodes[graph.final_].energy);
        if (ei - ef).abs() > graph.energy_tolerance() {
            return Err(Error::NotResonant(format!(
                "initial and final energies differ ({ei} vs {ef}); the effective coupling needs E_i = E_f"
            )));
        }
        Ok(graph)
    }

    pub fn nodes(&self) -> &[GraphNode] {
        &self.nodes
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn final_state(&self) -> usize {
        self.final_
    }

    /// `V_kj`, the coupling from `j` to `k`.
    pub fn coupling(&self, k: usize, j: usize) -> C64 {
        self.couplings.get(&(k, j)).copied().unwrap_or_default()
    }

    /// Directed edges `(j, k, V_kj)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.couplings.iter().map(|(&(k, j), &v)| (j, k, v))
    }

    pub fn energy_tolerance(&self) -> f64 {
        let scale = self.nodes.iter().map(|n| n.energy.abs()).fold(0.0, f64::max);
        DEGENERACY_RTOL * scale.max(f64::MIN_POSITIVE)
    }

    /// Copy with every coupling multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for v in out.couplings.values_mut() {
            *v *= s;
        }
        out
    }

    /// Sub-graph keeping only the hops of `path`.
    pub fn restricted_to(&self, path: &ChannelPath) -> Self {
        let mut out = self.clone();
        out.couplings.clear();
        for w in path.nodes.windows(2) {
            let (j, k) = (w[0], w[1]);
            out.couplings.insert((k, j), self.coupling(k, j));
            out.couplings.insert((j, k), self.coupling(j, k));
        }
        out
    }

    pub fn describe(&self, path: &ChannelPath) -> String {
        let labels: Vec<&str> = path.nodes.iter().map(|&k| self.nodes[k].label.as_str()).collect();
        labels.join(" → ")
    }
}

/// `i → m → n → f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ChannelPath {
    pub nodes: [usize; 4],
}

impl ChannelPath {
    pub fn intermediates(&self) -> (usize, usize) {
        (self.nodes[1], self.nodes[2])
    }
}

impl fmt::Display for ChannelPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [i, m, n, fin] = self.nodes;
        write!(f, "{i}→{m}→{n}→{fin}")
    }
}

/// Every third-order path `i → m → n → f` with nonzero couplings on all
/// three hops. A path through an intermediate degenerate with `E_i` is an
/// error.
pub fn enumerate_channels(g: &StateGraph) -> Result<Vec<ChannelPath>> {
    let (i, f) = (g.initial, g.final_);
    let ei = g.nodes[i].energy;
    let tol = g.energy_tolerance();
    let zero = C64::default();
    let mut paths = Vec::new();
    for m in (0..g.nodes.len()).filter(|&m| m != i && m != f) {
        if g.coupling(m, i) == zero {
            continue;
        }
        for n in (0..g.nodes.len()).filter(|&n| n != i && n != f && n != m) {
            if g.coupling(n, m) == zero || g.coupling(f, n) == zero {
                continue;
            }
            let path = ChannelPath { nodes: [i, m, n, f] };
            for k in [m, n] {
                let gap = (ei - g.nodes[k].energy).abs();
                if gap <= tol {
                    return Err(Error::DegenerateDenominator { path: g.describe(&path), gap });
                }
            }
            paths.push(path);
        }
    }
    Ok(paths)
}

/// One channel's signed share of Ω_eff (the leading minus included).
pub fn channel_term(g: &StateGraph, path: &ChannelPath) -> C64 {
    let [i, m, n, f] = path.nodes;
    let ei = g.nodes[i].energy;
    let num = g.coupling(f, n) * g.coupling(n, m) * g.coupling(m, i);
    -num / ((ei - g.nodes[m].energy) * (ei - g.nodes[n].energy))
}

pub fn channel_terms(g: &StateGraph) -> Result<Vec<(ChannelPath, C64)>> {
    Ok(enumerate_channels(g)?.into_iter().map(|p| (p, channel_term(g, &p))).collect())
}

pub fn omega_eff_complex(g: &StateGraph) -> Result<C64> {
    Ok(channel_terms(g)?.into_iter().map(|(_, t)| t).sum())
}

/// Real effective coupling. Fails if the channel sum keeps an imaginary
/// part beyond rounding.
pub fn omega_eff(g: &StateGraph) -> Result<f64> {
    let terms = channel_terms(g)?;
    let total: C64 = terms.iter().map(|(_, t)| t).sum();
    let scale: f64 = terms.iter().map(|(_, t)| t.norm()).sum();
    if total.im.abs() > IMAG_RTOL * scale {
        return Err(Error::ComplexCoupling { real: total.re, imag: total.im });
    }
    Ok(total.re)
}

/// Two two-level atoms coupled to one cavity mode,
///
/// ```text
/// H = ω a†a + ω_q Σ_k |e⟩⟨e|_k + g (a + a†) Σ_k (cos θ σx_k + sin θ σz_k)
/// ```
///
/// truncated at `n_photons`. A nonzero mixing angle `θ` breaks parity and
/// opens third-order paths from `|g,g,1⟩` to `|e,e,0⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RabiSystem {
    /// Cavity photon energy ħω.
    pub omega: f64,
    /// Atomic excitation energy ħω_q.
    pub omega_q: f64,
    pub g: f64,
    #[serde(default = "default_mixing_angle")]
    pub mixing_angle: f64,
    #[serde(default = "default_photons")]
    pub n_photons: usize,
}

fn default_mixing_angle() -> f64 {
    PI / 6.0
}

fn default_photons() -> usize {
    4
}

impl Default for RabiSystem {
    fn default() -> Self {
        Self { omega: 1.0, omega_q: 0.5, g: 0.025, mixing_angle: default_mixing_angle(), n_photons: 4 }
    }
}

/// Atom states of a basis vector; `true` means excited.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RabiState {
    pub atoms: [bool; 2],
    pub photons: usize,
}

impl fmt::Display for RabiState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |e: bool| if e { 'e' } else { 'g' };
        write!(f, "|{},{},{}⟩", s(self.atoms[0]), s(self.atoms[1]), self.photons)
    }
}

impl RabiSystem {
    pub fn validate(&self) -> Result<()> {
        if self.n_photons < 2 {
            return Err(Error::InvalidConfig(format!(
                "n_photons = {} cannot hold the two-photon virtual state; need at least 2",
                self.n_photons
            )));
        }
        if !(self.omega > 0.0 && self.omega_q > 0.0) || !self.omega.is_finite() || !self.omega_q.is_finite() {
            return Err(Error::InvalidConfig("omega and omega_q must be finite and positive".into()));
        }
        if !(self.g.is_finite() && self.g >= 0.0) || !self.mixing_angle.is_finite() {
            return Err(Error::InvalidConfig("g must be finite and non-negative".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        4 * (self.n_photons + 1)
    }

    pub fn index(&self, s: RabiState) -> usize {
        let atoms = 2 * usize::from(s.atoms[0]) + usize::from(s.atoms[1]);
        atoms * (self.n_photons + 1) + s.photons
    }

    pub fn state(&self, index: usize) -> RabiState {
        let np = self.n_photons + 1;
        let atoms = index / np;
        RabiState { atoms: [atoms & 2 != 0, atoms & 1 != 0], photons: index % np }
    }

    pub fn initial_index(&self) -> usize {
        self.index(RabiState { atoms: [false, false], photons: 1 })
    }

    pub fn final_index(&self) -> usize {
        self.index(RabiState { atoms: [true, true], photons: 0 })
    }

    pub fn bare_energy(&self, s: RabiState) -> f64 {
        self.omega * s.photons as f64
            + self.omega_q * (usize::from(s.atoms[0]) + usize::from(s.atoms[1])) as f64
    }

    /// Hamiltonian in the bare product basis (see [`RabiSystem::index`]).
    pub fn hamiltonian(&self) -> Result<DMatrix<f64>> {
        self.validate()?;
        let dim = self.dim();
        let (sin, cos) = self.mixing_angle.sin_cos();
        let mut h = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let s = self.state(col);
            h[(col, col)] = self.bare_energy(s);
            for atom in 0..2 {
                let sz = if s.atoms[atom] { 1.0 } else { -1.0 };
                let mut flipped = s;
                flipped.atoms[atom] = !s.atoms[atom];
                // a + a†
                let hops = [
                    (s.photons.checked_sub(1), (s.photons as f64).sqrt()),
                    (Some(s.photons + 1).filter(|&n| n <= self.n_photons), ((s.photons + 1) as f64).sqrt()),
                ];
                for (n, amp) in hops {
                    let Some(n) = n else { continue };
                    let row = self.index(RabiState { atoms: flipped.atoms, photons: n });
                    h[(row, col)] += self.g * cos * amp;
                    let row = self.index(RabiState { atoms: s.atoms, photons: n });
                    h[(row, col)] += self.g * sin * sz * amp;
                }
            }
        }
        Ok(h)
    }
}

/// Bare states as nodes, off-diagonal Hamiltonian elements as couplings.
pub fn graph_from_hamiltonian(
    h: &DMatrix<f64>,
    labels: Vec<String>,
    initial: usize,
    final_: usize,
) -> Result<StateGraph> {
    let n = h.nrows();
    let nodes: Vec<(String, f64)> = labels.iter().cloned().zip((0..n).map(|k| h[(k, k)])).collect();
    let mut edges = Vec::new();
    for j in 0..n {
        for k in j + 1..n {
            if h[(k, j)] != 0.0 {
                edges.push((labels[j].clone(), labels[k].clone(), C64::new(h[(k, j)], 0.0)));
            }
        }
    }
    StateGraph::new(nodes, edges, &labels[initial], &labels[final_])
}

pub fn build_two_atom_rabi(sys: &RabiSystem) -> Result<(DMatrix<f64>, StateGraph)> {
    let h = sys.hamiltonian()?;
    let labels = (0..sys.dim()).map(|k| sys.state(k).to_string()).collect();
    let graph = graph_from_hamiltonian(&h, labels, sys.initial_index(), sys.final_index())
        .map_err(|e| match e {
            Error::NotResonant(_) => Error::NotResonant(format!(
                "|g,g,1⟩ and |e,e,0⟩ are not degenerate (ω = {}, 2ω_q = {}); set ω_q = ω/2",
                sys.omega,
                2.0 * sys.omega_q
            )),
            other => other,
        })?;
    Ok((h, graph))
}

/// Gap between the two dressed states with the largest weight on
/// `|g,g,1⟩` and `|e,e,0⟩`.
pub fn dressed_gap(h: &DMatrix<f64>, sys: &RabiSystem) -> f64 {
    let eig = SymmetricEigen::new(h.clone());
    let (i, f) = (sys.initial_index(), sys.final_index());
    let mut weighted: Vec<(f64, f64)> = (0..h.nrows())
        .map(|k| {
            let v = eig.eigenvectors.column(k);
            (v[i] * v[i] + v[f] * v[f], eig.eigenvalues[k])
        })
        .collect();
    weighted.sort_by(|a, b| b.0.total_cmp(&a.0));
    (weighted[0].1 - weighted[1].1).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Splitting {
    /// Minimum dressed-state gap across the avoided crossing.
    pub splitting: f64,
    /// Atomic energy at which the minimum occurs.
    pub resonant_omega_q: f64,
}

/// Width of the ω_q window searched for the avoided crossing, in units of
/// g²/ω.
const CROSSING_WINDOW: f64 = 40.0;

/// Largest accepted bare detuning `|2ω_q − ω|/ω`.
const NEAR_RESONANCE: f64 = 0.05;

/// Avoided-crossing splitting between `|g,g,1⟩` and `|e,e,0⟩` from exact
/// eigenvalues. Second-order level shifts move the crossing away from
/// `ω_q = ω/2`, so the minimum gap is searched for in ω_q.
pub fn exact_splitting(sys: &RabiSystem) -> Result<Splitting> {
    sys.validate()?;
    let detuning = (2.0 * sys.omega_q - sys.omega).abs() / sys.omega;
    if detuning > NEAR_RESONANCE {
        return Err(Error::NotResonant(format!(
            "|g,g,1⟩ and |e,e,0⟩ are detuned by {:.3}ω; tune ω_q close to ω/2",
            detuning
        )));
    }
    let centre = sys.omega / 2.0;
    let gap_at = |omega_q: f64| -> Result<f64> {
        let s = RabiSystem { omega_q, ..sys.clone() };
        Ok(dressed_gap(&s.hamiltonian()?, &s))
    };
    if sys.g == 0.0 {
        return Ok(Splitting { splitting: gap_at(centre)?, resonant_omega_q: centre });
    }
    let half = CROSSING_WINDOW * sys.g * sys.g / sys.omega;
    let (omega_q, splitting) = golden_min(centre - half, centre + half, 1e-14 * sys.omega, gap_at)?;
    Ok(Splitting { splitting, resonant_omega_q: omega_q })
}

fn golden_min<F>(mut lo: f64, mut hi: f64, tol: f64, f: F) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}
