//! Dense full-basis evolution, independent of the sparse engine.
//!
//! Every mode is truncated at `cap` photons. A beam splitter of reflectivity
//! `R` acts as `exp(iθ(a†b + ab†))` with `sin θ = √R`, built from an
//! eigendecomposition of the truncated two-mode generator. The generator
//! conserves `n_a + n_b`, so the truncation is exact whenever no term holds
//! more than `cap` photons in total.

use fockline::fock::StateVector;
use fockline::optics::{Circuit, CoherentSource, Element};
use fockline::C64;
use nalgebra::{DMatrix, SymmetricEigen};

#[derive(Debug, Clone)]
pub struct DenseState {
    pub labels: Vec<String>,
    pub cap: usize,
    pub amps: Vec<C64>,
}

impl DenseState {
    fn dim(&self) -> usize {
        self.cap + 1
    }

    fn stride(&self, mode: usize) -> usize {
        self.dim().pow((self.labels.len() - 1 - mode) as u32)
    }

    pub fn occupations(&self, mut index: usize) -> Vec<usize> {
        let d = self.dim();
        let mut occ = vec![0; self.labels.len()];
        for k in (0..self.labels.len()).rev() {
            occ[k] = index % d;
            index /= d;
        }
        occ
    }

    pub fn from_sparse(state: &StateVector, cap: usize) -> Self {
        let labels = state.registry().labels().to_vec();
        let n = labels.len();
        let mut out = Self { labels, cap, amps: vec![C64::default(); (cap + 1).pow(n as u32)] };
        for (term, amp) in state.iter() {
            let idx = term
                .occupations()
                .iter()
                .enumerate()
                .map(|(k, &o)| o as usize * out.stride(k))
                .sum::<usize>();
            out.amps[idx] += amp;
        }
        out
    }

    fn mode(&self, label: &str) -> usize {
        self.labels.iter().position(|l| l == label).expect("mode present")
    }

    pub fn amplitude(&self, occupations: &[(&str, usize)]) -> C64 {
        let idx = occupations.iter().map(|(l, o)| o * self.stride(self.mode(l))).sum::<usize>();
        self.amps[idx]
    }

    pub fn apply_phase(&mut self, label: &str, theta: f64) {
        let m = self.mode(label);
        for idx in 0..self.amps.len() {
            let n = self.occupations(idx)[m];
            self.amps[idx] *= C64::from_polar(1.0, theta * n as f64);
        }
    }

    pub fn apply_splitter(&mut self, l1: &str, l2: &str, reflectivity: f64) {
        let (m1, m2) = (self.mode(l1), self.mode(l2));
        let u = two_mode_unitary(self.cap, reflectivity.sqrt().asin());
        let d = self.dim();
        let (s1, s2) = (self.stride(m1), self.stride(m2));
        let mut out = vec![C64::default(); self.amps.len()];
        for idx in 0..self.amps.len() {
            let a = self.amps[idx];
            if a == C64::default() {
                continue;
            }
            let occ = self.occupations(idx);
            let (n1, n2) = (occ[m1], occ[m2]);
            let base = idx - n1 * s1 - n2 * s2;
            for p1 in 0..d {
                for p2 in 0..d {
                    let c = u[(p1 * d + p2, n1 * d + n2)];
                    if c != C64::default() {
                        out[base + p1 * s1 + p2 * s2] += c * a;
                    }
                }
            }
        }
        self.amps = out;
    }

    pub fn rename(&mut self, from: &str, to: &str) {
        let m = self.mode(from);
        self.labels[m] = to.to_string();
    }

    pub fn append_coherent(&mut self, src: &CoherentSource) {
        let d = self.dim();
        let mut weights = vec![C64::default(); d];
        let mut norm_sqr = 0.0;
        for (n, w) in weights.iter_mut().enumerate().take(src.n_max as usize + 1) {
            let fact: f64 = (1..=n).map(|k| k as f64).product();
            *w = src.q.powu(n as u32) / fact.sqrt();
            norm_sqr += w.norm_sqr();
        }
        let norm = norm_sqr.sqrt();
        let mut amps = Vec::with_capacity(self.amps.len() * d);
        for a in &self.amps {
            for w in &weights {
                amps.push(a * w / norm);
            }
        }
        self.amps = amps;
        self.labels.push(src.mode.clone());
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) {
        for el in circuit.elements() {
            match el {
                Element::BeamSplitter(bs) => {
                    self.apply_splitter(&bs.mode_in_1, &bs.mode_in_2, bs.reflectivity);
                    if let Some((o1, o2)) = &bs.outputs {
                        let tmp = "\u{0}tmp";
                        self.rename(&bs.mode_in_1, tmp);
                        self.rename(&bs.mode_in_2, o2);
                        self.rename(tmp, o1);
                    }
                }
                Element::Phase(ps) => self.apply_phase(&ps.mode, ps.theta),
                Element::Coherent(src) => self.append_coherent(src),
            }
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(C64::norm_sqr).sum()
    }

    /// Largest `|dense − sparse|` over the full basis, after checking that
    /// both use the same labels.
    pub fn max_deviation(&self, sparse: &StateVector) -> f64 {
        assert_eq!(self.labels, sparse.registry().labels(), "label layout differs");
        let other = DenseState::from_sparse(sparse, self.cap);
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `exp(iθ(a†b + ab†))` on the two-mode space truncated at `cap` per mode,
/// indexed by `n_a·(cap+1) + n_b`.
pub fn two_mode_unitary(cap: usize, theta: f64) -> DMatrix<C64> {
    let d = cap + 1;
    let mut gen = DMatrix::<f64>::zeros(d * d, d * d);
    for na in 0..d {
        for nb in 0..d {
            let col = na * d + nb;
            // a†b
            if nb > 0 && na + 1 < d {
                gen[((na + 1) * d + nb - 1, col)] += ((na + 1) as f64).sqrt() * (nb as f64).sqrt();
            }
            // ab†
            if na > 0 && nb + 1 < d {
                gen[((na - 1) * d + nb + 1, col)] += (na as f64).sqrt() * ((nb + 1) as f64).sqrt();
            }
        }
    }
    let eig = SymmetricEigen::new(gen);
    let vecs = eig.eigenvectors.map(|x| C64::new(x, 0.0));
    let phases = DMatrix::from_diagonal(
        &eig.eigenvalues.map(|l| C64::from_polar(1.0, theta * l)),
    );
    &vecs * phases * vecs.adjoint()
}
