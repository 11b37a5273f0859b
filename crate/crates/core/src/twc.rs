//! Three-path single-photon interferometer with coherent reference beams
//! (a variant of the Tan, Walls and Collett setup).
//!
//! Topology:
//!
//! ```text
//!  s ──BS(1/3)──▶ s ──BS(1/2)──▶ c ──θ₃──┐
//!        │               │               │
//!        ▼               ▼               │
//!        a ──θ₁──┐       b ──θ₂──┐       │
//!                ▼               ▼       ▼
//!   e₁ ──▶ EBS₁ → (c₁,d₁)   e₂ ──▶ EBS₂ → (c₂,d₂)   e₃ ──▶ EBS₃ → (c₃,d₃)
//! ```
//!
//! The splitter tree leaves amplitudes `(i, i, 1)/√3` on paths `a, b, c`.
//! Fixed alignment shifts `(π/2, π/2, π)` bring them to a common
//! `−1/√3`, after which the state before the end splitters is
//! `−𝒩³/√3 · Σⱼ e^{iθⱼ}|1;uⱼ⟩ · Πⱼ(|0⟩ + q|1;eⱼ⟩)`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::fock::{Caps, ModeRegistry, StateVector};
use crate::optics::{apply_circuit, BeamSplitter, Circuit, CoherentSource, Element, PhaseShifter};

/// Signal path feeding end splitter `j`.
pub const SIGNAL_PATHS: [&str; 3] = ["a", "b", "c"];
pub const COHERENT_MODES: [&str; 3] = ["e1", "e2", "e3"];
/// `(C_j, D_j)` detector modes behind each end splitter.
pub const DETECTOR_MODES: [(&str, &str); 3] = [("c1", "d1"), ("c2", "d2"), ("c3", "d3")];

#[derive(Debug, Clone)]
pub struct TwcSetup {
    pub thetas: [f64; 3],
    pub q: C64,
    pub n_max: u32,
    /// Splitter tree, phase shifters and coherent sources.
    pub preparation: Circuit,
    /// The three end splitters.
    pub ebs_stage: Circuit,
    /// Single photon in `s`, vacuum in `a` and `b`.
    pub input: StateVector,
    /// State right before the end splitters.
    pub pre_ebs: StateVector,
}

impl TwcSetup {
    pub fn circuit(&self) -> Result<Circuit> {
        self.preparation.then(&self.ebs_stage)
    }

    /// 𝒩 of each coherent beam.
    pub fn normalization(&self) -> f64 {
        CoherentSource { mode: String::new(), q: self.q, n_max: self.n_max }.normalization()
    }

    /// `M = 𝒩³q²/√3`.
    pub fn m(&self) -> C64 {
        self.normalization().powi(3) * self.q * self.q / 3f64.sqrt()
    }

    /// State behind the end splitters.
    pub fn evolve(&self) -> Result<StateVector> {
        apply_circuit(&self.pre_ebs, &self.ebs_stage)
    }
}

/// Occupation caps that always hold the full interferometer state.
pub fn caps_for_order(n_max: u32) -> Caps {
    Caps { per_mode: (n_max + 1).max(2), total: 1 + 3 * n_max }
}

/// Builds the interferometer with first-order coherent beams.
pub fn build_twc_circuit(thetas: [f64; 3], q: C64) -> Result<TwcSetup> {
    build_twc_circuit_with_order(thetas, q, 1)
}

pub fn build_twc_circuit_with_order(thetas: [f64; 3], q: C64, n_max: u32) -> Result<TwcSetup> {
    let input_reg = ModeRegistry::new(["s", "a", "b"])?;
    let mut prep: Vec<Element> = vec![
        BeamSplitter::new("s", "a", 1.0 / 3.0)?.into(),
        BeamSplitter::new("s", "b", 0.5)?.with_outputs("c", "b").into(),
    ];
    for (path, align) in SIGNAL_PATHS.iter().zip([FRAC_PI_2, FRAC_PI_2, PI]) {
        prep.push(PhaseShifter::new(path, align).into());
    }
    for (path, theta) in SIGNAL_PATHS.iter().zip(thetas) {
        prep.push(PhaseShifter::new(path, theta).into());
    }
    for e in COHERENT_MODES {
        prep.push(CoherentSource::with_order(e, q, n_max)?.into());
    }
    let preparation = Circuit::new(input_reg.clone(), prep)?;

    let ebs: Vec<Element> = (0..3)
        .map(|j| {
            let (c, d) = DETECTOR_MODES[j];
            BeamSplitter::new(COHERENT_MODES[j], SIGNAL_PATHS[j], 0.5)
                .map(|bs| bs.with_outputs(c, d).into())
        })
        .collect::<Result<_>>()?;
    let ebs_stage = Circuit::new(preparation.output().clone(), ebs)?;

    let input = StateVector::fock(input_reg, &[("s", 1)])?.with_caps(caps_for_order(n_max))?;
    let pre_ebs = apply_circuit(&input, &preparation)?;
    Ok(TwcSetup { thetas, q, n_max, preparation, ebs_stage, input, pre_ebs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signal_amplitudes_match_the_three_path_split() {
        let setup = build_twc_circuit([0.3, -1.2, 2.0], C64::new(0.2, 0.0)).unwrap();
        let split = apply_circuit(
            &setup.input,
            &Circuit::new(setup.input.registry().clone(), setup.preparation.elements()[..5].to_vec())
                .unwrap(),
        )
        .unwrap();
        for path in SIGNAL_PATHS {
            let amp = split.amplitude_of(&[(path, 1)]).unwrap();
            assert!((amp - C64::new(-1.0 / 3f64.sqrt(), 0.0)).norm() < 1e-15, "{path}: {amp}");
        }
    }

    #[test]
    fn pre_ebs_state_is_the_expanded_product() {
        let thetas = [0.4, 1.7, -2.2];
        let q = C64::new(0.15, -0.1);
        let setup = build_twc_circuit(thetas, q).unwrap();
        let n = 1.0 / (1.0 + q.norm_sqr()).sqrt();
        assert_eq!(setup.pre_ebs.len(), 3 * 8);
        for (j, path) in SIGNAL_PATHS.iter().enumerate() {
            for mask in 0..8u32 {
                let mut occ = vec![(*path, 1)];
                let mut k = 0;
                for (bit, e) in COHERENT_MODES.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        occ.push((*e, 1));
                        k += 1;
                    }
                }
                let expect = -n.powi(3) / 3f64.sqrt() * C64::from_polar(1.0, thetas[j]) * q.powu(k);
                let got = setup.pre_ebs.amplitude_of(&occ).unwrap();
                assert!((got - expect).norm() < 1e-15, "{occ:?}: {got} vs {expect}");
            }
        }
        assert!((setup.pre_ebs.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn three_wave_amplitudes() {
        let setup = build_twc_circuit([0.0, PI, 0.0], C64::new(0.2, 0.0)).unwrap();
        let m = setup.m();
        let expect = [-m, m, -m];
        let occs: [&[(&str, u32)]; 3] = [
            &[("a", 1), ("e2", 1), ("e3", 1)],
            &[("e1", 1), ("b", 1), ("e3", 1)],
            &[("e1", 1), ("e2", 1), ("c", 1)],
        ];
        for (occ, want) in occs.iter().zip(expect) {
            let got = setup.pre_ebs.amplitude_of(occ).unwrap();
            assert!((got - want).norm() < 1e-15 * m.norm().max(1.0), "{occ:?}");
        }
        let n = 1.0 / 1.04f64.sqrt();
        assert!((m - C64::new(n.powi(3) * 0.04 / 3f64.sqrt(), 0.0)).norm() < 1e-16);
    }

    #[test]
    fn never_exceeds_four_photons_at_first_order() {
        let setup = build_twc_circuit([0.1, 0.2, 0.3], C64::new(0.5, 0.1)).unwrap();
        let out = setup.evolve().unwrap();
        let max_total = out.iter().map(|(t, _)| t.total()).max().unwrap();
        assert_eq!(max_total, 4);
        assert_eq!(out.truncate(4).len(), out.len());
        assert_eq!(setup.pre_ebs.truncate(4).len(), setup.pre_ebs.len());
    }

    #[test]
    fn higher_orders_need_and_get_larger_caps() {
        let setup = build_twc_circuit_with_order([0.0, PI, 0.0], C64::new(0.3, 0.0), 2).unwrap();
        let out = setup.evolve().unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-13);
    }
}
