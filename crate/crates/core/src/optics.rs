//! Passive linear-optics elements, coherent sources and circuits.
//!
//! A beam splitter is described by the 2×2 matrix acting on creation
//! operators: `a₁† → U₁₁ a₁† + U₂₁ a₂†`, `a₂† → U₁₂ a₁† + U₂₂ a₂†`.
//! Multi-photon terms are transformed by expanding the operator monomials,
//! so the action is exact for every photon number.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{Caps, FockTerm, ModeRegistry, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitterConvention {
    /// Transmission `t`, reflection `i·r` on both ports.
    SymmetricI,
    /// `u → (c + d)/√2`, `e → (c + i·d)/√2` taken literally. Not unitary,
    /// always rejected by [`BeamSplitter::with_convention`].
    NonOrthogonal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamSplitter {
    pub mode_in_1: String,
    pub mode_in_2: String,
    /// Reflected intensity fraction.
    pub reflectivity: f64,
    pub convention: SplitterConvention,
    /// Labels carried by the two output ports, if they differ from the inputs.
    pub outputs: Option<(String, String)>,
}

impl BeamSplitter {
    pub fn new(mode_in_1: &str, mode_in_2: &str, reflectivity: f64) -> Result<Self> {
        Self::with_convention(mode_in_1, mode_in_2, reflectivity, SplitterConvention::SymmetricI)
    }

    pub fn with_convention(
        mode_in_1: &str,
        mode_in_2: &str,
        reflectivity: f64,
        convention: SplitterConvention,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&reflectivity) || reflectivity.is_nan() {
            return Err(Error::InvalidReflectivity(reflectivity));
        }
        if mode_in_1 == mode_in_2 {
            return Err(Error::SameModeSplitter(mode_in_1.to_string()));
        }
        if convention == SplitterConvention::NonOrthogonal {
            let u = [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)];
            let e = [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(0.0, FRAC_1_SQRT_2)];
            let overlap = (u[0].conj() * e[0] + u[1].conj() * e[1]).norm();
            return Err(Error::NonUnitaryConvention { overlap });
        }
        Ok(Self {
            mode_in_1: mode_in_1.to_string(),
            mode_in_2: mode_in_2.to_string(),
            reflectivity,
            convention,
            outputs: None,
        })
    }

    /// Renames the output ports: port 1 (transmitted continuation of input
    /// 1) becomes `out_1`, port 2 becomes `out_2`.
    pub fn with_outputs(mut self, out_1: &str, out_2: &str) -> Self {
        self.outputs = Some((out_1.to_string(), out_2.to_string()));
        self
    }

    /// Single-photon transfer matrix, `m[out][in]`.
    pub fn matrix(&self) -> [[C64; 2]; 2] {
        let t = C64::new((1.0 - self.reflectivity).sqrt(), 0.0);
        let r = C64::new(0.0, self.reflectivity.sqrt());
        [[t, r], [r, t]]
    }

    fn output_labels(&self) -> (&str, &str) {
        match &self.outputs {
            Some((a, b)) => (a, b),
            None => (&self.mode_in_1, &self.mode_in_2),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseShifter {
    pub mode: String,
    pub theta: f64,
}

impl PhaseShifter {
    pub fn new(mode: &str, theta: f64) -> Self {
        Self { mode: mode.to_string(), theta }
    }
}

/// Number-truncated coherent source `𝒩 Σ_{n ≤ n_max} qⁿ/√n! |n⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentSource {
    pub mode: String,
    pub q: C64,
    pub n_max: u32,
}

impl CoherentSource {
    pub fn new(mode: &str, q: C64) -> Result<Self> {
        Self::with_order(mode, q, 1)
    }

    pub fn with_order(mode: &str, q: C64, n_max: u32) -> Result<Self> {
        if q.norm().is_nan() || q.norm() >= 1.0 {
            return Err(Error::CoherentAmplitude(q.norm()));
        }
        Ok(Self { mode: mode.to_string(), q, n_max })
    }

    /// The normalization factor 𝒩 of the truncated state.
    pub fn normalization(&self) -> f64 {
        let mut sum = 0.0;
        let mut w = 1.0;
        for n in 0..=self.n_max {
            if n > 0 {
                w *= self.q.norm_sqr() / n as f64;
            }
            sum += w;
        }
        1.0 / sum.sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    BeamSplitter(BeamSplitter),
    Phase(PhaseShifter),
    /// Brings a new mode into the circuit, prepared in a coherent state.
    Coherent(CoherentSource),
}

impl Element {
    pub fn is_passive(&self) -> bool {
        !matches!(self, Element::Coherent(_))
    }
}

impl From<BeamSplitter> for Element {
    fn from(bs: BeamSplitter) -> Self {
        Element::BeamSplitter(bs)
    }
}

impl From<PhaseShifter> for Element {
    fn from(ps: PhaseShifter) -> Self {
        Element::Phase(ps)
    }
}

impl From<CoherentSource> for Element {
    fn from(src: CoherentSource) -> Self {
        Element::Coherent(src)
    }
}

/// Ordered elements applied to states on `input`.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    input: ModeRegistry,
    output: ModeRegistry,
    elements: Vec<Element>,
}

impl Circuit {
    pub fn new(input: ModeRegistry, elements: Vec<Element>) -> Result<Self> {
        let mut labels = input.clone();
        for el in &elements {
            labels = step_registry(&labels, el)?;
        }
        Ok(Self { input, output: labels, elements })
    }

    pub fn empty(input: ModeRegistry) -> Self {
        Self { output: input.clone(), input, elements: Vec::new() }
    }

    pub fn input(&self) -> &ModeRegistry {
        &self.input
    }

    pub fn output(&self) -> &ModeRegistry {
        &self.output
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_passive(&self) -> bool {
        self.elements.iter().all(Element::is_passive)
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Circuit) -> Result<Circuit> {
        if next.input != self.output {
            return Err(Error::RegistryMismatch {
                left: self.output.to_string(),
                right: next.input.to_string(),
            });
        }
        let mut elements = self.elements.clone();
        elements.extend(next.elements.iter().cloned());
        Circuit::new(self.input.clone(), elements)
    }
}

fn step_registry(labels: &ModeRegistry, el: &Element) -> Result<ModeRegistry> {
    match el {
        Element::BeamSplitter(bs) => {
            let i1 = labels.index(&bs.mode_in_1)?;
            let i2 = labels.index(&bs.mode_in_2)?;
            let (o1, o2) = bs.output_labels();
            let mut next = labels.labels().to_vec();
            next[i1] = o1.to_string();
            next[i2] = o2.to_string();
            ModeRegistry::new(next)
        }
        Element::Phase(ps) => {
            labels.index(&ps.mode)?;
            Ok(labels.clone())
        }
        Element::Coherent(src) => labels.union(&ModeRegistry::new([src.mode.as_str()])?),
    }
}

pub fn apply_beam_splitter(state: &StateVector, bs: &BeamSplitter) -> Result<StateVector> {
    let reg = state.registry();
    let i1 = reg.index(&bs.mode_in_1)?;
    let i2 = reg.index(&bs.mode_in_2)?;
    let u = bs.matrix();
    let mut out: Vec<(FockTerm, C64)> = Vec::new();
    for (term, amp) in state.iter() {
        let n1 = term.get(i1);
        let n2 = term.get(i2);
        for (p, coeff) in two_mode_images(n1, n2, &u) {
            out.push((term.with(i1, p).with(i2, n1 + n2 - p), amp * coeff));
        }
    }
    let mixed = StateVector::from_contributions(state, out)?;
    if bs.outputs.is_none() {
        return Ok(mixed);
    }
    let (o1, o2) = bs.output_labels();
    let mut labels = reg.labels().to_vec();
    labels[i1] = o1.to_string();
    labels[i2] = o2.to_string();
    mixed.relabeled(ModeRegistry::new(labels)?)
}

/// Image of `|n1, n2⟩` under the splitter: `(p, c)` meaning amplitude `c`
/// on `|p, n1 + n2 − p⟩`.
fn two_mode_images(n1: u32, n2: u32, u: &[[C64; 2]; 2]) -> Vec<(u32, C64)> {
    let total = n1 + n2;
    let mut coeff = vec![C64::default(); total as usize + 1];
    // (U11 a† + U21 b†)^n1 (U12 a† + U22 b†)^n2, collected by power of a†.
    for k in 0..=n1 {
        let ck = binomial(n1, k) * u[0][0].powu(k) * u[1][0].powu(n1 - k);
        for l in 0..=n2 {
            let cl = binomial(n2, l) * u[0][1].powu(l) * u[1][1].powu(n2 - l);
            coeff[(k + l) as usize] += ck * cl;
        }
    }
    let norm_in = (factorial(n1) * factorial(n2)).sqrt();
    coeff
        .into_iter()
        .enumerate()
        .map(|(p, c)| {
            let p = p as u32;
            let norm_out = (factorial(p) * factorial(total - p)).sqrt();
            (p, c * norm_out / norm_in)
        })
        .collect()
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

pub fn apply_phase(state: &StateVector, ps: &PhaseShifter) -> Result<StateVector> {
    let idx = state.registry().index(&ps.mode)?;
    let items = state.iter().map(|(t, a)| {
        let phase = C64::from_polar(1.0, ps.theta * f64::from(t.get(idx)));
        (t.clone(), a * phase)
    });
    StateVector::from_contributions(state, items)
}

pub fn emit_coherent(src: &CoherentSource) -> Result<StateVector> {
    if src.q.norm().is_nan() || src.q.norm() >= 1.0 {
        return Err(Error::CoherentAmplitude(src.q.norm()));
    }
    let registry = ModeRegistry::new([src.mode.as_str()])?;
    let caps = Caps {
        per_mode: src.n_max.max(Caps::default().per_mode),
        total: src.n_max.max(Caps::default().total),
    };
    let norm = src.normalization();
    let mut state = StateVector::zero(registry).with_caps(caps)?;
    let mut amp = C64::new(norm, 0.0);
    for n in 0..=src.n_max {
        if n > 0 {
            amp = amp * src.q / f64::from(n).sqrt();
        }
        state = state.add_term(FockTerm::new(vec![n]), amp)?;
    }
    Ok(state)
}

/// Tensors a freshly emitted coherent mode onto `state`, keeping the caps
/// of `state`.
pub fn apply_source(state: &StateVector, src: &CoherentSource) -> Result<StateVector> {
    state.tensor(&emit_coherent(src)?)?.with_caps(state.caps())
}

pub fn apply_element(state: &StateVector, el: &Element) -> Result<StateVector> {
    match el {
        Element::BeamSplitter(bs) => apply_beam_splitter(state, bs),
        Element::Phase(ps) => apply_phase(state, ps),
        Element::Coherent(src) => apply_source(state, src),
    }
}

pub fn apply_circuit(state: &StateVector, circuit: &Circuit) -> Result<StateVector> {
    if state.registry() != circuit.input() {
        return Err(Error::RegistryMismatch {
            left: state.registry().to_string(),
            right: circuit.input().to_string(),
        });
    }
    circuit
        .elements()
        .iter()
        .try_fold(state.clone(), |s, el| apply_element(&s, el))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn reg(labels: &[&str]) -> ModeRegistry {
        ModeRegistry::new(labels.iter().copied()).unwrap()
    }

    #[test]
    fn symmetric_splitter_matrix_is_unitary() {
        for r in [0.0, 0.2, 1.0 / 3.0, 0.5, 0.9, 1.0] {
            let u = BeamSplitter::new("a", "b", r).unwrap().matrix();
            for i in 0..2 {
                for j in 0..2 {
                    let dot: C64 = (0..2).map(|k| u[k][i].conj() * u[k][j]).sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - expect).norm() < 1e-15, "r={r} ({i},{j}) {dot}");
                }
            }
        }
    }

    #[test]
    fn printed_convention_is_rejected() {
        let err = BeamSplitter::with_convention("u", "e", 0.5, SplitterConvention::NonOrthogonal)
            .unwrap_err();
        match err {
            Error::NonUnitaryConvention { overlap } => assert!((overlap - FRAC_1_SQRT_2).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_reflectivity() {
        assert!(BeamSplitter::new("a", "b", 1.5).is_err());
        assert!(BeamSplitter::new("a", "b", -0.1).is_err());
        assert!(BeamSplitter::new("a", "a", 0.5).is_err());
    }

    #[test]
    fn single_photon_on_balanced_splitter() {
        let s = StateVector::fock(reg(&["a", "b"]), &[("a", 1)]).unwrap();
        let out = apply_beam_splitter(&s, &BeamSplitter::new("a", "b", 0.5).unwrap()).unwrap();
        let a = out.amplitude_of(&[("a", 1)]).unwrap();
        let b = out.amplitude_of(&[("b", 1)]).unwrap();
        assert!((a.norm() - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((b.norm() - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((b / a - C64::i()).norm() < 1e-15);
    }

    #[test]
    fn vacuum_is_invariant() {
        let v = StateVector::vacuum(reg(&["a", "b"])).unwrap();
        let out = apply_beam_splitter(&v, &BeamSplitter::new("a", "b", 0.3).unwrap()).unwrap();
        assert_eq!(out.len(), 1);
        assert!((out.amplitude_of(&[]).unwrap() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn two_photons_bunch() {
        let s = StateVector::fock(reg(&["a", "b"]), &[("a", 1), ("b", 1)]).unwrap();
        let out = apply_beam_splitter(&s, &BeamSplitter::new("a", "b", 0.5).unwrap()).unwrap();
        assert_eq!(out.amplitude_of(&[("a", 1), ("b", 1)]).unwrap(), C64::default());
        assert!((out.amplitude_of(&[("a", 2)]).unwrap().norm_sqr() - 0.5).abs() < 1e-15);
        assert!((out.amplitude_of(&[("b", 2)]).unwrap().norm_sqr() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn occupation_overflow_is_reported() {
        let s = StateVector::fock(reg(&["a", "b"]), &[("a", 2), ("b", 1)])
            .unwrap()
            .with_caps(Caps { per_mode: 2, total: 4 })
            .unwrap();
        let err = apply_beam_splitter(&s, &BeamSplitter::new("a", "b", 0.5).unwrap()).unwrap_err();
        assert!(matches!(err, Error::OccupationOverflow { cap: 2, .. }));
    }

    #[test]
    fn output_ports_are_renamed() {
        let s = StateVector::fock(reg(&["e", "u"]), &[("u", 1)]).unwrap();
        let bs = BeamSplitter::new("e", "u", 0.5).unwrap().with_outputs("c", "d");
        let out = apply_beam_splitter(&s, &bs).unwrap();
        assert_eq!(out.registry().labels(), &["c", "d"]);
        let c = out.amplitude_of(&[("c", 1)]).unwrap();
        let d = out.amplitude_of(&[("d", 1)]).unwrap();
        assert!((c - C64::new(0.0, FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((d - C64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn phase_shifts() {
        let s = StateVector::fock(reg(&["a", "b"]), &[("a", 1)]).unwrap();
        let same = apply_phase(&s, &PhaseShifter::new("a", 0.0)).unwrap();
        assert_eq!(same.amplitude_of(&[("a", 1)]).unwrap(), C64::new(1.0, 0.0));
        let flipped = apply_phase(&s, &PhaseShifter::new("a", PI)).unwrap();
        assert!((flipped.amplitude_of(&[("a", 1)]).unwrap() + 1.0).norm() < 1e-15);

        let two = StateVector::fock(reg(&["a", "b"]), &[("a", 2)]).unwrap();
        let x = apply_phase(&apply_phase(&two, &PhaseShifter::new("a", 0.4)).unwrap(), &PhaseShifter::new("a", 1.1))
            .unwrap();
        let y = apply_phase(&two, &PhaseShifter::new("a", 1.5)).unwrap();
        let diff = x.amplitude_of(&[("a", 2)]).unwrap() - y.amplitude_of(&[("a", 2)]).unwrap();
        assert!(diff.norm() < 1e-15);
        assert!(apply_phase(&s, &PhaseShifter::new("z", 1.0)).is_err());
    }

    #[test]
    fn coherent_emission() {
        let vac = emit_coherent(&CoherentSource::new("e", C64::default()).unwrap()).unwrap();
        assert_eq!(vac.len(), 1);
        assert_eq!(vac.amplitude_of(&[]).unwrap(), C64::new(1.0, 0.0));

        let src = CoherentSource::new("e", C64::new(0.2, 0.0)).unwrap();
        let s = emit_coherent(&src).unwrap();
        // (1, 0.2) / √1.04
        assert!((s.amplitude_of(&[("e", 0)]).unwrap().re - 0.980_580_675_690_920_2).abs() < 1e-15);
        assert!((s.amplitude_of(&[("e", 1)]).unwrap().re - 0.196_116_135_138_184_04).abs() < 1e-15);
        assert!((s.norm() - 1.0).abs() < 1e-15);

        let higher = CoherentSource::with_order("e", C64::new(0.3, 0.5), 4).unwrap();
        assert!((emit_coherent(&higher).unwrap().norm() - 1.0).abs() < 1e-14);

        assert!(CoherentSource::new("e", C64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn circuit_tracks_labels() {
        let input = reg(&["a", "b"]);
        let ok = Circuit::new(
            input.clone(),
            vec![
                BeamSplitter::new("a", "b", 0.5).unwrap().with_outputs("x", "y").into(),
                PhaseShifter::new("x", 0.1).into(),
                CoherentSource::new("e", C64::new(0.1, 0.0)).unwrap().into(),
                PhaseShifter::new("e", 0.1).into(),
            ],
        )
        .unwrap();
        assert_eq!(ok.output().labels(), &["x", "y", "e"]);
        assert!(!ok.is_passive());
        let bad = Circuit::new(input, vec![PhaseShifter::new("a", 0.1).into(), PhaseShifter::new("x", 0.2).into()]);
        assert_eq!(bad.unwrap_err(), Error::UnknownMode("x".into()));
    }

    #[test]
    fn empty_circuit_is_identity() {
        let s = StateVector::fock(reg(&["a", "b"]), &[("a", 1)]).unwrap();
        let out = apply_circuit(&s, &Circuit::empty(reg(&["a", "b"]))).unwrap();
        assert_eq!(out.amplitude_of(&[("a", 1)]).unwrap(), C64::new(1.0, 0.0));
        assert_eq!(out.len(), 1);
    }
}
