//! Post-selected detection probabilities and the decomposition of a final
//! amplitude into contributions from tagged terms of an earlier state.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{FockTerm, ModeRegistry, StateVector};
use crate::optics::{apply_circuit, Circuit};
use crate::twc::{build_twc_circuit, TwcSetup, COHERENT_MODES, DETECTOR_MODES, SIGNAL_PATHS};

/// `|contribution − total| < ENTIRE_AMPLITUDE_RTOL·|total|` marks a
/// contribution carrying the entire amplitude.
pub const ENTIRE_AMPLITUDE_RTOL: f64 = 1e-10;

/// Exact photon counts required on a subset of modes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectionPattern {
    requirements: BTreeMap<String, u32>,
}

impl DetectionPattern {
    pub fn new<I, S>(requirements: I) -> Self
    where
        I: IntoIterator<Item = (S, u32)>,
        S: Into<String>,
    {
        Self { requirements: requirements.into_iter().map(|(m, n)| (m.into(), n)).collect() }
    }

    pub fn requirements(&self) -> &BTreeMap<String, u32> {
        &self.requirements
    }

    fn resolve(&self, registry: &ModeRegistry) -> Result<Vec<(usize, u32)>> {
        self.requirements
            .iter()
            .map(|(m, &n)| Ok((registry.index(m)?, n)))
            .collect()
    }

    pub fn matches(&self, registry: &ModeRegistry, term: &FockTerm) -> Result<bool> {
        Ok(self.resolve(registry)?.iter().all(|&(i, n)| term.get(i) == n))
    }
}

/// Which detector of an end splitter fires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Click {
    C,
    D,
}

/// One click behind each of the three end splitters, e.g. `C₁ & D₂ & C₃`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TriplePattern(pub [Click; 3]);

impl TriplePattern {
    /// All eight patterns, `CCC` first and `DDD` last.
    pub fn all() -> Vec<TriplePattern> {
        (0..8u8)
            .map(|bits| {
                let pick = |j: u8| if bits >> (2 - j) & 1 == 1 { Click::D } else { Click::C };
                TriplePattern([pick(0), pick(1), pick(2)])
            })
            .collect()
    }

    pub fn all_d() -> TriplePattern {
        TriplePattern([Click::D; 3])
    }

    pub fn all_c() -> TriplePattern {
        TriplePattern([Click::C; 3])
    }

    /// Exactly one photon in the firing detector and none in its partner.
    pub fn detection(&self) -> DetectionPattern {
        let mut req = Vec::new();
        for (click, (c, d)) in self.0.iter().zip(DETECTOR_MODES) {
            let (hit, dark) = match click {
                Click::C => (c, d),
                Click::D => (d, c),
            };
            req.push((hit, 1));
            req.push((dark, 0));
        }
        DetectionPattern::new(req)
    }

    /// `|M|²/8 · |Σⱼ sⱼ e^{iθⱼ}|²` where the detector that differs from the
    /// other two enters with a minus sign and all signs are `+` when all
    /// three agree.
    pub fn closed_form(&self, thetas: [f64; 3], m: C64) -> f64 {
        let odd = self.odd_one_out();
        let sum: C64 = (0..3)
            .map(|j| {
                let sign = if Some(j) == odd { -1.0 } else { 1.0 };
                sign * C64::from_polar(1.0, thetas[j])
            })
            .sum();
        m.norm_sqr() / 8.0 * sum.norm_sqr()
    }

    fn odd_one_out(&self) -> Option<usize> {
        let [x, y, z] = self.0;
        if x == y && y == z {
            None
        } else if x == y {
            Some(2)
        } else if x == z {
            Some(1)
        } else {
            Some(0)
        }
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, click) in self.0.iter().enumerate() {
            let c = match click {
                Click::C => 'C',
                Click::D => 'D',
            };
            write!(f, "{c}{}", j + 1)?;
        }
        Ok(())
    }
}

/// Total weight of every term whose occupations on the pattern modes match
/// exactly; unconstrained modes are summed over.
pub fn joint_probability(state: &StateVector, pattern: &DetectionPattern) -> Result<f64> {
    let req = pattern.resolve(state.registry())?;
    Ok(state
        .iter()
        .filter(|(t, _)| req.iter().all(|&(i, n)| t.get(i) == n))
        .map(|(_, a)| a.norm_sqr())
        .sum())
}

/// Amplitude of the single term matching `pattern`. No match gives zero;
/// several matches that differ on unconstrained modes are an error.
pub fn post_selected_amplitude(state: &StateVector, pattern: &DetectionPattern) -> Result<C64> {
    let req = pattern.resolve(state.registry())?;
    let matching: Vec<C64> = state
        .iter()
        .filter(|(t, _)| req.iter().all(|&(i, n)| t.get(i) == n))
        .map(|(_, a)| *a)
        .collect();
    match matching.as_slice() {
        [] => Ok(C64::default()),
        [a] => Ok(*a),
        many => Err(Error::UnderspecifiedPattern(many.len())),
    }
}

/// Path carrying the source photon in a 3-wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ThreeWave {
    #[serde(rename = "via-a")]
    ViaA,
    #[serde(rename = "via-b")]
    ViaB,
    #[serde(rename = "via-c")]
    ViaC,
}

impl ThreeWave {
    pub const ALL: [ThreeWave; 3] = [ThreeWave::ViaA, ThreeWave::ViaB, ThreeWave::ViaC];

    pub fn index(self) -> usize {
        match self {
            ThreeWave::ViaA => 0,
            ThreeWave::ViaB => 1,
            ThreeWave::ViaC => 2,
        }
    }

    /// Occupied modes: the signal path `uⱼ` and the two other coherent modes.
    pub fn occupied_modes(self) -> [&'static str; 3] {
        let j = self.index();
        let mut modes = COHERENT_MODES;
        modes[j] = SIGNAL_PATHS[j];
        modes
    }

    pub fn name(self) -> &'static str {
        match self {
            ThreeWave::ViaA => "via-a",
            ThreeWave::ViaB => "via-b",
            ThreeWave::ViaC => "via-c",
        }
    }
}

impl fmt::Display for ThreeWave {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Disjoint slices of one state, keyed by tag.
#[derive(Debug, Clone)]
pub struct TaggedState {
    groups: BTreeMap<ThreeWave, StateVector>,
}

impl TaggedState {
    pub fn group(&self, tag: ThreeWave) -> &StateVector {
        &self.groups[&tag]
    }

    pub fn groups(&self) -> impl Iterator<Item = (ThreeWave, &StateVector)> {
        self.groups.iter().map(|(t, s)| (*t, s))
    }
}

/// Terms with exactly one photon in each `(uⱼ, eⱼ)` pair: the only terms
/// able to give one click behind every end splitter.
pub fn triple_single_photon_sector(state: &StateVector) -> Result<StateVector> {
    let reg = state.registry();
    let pairs: Vec<(usize, usize)> = SIGNAL_PATHS
        .iter()
        .zip(COHERENT_MODES)
        .map(|(u, e)| Ok((reg.index(u)?, reg.index(e)?)))
        .collect::<Result<_>>()?;
    Ok(state.filter(|t| {
        pairs.iter().all(|&(u, e)| t.get(u) + t.get(e) == 1)
            && t.total() == 3
    }))
}

/// Splits the pre-splitter state into its three 3-waves.
pub fn tag_3waves(state: &StateVector) -> Result<TaggedState> {
    let mut groups = BTreeMap::new();
    for tag in ThreeWave::ALL {
        let occ: Vec<(&str, u32)> = tag.occupied_modes().iter().map(|m| (*m, 1)).collect();
        let term = state.term(&occ)?;
        let amp = state.amplitude(&term);
        if amp == C64::default() {
            let desc: Vec<String> = occ.iter().map(|(m, _)| format!("|1;{m}⟩")).collect();
            return Err(Error::MissingThreeWave(desc.join("")));
        }
        let slice = state.filter(|t| *t == term);
        groups.insert(tag, slice);
    }
    Ok(TaggedState { groups })
}

/// Amplitude reaching `pattern` when only the `tag` group is evolved
/// through `ebs_stage`.
pub fn contribution(
    tagged: &TaggedState,
    tag: ThreeWave,
    ebs_stage: &Circuit,
    pattern: &DetectionPattern,
) -> Result<C64> {
    let evolved = apply_circuit(tagged.group(tag), ebs_stage)?;
    post_selected_amplitude(&evolved, pattern)
}

#[derive(Debug, Clone, Serialize)]
pub struct TagContribution {
    pub tag: ThreeWave,
    /// Amplitude of the 3-wave before the end splitters.
    pub weight: C64,
    pub contribution: C64,
    /// The contribution alone equals the total amplitude.
    pub entire: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContradictionReport {
    pub thetas: [f64; 3],
    pub pattern: String,
    pub total: C64,
    pub contributions: Vec<TagContribution>,
    /// Pairs of tags whose contributions sum to zero.
    pub cancelling_pairs: Vec<(ThreeWave, ThreeWave)>,
}

impl ContradictionReport {
    pub fn contribution(&self, tag: ThreeWave) -> C64 {
        self.contributions[tag.index()].contribution
    }

    pub fn entire_tags(&self) -> Vec<ThreeWave> {
        self.contributions.iter().filter(|c| c.entire).map(|c| c.tag).collect()
    }

    /// `|Σ contributions − total|`.
    pub fn residual(&self) -> f64 {
        let sum: C64 = self.contributions.iter().map(|c| c.contribution).sum();
        (sum - self.total).norm()
    }
}

pub fn contradiction_report(thetas: [f64; 3], q: C64) -> Result<ContradictionReport> {
    contradiction_report_for(&build_twc_circuit(thetas, q)?)
}

/// Same as [`contradiction_report`] for an already built interferometer,
/// e.g. one with higher-order coherent beams.
pub fn contradiction_report_for(setup: &TwcSetup) -> Result<ContradictionReport> {
    let thetas = setup.thetas;
    let pattern = TriplePattern::all_d();
    let detection = pattern.detection();
    let total = post_selected_amplitude(&setup.evolve()?, &detection)?;
    let tagged = tag_3waves(&setup.pre_ebs)?;

    let mut contributions = Vec::with_capacity(3);
    for tag in ThreeWave::ALL {
        let c = contribution(&tagged, tag, &setup.ebs_stage, &detection)?;
        let weight = tagged.group(tag).iter().next().map(|(_, a)| *a).unwrap_or_default();
        let entire = (c - total).norm() < ENTIRE_AMPLITUDE_RTOL * total.norm();
        contributions.push(TagContribution { tag, weight, contribution: c, entire });
    }

    let mut cancelling_pairs = Vec::new();
    for i in 0..3 {
        for j in i + 1..3 {
            let (x, y) = (contributions[i].contribution, contributions[j].contribution);
            let scale = x.norm().max(y.norm());
            if scale > 0.0 && (x + y).norm() < ENTIRE_AMPLITUDE_RTOL * scale {
                cancelling_pairs.push((contributions[i].tag, contributions[j].tag));
            }
        }
    }

    Ok(ContradictionReport {
        thetas,
        pattern: pattern.to_string(),
        total,
        contributions,
        cancelling_pairs,
    })
}
