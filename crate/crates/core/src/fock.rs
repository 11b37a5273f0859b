//! Multimode bosonic states as sparse superpositions of occupation-number
//! terms.
//!
//! A [`StateVector`] is an immutable value: every operation returns a new
//! state. Amplitudes whose magnitude drops below [`PRUNE_THRESHOLD`] are
//! discarded after each operation, so exact cancellations leave no residue
//! in the term table.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Amplitudes with magnitude below this value are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// Ordered set of unique mode labels. The order fixes the layout of every
/// [`FockTerm`] built against the registry.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModeRegistry {
    labels: Vec<String>,
}

impl ModeRegistry {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyRegistry);
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DuplicateMode(l.clone()));
            }
        }
        Ok(Self { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn index(&self, label: &str) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::UnknownMode(label.to_string()))
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index_of(label).is_some()
    }

    /// Same layout with one label replaced.
    pub fn renamed(&self, from: &str, to: &str) -> Result<Self> {
        let idx = self.index(from)?;
        if from != to && self.contains(to) {
            return Err(Error::DuplicateMode(to.to_string()));
        }
        let mut labels = self.labels.clone();
        labels[idx] = to.to_string();
        Ok(Self { labels })
    }

    /// Concatenation of two disjoint registries (`self` first).
    pub fn union(&self, other: &ModeRegistry) -> Result<Self> {
        if let Some(l) = other.labels.iter().find(|l| self.contains(l)) {
            return Err(Error::OverlappingModes(l.clone()));
        }
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        Ok(Self { labels })
    }
}

impl fmt::Display for ModeRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels.join(","))
    }
}

/// Photon counts, one per registered mode.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockTerm(Vec<u32>);

impl FockTerm {
    pub fn new(occupations: Vec<u32>) -> Self {
        Self(occupations)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn occupations(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, mode: usize) -> u32 {
        self.0[mode]
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub(crate) fn with(&self, mode: usize, n: u32) -> Self {
        let mut occ = self.0.clone();
        occ[mode] = n;
        Self(occ)
    }

    fn concat(&self, other: &FockTerm) -> Self {
        let mut occ = self.0.clone();
        occ.extend_from_slice(&other.0);
        Self(occ)
    }
}

impl fmt::Display for FockTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "|{}⟩", parts.join(","))
    }
}

/// Occupation limits enforced while building and evolving states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Caps {
    pub per_mode: u32,
    pub total: u32,
}

impl Default for Caps {
    fn default() -> Self {
        Self { per_mode: 2, total: 4 }
    }
}

impl Caps {
    fn max(self, other: Caps) -> Caps {
        Caps {
            per_mode: self.per_mode.max(other.per_mode),
            total: self.total.max(other.total),
        }
    }

    pub(crate) fn check(&self, registry: &ModeRegistry, term: &FockTerm) -> Result<()> {
        for (i, &n) in term.occupations().iter().enumerate() {
            if n > self.per_mode {
                return Err(Error::OccupationOverflow {
                    mode: registry.labels()[i].clone(),
                    occupation: n,
                    cap: self.per_mode,
                });
            }
        }
        let total = term.total();
        if total > self.total {
            return Err(Error::TotalOverflow { total, cap: self.total });
        }
        Ok(())
    }
}

/// Sparse superposition of [`FockTerm`]s over a shared [`ModeRegistry`].
#[derive(Debug, Clone)]
pub struct StateVector {
    registry: Arc<ModeRegistry>,
    terms: BTreeMap<FockTerm, C64>,
    caps: Caps,
}

impl StateVector {
    /// The state with no terms (not normalized).
    pub fn zero(registry: ModeRegistry) -> Self {
        Self::zero_in(Arc::new(registry), Caps::default())
    }

    pub(crate) fn zero_in(registry: Arc<ModeRegistry>, caps: Caps) -> Self {
        Self { registry, terms: BTreeMap::new(), caps }
    }

    pub fn vacuum(registry: ModeRegistry) -> Result<Self> {
        if registry.is_empty() {
            return Err(Error::EmptyRegistry);
        }
        let n = registry.len();
        let mut s = Self::zero(registry);
        s.terms.insert(FockTerm::zeros(n), C64::new(1.0, 0.0));
        Ok(s)
    }

    /// Single basis term with the listed occupations (unlisted modes empty)
    /// and amplitude 1.
    pub fn fock(registry: ModeRegistry, occupations: &[(&str, u32)]) -> Result<Self> {
        let term = term_from_labels(&registry, occupations)?;
        Self::zero(registry).add_term(term, C64::new(1.0, 0.0))
    }

    pub fn with_caps(mut self, caps: Caps) -> Result<Self> {
        for term in self.terms.keys() {
            caps.check(&self.registry, term)?;
        }
        self.caps = caps;
        Ok(self)
    }

    pub fn caps(&self) -> Caps {
        self.caps
    }

    pub fn registry(&self) -> &ModeRegistry {
        &self.registry
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending occupation order.
    pub fn iter(&self) -> impl Iterator<Item = (&FockTerm, &C64)> {
        self.terms.iter()
    }

    pub fn amplitude(&self, term: &FockTerm) -> C64 {
        self.terms.get(term).copied().unwrap_or_default()
    }

    /// Amplitude of the term given by label occupations (unlisted modes 0).
    pub fn amplitude_of(&self, occupations: &[(&str, u32)]) -> Result<C64> {
        Ok(self.amplitude(&term_from_labels(&self.registry, occupations)?))
    }

    pub fn term(&self, occupations: &[(&str, u32)]) -> Result<FockTerm> {
        term_from_labels(&self.registry, occupations)
    }

    pub fn add_term(&self, term: FockTerm, amp: C64) -> Result<Self> {
        if term.len() != self.registry.len() {
            return Err(Error::DimensionMismatch {
                expected: self.registry.len(),
                got: term.len(),
            });
        }
        self.caps.check(&self.registry, &term)?;
        let mut out = self.clone();
        accumulate(&mut out.terms, term, amp);
        Ok(out)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(C64::norm_sqr).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn same_registry(&self, other: &StateVector) -> bool {
        Arc::ptr_eq(&self.registry, &other.registry) || self.registry == other.registry
    }

    fn require_same_registry(&self, other: &StateVector) -> Result<()> {
        if self.same_registry(other) {
            Ok(())
        } else {
            Err(Error::RegistryMismatch {
                left: self.registry.to_string(),
                right: other.registry.to_string(),
            })
        }
    }

    /// ⟨self|other⟩, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &StateVector) -> Result<C64> {
        self.require_same_registry(other)?;
        let (small, large, flip) = if self.terms.len() <= other.terms.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut acc = C64::default();
        for (term, a) in &small.terms {
            if let Some(b) = large.terms.get(term) {
                acc += if flip { b.conj() * a } else { a.conj() * b };
            }
        }
        Ok(acc)
    }

    /// Product state on the union of both registries. Amplitudes multiply
    /// pairwise; the resulting caps are the looser of the two.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let registry = Arc::new(self.registry.union(&other.registry)?);
        let caps = self.caps.max(other.caps);
        let mut out = Self::zero_in(registry, caps);
        for (ta, a) in &self.terms {
            for (tb, b) in &other.terms {
                let term = ta.concat(tb);
                caps.check(&out.registry, &term)?;
                accumulate(&mut out.terms, term, a * b);
            }
        }
        Ok(out)
    }

    /// Drops every term with more than `max_total` photons. No
    /// renormalization.
    pub fn truncate(&self, max_total: u32) -> Self {
        self.filter(|t| t.total() <= max_total)
    }

    /// Keeps only the terms for which `keep` holds.
    pub fn filter<F: Fn(&FockTerm) -> bool>(&self, keep: F) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(t, _)| keep(t))
            .map(|(t, a)| (t.clone(), *a))
            .collect();
        Self { registry: Arc::clone(&self.registry), terms, caps: self.caps }
    }

    pub fn scale(&self, factor: C64) -> Self {
        let mut out = Self::zero_in(Arc::clone(&self.registry), self.caps);
        for (t, a) in &self.terms {
            accumulate(&mut out.terms, t.clone(), a * factor);
        }
        out
    }

    /// Term-wise sum of two states on the same registry.
    pub fn plus(&self, other: &StateVector) -> Result<Self> {
        self.require_same_registry(other)?;
        let mut out = self.clone();
        out.caps = self.caps.max(other.caps);
        for (t, a) in &other.terms {
            accumulate(&mut out.terms, t.clone(), *a);
        }
        Ok(out)
    }

    pub fn renamed(&self, from: &str, to: &str) -> Result<Self> {
        self.relabeled(self.registry.renamed(from, to)?)
    }

    /// Same terms on a registry with the same length but new labels.
    pub fn relabeled(&self, registry: ModeRegistry) -> Result<Self> {
        if registry.len() != self.registry.len() {
            return Err(Error::DimensionMismatch {
                expected: self.registry.len(),
                got: registry.len(),
            });
        }
        Ok(Self { registry: Arc::new(registry), terms: self.terms.clone(), caps: self.caps })
    }

    /// Rebuilds the term table from `(term, amplitude)` contributions on the
    /// same registry, pruning as it goes.
    pub(crate) fn from_contributions<I>(like: &StateVector, items: I) -> Result<Self>
    where
        I: IntoIterator<Item = (FockTerm, C64)>,
    {
        let mut out = Self::zero_in(Arc::clone(&like.registry), like.caps);
        let mut raw: BTreeMap<FockTerm, C64> = BTreeMap::new();
        for (t, a) in items {
            *raw.entry(t).or_default() += a;
        }
        for (t, a) in raw {
            if a.norm() >= PRUNE_THRESHOLD {
                out.caps.check(&out.registry, &t)?;
                out.terms.insert(t, a);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (t, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i){}", a.re, a.im, t)?;
        }
        Ok(())
    }
}

fn accumulate(terms: &mut BTreeMap<FockTerm, C64>, term: FockTerm, amp: C64) {
    let entry = terms.entry(term);
    match entry {
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let v = *e.get() + amp;
            if v.norm() < PRUNE_THRESHOLD {
                e.remove();
            } else {
                *e.get_mut() = v;
            }
        }
        std::collections::btree_map::Entry::Vacant(e) => {
            if amp.norm() >= PRUNE_THRESHOLD {
                e.insert(amp);
            }
        }
    }
}

pub(crate) fn term_from_labels(
    registry: &ModeRegistry,
    occupations: &[(&str, u32)],
) -> Result<FockTerm> {
    let mut occ = vec![0; registry.len()];
    for &(label, n) in occupations {
        occ[registry.index(label)?] = n;
    }
    Ok(FockTerm::new(occ))
}
