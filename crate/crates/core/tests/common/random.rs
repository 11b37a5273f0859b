use std::f64::consts::PI;

use fockline::fock::{Caps, FockTerm, ModeRegistry, StateVector};
use fockline::optics::{BeamSplitter, Circuit, Element, PhaseShifter};
use fockline::C64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const LABELS: [&str; 4] = ["p", "q", "r", "s"];

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn thetas(rng: &mut StdRng) -> [f64; 3] {
    [0, 1, 2].map(|_| rng.random_range(0.0..2.0 * PI))
}

pub fn registry(modes: usize) -> ModeRegistry {
    ModeRegistry::new(LABELS[..modes].iter().copied()).unwrap()
}

/// Normalized random superposition of terms with at most `max_total`
/// photons, caps set to hold any passive evolution of it.
pub fn state(rng: &mut StdRng, modes: usize, max_total: u32) -> StateVector {
    let caps = Caps { per_mode: max_total, total: max_total };
    let mut s = StateVector::zero(registry(modes)).with_caps(caps).unwrap();
    let n_terms = rng.random_range(1..=6);
    for _ in 0..n_terms {
        let mut occ = vec![0u32; modes];
        let total = rng.random_range(0..=max_total);
        for _ in 0..total {
            occ[rng.random_range(0..modes)] += 1;
        }
        let amp = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        s = s.add_term(FockTerm::new(occ), amp).unwrap();
    }
    let norm = s.norm();
    s.scale(C64::new(1.0 / norm, 0.0))
}

pub fn passive_circuit(rng: &mut StdRng, modes: usize, len: usize) -> Circuit {
    let elements = (0..len)
        .map(|_| -> Element {
            if rng.random_bool(0.5) {
                let i = rng.random_range(0..modes);
                let mut j = rng.random_range(0..modes - 1);
                if j >= i {
                    j += 1;
                }
                BeamSplitter::new(LABELS[i], LABELS[j], rng.random_range(0.0..=1.0))
                    .unwrap()
                    .into()
            } else {
                PhaseShifter::new(LABELS[rng.random_range(0..modes)], rng.random_range(-PI..PI))
                    .into()
            }
        })
        .collect();
    Circuit::new(registry(modes), elements).unwrap()
}
