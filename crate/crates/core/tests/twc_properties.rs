//! Three-path interferometer against the closed form and the dense oracle.

mod common;

use std::f64::consts::PI;

use common::dense::DenseState;
use common::random;
use fockline::detection::{
    contradiction_report, joint_probability, tag_3waves, ThreeWave, TriplePattern,
};
use fockline::twc::build_twc_circuit;
use fockline::C64;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn patterns_follow_the_closed_form(t1 in 0.0..2.0 * PI, t2 in 0.0..2.0 * PI, t3 in 0.0..2.0 * PI, q in 0.01..0.6f64) {
        let thetas = [t1, t2, t3];
        let setup = build_twc_circuit(thetas, C64::new(q, 0.0)).unwrap();
        let out = setup.evolve().unwrap();
        for p in TriplePattern::all() {
            let got = joint_probability(&out, &p.detection()).unwrap();
            let want = p.closed_form(thetas, setup.m());
            // Near-dark patterns are compared on the scale of the brightest one.
            let scale = setup.m().norm_sqr() * 9.0 / 8.0;
            prop_assert!((got - want).abs() <= 1e-10 * want.max(1e-6 * scale), "{p}: {got} vs {want}");
        }
    }

    #[test]
    fn contributions_sum_to_the_total(t1 in 0.0..2.0 * PI, t2 in 0.0..2.0 * PI, t3 in 0.0..2.0 * PI) {
        let r = contradiction_report([t1, t2, t3], C64::new(0.2, 0.0)).unwrap();
        prop_assert!(r.residual() < 1e-12);
    }

    #[test]
    fn relabeling_the_arms_permutes_the_patterns(t1 in 0.0..2.0 * PI, t2 in 0.0..2.0 * PI, t3 in 0.0..2.0 * PI) {
        let q = C64::new(0.3, 0.0);
        let a = build_twc_circuit([t1, t2, t3], q).unwrap().evolve().unwrap();
        let b = build_twc_circuit([t3, t1, t2], q).unwrap().evolve().unwrap();
        for TriplePattern([x, y, z]) in TriplePattern::all() {
            let pa = joint_probability(&a, &TriplePattern([x, y, z]).detection()).unwrap();
            let pb = joint_probability(&b, &TriplePattern([z, x, y]).detection()).unwrap();
            prop_assert!((pa - pb).abs() < 1e-15);
        }
    }

    #[test]
    fn common_phase_on_all_arms_is_invisible(t1 in 0.0..2.0 * PI, t2 in 0.0..2.0 * PI, t3 in 0.0..2.0 * PI, phi in 0.0..2.0 * PI) {
        let q = C64::new(0.25, 0.0);
        let a = build_twc_circuit([t1, t2, t3], q).unwrap().evolve().unwrap();
        let b = build_twc_circuit([t1 + phi, t2 + phi, t3 + phi], q).unwrap().evolve().unwrap();
        for p in TriplePattern::all() {
            let pa = joint_probability(&a, &p.detection()).unwrap();
            let pb = joint_probability(&b, &p.detection()).unwrap();
            prop_assert!((pa - pb).abs() < 1e-15);
        }
    }
}

#[test]
fn dense_oracle_agrees_on_the_full_interferometer() {
    let mut rng = random::rng(2024);
    for _ in 0..3 {
        let thetas = random::thetas(&mut rng);
        let setup = build_twc_circuit(thetas, C64::new(0.2, 0.1)).unwrap();
        let sparse = setup.evolve().unwrap();
        let mut dense = DenseState::from_sparse(&setup.input, 2);
        dense.apply_circuit(&setup.circuit().unwrap());
        assert!((dense.norm_sqr() - 1.0).abs() < 1e-12);
        let dev = dense.max_deviation(&sparse);
        assert!(dev < 1e-12, "θ={thetas:?}: {dev}");
    }
}

#[test]
fn headline_value() {
    let setup = build_twc_circuit([0.0, PI, 0.0], C64::new(0.2, 0.0)).unwrap();
    let p = joint_probability(&setup.evolve().unwrap(), &TriplePattern::all_d().detection()).unwrap();
    let n3 = 1.04f64.powf(-1.5);
    let m = n3 * 0.04 / 3f64.sqrt();
    assert!(rel(p, m * m / 8.0) < 1e-10);
}

#[test]
fn probabilities_stay_below_one() {
    let mut rng = random::rng(99);
    for _ in 0..20 {
        let setup = build_twc_circuit(random::thetas(&mut rng), C64::new(0.5, -0.3)).unwrap();
        let out = setup.evolve().unwrap();
        let total: f64 = TriplePattern::all()
            .iter()
            .map(|p| joint_probability(&out, &p.detection()).unwrap())
            .sum();
        assert!((0.0..=1.0 + 1e-10).contains(&total));
    }
}

#[test]
fn tagging_partitions_the_three_photon_sector() {
    let setup = build_twc_circuit([0.3, 1.1, -0.4], C64::new(0.2, 0.0)).unwrap();
    let tagged = tag_3waves(&setup.pre_ebs).unwrap();
    for tag in ThreeWave::ALL {
        let g = tagged.group(tag);
        assert_eq!(g.len(), 1);
        let (term, amp) = g.iter().next().unwrap();
        assert_eq!(term.total(), 3);
        assert!((amp.norm() - setup.m().norm()).abs() < 1e-16);
    }
}

#[test]
fn contradiction_at_zero_pi_zero() {
    let r = contradiction_report([0.0, PI, 0.0], C64::new(0.2, 0.0)).unwrap();
    let m = build_twc_circuit([0.0, PI, 0.0], C64::new(0.2, 0.0)).unwrap().m();
    let s8 = 8f64.sqrt();
    let expect = [m / s8, -m / s8, m / s8];
    for (tag, want) in ThreeWave::ALL.into_iter().zip(expect) {
        assert!((r.contribution(tag) - want).norm() < 1e-10 * m.norm(), "{}", tag.name());
    }
    assert_eq!(r.entire_tags(), vec![ThreeWave::ViaA, ThreeWave::ViaC]);
}
