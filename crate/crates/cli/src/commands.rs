//! The four commands. Each turns a validated scenario into a [`RunReport`].

use std::collections::BTreeMap;

use fockline::afshar::{apply_wire, images_from_map, intensities, two_slit_field, AfsharConfig, Polarizer};
use fockline::cqed::{
    build_two_atom_rabi, channel_terms, exact_splitting, omega_eff, omega_eff_complex, RabiSystem,
    StateGraph, DEGENERACY_RTOL,
};
use fockline::detection::{
    contradiction_report_for, joint_probability, DetectionPattern, TriplePattern, ENTIRE_AMPLITUDE_RTOL,
};
use fockline::fock::{Caps, FockTerm, ModeRegistry, StateVector, PRUNE_THRESHOLD};
use fockline::optics::{
    apply_circuit, BeamSplitter, Circuit, CoherentSource, Element, PhaseShifter, SplitterConvention,
};
use fockline::twc::build_twc_circuit_with_order;
use fockline::C64;

use crate::error::{CliError, Result};
use crate::report::{format_number, Cell, RunReport, Table, PROBABILITY_CEILING, PROBABILITY_SLACK};
use crate::scenario::{
    AfsharScenario, CqedScenario, CustomScenario, ElementSpec, GraphSpec, Scenario, TwcScenario,
    SCHEMA_VERSION,
};

pub fn run(scenario: &Scenario) -> Result<RunReport> {
    let report = match scenario {
        Scenario::Twc(s) => cmd_twc(s)?,
        Scenario::Afshar(s) => cmd_afshar(s)?,
        Scenario::Cqed(s) => cmd_cqed(s)?,
        Scenario::Custom(s) => cmd_custom(s)?,
    };
    report.check_probabilities()?;
    Ok(report)
}

fn metadata(extra: &[(&str, String)]) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert("engine".into(), format!("fockline {}", env!("CARGO_PKG_VERSION")));
    m.insert("schema_version".into(), SCHEMA_VERSION.to_string());
    m.insert("prune_threshold".into(), format!("{PRUNE_THRESHOLD:e}"));
    m.insert("probability_ceiling".into(), format!("1 + {PROBABILITY_SLACK:e}"));
    for (k, v) in extra {
        m.insert((*k).to_string(), v.clone());
    }
    m
}

fn caps_text(c: Caps) -> String {
    format!("per_mode={}, total={}", c.per_mode, c.total)
}

fn report(scenario: Scenario, metadata: BTreeMap<String, String>, summary: Vec<(String, f64)>, tables: Vec<Table>) -> RunReport {
    RunReport { kind: scenario.kind().name().into(), input: scenario.to_document(), metadata, summary, tables }
}

pub fn cmd_twc(s: &TwcScenario) -> Result<RunReport> {
    let thetas = [s.thetas[0].value()?, s.thetas[1].value()?, s.thetas[2].value()?];
    let q = s.q.value();
    let setup = build_twc_circuit_with_order(thetas, q, s.n_max)?;
    let out = setup.evolve()?;
    let m = setup.m();

    let mut patterns = Table::new("patterns", ["pattern", "probability", "closed_form", "difference"]);
    let mut summary = vec![];
    let mut total_p = 0.0;
    for p in TriplePattern::all() {
        let prob = joint_probability(&out, &p.detection())?;
        let closed = p.closed_form(thetas, m);
        total_p += prob;
        summary.push((format!("P({p})"), prob));
        patterns.push(vec![p.to_string().into(), prob.into(), closed.into(), (prob - closed).into()]);
    }

    let r = contradiction_report_for(&setup)?;
    let mut contributions = Table::new(
        "contributions",
        ["tag", "weight_re", "weight_im", "contribution_re", "contribution_im", "entire"],
    );
    for c in &r.contributions {
        contributions.push(vec![
            c.tag.name().into(),
            c.weight.re.into(),
            c.weight.im.into(),
            c.contribution.re.into(),
            c.contribution.im.into(),
            c.entire.into(),
        ]);
    }
    let mut cancelling = Table::new("cancelling_pairs", ["first", "second"]);
    for (a, b) in &r.cancelling_pairs {
        cancelling.push(vec![a.name().into(), b.name().into()]);
    }

    summary.splice(
        0..0,
        [
            ("normalization".to_string(), setup.normalization()),
            ("M_re".into(), m.re),
            ("M_im".into(), m.im),
            (format!("amplitude_re({})", r.pattern), r.total.re),
            (format!("amplitude_im({})", r.pattern), r.total.im),
            ("decomposition_residual".into(), r.residual()),
            ("pattern_probability_sum".into(), total_p),
        ],
    );
    let meta = metadata(&[
        ("convention", "symmetric-i".into()),
        ("caps", caps_text(setup.input.caps())),
        ("coherent_order", s.n_max.to_string()),
        ("entire_amplitude_rtol", format!("{ENTIRE_AMPLITUDE_RTOL:e}")),
    ]);
    Ok(report(Scenario::Twc(s.clone()), meta, summary, vec![patterns, contributions, cancelling]))
}

pub fn cmd_afshar(s: &AfsharScenario) -> Result<RunReport> {
    let cfg = s.config();
    let map = intensities(&apply_wire(&two_slit_field(&cfg)?, &cfg));
    let open_cfg = AfsharConfig { gamma_peak: 0.0, ..cfg.clone() };
    let open = intensities(&two_slit_field(&open_cfg)?);
    let dim = |with: f64, without: f64| if without > 0.0 { 1.0 - with / without } else { 0.0 };

    let mut images = Table::new(
        "images",
        ["polarizer", "image_1", "image_2", "image_1_no_wire", "image_2_no_wire", "dimming_1", "dimming_2"],
    );
    let mut summary = vec![("wire_diameter".to_string(), cfg.wire_diameter())];
    let mut pairs = BTreeMap::new();
    for p in Polarizer::ALL {
        let w = images_from_map(&map, p);
        let o = images_from_map(&open, p);
        pairs.insert(p, (w, o));
        images.push(vec![
            p.to_string().into(),
            w.i1.into(),
            w.i2.into(),
            o.i1.into(),
            o.i2.into(),
            dim(w.i1, o.i1).into(),
            dim(w.i2, o.i2).into(),
        ]);
        summary.push((format!("I1[{p}]"), w.i1));
        summary.push((format!("I2[{p}]"), w.i2));
    }
    let (h, _) = pairs[&Polarizer::H];
    let (a, a_open) = pairs[&Polarizer::A];
    let (d, _) = pairs[&Polarizer::D];
    summary.push(("dimming[A]".into(), dim(a.i1, a_open.i1)));
    summary.push(("dimming[D]".into(), dim(d.i1, pairs[&Polarizer::D].1.i1)));

    let mut cases = Table::new("cases", ["case", "polarizer", "statement", "holds"]);
    cases.push(vec!["i".into(), "H".into(), "image 2 is dark".into(), (h.i2 == 0.0).into()]);
    cases.push(vec![
        "ii".into(),
        "A".into(),
        "both images dimmed by less than 1% by the wire".into(),
        (dim(a.i1, a_open.i1) < 0.01 && dim(a.i2, a_open.i2) < 0.01).into(),
    ]);
    cases.push(vec![
        "iii".into(),
        "D".into(),
        "both images dimmer than in case ii".into(),
        (d.i1 < a.i1 && d.i2 < a.i2).into(),
    ]);

    let mut profile = Table::new("profile", ["y", "gamma", "h", "v", "d", "a"]);
    profile.bulky = true;
    for k in 0..map.len() {
        let y = map.ys[k];
        profile.push(vec![
            y.into(),
            cfg.gamma(y).into(),
            map.h[k].into(),
            map.v[k].into(),
            map.d[k].into(),
            map.a[k].into(),
        ]);
    }
    let meta = metadata(&[
        ("grid", {
            let r = format_number(cfg.y_half_range);
            format!("{} samples on [-{r}, {r}]", cfg.y_samples)
        }),
        ("integration", "trapezoid".into()),
    ]);
    Ok(report(Scenario::Afshar(s.clone()), meta, summary, vec![images, cases, profile]))
}

fn channel_table(graph: &StateGraph) -> Result<(Table, usize)> {
    let terms = channel_terms(graph)?;
    let mut t = Table::new("channels", ["channel", "path", "term_re", "term_im"]);
    for (k, (path, term)) in terms.iter().enumerate() {
        t.push(vec![(k + 1).into(), graph.describe(path).into(), term.re.into(), term.im.into()]);
    }
    Ok((t, terms.len()))
}

fn graph_from_spec(g: &GraphSpec) -> Result<StateGraph> {
    let nodes = g.nodes.iter().map(|n| (n.label.clone(), n.energy)).collect();
    let edges = g.edges.iter().map(|e| (e.from.clone(), e.to.clone(), e.coupling.value())).collect();
    Ok(StateGraph::new(nodes, edges, &g.initial, &g.final_)?)
}

/// `(32/3) g³ sin θ cos²θ / ω²`, the sum of the eight Rabi channels.
pub fn rabi_closed_form(sys: &RabiSystem) -> f64 {
    let (s, c) = sys.mixing_angle.sin_cos();
    32.0 / 3.0 * sys.g.powi(3) * s * c * c / (sys.omega * sys.omega)
}

pub fn cmd_cqed(s: &CqedScenario) -> Result<RunReport> {
    let degeneracy = ("degeneracy_rtol", format!("{DEGENERACY_RTOL:e}"));
    let (summary, channels, meta) = match (&s.rabi, &s.graph) {
        (Some(spec), None) => {
            let sys = &spec.system()?;
            let (_, graph) = build_two_atom_rabi(sys)?;
            let (channels, count) = channel_table(&graph)?;
            let pert = omega_eff(&graph)?;
            let exact = exact_splitting(sys)?;
            let half = exact.splitting / 2.0;
            let discrepancy = if half > 0.0 { (pert.abs() - half).abs() / half } else { pert.abs() };
            let summary = vec![
                ("channels".to_string(), count as f64),
                ("omega_eff".into(), pert),
                ("omega_eff_closed_form".into(), rabi_closed_form(sys)),
                ("exact_splitting".into(), exact.splitting),
                ("exact_half_splitting".into(), half),
                ("resonant_omega_q".into(), exact.resonant_omega_q),
                ("relative_discrepancy".into(), discrepancy),
            ];
            let meta = metadata(&[degeneracy, ("photon_truncation", sys.n_photons.to_string())]);
            (summary, channels, meta)
        }
        (None, Some(spec)) => {
            let graph = graph_from_spec(spec)?;
            let (channels, count) = channel_table(&graph)?;
            let total = omega_eff_complex(&graph)?;
            let summary = vec![
                ("channels".to_string(), count as f64),
                ("omega_eff_re".into(), total.re),
                ("omega_eff_im".into(), total.im),
            ];
            (summary, channels, metadata(&[degeneracy]))
        }
        _ => return Err(CliError::Schema("cqed: exactly one of `rabi` or `graph` is required".into())),
    };
    Ok(report(Scenario::Cqed(s.clone()), meta, summary, vec![channels]))
}

fn element(spec: &ElementSpec) -> Result<Element> {
    Ok(match spec {
        ElementSpec::BeamSplitter { modes, reflectivity, outputs, convention } => {
            let conv = convention.unwrap_or(SplitterConvention::SymmetricI);
            let bs = BeamSplitter::with_convention(&modes[0], &modes[1], *reflectivity, conv)?;
            match outputs {
                Some([o1, o2]) => bs.with_outputs(o1, o2).into(),
                None => bs.into(),
            }
        }
        ElementSpec::Phase { mode, theta } => PhaseShifter::new(mode, theta.value()?).into(),
        ElementSpec::Coherent { mode, q, n_max } => CoherentSource::with_order(mode, q.value(), *n_max)?.into(),
    })
}

pub fn cmd_custom(s: &CustomScenario) -> Result<RunReport> {
    let registry = ModeRegistry::new(s.modes.iter().map(String::as_str))?;
    let caps = s.caps.unwrap_or_default();
    let mut state = StateVector::zero(registry.clone()).with_caps(caps)?;
    for t in &s.input {
        let mut occ = vec![0u32; registry.len()];
        for (label, &n) in &t.occupations {
            occ[registry.index(label)?] = n;
        }
        let amp = t.amplitude.map(|a| a.value()).unwrap_or(C64::new(1.0, 0.0));
        state = state.add_term(FockTerm::new(occ), amp)?;
    }
    let input_norm_sqr = state.norm_sqr();
    if s.normalize {
        if input_norm_sqr == 0.0 {
            return Err(CliError::Schema("custom-circuit: cannot normalize a zero input state".into()));
        }
        state = state.scale(C64::new(1.0 / input_norm_sqr.sqrt(), 0.0));
    } else if input_norm_sqr > PROBABILITY_CEILING {
        return Err(CliError::Schema(format!(
            "custom-circuit: input norm² is {input_norm_sqr}, above 1; fix the amplitudes or set \"normalize\": true"
        )));
    }
    let elements = s.elements.iter().map(element).collect::<Result<Vec<_>>>()?;
    let circuit = Circuit::new(registry, elements)?;
    let out = apply_circuit(&state, &circuit)?;

    let labels = out.registry().labels().to_vec();
    let mut columns = labels.clone();
    columns.extend(["amplitude_re", "amplitude_im", "magnitude", "phase", "probability"].map(String::from));
    let mut terms = Table::new("terms", columns);
    for (term, amp) in out.iter() {
        let mut row: Vec<Cell> = term.occupations().iter().map(|&n| Cell::from(n)).collect();
        row.extend([amp.re.into(), amp.im.into(), amp.norm().into(), amp.arg().into(), amp.norm_sqr().into()]);
        terms.push(row);
    }

    let mut summary = vec![
        ("input_norm_sqr".to_string(), state.norm_sqr()),
        ("output_norm_sqr".into(), out.norm_sqr()),
        ("terms".into(), out.len() as f64),
    ];
    let mut patterns = Table::new("patterns", ["pattern", "probability"]);
    for p in &s.patterns {
        let prob = joint_probability(&out, &DetectionPattern::new(p.require.iter().map(|(k, &v)| (k.as_str(), v))))?;
        patterns.push(vec![p.name.as_str().into(), prob.into()]);
        summary.push((format!("P({})", p.name), prob));
    }
    let meta = metadata(&[
        ("convention", "symmetric-i".into()),
        ("caps", caps_text(caps)),
        ("output_modes", labels.join(",")),
    ]);
    Ok(report(Scenario::Custom(s.clone()), meta, summary, vec![terms, patterns]))
}
