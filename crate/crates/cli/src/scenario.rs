//! Scenario files.
//!
//! Every file is a JSON object with `"version": 1` and a `kind`; the rest of
//! the object is the kind-specific block. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use fockline::afshar::{AfsharConfig, GammaProfile};
use fockline::cqed::RabiSystem;
use fockline::fock::Caps;
use fockline::optics::SplitterConvention;
use fockline::C64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Twc,
    Afshar,
    Cqed,
    CustomCircuit,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Twc => "twc",
            Kind::Afshar => "afshar",
            Kind::Cqed => "cqed",
            Kind::CustomCircuit => "custom-circuit",
        }
    }

    fn parse(s: &str) -> Option<Kind> {
        [Kind::Twc, Kind::Afshar, Kind::Cqed, Kind::CustomCircuit].into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An angle given as a number of radians or as a string such as `"pi"`,
/// `"-pi/2"`, `"3*pi/4"` or `"0.25"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Radians(f64),
    Expr(String),
}

impl Angle {
    pub fn value(&self) -> Result<f64> {
        match self {
            Angle::Radians(x) => Ok(*x),
            Angle::Expr(s) => parse_number(s).map_err(CliError::Schema),
        }
    }
}

/// Parses a real number that may be written as a multiple of π.
pub fn parse_number(text: &str) -> std::result::Result<f64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    let s = s.replace('π', "pi");
    let bad = || format!("cannot read `{text}` as a number (examples: 0.5, pi, -pi/2, 3*pi/4)");
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s.strip_prefix('+').unwrap_or(&s)),
    };
    let Some(at) = body.find("pi") else {
        return body.parse::<f64>().map(|x| sign * x).map_err(|_| bad());
    };
    let coeff = body[..at].trim_end_matches('*');
    let coeff = if coeff.is_empty() { 1.0 } else { coeff.parse::<f64>().map_err(|_| bad())? };
    let rest = &body[at + 2..];
    let div = match rest.strip_prefix('/') {
        Some(d) => d.parse::<f64>().map_err(|_| bad())?,
        None if rest.is_empty() => 1.0,
        None => return Err(bad()),
    };
    let x = sign * coeff * PI / div;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(bad())
    }
}

/// A complex number: either a real number or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexValue {
    pub fn value(self) -> C64 {
        match self {
            ComplexValue::Real(x) => C64::new(x, 0.0),
            ComplexValue::Pair([re, im]) => C64::new(re, im),
        }
    }
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwcScenario {
    /// Phase shifts on the three signal paths.
    pub thetas: [Angle; 3],
    /// Single-photon amplitude of each coherent beam.
    pub q: ComplexValue,
    /// Photon-number truncation of the coherent beams.
    #[serde(default = "one")]
    pub n_max: u32,
}

/// Every field is optional; missing ones take the defaults for the given
/// `kappa_y`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AfsharScenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_y: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_z: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_half_range: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_peak: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_profile: Option<GammaProfile>,
}

impl AfsharScenario {
    pub fn config(&self) -> AfsharConfig {
        let base = AfsharConfig::with_kappa(self.kappa_y.unwrap_or(1.0), self.kappa_z.unwrap_or(1.0));
        AfsharConfig {
            y_half_range: self.y_half_range.unwrap_or(base.y_half_range),
            y_samples: self.y_samples.unwrap_or(base.y_samples),
            z: self.z.unwrap_or(base.z),
            gamma_peak: self.gamma_peak.unwrap_or(base.gamma_peak),
            gamma_profile: self.gamma_profile.unwrap_or(base.gamma_profile),
            ..base
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub label: String,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub from: String,
    pub to: String,
    /// `⟨to|V|from⟩`; the reverse direction is its conjugate.
    pub coupling: ComplexValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub nodes: Vec<NodeSpec>,
    pub edges: Vec<EdgeSpec>,
    pub initial: String,
    #[serde(rename = "final")]
    pub final_: String,
}

/// Two atoms in a cavity; see [`RabiSystem`]. The mixing angle defaults to
/// π/6 and the photon truncation to 4.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RabiSpec {
    pub omega: f64,
    pub omega_q: f64,
    pub g: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixing_angle: Option<Angle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_photons: Option<usize>,
}

impl RabiSpec {
    pub fn system(&self) -> Result<RabiSystem> {
        let base = RabiSystem::default();
        let sys = RabiSystem {
            omega: self.omega,
            omega_q: self.omega_q,
            g: self.g,
            mixing_angle: match &self.mixing_angle {
                Some(a) => a.value()?,
                None => base.mixing_angle,
            },
            n_photons: self.n_photons.unwrap_or(base.n_photons),
        };
        sys.validate()?;
        Ok(sys)
    }
}

/// Exactly one of `rabi` and `graph`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CqedScenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rabi: Option<RabiSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputTerm {
    pub occupations: BTreeMap<String, u32>,
    /// Defaults to 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<ComplexValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ElementSpec {
    BeamSplitter {
        modes: [String; 2],
        reflectivity: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        outputs: Option<[String; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        convention: Option<SplitterConvention>,
    },
    Phase {
        mode: String,
        theta: Angle,
    },
    Coherent {
        mode: String,
        q: ComplexValue,
        #[serde(default = "one")]
        n_max: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternSpec {
    pub name: String,
    /// Required photon number per mode; other modes are summed over.
    pub require: BTreeMap<String, u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomScenario {
    pub modes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caps: Option<Caps>,
    pub input: Vec<InputTerm>,
    /// Rescale the input to unit norm instead of rejecting a norm above 1.
    #[serde(default)]
    pub normalize: bool,
    pub elements: Vec<ElementSpec>,
    #[serde(default)]
    pub patterns: Vec<PatternSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Scenario {
    Twc(TwcScenario),
    Afshar(AfsharScenario),
    Cqed(CqedScenario),
    Custom(CustomScenario),
}

impl Scenario {
    pub fn kind(&self) -> Kind {
        match self {
            Scenario::Twc(_) => Kind::Twc,
            Scenario::Afshar(_) => Kind::Afshar,
            Scenario::Cqed(_) => Kind::Cqed,
            Scenario::Custom(_) => Kind::CustomCircuit,
        }
    }

    /// The scenario as a full document, `version` and `kind` included.
    pub fn to_document(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("scenario types serialize");
        if let Value::Object(map) = &mut v {
            map.insert("version".into(), SCHEMA_VERSION.into());
            map.insert("kind".into(), self.kind().name().into());
        }
        v
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    parse_scenario(&text)
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let doc: Value = serde_json::from_str(text).map_err(|e| CliError::Json(e.to_string()))?;
    scenario_from_value(doc)
}

/// Validates `version` and `kind`, then the kind-specific block.
pub fn scenario_from_value(doc: Value) -> Result<Scenario> {
    let Value::Object(mut map) = doc else {
        return Err(CliError::Schema("top level must be an object".into()));
    };
    match map.remove("version") {
        Some(Value::Number(n)) if n.as_u64() == Some(SCHEMA_VERSION) => {}
        Some(other) => {
            return Err(CliError::Schema(format!(
                "unsupported version {other}; this build reads version {SCHEMA_VERSION}"
            )))
        }
        None => return Err(CliError::Schema("missing `version`".into())),
    }
    let kind = match map.remove("kind") {
        Some(Value::String(s)) => Kind::parse(&s).ok_or_else(|| {
            CliError::Schema(format!("unknown kind `{s}` (expected twc, afshar, cqed or custom-circuit)"))
        })?,
        Some(other) => return Err(CliError::Schema(format!("`kind` must be a string, got {other}"))),
        None => return Err(CliError::Schema("missing `kind`".into())),
    };
    let body = Value::Object(map);
    let schema = |e: serde_json::Error| CliError::Schema(format!("{kind}: {e}"));
    let scenario = match kind {
        Kind::Twc => Scenario::Twc(serde_json::from_value(body).map_err(schema)?),
        Kind::Afshar => Scenario::Afshar(serde_json::from_value(body).map_err(schema)?),
        Kind::Cqed => Scenario::Cqed(serde_json::from_value(body).map_err(schema)?),
        Kind::CustomCircuit => Scenario::Custom(serde_json::from_value(body).map_err(schema)?),
    };
    validate(&scenario)?;
    Ok(scenario)
}

fn validate(s: &Scenario) -> Result<()> {
    let schema = |m: String| Err(CliError::Schema(m));
    match s {
        Scenario::Twc(t) => {
            for a in &t.thetas {
                a.value()?;
            }
        }
        Scenario::Afshar(a) => a.config().validate()?,
        Scenario::Cqed(c) => match (&c.rabi, &c.graph) {
            (Some(_), Some(_)) => return schema("cqed: give either `rabi` or `graph`, not both".into()),
            (None, None) => return schema("cqed: one of `rabi` or `graph` is required".into()),
            (Some(r), None) => {
                r.system()?;
            }
            _ => {}
        },
        Scenario::Custom(c) => {
            if c.input.is_empty() {
                return schema("custom-circuit: `input` needs at least one term".into());
            }
            for el in &c.elements {
                if let ElementSpec::Phase { theta, .. } = el {
                    theta.value()?;
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_expressions() {
        let close = |s: &str, x: f64| assert!((parse_number(s).unwrap() - x).abs() < 1e-15, "{s}");
        close("pi", PI);
        close("-pi/2", -PI / 2.0);
        close("3*pi/4", 0.75 * PI);
        close("2pi", 2.0 * PI);
        close(" 0.25 ", 0.25);
        close("π/3", PI / 3.0);
        assert!(parse_number("pie").is_err());
        assert!(parse_number("pi/0").is_err());
        assert!(parse_number("").is_err());
    }

    #[test]
    fn twc_round_trip() {
        let s = parse_scenario(r#"{"version":1,"kind":"twc","thetas":[0,"pi",0],"q":0.2}"#).unwrap();
        let Scenario::Twc(t) = &s else { panic!() };
        assert_eq!(t.n_max, 1);
        assert_eq!(t.thetas[1].value().unwrap(), PI);
        let again = scenario_from_value(s.to_document()).unwrap();
        assert_eq!(again, s);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_scenario(r#"{"version":1,"kind":"twc","thetas":[0,0,0],"q":0.2,"extra":1}"#);
        assert!(matches!(err, Err(CliError::Schema(m)) if m.contains("extra")));
        let err = parse_scenario(
            r#"{"version":1,"kind":"custom-circuit","modes":["a"],"input":[{"occupations":{"a":1}}],
               "elements":[{"type":"phase","mode":"a","theta":1,"gain":2}]}"#,
        );
        assert!(matches!(err, Err(CliError::Schema(m)) if m.contains("gain")));
    }

    #[test]
    fn envelope_errors() {
        assert!(matches!(parse_scenario("[1]"), Err(CliError::Schema(_))));
        assert!(matches!(parse_scenario(r#"{"kind":"twc"}"#), Err(CliError::Schema(m)) if m.contains("version")));
        assert!(matches!(parse_scenario(r#"{"version":2,"kind":"twc"}"#), Err(CliError::Schema(_))));
        assert!(matches!(parse_scenario(r#"{"version":1,"kind":"laser"}"#), Err(CliError::Schema(m)) if m.contains("laser")));
        assert!(matches!(parse_scenario("{"), Err(CliError::Json(_))));
    }

    #[test]
    fn cqed_needs_exactly_one_model() {
        assert!(parse_scenario(r#"{"version":1,"kind":"cqed"}"#).is_err());
        let ok = parse_scenario(r#"{"version":1,"kind":"cqed","rabi":{"omega":1,"omega_q":0.5,"g":0.02}}"#);
        assert!(ok.is_ok());
    }
}
