//! Two-slit polarization imaging with a thin absorbing wire.
//!
//! Slit H emits `e^{iκ_y y}|H⟩/√2`, slit V emits `e^{−iκ_y y}|V⟩/√2`; near the
//! symmetry plane their sum is `cos(κ_y y)|D⟩ + i·sin(κ_y y)|A⟩` (times
//! `e^{iκ_z z}`). A wire of diameter `π/(10κ_y)` centred on `y = 0` multiplies
//! the field by `e^{−γ(y)}`. The lens is an ideal imager: behind a polarizer
//! the projected flux at the lens is shared between image 1 (slit H) and
//! image 2 (slit V) in proportion to each slit polarization's overlap with
//! the polarizer axis.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaProfile {
    /// `γ = gamma_peak` for `|y| < d/2`, zero elsewhere.
    TopHat,
    /// `γ = gamma_peak·exp(−y²/2σ²)` with `σ = d/2.355` (FWHM = d).
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AfsharConfig {
    pub kappa_y: f64,
    pub kappa_z: f64,
    /// Grid spans `[-y_half_range, y_half_range]`.
    pub y_half_range: f64,
    pub y_samples: usize,
    /// Representative plane; intensities do not depend on it.
    pub z: f64,
    pub gamma_peak: f64,
    pub gamma_profile: GammaProfile,
}

impl Default for AfsharConfig {
    fn default() -> Self {
        Self::with_kappa(1.0, 1.0)
    }
}

impl AfsharConfig {
    /// Default grid `[−5π/κ_y, 5π/κ_y]` with 4096 samples and an opaque
    /// top-hat wire (`gamma_peak = 6`).
    pub fn with_kappa(kappa_y: f64, kappa_z: f64) -> Self {
        Self {
            kappa_y,
            kappa_z,
            y_half_range: 5.0 * PI / kappa_y,
            y_samples: 4096,
            z: 0.0,
            gamma_peak: 6.0,
            gamma_profile: GammaProfile::TopHat,
        }
    }

    pub fn wire_diameter(&self) -> f64 {
        PI / (10.0 * self.kappa_y)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if !(self.kappa_y.is_finite() && self.kappa_y > 0.0) {
            return bad("kappa_y must be finite and positive");
        }
        if !self.kappa_z.is_finite() || !self.z.is_finite() {
            return bad("kappa_z and z must be finite");
        }
        if !(self.y_half_range.is_finite() && self.y_half_range > 0.0) {
            return bad("y_half_range must be finite and positive");
        }
        if self.y_samples < 2 {
            return bad("y_samples must be at least 2");
        }
        if !(self.gamma_peak.is_finite() && self.gamma_peak >= 0.0) {
            return bad("gamma_peak must be finite and non-negative");
        }
        Ok(())
    }

    pub fn ys(&self) -> Vec<f64> {
        let n = self.y_samples;
        let step = 2.0 * self.y_half_range / (n - 1) as f64;
        (0..n).map(|k| -self.y_half_range + step * k as f64).collect()
    }

    /// Wire opacity at height `y`.
    pub fn gamma(&self, y: f64) -> f64 {
        let d = self.wire_diameter();
        match self.gamma_profile {
            GammaProfile::TopHat => {
                if y.abs() < d / 2.0 {
                    self.gamma_peak
                } else {
                    0.0
                }
            }
            GammaProfile::Gaussian => {
                let sigma = d / 2.355;
                self.gamma_peak * (-y * y / (2.0 * sigma * sigma)).exp()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Basis {
    /// Components `(H, V)`.
    Linear,
    /// Components `(D, A)`.
    Diagonal,
}

impl Basis {
    fn name(self) -> &'static str {
        match self {
            Basis::Linear => "H/V",
            Basis::Diagonal => "D/A",
        }
    }
}

/// Jones vectors sampled along `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizedField {
    pub ys: Vec<f64>,
    pub samples: Vec<[C64; 2]>,
    pub basis: Basis,
}

impl PolarizedField {
    /// `H = (D + A)/√2`, `V = (D − A)/√2`.
    pub fn to_diagonal_basis(&self) -> Result<Self> {
        self.change_basis(Basis::Linear, Basis::Diagonal)
    }

    pub fn to_linear_basis(&self) -> Result<Self> {
        self.change_basis(Basis::Diagonal, Basis::Linear)
    }

    fn change_basis(&self, from: Basis, to: Basis) -> Result<Self> {
        if self.basis != from {
            return Err(Error::WrongBasis { expected: from.name(), found: self.basis.name() });
        }
        // The transform is its own inverse.
        let samples = self
            .samples
            .iter()
            .map(|[x, y]| [(x + y) * FRAC_1_SQRT_2, (x - y) * FRAC_1_SQRT_2])
            .collect();
        Ok(Self { ys: self.ys.clone(), samples, basis: to })
    }

    fn linear(&self) -> Result<Self> {
        match self.basis {
            Basis::Linear => Ok(self.clone()),
            Basis::Diagonal => self.to_linear_basis(),
        }
    }
}

pub fn two_slit_field(cfg: &AfsharConfig) -> Result<PolarizedField> {
    cfg.validate()?;
    let ys = cfg.ys();
    let samples = ys
        .iter()
        .map(|&y| {
            let common = C64::from_polar(FRAC_1_SQRT_2, cfg.kappa_z * cfg.z);
            [
                common * C64::from_polar(1.0, cfg.kappa_y * y),
                common * C64::from_polar(1.0, -cfg.kappa_y * y),
            ]
        })
        .collect();
    Ok(PolarizedField { ys, samples, basis: Basis::Linear })
}

/// Multiplies both components by `e^{−γ(y)}`.
pub fn apply_wire(f: &PolarizedField, cfg: &AfsharConfig) -> PolarizedField {
    let samples = f
        .ys
        .iter()
        .zip(&f.samples)
        .map(|(&y, [x, z])| {
            let t = (-cfg.gamma(y)).exp();
            [x * t, z * t]
        })
        .collect();
    PolarizedField { ys: f.ys.clone(), samples, basis: f.basis }
}

/// Intensity of every polarization component along the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntensityMap {
    pub ys: Vec<f64>,
    pub h: Vec<f64>,
    pub v: Vec<f64>,
    pub d: Vec<f64>,
    pub a: Vec<f64>,
}

impl IntensityMap {
    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    pub fn component(&self, p: Polarizer) -> Option<&[f64]> {
        match p {
            Polarizer::None => None,
            Polarizer::H => Some(&self.h),
            Polarizer::V => Some(&self.v),
            Polarizer::D => Some(&self.d),
            Polarizer::A => Some(&self.a),
        }
    }
}

pub fn intensities(f: &PolarizedField) -> IntensityMap {
    let lin = f.linear().expect("basis conversion from a known basis");
    let diag = lin.to_diagonal_basis().expect("linear basis");
    let sq = |s: &[[C64; 2]], k: usize| s.iter().map(|c| c[k].norm_sqr()).collect::<Vec<_>>();
    IntensityMap {
        ys: f.ys.clone(),
        h: sq(&lin.samples, 0),
        v: sq(&lin.samples, 1),
        d: sq(&diag.samples, 0),
        a: sq(&diag.samples, 1),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarizer {
    None,
    H,
    V,
    D,
    A,
}

impl Polarizer {
    pub const ALL: [Polarizer; 5] =
        [Polarizer::None, Polarizer::H, Polarizer::V, Polarizer::D, Polarizer::A];

    /// `(|⟨p|H⟩|², |⟨p|V⟩|²)`.
    fn slit_overlaps(self) -> (f64, f64) {
        match self {
            Polarizer::None => (1.0, 1.0),
            Polarizer::H => (1.0, 0.0),
            Polarizer::V => (0.0, 1.0),
            Polarizer::D | Polarizer::A => (0.5, 0.5),
        }
    }
}

impl fmt::Display for Polarizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Polarizer::None => "none",
            Polarizer::H => "H",
            Polarizer::V => "V",
            Polarizer::D => "D",
            Polarizer::A => "A",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImagePair {
    pub i1: f64,
    pub i2: f64,
}

/// Trapezoidal integral of `values` over the grid `ys`.
pub fn integrate(ys: &[f64], values: &[f64]) -> f64 {
    ys.windows(2)
        .zip(values.windows(2))
        .map(|(y, v)| 0.5 * (y[1] - y[0]) * (v[0] + v[1]))
        .sum()
}

/// Integrated intensities of images 1 and 2 behind `polarizer`.
pub fn image_intensities(cfg: &AfsharConfig, polarizer: Polarizer) -> Result<ImagePair> {
    let field = apply_wire(&two_slit_field(cfg)?, cfg);
    let map = intensities(&field);
    Ok(images_from_map(&map, polarizer))
}

pub fn images_from_map(map: &IntensityMap, polarizer: Polarizer) -> ImagePair {
    match map.component(polarizer) {
        None => ImagePair { i1: integrate(&map.ys, &map.h), i2: integrate(&map.ys, &map.v) },
        Some(projected) => {
            let (w1, w2) = polarizer.slit_overlaps();
            let flux = integrate(&map.ys, projected);
            ImagePair { i1: w1 / (w1 + w2) * flux, i2: w2 / (w1 + w2) * flux }
        }
    }
}

/// Image intensities for every polarizer setting, from one field evaluation.
pub fn image_table(cfg: &AfsharConfig) -> Result<Vec<(Polarizer, ImagePair)>> {
    let map = intensities(&apply_wire(&two_slit_field(cfg)?, cfg));
    Ok(Polarizer::ALL.iter().map(|&p| (p, images_from_map(&map, p))).collect())
}
