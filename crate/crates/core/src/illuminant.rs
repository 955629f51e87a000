//! Reference illuminants: Planckian radiators below 5000 K and the CIE
//! daylight (D-series) model at and above it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cie_data::DaylightComponents;
use crate::colorimetry::ChromaticityXY;
use crate::spectral::{resample_values, SpectralPowerDistribution, WavelengthGrid};
use crate::{Error, Result};

/// First radiation constant (W·m²).
pub const PLANCK_C1: f64 = 3.7418e-16;
/// Second radiation constant (m·K).
pub const PLANCK_C2: f64 = 1.4388e-2;

/// CCT at which the reference switches from Planckian to daylight.
pub const BRANCH_CCT_K: f64 = 5000.0;
/// Exclusive lower bound of the reference range.
pub const REFERENCE_MIN_K: f64 = 1000.0;
/// Inclusive upper bound of the reference range.
pub const REFERENCE_MAX_K: f64 = 25000.0;
pub const DAYLIGHT_RANGE_K: (f64, f64) = (4000.0, 25000.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReferenceBranch {
    Planckian,
    Daylight,
}

impl fmt::Display for ReferenceBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReferenceBranch::Planckian => "planckian",
            ReferenceBranch::Daylight => "daylight",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSpec {
    pub cct: f64,
    pub branch: ReferenceBranch,
}

impl ReferenceSpec {
    pub fn for_cct(cct: f64) -> Self {
        let branch = if cct < BRANCH_CCT_K {
            ReferenceBranch::Planckian
        } else {
            ReferenceBranch::Daylight
        };
        Self { cct, branch }
    }
}

/// Unnormalized spectral exitance of a blackbody at `wavelength_nm`.
pub fn planck_radiance(wavelength_nm: f64, kelvin: f64) -> f64 {
    let lambda = wavelength_nm * 1e-9;
    PLANCK_C1 / lambda.powi(5) / ((PLANCK_C2 / (lambda * kelvin)).exp_m1())
}

/// Peak-normalized Planckian SPD at `kelvin`.
pub fn planck_spd(kelvin: f64, grid: &WavelengthGrid) -> Result<SpectralPowerDistribution> {
    if !(kelvin > 0.0) || !kelvin.is_finite() {
        return Err(Error::TemperatureOutOfRange {
            kelvin,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    SpectralPowerDistribution::from_fn(*grid, |w| planck_radiance(w, kelvin))?.normalize_peak()
}

/// D-series chromaticity x_D for a CCT in 4000–25000 K.
pub fn daylight_x(kelvin: f64) -> Result<f64> {
    let (lo, hi) = DAYLIGHT_RANGE_K;
    if !(lo..=hi).contains(&kelvin) {
        return Err(Error::TemperatureOutOfRange {
            kelvin,
            min: lo,
            max: hi,
        });
    }
    let t = kelvin;
    Ok(if t <= 7000.0 {
        daylight_x_low(t)
    } else {
        daylight_x_high(t)
    })
}

fn daylight_x_low(t: f64) -> f64 {
    0.244063 + 0.09911e3 / t + 2.9678e6 / (t * t) - 4.6070e9 / (t * t * t)
}

fn daylight_x_high(t: f64) -> f64 {
    0.237040 + 0.24748e3 / t + 1.9018e6 / (t * t) - 2.0064e9 / (t * t * t)
}

/// Both branches of x_D, used to inspect continuity at 7000 K.
pub fn daylight_x_branches(kelvin: f64) -> (f64, f64) {
    (daylight_x_low(kelvin), daylight_x_high(kelvin))
}

/// D-series chromaticity (x_D, y_D).
pub fn daylight_chromaticity(kelvin: f64) -> Result<ChromaticityXY> {
    let x = daylight_x(kelvin)?;
    Ok(ChromaticityXY {
        x,
        y: -3.0 * x * x + 2.87 * x - 0.275,
    })
}

/// Basis weights (M1, M2) for the daylight chromaticity.
pub fn daylight_weights(c: &ChromaticityXY) -> (f64, f64) {
    let (x, y) = (c.x, c.y);
    let den = 0.0241 + 0.2562 * x - 0.7341 * y;
    let m1 = (-1.3515 - 1.7703 * x + 5.9114 * y) / den;
    let m2 = (0.0300 - 31.4424 * x + 30.0717 * y) / den;
    (m1, m2)
}

/// Peak-normalized D-series SPD at `kelvin`, composed from the basis
/// functions and resampled onto `grid`. Negative composite samples are
/// clamped to zero.
pub fn daylight_spd(
    kelvin: f64,
    grid: &WavelengthGrid,
    comps: &DaylightComponents,
) -> Result<SpectralPowerDistribution> {
    let xy = daylight_chromaticity(kelvin)?;
    let (m1, m2) = daylight_weights(&xy);
    let mut clamped = 0usize;
    let composite: Vec<f64> = comps
        .s0
        .iter()
        .zip(&comps.s1)
        .zip(&comps.s2)
        .map(|((s0, s1), s2)| {
            let v = s0 + m1 * s1 + m2 * s2;
            if v < 0.0 {
                clamped += 1;
                0.0
            } else {
                v
            }
        })
        .collect();
    if clamped > 0 {
        log::warn!("daylight SPD at {kelvin} K: clamped {clamped} negative samples to zero");
    }
    let values = resample_values(comps.grid(), &composite, grid);
    SpectralPowerDistribution::new(*grid, values)?.normalize_peak()
}

/// Reference SPD for a test source of CCT `kelvin`.
pub fn reference_for(
    kelvin: f64,
    grid: &WavelengthGrid,
    comps: &DaylightComponents,
) -> Result<(SpectralPowerDistribution, ReferenceSpec)> {
    if !(kelvin > REFERENCE_MIN_K && kelvin <= REFERENCE_MAX_K) {
        return Err(Error::TemperatureOutOfRange {
            kelvin,
            min: REFERENCE_MIN_K,
            max: REFERENCE_MAX_K,
        });
    }
    let spec = ReferenceSpec::for_cct(kelvin);
    let spd = match spec.branch {
        ReferenceBranch::Planckian => planck_spd(kelvin, grid)?,
        ReferenceBranch::Daylight => daylight_spd(kelvin, grid, comps)?,
    };
    Ok((spd, spec))
}
