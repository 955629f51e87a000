//! Geometry of a lens-free grating spectrometer.
//!
//! Two layouts are supported. In the parallel layout the linear sensor lies
//! parallel to the grating at distance `D1`, offset by `h1` from the grating
//! normal. In the inclined layout the sensor is perpendicular to the ray
//! leaving at the mean angle `θ2 = (θL + θH) / 2`, at distance `D2`, so the
//! band edges hit the sensor ends symmetrically.
//!
//! Wavelengths are in nm, grating pitch in µm, lengths on the sensor side in
//! mm and angles in radians.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GratingSpec {
    /// Slit spacing in µm.
    pub pitch_um: f64,
    pub order: u32,
}

impl GratingSpec {
    pub fn new(pitch_um: f64, order: u32) -> Result<Self> {
        if !(pitch_um > 0.0) || !pitch_um.is_finite() {
            return Err(Error::InvalidOptics(format!(
                "pitch must be positive, got {pitch_um}"
            )));
        }
        if order < 1 {
            return Err(Error::InvalidOptics(
                "diffraction order must be >= 1".into(),
            ));
        }
        Ok(Self { pitch_um, order })
    }

    /// First-order grating with the given ruling density.
    pub fn from_lines_per_mm(lines_per_mm: f64) -> Result<Self> {
        if !(lines_per_mm > 0.0) {
            return Err(Error::InvalidOptics(format!(
                "line density must be positive, got {lines_per_mm}"
            )));
        }
        Self::new(1000.0 / lines_per_mm, 1)
    }

    fn pitch_nm(&self) -> f64 {
        self.pitch_um * 1000.0
    }

    /// `m λ / d` for a wavelength in nm.
    fn sine(&self, wavelength_nm: f64) -> f64 {
        self.order as f64 * wavelength_nm / self.pitch_nm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorSpec {
    /// Useful detector length in mm.
    pub length_mm: f64,
    pub pixel_count: usize,
}

impl SensorSpec {
    pub fn new(length_mm: f64, pixel_count: usize) -> Result<Self> {
        if !(length_mm > 0.0) || !length_mm.is_finite() {
            return Err(Error::InvalidOptics(format!(
                "sensor length must be positive, got {length_mm}"
            )));
        }
        if pixel_count < 2 {
            return Err(Error::InvalidOptics(
                "sensor needs at least 2 pixels".into(),
            ));
        }
        Ok(Self {
            length_mm,
            pixel_count,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Arrangement {
    Parallel,
    Inclined,
}

impl fmt::Display for Arrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Arrangement::Parallel => "parallel",
            Arrangement::Inclined => "inclined",
        })
    }
}

/// Layout-specific placement of the sensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Layout {
    Parallel { d1_mm: f64, h1_mm: f64 },
    Inclined { theta2: f64, d2_mm: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpticalDesign {
    pub grating: GratingSpec,
    pub sensor: SensorSpec,
    pub lambda_low_nm: f64,
    pub lambda_high_nm: f64,
    pub theta_low: f64,
    pub theta_high: f64,
    pub layout: Layout,
}

/// Diffraction angle `asin(m λ / d)`.
pub fn diffraction_angle(wavelength_nm: f64, grating: &GratingSpec) -> Result<f64> {
    let s = grating.sine(wavelength_nm);
    if s >= 1.0 || !s.is_finite() {
        return Err(Error::NoFirstOrderMaximum {
            wavelength_nm: grating.order as f64 * wavelength_nm,
            pitch_nm: grating.pitch_nm(),
        });
    }
    if s < 0.0 {
        return Err(Error::InvalidOptics(format!(
            "wavelength must be nonnegative, got {wavelength_nm}"
        )));
    }
    Ok(s.asin())
}

fn band_angles(grating: &GratingSpec, low_nm: f64, high_nm: f64) -> Result<(f64, f64)> {
    if grating.order != 1 {
        return Err(Error::InvalidOptics(format!(
            "designs use the first order only, got m = {}",
            grating.order
        )));
    }
    if !(low_nm > 0.0) || !(high_nm > low_nm) {
        return Err(Error::InvalidOptics(format!(
            "degenerate wavelength band {low_nm}-{high_nm} nm"
        )));
    }
    let high = diffraction_angle(high_nm, grating)?;
    let low = diffraction_angle(low_nm, grating)?;
    if !(high < FRAC_PI_2) {
        return Err(Error::NoFirstOrderMaximum {
            wavelength_nm: high_nm,
            pitch_nm: grating.pitch_nm(),
        });
    }
    Ok((low, high))
}

/// Sensor parallel to the grating: `D1 = S / (tan θH − tan θL)`, `h1 = D1 tan θL`.
pub fn design_parallel(
    grating: &GratingSpec,
    sensor: &SensorSpec,
    low_nm: f64,
    high_nm: f64,
) -> Result<OpticalDesign> {
    let (theta_low, theta_high) = band_angles(grating, low_nm, high_nm)?;
    let d1_mm = sensor.length_mm / (theta_high.tan() - theta_low.tan());
    Ok(OpticalDesign {
        grating: *grating,
        sensor: *sensor,
        lambda_low_nm: low_nm,
        lambda_high_nm: high_nm,
        theta_low,
        theta_high,
        layout: Layout::Parallel {
            d1_mm,
            h1_mm: d1_mm * theta_low.tan(),
        },
    })
}

/// Sensor perpendicular to the mean ray: `θ2 = (θL + θH)/2`,
/// `D2 = S / (2 tan(θH − θ2))`.
pub fn design_inclined(
    grating: &GratingSpec,
    sensor: &SensorSpec,
    low_nm: f64,
    high_nm: f64,
) -> Result<OpticalDesign> {
    let (theta_low, theta_high) = band_angles(grating, low_nm, high_nm)?;
    let theta2 = (theta_low + theta_high) / 2.0;
    let d2_mm = sensor.length_mm / (2.0 * (theta_high - theta2).tan());
    Ok(OpticalDesign {
        grating: *grating,
        sensor: *sensor,
        lambda_low_nm: low_nm,
        lambda_high_nm: high_nm,
        theta_low,
        theta_high,
        layout: Layout::Inclined { theta2, d2_mm },
    })
}

pub fn design(
    arrangement: Arrangement,
    grating: &GratingSpec,
    sensor: &SensorSpec,
    low_nm: f64,
    high_nm: f64,
) -> Result<OpticalDesign> {
    match arrangement {
        Arrangement::Parallel => design_parallel(grating, sensor, low_nm, high_nm),
        Arrangement::Inclined => design_inclined(grating, sensor, low_nm, high_nm),
    }
}

impl OpticalDesign {
    pub fn arrangement(&self) -> Arrangement {
        match self.layout {
            Layout::Parallel { .. } => Arrangement::Parallel,
            Layout::Inclined { .. } => Arrangement::Inclined,
        }
    }

    fn check_band(&self, wavelength_nm: f64) -> Result<()> {
        let slack = 1e-9 * (self.lambda_high_nm - self.lambda_low_nm);
        if wavelength_nm < self.lambda_low_nm - slack || wavelength_nm > self.lambda_high_nm + slack
        {
            return Err(Error::OutOfBand {
                wavelength_nm,
                low_nm: self.lambda_low_nm,
                high_nm: self.lambda_high_nm,
            });
        }
        Ok(())
    }

    /// Position of the diffraction maximum along the sensor (mm), 0 at the
    /// low band edge and `S` at the high edge.
    pub fn position(&self, wavelength_nm: f64) -> Result<f64> {
        self.check_band(wavelength_nm)?;
        let theta = self.grating.sine(wavelength_nm).asin();
        Ok(match self.layout {
            Layout::Parallel { d1_mm, h1_mm } => d1_mm * theta.tan() - h1_mm,
            Layout::Inclined { theta2, d2_mm } => {
                self.sensor.length_mm / 2.0 - d2_mm * (theta2 - theta).tan()
            }
        })
    }

    /// Analytic `ds/dλ` in mm per nm.
    pub fn slope(&self, wavelength_nm: f64) -> Result<f64> {
        self.check_band(wavelength_nm)?;
        let d = self.grating.pitch_nm() / self.grating.order as f64;
        let lambda = wavelength_nm;
        let root = (1.0 - (lambda / d).powi(2)).sqrt();
        Ok(match self.layout {
            Layout::Parallel { d1_mm, .. } => d * d1_mm / ((d * d - lambda * lambda) * root),
            Layout::Inclined { theta2, d2_mm } => {
                let sec = 1.0 / (theta2 - (lambda / d).asin()).cos();
                d2_mm * sec * sec / (d * root)
            }
        })
    }

    /// Ratio max/min of the slope over `samples` evenly spaced wavelengths
    /// spanning the band; 1 for a perfectly linear mapping.
    pub fn linearity_metric(&self, samples: usize) -> Result<f64> {
        let slopes = sweep(self.lambda_low_nm, self.lambda_high_nm, samples)?
            .map(|w| self.slope(w))
            .collect::<Result<Vec<_>>>()?;
        Ok(slope_ratio(&slopes))
    }

    /// `(λ, s(λ), ds/dλ)` over `samples` evenly spaced wavelengths.
    pub fn sweep(&self, samples: usize) -> Result<Vec<(f64, f64, f64)>> {
        sweep(self.lambda_low_nm, self.lambda_high_nm, samples)?
            .map(|w| Ok((w, self.position(w)?, self.slope(w)?)))
            .collect()
    }
}

/// max/min of a set of slopes.
pub fn slope_ratio(slopes: &[f64]) -> f64 {
    let max = slopes.iter().copied().fold(f64::MIN, f64::max);
    let min = slopes.iter().copied().fold(f64::MAX, f64::min);
    max / min
}

fn sweep(low: f64, high: f64, samples: usize) -> Result<impl Iterator<Item = f64>> {
    if samples < 2 {
        return Err(Error::InvalidOptics(format!(
            "need at least 2 samples, got {samples}"
        )));
    }
    let step = (high - low) / (samples - 1) as f64;
    Ok((0..samples).map(move |i| {
        if i + 1 == samples {
            high
        } else {
            low + step * i as f64
        }
    }))
}

/// Collimator slit width (mm) giving a wavelength resolution of `delta_nm`:
/// `a = δ S / ((λH − λL) sin(π − θ2))`.
pub fn collimator_aperture(
    delta_nm: f64,
    sensor: &SensorSpec,
    low_nm: f64,
    high_nm: f64,
    theta2: f64,
) -> Result<f64> {
    if !(delta_nm > 0.0) {
        return Err(Error::InvalidOptics(format!(
            "resolution must be positive, got {delta_nm}"
        )));
    }
    if !(high_nm > low_nm) {
        return Err(Error::InvalidOptics(format!(
            "degenerate wavelength band {low_nm}-{high_nm} nm"
        )));
    }
    let sine = (PI - theta2).sin();
    if !(sine > 0.0) {
        return Err(Error::InvalidOptics(format!(
            "mean angle {theta2} rad gives no aperture"
        )));
    }
    Ok(delta_nm * sensor.length_mm / ((high_nm - low_nm) * sine))
}
