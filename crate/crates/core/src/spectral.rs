//! Wavelength grids, spectral power distributions and the quadrature every
//! colorimetric integral runs through.

use std::io::{Read, Write};

use crate::{Error, Result};

/// First wavelength of the canonical analysis grid (nm).
pub const CANONICAL_START_NM: f64 = 380.0;
/// Step of the canonical analysis grid (nm).
pub const CANONICAL_STEP_NM: f64 = 5.0;
/// Number of samples on the canonical analysis grid (380..=780 nm).
pub const CANONICAL_COUNT: usize = 81;

// Relative slack used when deciding whether a wavelength sits on a grid node
// or inside a support interval.
const SNAP: f64 = 1e-9;

/// Uniform, strictly increasing wavelength grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavelengthGrid {
    start: f64,
    step: f64,
    count: usize,
}

impl WavelengthGrid {
    pub fn new(start_nm: f64, step_nm: f64, count: usize) -> Result<Self> {
        if !start_nm.is_finite() || !step_nm.is_finite() {
            return Err(Error::InvalidGrid("non-finite start or step".into()));
        }
        if step_nm <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "step must be positive, got {step_nm}"
            )));
        }
        if count < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 samples, got {count}"
            )));
        }
        Ok(Self {
            start: start_nm,
            step: step_nm,
            count,
        })
    }

    /// Grid through `start_nm` and `end_nm` inclusive with the given step.
    pub fn spanning(start_nm: f64, end_nm: f64, step_nm: f64) -> Result<Self> {
        if step_nm <= 0.0 || end_nm <= start_nm {
            return Err(Error::InvalidGrid(format!(
                "bad span {start_nm}..{end_nm} step {step_nm}"
            )));
        }
        let intervals = ((end_nm - start_nm) / step_nm).round();
        Self::new(start_nm, step_nm, intervals as usize + 1)
    }

    /// 380–780 nm in 5 nm steps, the grid all colorimetry runs on.
    pub fn canonical() -> Self {
        Self {
            start: CANONICAL_START_NM,
            step: CANONICAL_STEP_NM,
            count: CANONICAL_COUNT,
        }
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn end(&self) -> f64 {
        self.wavelength(self.count - 1)
    }

    pub fn wavelength(&self, index: usize) -> f64 {
        self.start + index as f64 * self.step
    }

    pub fn wavelengths(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.wavelength(i))
    }

    /// True when `[start, end]` of `self` lies within `[low, high]`.
    pub fn covers(&self, low_nm: f64, high_nm: f64) -> bool {
        let slack = SNAP * self.step.max(1.0);
        self.start <= low_nm + slack && self.end() >= high_nm - slack
    }
}

/// Relative spectral power sampled on a [`WavelengthGrid`].
///
/// Values are nonnegative and finite; the absolute scale carries no meaning.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPowerDistribution {
    grid: WavelengthGrid,
    values: Vec<f64>,
}

impl SpectralPowerDistribution {
    pub fn new(grid: WavelengthGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.count() {
            return Err(Error::InvalidSpectrum(format!(
                "{} values for a grid of {}",
                values.len(),
                grid.count()
            )));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidSpectrum(format!(
                "value {v} at {} nm is negative or non-finite",
                grid.wavelength(i)
            )));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at every grid wavelength.
    pub fn from_fn(grid: WavelengthGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.wavelengths().map(f).collect())
    }

    pub fn constant(grid: WavelengthGrid, value: f64) -> Result<Self> {
        Self::new(grid, vec![value; grid.count()])
    }

    pub fn grid(&self) -> &WavelengthGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `(wavelength, value)` pairs.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid.wavelengths().zip(self.values.iter().copied())
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Linearly interpolated power at `wavelength_nm`; zero outside the grid.
    pub fn value_at(&self, wavelength_nm: f64) -> f64 {
        interpolate_uniform(&self.grid, &self.values, wavelength_nm)
    }

    /// Linear interpolation onto `target`. Wavelengths outside the source
    /// support map to zero; source nodes are reproduced exactly.
    pub fn resample(&self, target: &WavelengthGrid) -> Self {
        if *target == self.grid {
            return self.clone();
        }
        Self {
            grid: *target,
            values: resample_values(&self.grid, &self.values, target),
        }
    }

    /// Rectangular-rule integral of `S(λ)·w(λ)` on `self`'s grid, with the
    /// weight resampled onto that grid first.
    pub fn integrate_product(&self, weight: &Self) -> f64 {
        let weight = weight.resample(&self.grid);
        dot(&self.values, weight.values()) * self.grid.step()
    }

    /// Scale so the largest sample is exactly 1.
    pub fn normalize_peak(&self) -> Result<Self> {
        let peak = self.max_value();
        if peak <= 0.0 {
            return Err(Error::DegenerateSpd);
        }
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v / peak).collect(),
        })
    }

    /// Multiply every sample by `factor` (must be nonnegative).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|v| v * factor).collect())
    }

    /// Pointwise product with another curve resampled onto this grid, e.g. an
    /// illuminant times a reflectance.
    pub fn multiply(&self, other: &Self) -> Self {
        let other = other.resample(&self.grid);
        Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(other.values())
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    /// Reads the `wavelength_nm,power` CSV format and resamples onto the
    /// canonical grid. Input wavelengths need not be uniform, only strictly
    /// increasing.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        Self::read_csv_onto(reader, &WavelengthGrid::canonical())
    }

    pub fn read_csv_onto<R: Read>(reader: R, target: &WavelengthGrid) -> Result<Self> {
        let table = crate::cie_data::read_table(reader, &["wavelength_nm", "power"])?;
        if table.wavelengths.len() < 2 {
            return Err(Error::parse(
                table.wavelengths.len() + 1,
                "an SPD needs at least two samples",
            ));
        }
        let power = &table.columns[0];
        if let Some(i) = power.iter().position(|&v| v < 0.0) {
            return Err(Error::parse(i + 2, format!("negative power {}", power[i])));
        }
        let values = target
            .wavelengths()
            .map(|w| interpolate_points(&table.wavelengths, power, w))
            .collect();
        Self::new(*target, values)
    }

    /// Writes the `wavelength_nm,power` CSV format.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "wavelength_nm,power")?;
        for (w, v) in self.samples() {
            writeln!(out, "{},{}", format_wavelength(w), v)?;
        }
        Ok(())
    }
}

pub(crate) fn format_wavelength(w: f64) -> String {
    let rounded = (w * 1e6).round() / 1e6;
    format!("{rounded}")
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Linear interpolation of samples on a uniform grid, zero outside support.
pub(crate) fn interpolate_uniform(grid: &WavelengthGrid, values: &[f64], wavelength: f64) -> f64 {
    let pos = (wavelength - grid.start()) / grid.step();
    let last = (grid.count() - 1) as f64;
    if !(-SNAP..=last + SNAP).contains(&pos) {
        return 0.0;
    }
    let nearest = pos.round();
    if (pos - nearest).abs() <= SNAP {
        return values[nearest.clamp(0.0, last) as usize];
    }
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    values[lo] + (values[lo + 1] - values[lo]) * frac
}

/// Linear interpolation through strictly increasing abscissas, zero outside.
pub(crate) fn interpolate_points(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let (first, last) = (xs[0], xs[xs.len() - 1]);
    let slack = SNAP * (last - first);
    if x < first - slack || x > last + slack {
        return 0.0;
    }
    let i = xs.partition_point(|&v| v < x);
    if i < xs.len() && (xs[i] - x).abs() <= slack {
        return ys[i];
    }
    if i == 0 {
        return ys[0];
    }
    if i == xs.len() {
        return ys[xs.len() - 1];
    }
    if (xs[i - 1] - x).abs() <= slack {
        return ys[i - 1];
    }
    let t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    ys[i - 1] + (ys[i] - ys[i - 1]) * t
}

/// Resamples signed values (used for daylight basis curves as well as SPDs).
pub(crate) fn resample_values(
    source: &WavelengthGrid,
    values: &[f64],
    target: &WavelengthGrid,
) -> Vec<f64> {
    target
        .wavelengths()
        .map(|w| interpolate_uniform(source, values, w))
        .collect()
}
