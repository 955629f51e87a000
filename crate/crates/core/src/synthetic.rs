//! Synthetic test spectra: Gaussian lines, three-line white sources tuned to
//! a target chromaticity, and band-stop filtering.

use crate::cie_data::ColorMatchingFunctions;
use crate::colorimetry::ChromaticityXY;
use crate::spectral::{SpectralPowerDistribution, WavelengthGrid};
use crate::{Error, Result};

/// Unit-height Gaussian line.
pub fn gaussian_spd(
    grid: &WavelengthGrid,
    center_nm: f64,
    sigma_nm: f64,
) -> Result<SpectralPowerDistribution> {
    if !(sigma_nm > 0.0) || !center_nm.is_finite() {
        return Err(Error::InvalidSpectrum(format!(
            "gaussian needs a finite center and positive width, got {center_nm} / {sigma_nm}"
        )));
    }
    SpectralPowerDistribution::from_fn(*grid, |w| {
        let z = (w - center_nm) / sigma_nm;
        (-0.5 * z * z).exp()
    })
}

/// Three-line source whose mixture hits `target` chromaticity.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeSpike {
    pub centers_nm: [f64; 3],
    pub sigma_nm: f64,
    /// Line heights relative to the tallest.
    pub heights: [f64; 3],
    pub spd: SpectralPowerDistribution,
}

/// Solves for the line heights that place the mixture at `target`, then
/// peak-normalizes. Fails if the target lies outside the triangle spanned by
/// the three lines.
pub fn three_spike_spd(
    cmf: &ColorMatchingFunctions,
    centers_nm: [f64; 3],
    sigma_nm: f64,
    target: &ChromaticityXY,
) -> Result<ThreeSpike> {
    if !(target.y > 0.0) {
        return Err(Error::InvalidChromaticity(format!(
            "target y = {} must be positive",
            target.y
        )));
    }
    let grid = *cmf.grid();
    let lines = centers_nm
        .iter()
        .map(|&c| gaussian_spd(&grid, c, sigma_nm))
        .collect::<Result<Vec<_>>>()?;
    // columns: XYZ of each line; rhs: XYZ of the target at Y = 1
    let mut m = [[0.0; 3]; 3];
    for (j, line) in lines.iter().enumerate() {
        m[0][j] = line.integrate_product(&cmf.xbar);
        m[1][j] = line.integrate_product(&cmf.ybar);
        m[2][j] = line.integrate_product(&cmf.zbar);
    }
    let rhs = [target.x / target.y, 1.0, target.z() / target.y];
    let raw = solve3(&m, &rhs)
        .ok_or_else(|| Error::InvalidSpectrum("spike colors are linearly dependent".into()))?;
    if raw.iter().any(|&h| !(h > 0.0)) {
        return Err(Error::InvalidSpectrum(format!(
            "target ({}, {}) is outside the gamut of lines at {centers_nm:?} nm",
            target.x, target.y
        )));
    }
    let peak = raw.iter().copied().fold(0.0, f64::max);
    let heights = raw.map(|h| h / peak);
    let values = (0..grid.count())
        .map(|i| {
            lines
                .iter()
                .zip(&heights)
                .map(|(l, h)| h * l.values()[i])
                .sum()
        })
        .collect();
    let spd = SpectralPowerDistribution::new(grid, values)?.normalize_peak()?;
    Ok(ThreeSpike {
        centers_nm,
        sigma_nm,
        heights,
        spd,
    })
}

/// The 450/545/610 nm, σ = 10 nm white used across the test suite, tuned
/// to D65 chromaticity.
pub fn three_spike_white(cmf: &ColorMatchingFunctions) -> Result<ThreeSpike> {
    three_spike_spd(
        cmf,
        [450.0, 545.0, 610.0],
        10.0,
        &ChromaticityXY::new(0.3127, 0.3290),
    )
}

/// Zeroes every sample inside `[low_nm, high_nm]`.
pub fn notch(
    spd: &SpectralPowerDistribution,
    low_nm: f64,
    high_nm: f64,
) -> Result<SpectralPowerDistribution> {
    let values = spd
        .samples()
        .map(|(w, v)| {
            if (low_nm..=high_nm).contains(&w) {
                0.0
            } else {
                v
            }
        })
        .collect();
    SpectralPowerDistribution::new(*spd.grid(), values)
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Cramer's rule.
fn solve3(m: &[[f64; 3]; 3], rhs: &[f64; 3]) -> Option<[f64; 3]> {
    let det = det3(m);
    if det.abs() < 1e-300 || !det.is_finite() {
        return None;
    }
    let mut out = [0.0; 3];
    for (col, slot) in out.iter_mut().enumerate() {
        let mut mc = *m;
        for row in 0..3 {
            mc[row][col] = rhs[row];
        }
        *slot = det3(&mc) / det;
    }
    Some(out)
}
