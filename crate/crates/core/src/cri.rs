//! Color rendering index: von Kries style chromatic adaptation in the CIE
//! 1960 UCS, CIE 1964 color differences, the special indices R1–R8 and the
//! general index Ra.

use serde::{Deserialize, Serialize};

use crate::cct::{self, CctMethod};
use crate::cie_data::{CieDatasets, TCS_COUNT};
use crate::colorimetry::{
    cie1964_coords, tristimulus, tristimulus_reflected, ChromaticityUV, ChromaticityXY, Cie1964,
    Tristimulus,
};
use crate::illuminant::{reference_for, ReferenceSpec};
use crate::spectral::SpectralPowerDistribution;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptationCoefficients {
    pub c: f64,
    pub d: f64,
}

pub fn adaptation_cd(uv: &ChromaticityUV) -> Result<AdaptationCoefficients> {
    if !(uv.v > 0.0) {
        return Err(Error::InvalidChromaticity(format!(
            "adaptation needs v > 0, got {}",
            uv.v
        )));
    }
    Ok(AdaptationCoefficients {
        c: (4.0 - uv.u - 10.0 * uv.v) / uv.v,
        d: (1.708 * uv.v + 0.404 - 1.481 * uv.u) / uv.v,
    })
}

/// Moves a sample seen under the test illuminant into the adaptation state of
/// the reference illuminant.
pub fn adapt_sample(
    sample: &ChromaticityUV,
    cd_test: &AdaptationCoefficients,
    cd_ref: &AdaptationCoefficients,
) -> Result<ChromaticityUV> {
    if cd_test.c == 0.0 || cd_test.d == 0.0 {
        return Err(Error::AdaptationSingularity);
    }
    let own = adaptation_cd(sample)?;
    let c = cd_ref.c / cd_test.c * own.c;
    let d = cd_ref.d / cd_test.d * own.d;
    let den = 16.518 + 1.481 * c - d;
    if den == 0.0 || !den.is_finite() {
        return Err(Error::AdaptationSingularity);
    }
    Ok(ChromaticityUV {
        u: (10.872 + 0.404 * c - 4.0 * d) / den,
        v: 5.520 / den,
    })
}

/// Euclidean distance in W\*U\*V\*.
pub fn color_difference(reference: &Cie1964, test: &Cie1964) -> f64 {
    let du = reference.u_star - test.u_star;
    let dv = reference.v_star - test.v_star;
    let dw = reference.w_star - test.w_star;
    (du * du + dv * dv + dw * dw).sqrt()
}

/// `100 - 4.6 ΔE`, unclamped.
pub fn special_index(delta_e: f64) -> f64 {
    100.0 - 4.6 * delta_e
}

/// Mean of the special indices, summed in sample order.
pub fn general_index(special: &[f64; TCS_COUNT]) -> f64 {
    special.iter().sum::<f64>() / TCS_COUNT as f64
}

/// Where the CCT that selects the reference comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CctSource {
    /// Estimated from the test chromaticity with the given method.
    Estimated(CctMethod),
    /// Supplied by the caller, bypassing the estimators.
    Nominal(f64),
}

impl Default for CctSource {
    fn default() -> Self {
        CctSource::Estimated(CctMethod::Exponential)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CriOptions {
    pub cct: CctSource,
}

impl CriOptions {
    pub fn estimated(method: CctMethod) -> Self {
        Self {
            cct: CctSource::Estimated(method),
        }
    }

    pub fn nominal(kelvin: f64) -> Self {
        Self {
            cct: CctSource::Nominal(kelvin),
        }
    }
}

/// Colorimetry of one illuminant (test or reference).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IlluminantAudit {
    pub xyz: Tristimulus,
    /// Factor that scaled the raw integral to Y = 100.
    pub k: f64,
    pub xy: ChromaticityXY,
    pub uv: ChromaticityUV,
    pub adaptation: AdaptationCoefficients,
}

/// Per-sample record of every intermediate entering R_i.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleAudit {
    pub name: String,
    pub test_xyz: Tristimulus,
    pub reference_xyz: Tristimulus,
    pub test_uv: ChromaticityUV,
    pub adapted_uv: ChromaticityUV,
    pub reference_uv: ChromaticityUV,
    pub test_1964: Cie1964,
    pub reference_1964: Cie1964,
    pub delta_e: f64,
    pub special_index: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriReport {
    /// Polynomial estimate, absent when outside its model range.
    pub cct_polynomial: Option<f64>,
    /// Exponential estimate, absent when it diverges.
    pub cct_exponential: Option<f64>,
    /// Whether the exponential estimate lies in 3000–50000 K.
    pub cct_exponential_valid: bool,
    pub cct_source: CctSource,
    /// CCT the reference was generated at.
    pub reference: ReferenceSpec,
    pub test: IlluminantAudit,
    pub reference_illuminant: IlluminantAudit,
    pub samples: Vec<SampleAudit>,
    pub special_indices: [f64; TCS_COUNT],
    pub ra: f64,
}

impl CriReport {
    /// 1-based indices of samples with a negative R_i.
    pub fn negative_samples(&self) -> Vec<usize> {
        self.special_indices
            .iter()
            .enumerate()
            .filter(|(_, r)| **r < 0.0)
            .map(|(i, _)| i + 1)
            .collect()
    }
}

fn illuminant_audit(
    spd: &SpectralPowerDistribution,
    data: &CieDatasets,
    step: u8,
) -> Result<IlluminantAudit> {
    let t = tristimulus(spd, &data.cmf).map_err(|e| e.at_step(step, "tristimulus"))?;
    let xy = t
        .xyz
        .chromaticity()
        .map_err(|e| e.at_step(6, "chromaticity"))?;
    let uv = xy.to_uv().map_err(|e| e.at_step(6, "chromaticity"))?;
    let adaptation = adaptation_cd(&uv).map_err(|e| e.at_step(7, "chromatic adaptation"))?;
    Ok(IlluminantAudit {
        xyz: t.xyz,
        k: t.k,
        xy,
        uv,
        adaptation,
    })
}

/// Runs the CRI computation (CCT, reference synthesis, tristimulus, UCS,
/// adaptation, W\*U\*V\*, R_i and Ra) for a test SPD.
///
/// The SPD is resampled onto the CMF grid and peak-normalized first. Errors
/// are wrapped in [`Error::Step`] naming the stage that failed.
pub fn general_cri(
    test_spd: &SpectralPowerDistribution,
    data: &CieDatasets,
    options: &CriOptions,
) -> Result<CriReport> {
    let grid = *data.cmf.grid();
    let test_spd = test_spd
        .resample(&grid)
        .normalize_peak()
        .map_err(|e| e.at_step(5, "tristimulus"))?;
    let test = illuminant_audit(&test_spd, data, 5)?;

    // step 3: CCT
    let poly = cct::cct_mccamy(&test.xy);
    let expo = cct::cct_exponential(&test.xy);
    let cct_polynomial = poly.as_ref().ok().map(|e| e.kelvin);
    let cct_exponential = expo.as_ref().ok().map(|e| e.kelvin);
    let cct_exponential_valid = expo.as_ref().is_ok_and(|e| e.within_validity);
    let cct_used = match options.cct {
        CctSource::Nominal(kelvin) => kelvin,
        CctSource::Estimated(method) => {
            let selected = match method {
                CctMethod::Polynomial => poly,
                CctMethod::Exponential => expo,
            };
            selected.map_err(|e| e.at_step(3, "CCT"))?.kelvin
        }
    };

    // step 4: reference
    let (reference_spd, reference) = reference_for(cct_used, &grid, &data.daylight)
        .map_err(|e| e.at_step(4, "reference illuminant"))?;
    let reference_illuminant = illuminant_audit(&reference_spd, data, 5)?;

    let mut samples = Vec::with_capacity(TCS_COUNT);
    let mut special_indices = [0.0; TCS_COUNT];
    for (i, (name, reflectance)) in data
        .tcs
        .names()
        .iter()
        .zip(data.tcs.reflectances())
        .enumerate()
    {
        let audit = render_sample(
            name,
            reflectance,
            &test_spd,
            &test,
            &reference_spd,
            &reference_illuminant,
            data,
        )?;
        special_indices[i] = audit.special_index;
        samples.push(audit);
    }
    let ra = general_index(&special_indices);

    Ok(CriReport {
        cct_polynomial,
        cct_exponential,
        cct_exponential_valid,
        cct_source: options.cct,
        reference,
        test,
        reference_illuminant,
        samples,
        special_indices,
        ra,
    })
}

fn render_sample(
    name: &str,
    reflectance: &SpectralPowerDistribution,
    test_spd: &SpectralPowerDistribution,
    test: &IlluminantAudit,
    reference_spd: &SpectralPowerDistribution,
    reference: &IlluminantAudit,
    data: &CieDatasets,
) -> Result<SampleAudit> {
    let step5 = |e: Error| e.at_step(5, "tristimulus");
    let step6 = |e: Error| e.at_step(6, "chromaticity");
    let step8 = |e: Error| e.at_step(8, "CIE 1964 coordinates");

    let test_xyz =
        tristimulus_reflected(test_spd, reflectance, &data.cmf, test.k).map_err(step5)?;
    let reference_xyz =
        tristimulus_reflected(reference_spd, reflectance, &data.cmf, reference.k).map_err(step5)?;

    let test_uv = test_xyz
        .chromaticity()
        .and_then(|c| c.to_uv())
        .map_err(step6)?;
    let reference_uv = reference_xyz
        .chromaticity()
        .and_then(|c| c.to_uv())
        .map_err(step6)?;

    let adapted_uv = adapt_sample(&test_uv, &test.adaptation, &reference.adaptation)
        .map_err(|e| e.at_step(7, "chromatic adaptation"))?;

    // Both renderings are measured from the reference white.
    let test_1964 = cie1964_coords(test_xyz.y, &adapted_uv, &reference.uv).map_err(step8)?;
    let reference_1964 =
        cie1964_coords(reference_xyz.y, &reference_uv, &reference.uv).map_err(step8)?;

    let delta_e = color_difference(&reference_1964, &test_1964);
    Ok(SampleAudit {
        name: name.to_string(),
        test_xyz,
        reference_xyz,
        test_uv,
        adapted_uv,
        reference_uv,
        test_1964,
        reference_1964,
        delta_e,
        special_index: special_index(delta_e),
    })
}
