//! Closed-form correlated color temperature estimators working directly on
//! CIE 1931 (x, y).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::colorimetry::ChromaticityXY;
use crate::{Error, Result};

/// Which closed-form CCT approximation to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CctMethod {
    /// Cubic polynomial around the (0.3320, 0.1858) epicenter.
    Polynomial,
    /// Sum of exponentials around the (0.3366, 0.1735) epicenter.
    #[default]
    Exponential,
}

impl fmt::Display for CctMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CctMethod::Polynomial => "polynomial",
            CctMethod::Exponential => "exponential",
        })
    }
}

impl FromStr for CctMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "poly" | "polynomial" => Ok(CctMethod::Polynomial),
            "exp" | "exponential" => Ok(CctMethod::Exponential),
            other => Err(format!(
                "unknown CCT method {other:?} (expected poly or exp)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CctEstimate {
    pub kelvin: f64,
    pub method: CctMethod,
    /// False when the exponential estimate falls outside 3000–50000 K, the
    /// band its coefficients were fitted for. Always true for the polynomial.
    pub within_validity: bool,
}

pub const POLY_EPICENTER: (f64, f64) = (0.3320, 0.1858);
const POLY_COEFFS: [f64; 4] = [-449.0, 3525.0, -6823.3, 5520.33];
/// Range outside of which the polynomial estimate is rejected.
pub const POLY_RANGE_K: (f64, f64) = (1000.0, 50000.0);

pub const EXP_EPICENTER: (f64, f64) = (0.3366, 0.1735);
pub const EXP_A0: f64 = -949.8631;
pub const EXP_TERMS: [(f64, f64); 3] = [
    (6253.80338, 0.92159),
    (28.70599, 0.20039),
    (0.00004, 0.07125),
];
/// Band the exponential coefficients are valid for.
pub const EXP_VALIDITY_K: (f64, f64) = (3000.0, 50000.0);

fn epicenter_ratio(c: &ChromaticityXY, (xe, ye): (f64, f64)) -> Result<f64> {
    let den = c.y - ye;
    if den == 0.0 {
        return Err(Error::EpicenterSingularity);
    }
    let n = (c.x - xe) / den;
    if !n.is_finite() {
        return Err(Error::EpicenterSingularity);
    }
    Ok(n)
}

/// Cubic polynomial in `n = (x - 0.3320) / (y - 0.1858)`.
pub fn cct_mccamy(c: &ChromaticityXY) -> Result<CctEstimate> {
    let n = epicenter_ratio(c, POLY_EPICENTER)?;
    let [a3, a2, a1, a0] = POLY_COEFFS;
    let kelvin = ((a3 * n + a2) * n + a1) * n + a0;
    if !kelvin.is_finite() || kelvin < POLY_RANGE_K.0 || kelvin > POLY_RANGE_K.1 {
        return Err(Error::CctOutOfModelRange { kelvin });
    }
    Ok(CctEstimate {
        kelvin,
        method: CctMethod::Polynomial,
        within_validity: true,
    })
}

/// Exponential series value at ratio `n` with no range checks.
pub fn exponential_series(n: f64) -> f64 {
    EXP_A0
        + EXP_TERMS
            .iter()
            .map(|(a, t)| a * (-n / t).exp())
            .sum::<f64>()
}

/// Sum of exponentials in `n = (x - 0.3366) / (y - 0.1735)`.
pub fn cct_exponential(c: &ChromaticityXY) -> Result<CctEstimate> {
    let n = epicenter_ratio(c, EXP_EPICENTER)?;
    let kelvin = exponential_series(n);
    if !kelvin.is_finite() || kelvin <= 0.0 {
        return Err(Error::CctOutOfModelRange { kelvin });
    }
    let within_validity = (EXP_VALIDITY_K.0..=EXP_VALIDITY_K.1).contains(&kelvin);
    if !within_validity {
        log::warn!("exponential CCT {kelvin:.0} K outside stated validity 3000-50000 K");
    }
    Ok(CctEstimate {
        kelvin,
        method: CctMethod::Exponential,
        within_validity,
    })
}

pub fn estimate(c: &ChromaticityXY, method: CctMethod) -> Result<CctEstimate> {
    match method {
        CctMethod::Polynomial => cct_mccamy(c),
        CctMethod::Exponential => cct_exponential(c),
    }
}
