//! Tristimulus integration and the XYZ → (x, y) → (u, v) → W\*U\*V\* chain.

use serde::{Deserialize, Serialize};

use crate::cie_data::ColorMatchingFunctions;
use crate::spectral::SpectralPowerDistribution;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tristimulus {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// CIE 1931 chromaticity. `z` is implied as `1 - x - y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChromaticityXY {
    pub x: f64,
    pub y: f64,
}

/// CIE 1960 UCS chromaticity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChromaticityUV {
    pub u: f64,
    pub v: f64,
}

/// CIE 1964 uniform space coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cie1964 {
    pub w_star: f64,
    pub u_star: f64,
    pub v_star: f64,
}

/// Tristimulus values together with the factor that brought Y to 100.
///
/// The factor is what reflected-sample integrals must reuse so that a sample
/// under the same illuminant keeps `Y <= 100`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedTristimulus {
    pub xyz: Tristimulus,
    pub k: f64,
}

fn raw_tristimulus(spd: &SpectralPowerDistribution, cmf: &ColorMatchingFunctions) -> Tristimulus {
    Tristimulus {
        x: spd.integrate_product(&cmf.xbar),
        y: spd.integrate_product(&cmf.ybar),
        z: spd.integrate_product(&cmf.zbar),
    }
}

/// XYZ of an emitting source, scaled so that `Y = 100`.
pub fn tristimulus(
    spd: &SpectralPowerDistribution,
    cmf: &ColorMatchingFunctions,
) -> Result<NormalizedTristimulus> {
    let raw = raw_tristimulus(spd, cmf);
    if !(raw.y > 0.0) || !raw.y.is_finite() {
        return Err(Error::DegenerateSpd);
    }
    let k = 100.0 / raw.y;
    Ok(NormalizedTristimulus {
        xyz: Tristimulus {
            x: raw.x * k,
            y: 100.0,
            z: raw.z * k,
        },
        k,
    })
}

/// XYZ of a surface with spectral reflectance `reflectance` lit by `spd`,
/// using the illuminant's normalization constant `k`.
pub fn tristimulus_reflected(
    spd: &SpectralPowerDistribution,
    reflectance: &SpectralPowerDistribution,
    cmf: &ColorMatchingFunctions,
    k: f64,
) -> Result<Tristimulus> {
    if spd.is_zero() {
        return Err(Error::DegenerateSpd);
    }
    let raw = raw_tristimulus(&spd.multiply(reflectance), cmf);
    Ok(Tristimulus {
        x: raw.x * k,
        y: raw.y * k,
        z: raw.z * k,
    })
}

impl Tristimulus {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn chromaticity(&self) -> Result<ChromaticityXY> {
        chromaticity_xy(self)
    }
}

pub fn chromaticity_xy(t: &Tristimulus) -> Result<ChromaticityXY> {
    let sum = t.x + t.y + t.z;
    if !(sum > 0.0) || !sum.is_finite() {
        return Err(Error::InvalidChromaticity(format!(
            "X + Y + Z = {sum} must be positive"
        )));
    }
    Ok(ChromaticityXY {
        x: t.x / sum,
        y: t.y / sum,
    })
}

impl ChromaticityXY {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn z(&self) -> f64 {
        1.0 - self.x - self.y
    }

    pub fn to_uv(&self) -> Result<ChromaticityUV> {
        uv_from_xy(self)
    }
}

/// CIE 1960 UCS from CIE 1931 chromaticity.
pub fn uv_from_xy(c: &ChromaticityXY) -> Result<ChromaticityUV> {
    let denom = 12.0 * c.y - 2.0 * c.x + 3.0;
    if !(denom > 0.0) || !denom.is_finite() {
        return Err(Error::InvalidChromaticity(format!(
            "({}, {}) gives UCS denominator {denom}",
            c.x, c.y
        )));
    }
    Ok(ChromaticityUV {
        u: 4.0 * c.x / denom,
        v: 6.0 * c.y / denom,
    })
}

/// CIE 1964 coordinates of a stimulus with luminance `y` and chromaticity
/// `test`, measured from the anchor chromaticity `anchor`.
pub fn cie1964_coords(y: f64, test: &ChromaticityUV, anchor: &ChromaticityUV) -> Result<Cie1964> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::NonPositiveLuminance(y));
    }
    let w_star = 25.0 * y.cbrt() - 17.0;
    Ok(Cie1964 {
        w_star,
        u_star: 13.0 * w_star * (test.u - anchor.u),
        v_star: 13.0 * w_star * (test.v - anchor.v),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cie_data::CieDatasets;
    use crate::spectral::WavelengthGrid;

    #[test]
    fn y_is_forced_to_100() {
        let cmf = CieDatasets::bundled().cmf;
        let spd =
            SpectralPowerDistribution::from_fn(WavelengthGrid::canonical(), |w| w / 500.0).unwrap();
        assert_eq!(tristimulus(&spd, &cmf).unwrap().xyz.y, 100.0);
    }

    #[test]
    fn zero_spd_is_degenerate() {
        let cmf = CieDatasets::bundled().cmf;
        let zero = SpectralPowerDistribution::constant(WavelengthGrid::canonical(), 0.0).unwrap();
        assert!(matches!(
            tristimulus(&zero, &cmf),
            Err(Error::DegenerateSpd)
        ));
    }

    #[test]
    fn scaled_spd_same_tristimulus() {
        let cmf = CieDatasets::bundled().cmf;
        let spd = SpectralPowerDistribution::from_fn(WavelengthGrid::canonical(), |w| {
            1.0 + (w / 40.0).sin()
        })
        .unwrap();
        let a = tristimulus(&spd, &cmf).unwrap().xyz;
        let b = tristimulus(&spd.scaled(7.0).unwrap(), &cmf).unwrap().xyz;
        assert!((a.x - b.x).abs() < 1e-12 && (a.z - b.z).abs() < 1e-12);
    }

    #[test]
    fn reflected_perfect_and_half() {
        let cmf = CieDatasets::bundled().cmf;
        let g = WavelengthGrid::canonical();
        let spd = SpectralPowerDistribution::from_fn(g, |w| (w - 300.0) / 480.0).unwrap();
        let bare = tristimulus(&spd, &cmf).unwrap();
        let one = SpectralPowerDistribution::constant(g, 1.0).unwrap();
        let half = SpectralPowerDistribution::constant(g, 0.5).unwrap();
        let r1 = tristimulus_reflected(&spd, &one, &cmf, bare.k).unwrap();
        assert!((r1.x - bare.xyz.x).abs() < 1e-12);
        assert!((r1.y - 100.0).abs() < 1e-12);
        assert!((r1.z - bare.xyz.z).abs() < 1e-12);
        let rh = tristimulus_reflected(&spd, &half, &cmf, bare.k).unwrap();
        assert!((rh.y - 50.0).abs() < 1e-12);
    }

    #[test]
    fn chromaticity_symmetry_and_scale() {
        let c = chromaticity_xy(&Tristimulus::new(1.0, 1.0, 1.0)).unwrap();
        assert!((c.x - 1.0 / 3.0).abs() < 1e-15 && (c.y - 1.0 / 3.0).abs() < 1e-15);
        let c2 = chromaticity_xy(&Tristimulus::new(2.0, 2.0, 2.0)).unwrap();
        assert_eq!(c, c2);
        assert!(chromaticity_xy(&Tristimulus::new(0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn uv_table_vectors() {
        for (x, y, u, v) in [
            (0.393, 0.375, 0.234, 0.335),
            (0.384, 0.357, 0.236, 0.329),
            (0.342, 0.347, 0.211, 0.321),
        ] {
            let uv = uv_from_xy(&ChromaticityXY::new(x, y)).unwrap();
            assert!((uv.u - u).abs() <= 5e-4, "u {} vs {u}", uv.u);
            assert!((uv.v - v).abs() <= 5e-4, "v {} vs {v}", uv.v);
        }
    }

    #[test]
    fn w_star_values() {
        let anchor = ChromaticityUV { u: 0.2, v: 0.3 };
        let c = cie1964_coords(100.0, &anchor, &anchor).unwrap();
        assert!((c.w_star - 99.039_720_840_319_46).abs() < 1e-9);
        assert_eq!((c.u_star, c.v_star), (0.0, 0.0));
        assert_eq!(cie1964_coords(1.0, &anchor, &anchor).unwrap().w_star, 8.0);
        assert!(cie1964_coords(0.0, &anchor, &anchor).is_err());
        assert!(cie1964_coords(-1.0, &anchor, &anchor).is_err());
    }

    #[test]
    fn u_star_linear_in_offset() {
        let anchor = ChromaticityUV { u: 0.2, v: 0.3 };
        let one = cie1964_coords(40.0, &ChromaticityUV { u: 0.21, v: 0.3 }, &anchor).unwrap();
        let two = cie1964_coords(40.0, &ChromaticityUV { u: 0.22, v: 0.3 }, &anchor).unwrap();
        assert!((two.u_star - 2.0 * one.u_star).abs() < 1e-9);
    }
}
