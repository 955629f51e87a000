//! Linear CCD capture chain: raw frames, dark calibration, pixel→wavelength
//! calibration, responsivity compensation and a seeded forward simulator.
//!
//! The sensor output voltage falls as light increases, so a lit pixel reads
//! *below* the dark baseline. Intensity is recovered as `baseline - count`.

use std::io::{BufRead, BufReader, Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::spectral::{SpectralPowerDistribution, WavelengthGrid};
use crate::{Error, Result};

/// Light-shielded pixels D16–D28.
pub const DARK_PIXELS: usize = 13;
/// Active pixels S1–S1500.
pub const EFFECTIVE_PIXELS: usize = 1500;
pub const BIT_DEPTH: u32 = 12;
pub const MAX_COUNT: u16 = (1 << BIT_DEPTH) - 1;
/// Dark level the simulator places every frame at.
pub const SIMULATED_BASELINE: f64 = 3800.0;
/// Integration time that gave usable frames on the reference hardware.
pub const INTEGRATION_TIME_MS: f64 = 250.0;
/// Lowest illuminance captured reliably at that integration time.
pub const MIN_ILLUMINANCE_LUX: f64 = 200.0;

pub const FRAME_HEADER: &str = "lumispec-frame v1 bitdepth=12 dark=13 effective=1500";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSensorFrame {
    dark: Vec<u16>,
    effective: Vec<u16>,
}

impl RawSensorFrame {
    pub fn new(dark: Vec<u16>, effective: Vec<u16>) -> Result<Self> {
        if dark.len() != DARK_PIXELS {
            return Err(Error::InvalidFrame(format!(
                "expected {DARK_PIXELS} dark counts, got {}",
                dark.len()
            )));
        }
        if effective.len() != EFFECTIVE_PIXELS {
            return Err(Error::InvalidFrame(format!(
                "expected {EFFECTIVE_PIXELS} effective counts, got {}",
                effective.len()
            )));
        }
        if let Some(c) = dark.iter().chain(&effective).find(|&&c| c > MAX_COUNT) {
            return Err(Error::InvalidFrame(format!(
                "count {c} exceeds {MAX_COUNT}"
            )));
        }
        Ok(Self { dark, effective })
    }

    pub fn dark(&self) -> &[u16] {
        &self.dark
    }

    pub fn effective(&self) -> &[u16] {
        &self.effective
    }

    /// Parses the v1 text frame format.
    pub fn read<R: Read>(reader: R) -> Result<Self> {
        let mut lines = BufReader::new(reader).lines();
        match lines.next() {
            Some(line) => {
                let line = line?;
                if line.trim() != FRAME_HEADER {
                    return Err(Error::parse(1, format!("expected header {FRAME_HEADER:?}")));
                }
            }
            None => return Err(Error::parse(1, "empty frame file")),
        }
        let mut counts = Vec::with_capacity(DARK_PIXELS + EFFECTIVE_PIXELS);
        for (i, line) in lines.enumerate() {
            let line_no = i + 2;
            let line = line?;
            let text = line.trim();
            if text.is_empty() {
                continue;
            }
            let count: u16 = text
                .parse()
                .map_err(|_| Error::parse(line_no, format!("not an ADC count: {text:?}")))?;
            if count > MAX_COUNT {
                return Err(Error::parse(
                    line_no,
                    format!("count {count} exceeds {MAX_COUNT}"),
                ));
            }
            counts.push(count);
        }
        if counts.len() != DARK_PIXELS + EFFECTIVE_PIXELS {
            return Err(Error::parse(
                counts.len() + 2,
                format!(
                    "expected {} counts ({DARK_PIXELS} dark + {EFFECTIVE_PIXELS} effective), found {}",
                    DARK_PIXELS + EFFECTIVE_PIXELS,
                    counts.len()
                ),
            ));
        }
        let effective = counts.split_off(DARK_PIXELS);
        Self::new(counts, effective)
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{FRAME_HEADER}")?;
        for c in self.dark.iter().chain(&self.effective) {
            writeln!(out, "{c}")?;
        }
        Ok(())
    }
}

/// Two-point linear map from pixel index to wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavelengthCalibration {
    pub lambda_first_nm: f64,
    pub lambda_last_nm: f64,
}

impl Default for WavelengthCalibration {
    fn default() -> Self {
        Self {
            lambda_first_nm: 391.0,
            lambda_last_nm: 723.0,
        }
    }
}

impl WavelengthCalibration {
    pub fn new(lambda_first_nm: f64, lambda_last_nm: f64) -> Result<Self> {
        if !lambda_first_nm.is_finite() || !lambda_last_nm.is_finite() {
            return Err(Error::InvalidCalibration("non-finite wavelength".into()));
        }
        if lambda_first_nm >= lambda_last_nm {
            return Err(Error::InvalidCalibration(format!(
                "first pixel {lambda_first_nm} nm must be below last pixel {lambda_last_nm} nm"
            )));
        }
        Ok(Self {
            lambda_first_nm,
            lambda_last_nm,
        })
    }

    /// Wavelength at a 1-based, possibly fractional, pixel position.
    pub fn wavelength_at(&self, position: f64) -> Result<f64> {
        if !(1.0..=EFFECTIVE_PIXELS as f64).contains(&position) {
            return Err(Error::PixelOutOfRange(position));
        }
        Ok(self.lambda_first_nm
            + (position - 1.0) * (self.lambda_last_nm - self.lambda_first_nm)
                / (EFFECTIVE_PIXELS - 1) as f64)
    }

    /// Uniform grid holding one sample per effective pixel.
    pub fn pixel_grid(&self) -> WavelengthGrid {
        WavelengthGrid::new(
            self.lambda_first_nm,
            (self.lambda_last_nm - self.lambda_first_nm) / (EFFECTIVE_PIXELS - 1) as f64,
            EFFECTIVE_PIXELS,
        )
        .expect("validated calibration gives a valid grid")
    }

    /// Parses `key = value` lines with `lambda_first_nm` and `lambda_last_nm`.
    /// `#` starts a comment.
    pub fn read<R: Read>(reader: R) -> Result<Self> {
        let mut first = None;
        let mut last = None;
        for (i, line) in BufReader::new(reader).lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            let text = line.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let (key, value) = text.split_once('=').ok_or_else(|| {
                Error::parse(line_no, format!("expected key = value, got {text:?}"))
            })?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::parse(line_no, format!("not a number: {:?}", value.trim())))?;
            match key.trim() {
                "lambda_first_nm" => first = Some(value),
                "lambda_last_nm" => last = Some(value),
                other => return Err(Error::parse(line_no, format!("unknown key {other:?}"))),
            }
        }
        match (first, last) {
            (Some(f), Some(l)) => Self::new(f, l),
            _ => Err(Error::parse(
                1,
                "calibration needs lambda_first_nm and lambda_last_nm",
            )),
        }
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "lambda_first_nm = {}", self.lambda_first_nm)?;
        writeln!(out, "lambda_last_nm = {}", self.lambda_last_nm)?;
        Ok(())
    }
}

/// `index` is 1-based (S1..S1500).
pub fn pixel_to_wavelength(index: usize, calib: &WavelengthCalibration) -> Result<f64> {
    calib.wavelength_at(index as f64)
}

/// Relative spectral responsivity as a polynomial in wavelength expressed in
/// meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponsivityModel {
    /// Highest power first.
    coefficients: [f64; 6],
    valid_band_nm: (f64, f64),
}

impl Default for ResponsivityModel {
    fn default() -> Self {
        Self::tcd1103()
    }
}

impl ResponsivityModel {
    pub fn new(coefficients: [f64; 6], valid_band_nm: (f64, f64)) -> Result<Self> {
        let (lo, hi) = valid_band_nm;
        if !(hi > lo) {
            return Err(Error::InvalidCalibration(format!(
                "empty responsivity band {lo}-{hi} nm"
            )));
        }
        let model = Self {
            coefficients,
            valid_band_nm,
        };
        let samples = 1000;
        for i in 0..=samples {
            let w = lo + (hi - lo) * i as f64 / samples as f64;
            let r = model.eval_unchecked(w);
            if !(r > 0.0) {
                return Err(Error::InvalidCalibration(format!(
                    "responsivity {r} at {w} nm is not positive"
                )));
            }
        }
        Ok(model)
    }

    /// Fifth-order fit of the TCD1103 responsivity, valid over 391–723 nm.
    pub fn tcd1103() -> Self {
        Self::new(
            [-1.783e32, 4.289e26, -3.919e20, 1.575e14, -2.170e7, 0.2012],
            (391.0, 723.0),
        )
        .expect("TCD1103 fit is positive over its band")
    }

    pub fn valid_band_nm(&self) -> (f64, f64) {
        self.valid_band_nm
    }

    fn eval_unchecked(&self, wavelength_nm: f64) -> f64 {
        let lambda = wavelength_nm * 1e-9;
        self.coefficients
            .iter()
            .fold(0.0, |acc, c| acc * lambda + c)
    }

    pub fn responsivity(&self, wavelength_nm: f64) -> Result<f64> {
        let (lo, hi) = self.valid_band_nm;
        let slack = 1e-9 * (hi - lo);
        if wavelength_nm < lo - slack || wavelength_nm > hi + slack {
            return Err(Error::ResponsivityExtrapolation {
                wavelength_nm,
                low_nm: lo,
                high_nm: hi,
            });
        }
        Ok(self.eval_unchecked(wavelength_nm))
    }
}

/// Dark-level subtraction result.
#[derive(Debug, Clone, PartialEq)]
pub struct DarkCalibration {
    /// Mean of the shielded pixels.
    pub baseline: f64,
    /// `max(0, baseline - count)` per effective pixel.
    pub intensities: Vec<f64>,
}

pub fn dark_calibrate(frame: &RawSensorFrame) -> DarkCalibration {
    let baseline = frame.dark.iter().map(|&c| f64::from(c)).sum::<f64>() / frame.dark.len() as f64;
    let intensities = frame
        .effective
        .iter()
        .map(|&c| (baseline - f64::from(c)).max(0.0))
        .collect();
    DarkCalibration {
        baseline,
        intensities,
    }
}

/// Everything recovered from one frame on its way to an SPD.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedFrame {
    pub dark: DarkCalibration,
    /// `1 / R(λ)` per effective pixel.
    pub compensation: Vec<f64>,
    /// Compensated intensities on the pixel grid.
    pub pixel_spd: SpectralPowerDistribution,
    /// `pixel_spd` on the canonical grid (zero outside the sensor band).
    pub spd: SpectralPowerDistribution,
}

pub fn decode_frame(
    frame: &RawSensorFrame,
    calib: &WavelengthCalibration,
    model: &ResponsivityModel,
) -> Result<DecodedFrame> {
    let dark = dark_calibrate(frame);
    let grid = calib.pixel_grid();
    let compensation = grid
        .wavelengths()
        .map(|w| model.responsivity(w).map(|r| 1.0 / r))
        .collect::<Result<Vec<_>>>()?;
    let values = dark
        .intensities
        .iter()
        .zip(&compensation)
        .map(|(i, c)| i * c)
        .collect();
    let pixel_spd = SpectralPowerDistribution::new(grid, values)?;
    let spd = pixel_spd.resample(&WavelengthGrid::canonical());
    Ok(DecodedFrame {
        dark,
        compensation,
        pixel_spd,
        spd,
    })
}

/// Dark calibration, responsivity compensation and resampling onto the
/// canonical grid.
pub fn frame_to_spd(
    frame: &RawSensorFrame,
    calib: &WavelengthCalibration,
    model: &ResponsivityModel,
) -> Result<SpectralPowerDistribution> {
    Ok(decode_frame(frame, calib, model)?.spd)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationParams {
    /// Counts produced by unit relative power at unit responsivity.
    pub exposure_scale: f64,
    /// Standard deviation of additive ADC noise in counts.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for SimulationParams {
    fn default() -> Self {
        Self {
            exposure_scale: 3000.0,
            noise_sigma: 0.0,
            seed: 1,
        }
    }
}

/// Forward model: renders `spd` into a raw frame as the sensor would see it.
///
/// Pixel `i` reads `round(baseline - S(λ_i) R(λ_i) exposure + noise)`,
/// clamped to the ADC range; dark pixels read `baseline + noise`. The same
/// seed always yields the same frame.
pub fn simulate_frame(
    spd: &SpectralPowerDistribution,
    calib: &WavelengthCalibration,
    model: &ResponsivityModel,
    params: &SimulationParams,
) -> Result<RawSensorFrame> {
    if !(params.exposure_scale > 0.0) || !params.exposure_scale.is_finite() {
        return Err(Error::InvalidCalibration(format!(
            "exposure scale must be positive, got {}",
            params.exposure_scale
        )));
    }
    if !(params.noise_sigma >= 0.0) || !params.noise_sigma.is_finite() {
        return Err(Error::InvalidCalibration(format!(
            "noise sigma must be nonnegative, got {}",
            params.noise_sigma
        )));
    }
    let on_pixels = spd.resample(&calib.pixel_grid());
    if on_pixels.is_zero() {
        return Err(Error::DegenerateSpd);
    }
    let signal = on_pixels
        .samples()
        .map(|(w, s)| Ok(s * model.responsivity(w)? * params.exposure_scale))
        .collect::<Result<Vec<f64>>>()?;
    if let Some((pixel, &value)) = signal
        .iter()
        .enumerate()
        .find(|(_, &v)| v > SIMULATED_BASELINE)
    {
        return Err(Error::Saturation {
            pixel: pixel + 1,
            signal: value,
            baseline: SIMULATED_BASELINE,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let normal = Normal::new(0.0, params.noise_sigma).expect("sigma validated above");
    let mut noise = || {
        if params.noise_sigma > 0.0 {
            normal.sample(&mut rng)
        } else {
            0.0
        }
    };
    let to_count = |v: f64| v.round().clamp(0.0, f64::from(MAX_COUNT)) as u16;

    let dark = (0..DARK_PIXELS)
        .map(|_| to_count(SIMULATED_BASELINE + noise()))
        .collect();
    let effective = signal
        .iter()
        .map(|v| to_count(SIMULATED_BASELINE - v + noise()))
        .collect();
    RawSensorFrame::new(dark, effective)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_frame(dark: u16, effective: u16) -> RawSensorFrame {
        RawSensorFrame::new(vec![dark; DARK_PIXELS], vec![effective; EFFECTIVE_PIXELS]).unwrap()
    }

    #[test]
    fn frame_shape_validation() {
        assert!(RawSensorFrame::new(vec![0; 12], vec![0; 1500]).is_err());
        assert!(RawSensorFrame::new(vec![0; 13], vec![0; 1499]).is_err());
        assert!(RawSensorFrame::new(vec![4096; 13], vec![0; 1500]).is_err());
    }

    #[test]
    fn dark_calibration_rules() {
        let none = dark_calibrate(&flat_frame(2000, 2000));
        assert!(none.intensities.iter().all(|&v| v == 0.0));
        let lit = dark_calibrate(&flat_frame(2000, 1500));
        assert_eq!(lit.baseline, 2000.0);
        assert!(lit.intensities.iter().all(|&v| v == 500.0));
        let above = dark_calibrate(&flat_frame(2000, 2100));
        assert!(above.intensities.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn pixel_calibration_points() {
        let c = WavelengthCalibration::default();
        assert_eq!(pixel_to_wavelength(1, &c).unwrap(), 391.0);
        assert_eq!(pixel_to_wavelength(1500, &c).unwrap(), 723.0);
        assert!((c.wavelength_at(750.5).unwrap() - 557.0).abs() < 1e-12);
        assert!(pixel_to_wavelength(0, &c).is_err());
        assert!(pixel_to_wavelength(1501, &c).is_err());
        assert!(WavelengthCalibration::new(723.0, 391.0).is_err());
    }

    #[test]
    fn responsivity_values() {
        let m = ResponsivityModel::tcd1103();
        assert!((m.responsivity(400.0).unwrap() - 0.793).abs() < 1e-3);
        assert!((m.responsivity(700.0).unwrap() - 0.779).abs() < 5e-3);
        assert!(matches!(
            m.responsivity(380.0),
            Err(Error::ResponsivityExtrapolation { .. })
        ));
    }

    #[test]
    fn calibration_file_round_trip() {
        let c = WavelengthCalibration::new(390.5, 724.25).unwrap();
        let mut buf = Vec::new();
        c.write(&mut buf).unwrap();
        assert_eq!(WavelengthCalibration::read(buf.as_slice()).unwrap(), c);
        let text = "# bench setup\nlambda_first_nm=391\n\nlambda_last_nm = 723 # red LED\n";
        assert_eq!(
            WavelengthCalibration::read(text.as_bytes()).unwrap(),
            WavelengthCalibration::default()
        );
        assert!(WavelengthCalibration::read("lambda_first_nm = 391\n".as_bytes()).is_err());
        assert!(WavelengthCalibration::read("lambda_first_nm: 391\n".as_bytes()).is_err());
    }

    #[test]
    fn frame_file_errors() {
        let mut buf = Vec::new();
        flat_frame(3800, 3000).write(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            RawSensorFrame::read(text.as_bytes()).unwrap(),
            flat_frame(3800, 3000)
        );

        let missing_dark: String = text
            .lines()
            .enumerate()
            .filter(|(i, _)| *i != 1)
            .map(|(_, l)| format!("{l}\n"))
            .collect();
        assert!(RawSensorFrame::read(missing_dark.as_bytes()).is_err());
        assert!(RawSensorFrame::read("".as_bytes()).is_err());
        assert!(
            RawSensorFrame::read(text.replacen("lumispec-frame v1", "frame v2", 1).as_bytes())
                .is_err()
        );
        let big = text.replacen("\n3800\n", "\n5000\n", 1);
        assert!(RawSensorFrame::read(big.as_bytes()).is_err());
    }

    #[test]
    fn flat_spd_simulates_constant_counts() {
        let calib = WavelengthCalibration::default();
        let model = ResponsivityModel::tcd1103();
        let params = SimulationParams::default();
        // flat after responsivity: S = 1/R on the pixel grid
        let flat = SpectralPowerDistribution::constant(WavelengthGrid::canonical(), 1.0).unwrap();
        let frame = simulate_frame(&flat, &calib, &model, &params).unwrap();
        assert!(frame.dark().iter().all(|&c| c == 3800));
        // counts follow R(λ), so they are not all equal; the recovered SPD is
        let spd = frame_to_spd(&frame, &calib, &model).unwrap();
        let band: Vec<f64> = spd
            .samples()
            .filter(|(w, _)| (395.0..=720.0).contains(w))
            .map(|(_, v)| v)
            .collect();
        let max = band.iter().copied().fold(f64::MIN, f64::max);
        let min = band.iter().copied().fold(f64::MAX, f64::min);
        assert!((max - min) / max < 5e-4, "{min} {max}");
    }

    #[test]
    fn compensated_flat_gives_equal_counts() {
        let calib = WavelengthCalibration::default();
        let model = ResponsivityModel::tcd1103();
        let grid = calib.pixel_grid();
        let inverse =
            SpectralPowerDistribution::from_fn(grid, |w| 0.7 / model.responsivity(w).unwrap())
                .unwrap();
        let frame = simulate_frame(&inverse, &calib, &model, &SimulationParams::default()).unwrap();
        let first = frame.effective()[0];
        assert!(frame.effective().iter().all(|&c| c == first));
        assert_eq!(first, 3800 - 2100);
    }

    #[test]
    fn simulation_is_seeded() {
        let calib = WavelengthCalibration::default();
        let model = ResponsivityModel::tcd1103();
        let spd =
            SpectralPowerDistribution::from_fn(WavelengthGrid::canonical(), |w| w / 780.0).unwrap();
        let params = SimulationParams {
            noise_sigma: 2.0,
            seed: 42,
            ..Default::default()
        };
        let a = simulate_frame(&spd, &calib, &model, &params).unwrap();
        let b = simulate_frame(&spd, &calib, &model, &params).unwrap();
        assert_eq!(a, b);
        let c = simulate_frame(
            &spd,
            &calib,
            &model,
            &SimulationParams { seed: 43, ..params },
        )
        .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn saturation_and_degenerate() {
        let calib = WavelengthCalibration::default();
        let model = ResponsivityModel::tcd1103();
        let spd = SpectralPowerDistribution::constant(WavelengthGrid::canonical(), 1.0).unwrap();
        let hot = SimulationParams {
            exposure_scale: 10_000.0,
            ..Default::default()
        };
        assert!(matches!(
            simulate_frame(&spd, &calib, &model, &hot),
            Err(Error::Saturation { .. })
        ));
        let zero = SpectralPowerDistribution::constant(WavelengthGrid::canonical(), 0.0).unwrap();
        assert!(matches!(
            simulate_frame(&zero, &calib, &model, &SimulationParams::default()),
            Err(Error::DegenerateSpd)
        ));
    }

    #[test]
    fn all_dark_frame_decodes_to_zero_spd() {
        let spd = frame_to_spd(
            &flat_frame(3800, 3800),
            &WavelengthCalibration::default(),
            &ResponsivityModel::tcd1103(),
        )
        .unwrap();
        assert!(spd.is_zero());
        assert!(matches!(spd.normalize_peak(), Err(Error::DegenerateSpd)));
    }
}
