use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid wavelength grid: {0}")]
    InvalidGrid(String),

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("degenerate SPD: no positive power")]
    DegenerateSpd,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("insufficient coverage: table spans {start_nm}-{end_nm} nm, need {need_start_nm}-{need_end_nm} nm")]
    InsufficientCoverage {
        start_nm: f64,
        end_nm: f64,
        need_start_nm: f64,
        need_end_nm: f64,
    },

    #[error("expected {expected} samples, found {found}")]
    SampleCount { expected: usize, found: usize },

    #[error("epicenter singularity: chromaticity y equals the estimator epicenter")]
    EpicenterSingularity,

    #[error("CCT {kelvin} K is out of model range")]
    CctOutOfModelRange { kelvin: f64 },

    #[error("temperature {kelvin} K outside supported range {min}-{max} K")]
    TemperatureOutOfRange { kelvin: f64, min: f64, max: f64 },

    #[error("chromaticity is not valid: {0}")]
    InvalidChromaticity(String),

    #[error("luminance Y must be positive, got {0}")]
    NonPositiveLuminance(f64),

    #[error("adaptation singularity")]
    AdaptationSingularity,

    #[error("no first-order maximum: m*lambda = {wavelength_nm} nm >= d = {pitch_nm} nm")]
    NoFirstOrderMaximum { wavelength_nm: f64, pitch_nm: f64 },

    #[error("invalid optical parameters: {0}")]
    InvalidOptics(String),

    #[error("wavelength {wavelength_nm} nm outside design band {low_nm}-{high_nm} nm")]
    OutOfBand {
        wavelength_nm: f64,
        low_nm: f64,
        high_nm: f64,
    },

    #[error("responsivity extrapolation: {wavelength_nm} nm outside {low_nm}-{high_nm} nm")]
    ResponsivityExtrapolation {
        wavelength_nm: f64,
        low_nm: f64,
        high_nm: f64,
    },

    #[error("pixel index {0} out of range")]
    PixelOutOfRange(f64),

    #[error("invalid calibration: {0}")]
    InvalidCalibration(String),

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("saturation at pixel {pixel}: signal {signal:.1} counts exceeds baseline {baseline}")]
    Saturation {
        pixel: usize,
        signal: f64,
        baseline: f64,
    },

    #[error("step {step} ({name}): {source}")]
    Step {
        step: u8,
        name: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("trace serialization: {0}")]
    Trace(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at_step(self, step: u8, name: &'static str) -> Self {
        Error::Step {
            step,
            name,
            source: Box::new(self),
        }
    }

    /// Innermost error, looking through step attribution.
    pub fn root(&self) -> &Error {
        match self {
            Error::Step { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
