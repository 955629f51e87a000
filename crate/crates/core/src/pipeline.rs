//! Ten-step analysis from a raw frame or an SPD to Ra, with an audit trace
//! of every intermediate value.

use serde::{Deserialize, Serialize};

use crate::cie_data::CieDatasets;
use crate::cri::{general_cri, CctSource, CriOptions, CriReport};
use crate::illuminant::reference_for;
use crate::sensor::{decode_frame, RawSensorFrame, ResponsivityModel, WavelengthCalibration};
use crate::spectral::SpectralPowerDistribution;
use crate::{Error, Result};

pub enum PipelineInput<'a> {
    Spd(&'a SpectralPowerDistribution),
    Frame {
        frame: &'a RawSensorFrame,
        calibration: &'a WavelengthCalibration,
        responsivity: &'a ResponsivityModel,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceValue {
    Scalar(f64),
    Series(Vec<f64>),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub name: String,
    pub value: TraceValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub index: u8,
    pub name: String,
    pub values: Vec<TraceEntry>,
}

impl TraceStep {
    fn new(index: u8, name: &str) -> Self {
        Self {
            index,
            name: name.to_string(),
            values: Vec::new(),
        }
    }

    fn scalar(mut self, name: &str, v: f64) -> Self {
        self.push(name, TraceValue::Scalar(v));
        self
    }

    fn series(mut self, name: &str, v: impl IntoIterator<Item = f64>) -> Self {
        self.push(name, TraceValue::Series(v.into_iter().collect()));
        self
    }

    fn text(mut self, name: &str, v: impl Into<String>) -> Self {
        self.push(name, TraceValue::Text(v.into()));
        self
    }

    fn push(&mut self, name: &str, value: TraceValue) {
        self.values.push(TraceEntry {
            name: name.to_string(),
            value,
        });
    }

    pub fn get(&self, name: &str) -> Option<&TraceValue> {
        self.values
            .iter()
            .find(|e| e.name == name)
            .map(|e| &e.value)
    }

    pub fn get_scalar(&self, name: &str) -> Option<f64> {
        match self.get(name)? {
            TraceValue::Scalar(v) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PipelineTrace {
    pub steps: Vec<TraceStep>,
}

impl PipelineTrace {
    pub fn step(&self, index: u8) -> Option<&TraceStep> {
        self.steps.iter().find(|s| s.index == index)
    }

    /// Pretty-printed JSON. Floats round-trip exactly.
    pub fn to_text(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Runs the full analysis. Frame input goes through dark calibration and
/// responsivity compensation first; SPD input starts at the CCT step.
pub fn run_pipeline(
    input: &PipelineInput<'_>,
    data: &CieDatasets,
    options: &CriOptions,
) -> Result<(CriReport, PipelineTrace)> {
    let mut trace = PipelineTrace::default();
    let decoded;
    let spd = match input {
        PipelineInput::Spd(spd) => *spd,
        PipelineInput::Frame {
            frame,
            calibration,
            responsivity,
        } => {
            decoded = decode_frame(frame, calibration, responsivity)
                .map_err(|e| e.at_step(2, "responsivity compensation"))?;
            trace.steps.push(
                TraceStep::new(1, "dark calibration")
                    .scalar("baseline", decoded.dark.baseline)
                    .series("intensity", decoded.dark.intensities.iter().copied()),
            );
            trace.steps.push(
                TraceStep::new(2, "responsivity compensation")
                    .scalar("lambda_first_nm", calibration.lambda_first_nm)
                    .scalar("lambda_last_nm", calibration.lambda_last_nm)
                    .series("compensation", decoded.compensation.iter().copied())
                    .series("spd", decoded.spd.values().iter().copied()),
            );
            if decoded.pixel_spd.is_zero() {
                return Err(Error::DegenerateSpd.at_step(2, "responsivity compensation"));
            }
            &decoded.spd
        }
    };

    let report = general_cri(spd, data, options)?;
    record_cri_steps(&mut trace, &report, data)?;
    Ok((report, trace))
}

fn record_cri_steps(trace: &mut PipelineTrace, r: &CriReport, data: &CieDatasets) -> Result<()> {
    let samples = &r.samples;
    let col = |f: fn(&crate::cri::SampleAudit) -> f64| samples.iter().map(f).collect::<Vec<_>>();

    let mut cct = TraceStep::new(3, "CCT")
        .scalar("x", r.test.xy.x)
        .scalar("y", r.test.xy.y);
    if let Some(k) = r.cct_polynomial {
        cct = cct.scalar("cct_polynomial", k);
    }
    if let Some(k) = r.cct_exponential {
        cct = cct.scalar("cct_exponential", k);
    }
    cct = cct.text("cct_exponential_valid", r.cct_exponential_valid.to_string());
    cct = cct.text(
        "source",
        match r.cct_source {
            CctSource::Estimated(m) => format!("estimated ({m})"),
            CctSource::Nominal(_) => "nominal".to_string(),
        },
    );
    trace.steps.push(cct.scalar("cct_used", r.reference.cct));

    let (reference_spd, _) = reference_for(r.reference.cct, data.cmf.grid(), &data.daylight)
        .map_err(|e| e.at_step(4, "reference illuminant"))?;
    trace.steps.push(
        TraceStep::new(4, "reference illuminant")
            .text("branch", r.reference.branch.to_string())
            .scalar("cct", r.reference.cct)
            .series("spd", reference_spd.into_values()),
    );

    trace.steps.push(
        TraceStep::new(5, "tristimulus")
            .series("test_xyz", [r.test.xyz.x, r.test.xyz.y, r.test.xyz.z])
            .scalar("test_k", r.test.k)
            .series(
                "reference_xyz",
                [
                    r.reference_illuminant.xyz.x,
                    r.reference_illuminant.xyz.y,
                    r.reference_illuminant.xyz.z,
                ],
            )
            .scalar("reference_k", r.reference_illuminant.k)
            .series("sample_test_X", col(|s| s.test_xyz.x))
            .series("sample_test_Y", col(|s| s.test_xyz.y))
            .series("sample_test_Z", col(|s| s.test_xyz.z))
            .series("sample_reference_X", col(|s| s.reference_xyz.x))
            .series("sample_reference_Y", col(|s| s.reference_xyz.y))
            .series("sample_reference_Z", col(|s| s.reference_xyz.z)),
    );

    trace.steps.push(
        TraceStep::new(6, "chromaticity")
            .series("test_xy", [r.test.xy.x, r.test.xy.y])
            .series("test_uv", [r.test.uv.u, r.test.uv.v])
            .series(
                "reference_xy",
                [r.reference_illuminant.xy.x, r.reference_illuminant.xy.y],
            )
            .series(
                "reference_uv",
                [r.reference_illuminant.uv.u, r.reference_illuminant.uv.v],
            )
            .series("sample_test_u", col(|s| s.test_uv.u))
            .series("sample_test_v", col(|s| s.test_uv.v))
            .series("sample_reference_u", col(|s| s.reference_uv.u))
            .series("sample_reference_v", col(|s| s.reference_uv.v)),
    );

    trace.steps.push(
        TraceStep::new(7, "chromatic adaptation")
            .series("test_cd", [r.test.adaptation.c, r.test.adaptation.d])
            .series(
                "reference_cd",
                [
                    r.reference_illuminant.adaptation.c,
                    r.reference_illuminant.adaptation.d,
                ],
            )
            .series("sample_adapted_u", col(|s| s.adapted_uv.u))
            .series("sample_adapted_v", col(|s| s.adapted_uv.v)),
    );

    trace.steps.push(
        TraceStep::new(8, "CIE 1964 coordinates")
            .series("test_W", col(|s| s.test_1964.w_star))
            .series("test_U", col(|s| s.test_1964.u_star))
            .series("test_V", col(|s| s.test_1964.v_star))
            .series("reference_W", col(|s| s.reference_1964.w_star))
            .series("reference_U", col(|s| s.reference_1964.u_star))
            .series("reference_V", col(|s| s.reference_1964.v_star)),
    );

    trace.steps.push(
        TraceStep::new(9, "special indices")
            .series("delta_e", col(|s| s.delta_e))
            .series("R", r.special_indices),
    );

    trace
        .steps
        .push(TraceStep::new(10, "general index").scalar("Ra", r.ra));
    Ok(())
}
