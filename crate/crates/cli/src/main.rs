use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use lumispec::cct::CctMethod;
use lumispec::cie_data::CieDatasets;
use lumispec::cri::CriOptions;
use lumispec::illuminant::reference_for;
use lumispec::optics::{
    collimator_aperture, design_inclined, design_parallel, GratingSpec, Layout, OpticalDesign,
    SensorSpec,
};
use lumispec::pipeline::{run_pipeline, PipelineInput};
use lumispec::report;
use lumispec::sensor::{
    decode_frame, simulate_frame, RawSensorFrame, ResponsivityModel, SimulationParams,
    WavelengthCalibration,
};
use lumispec::spectral::{SpectralPowerDistribution, WavelengthGrid};
use lumispec::Error;

/// Exit codes: 1 usage/parse/IO, 2 degenerate SPD, 3 CCT out of range,
/// 4 no first-order maximum, 5 sensor saturation.
#[derive(Parser)]
#[command(
    name = "lumispec",
    version,
    about = "CCT and CRI metrology, grating spectrometer design and CCD frame tools"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputKind {
    Spd,
    Frame,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Poly,
    Exp,
}

impl From<MethodArg> for CctMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Poly => CctMethod::Polynomial,
            MethodArg::Exp => CctMethod::Exponential,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ArrangementArg {
    Parallel,
    Inclined,
}

#[derive(Subcommand)]
enum Command {
    /// Compute CCT and CRI for an SPD CSV or a raw sensor frame.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "spd")]
        kind: InputKind,
        /// Wavelength calibration file (required for frames).
        #[arg(long)]
        calib: Option<PathBuf>,
        /// CCT estimator that selects the reference illuminant.
        #[arg(long, value_enum, default_value = "exp")]
        cct_method: MethodArg,
        /// Use this CCT for the reference instead of an estimate.
        #[arg(long)]
        nominal_cct: Option<f64>,
        /// Directory for report, CSV and SVG outputs.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the step-by-step audit trace (JSON) here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Load CIE tables from a manifest instead of the bundled copies.
        #[arg(long)]
        datasets: Option<PathBuf>,
    },
    /// Compute spectrometer geometry for a grating and sensor.
    Design {
        #[arg(long, default_value_t = 600.0)]
        lines_per_mm: f64,
        #[arg(long, default_value_t = 8.25)]
        sensor_mm: f64,
        #[arg(long, default_value_t = 380.0)]
        lambda_low: f64,
        #[arg(long, default_value_t = 720.0)]
        lambda_high: f64,
        /// Target wavelength resolution in nm.
        #[arg(long, default_value_t = 2.5)]
        delta: f64,
        #[arg(long, value_enum, default_value = "inclined")]
        arrangement: ArrangementArg,
        /// Directory for the position/slope sweep CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render an SPD into a simulated raw frame.
    Simulate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        calib: Option<PathBuf>,
        /// Gaussian ADC noise in counts.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Counts per unit of peak-normalized power at unit responsivity.
        #[arg(long, default_value_t = 3000.0)]
        exposure: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decode a raw frame into an SPD CSV.
    Capture {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        calib: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the CRI reference illuminant for a CCT as an SPD CSV.
    Reference {
        #[arg(long)]
        cct: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err.root() {
        Error::DegenerateSpd => 2,
        Error::CctOutOfModelRange { .. }
        | Error::TemperatureOutOfRange { .. }
        | Error::EpicenterSingularity => 3,
        Error::NoFirstOrderMaximum { .. } => 4,
        Error::Saturation { .. } => 5,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(command: Command) -> lumispec::Result<()> {
    match command {
        Command::Analyze {
            input,
            kind,
            calib,
            cct_method,
            nominal_cct,
            out,
            trace,
            datasets,
        } => analyze(AnalyzeArgs {
            input,
            kind,
            calib,
            options: match nominal_cct {
                Some(k) => CriOptions::nominal(k),
                None => CriOptions::estimated(cct_method.into()),
            },
            out,
            trace,
            datasets,
        }),
        Command::Design {
            lines_per_mm,
            sensor_mm,
            lambda_low,
            lambda_high,
            delta,
            arrangement,
            out,
        } => design(
            lines_per_mm,
            sensor_mm,
            lambda_low,
            lambda_high,
            delta,
            arrangement,
            out,
        ),
        Command::Simulate {
            input,
            calib,
            noise,
            seed,
            exposure,
            out,
        } => {
            let spd = read_spd(&input)?.normalize_peak()?;
            let calib = read_calibration_or_default(calib.as_deref())?;
            let params = SimulationParams {
                exposure_scale: exposure,
                noise_sigma: noise,
                seed,
            };
            let frame = simulate_frame(&spd, &calib, &ResponsivityModel::tcd1103(), &params)?;
            write_file(&out, |w| frame.write(w))
        }
        Command::Capture { input, calib, out } => {
            let frame = read_frame(&input)?;
            let calib = read_calibration(&calib)?;
            let decoded = decode_frame(&frame, &calib, &ResponsivityModel::tcd1103())?;
            if decoded.spd.is_zero() {
                eprintln!("warning: frame has no signal above the dark level; writing a zero SPD");
            }
            write_file(&out, |w| decoded.spd.write_csv(w))
        }
        Command::Reference { cct, out } => {
            let data = CieDatasets::bundled();
            let (spd, spec) = reference_for(cct, &WavelengthGrid::canonical(), &data.daylight)?;
            write_file(&out, |w| spd.write_csv(w))?;
            println!(
                "{} reference at {cct} K written to {}",
                spec.branch,
                out.display()
            );
            Ok(())
        }
    }
}

struct AnalyzeArgs {
    input: PathBuf,
    kind: InputKind,
    calib: Option<PathBuf>,
    options: CriOptions,
    out: Option<PathBuf>,
    trace: Option<PathBuf>,
    datasets: Option<PathBuf>,
}

fn analyze(args: AnalyzeArgs) -> lumispec::Result<()> {
    let data = match &args.datasets {
        Some(path) => CieDatasets::from_manifest(path)?,
        None => CieDatasets::bundled(),
    };
    let model = ResponsivityModel::tcd1103();
    let spd;
    let frame;
    let calibration;
    let input = match args.kind {
        InputKind::Spd => {
            spd = read_spd(&args.input)?;
            PipelineInput::Spd(&spd)
        }
        InputKind::Frame => {
            let calib_path = args
                .calib
                .as_deref()
                .ok_or_else(|| Error::InvalidCalibration("--kind frame requires --calib".into()))?;
            frame = read_frame(&args.input)?;
            calibration = read_calibration(calib_path)?;
            PipelineInput::Frame {
                frame: &frame,
                calibration: &calibration,
                responsivity: &model,
            }
        }
    };
    let (report, trace) = run_pipeline(&input, &data, &args.options)?;
    let text = report::text_report(&report);
    print!("{text}");
    for i in report.negative_samples() {
        eprintln!("warning: R{i} is negative");
    }

    if let Some(path) = &args.trace {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent)?;
        }
        let json = trace.to_text()?;
        write_file(path, |w| Ok(w.write_all(json.as_bytes())?))?;
    }
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
        let test_spd = match &input {
            PipelineInput::Spd(s) => (*s).clone(),
            PipelineInput::Frame {
                frame,
                calibration,
                responsivity,
            } => decode_frame(frame, calibration, responsivity)?.spd,
        }
        .resample(data.cmf.grid())
        .normalize_peak()?;
        let (reference_spd, _) =
            reference_for(report.reference.cct, data.cmf.grid(), &data.daylight)?;
        write_file(&dir.join("report.txt"), |w| {
            Ok(w.write_all(text.as_bytes())?)
        })?;
        write_file(&dir.join("samples.csv"), |w| {
            report::write_samples_csv(&report, w)
        })?;
        write_file(&dir.join("spd.csv"), |w| {
            report::write_spd_plot_csv(&test_spd, &reference_spd, w)
        })?;
        let svg = report::spd_plot_svg(&test_spd, &reference_spd);
        write_file(&dir.join("spd.svg"), |w| Ok(w.write_all(svg.as_bytes())?))?;
        write_file(&dir.join("chromaticity.csv"), |w| {
            report::write_chromaticity_csv(&report, w)
        })?;
    }
    Ok(())
}

fn design(
    lines_per_mm: f64,
    sensor_mm: f64,
    low: f64,
    high: f64,
    delta: f64,
    arrangement: ArrangementArg,
    out: Option<PathBuf>,
) -> lumispec::Result<()> {
    const SWEEP: usize = 69;
    let grating = GratingSpec::from_lines_per_mm(lines_per_mm)?;
    let sensor = SensorSpec::new(sensor_mm, lumispec::sensor::EFFECTIVE_PIXELS)?;
    let parallel = design_parallel(&grating, &sensor, low, high)?;
    let inclined = design_inclined(&grating, &sensor, low, high)?;
    let (chosen, other) = match arrangement {
        ArrangementArg::Parallel => (&parallel, &inclined),
        ArrangementArg::Inclined => (&inclined, &parallel),
    };
    let theta2 = (inclined.theta_low + inclined.theta_high) / 2.0;
    let aperture = collimator_aperture(delta, &sensor, low, high, theta2)?;

    println!("arrangement:        {}", chosen.arrangement());
    println!(
        "grating pitch:      {:.4} um (order {})",
        grating.pitch_um, grating.order
    );
    println!("sensor length:      {} mm", sensor.length_mm);
    println!("band:               {low}-{high} nm");
    println!(
        "theta_low:          {:.4} deg",
        chosen.theta_low.to_degrees()
    );
    println!(
        "theta_high:         {:.4} deg",
        chosen.theta_high.to_degrees()
    );
    print_layout(chosen);
    println!("aperture (d={delta} nm): {aperture:.4} mm");
    println!(
        "linearity ({}):  {:.5}",
        chosen.arrangement(),
        chosen.linearity_metric(SWEEP)?
    );
    println!(
        "linearity ({}):  {:.5}",
        other.arrangement(),
        other.linearity_metric(SWEEP)?
    );

    if let Some(dir) = out {
        fs::create_dir_all(&dir)?;
        let p = parallel.sweep(SWEEP)?;
        let i = inclined.sweep(SWEEP)?;
        write_file(&dir.join("sweep.csv"), |w| {
            writeln!(
                w,
                "wavelength_nm,s_parallel_mm,slope_parallel,s_inclined_mm,slope_inclined"
            )?;
            for ((l, sp, dp), (_, si, di)) in p.iter().zip(&i) {
                writeln!(w, "{l},{sp},{dp},{si},{di}")?;
            }
            Ok(())
        })?;
    }
    Ok(())
}

fn print_layout(d: &OpticalDesign) {
    match d.layout {
        Layout::Parallel { d1_mm, h1_mm } => {
            println!("D1:                 {d1_mm:.3} mm");
            println!("h1:                 {h1_mm:.3} mm");
        }
        Layout::Inclined { theta2, d2_mm } => {
            println!("theta2:             {:.4} deg", theta2.to_degrees());
            println!("D2:                 {d2_mm:.3} mm");
        }
    }
}

fn read_spd(path: &Path) -> lumispec::Result<SpectralPowerDistribution> {
    SpectralPowerDistribution::read_csv(File::open(path)?)
}

fn read_frame(path: &Path) -> lumispec::Result<RawSensorFrame> {
    RawSensorFrame::read(File::open(path)?)
}

fn read_calibration(path: &Path) -> lumispec::Result<WavelengthCalibration> {
    WavelengthCalibration::read(File::open(path)?)
}

fn read_calibration_or_default(path: Option<&Path>) -> lumispec::Result<WavelengthCalibration> {
    path.map_or_else(|| Ok(WavelengthCalibration::default()), read_calibration)
}

fn write_file(
    path: &Path,
    f: impl FnOnce(&mut BufWriter<File>) -> lumispec::Result<()>,
) -> lumispec::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}
