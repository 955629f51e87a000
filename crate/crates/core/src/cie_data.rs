//! CIE reference tables: the 1931 2° color matching functions, the daylight
//! basis S0/S1/S2 and the eight CRI test color samples.
//!
//! Every loader validates its table and resamples it onto the canonical
//! 380–780 nm / 5 nm grid, so downstream code never mixes grids. Copies of
//! all three tables ship in `data/` and are available through
//! [`CieDatasets::bundled`].

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::spectral::{interpolate_points, SpectralPowerDistribution, WavelengthGrid};
use crate::{Error, Result};

const BUNDLED_CMF: &str = include_str!("../data/cie1931_2deg_cmf.csv");
const BUNDLED_DAYLIGHT: &str = include_str!("../data/cie_daylight_components.csv");
const BUNDLED_TCS: &str = include_str!("../data/cie_tcs_1_8.csv");

/// Number of test color samples entering Ra.
pub const TCS_COUNT: usize = 8;

/// Raw numeric table: a wavelength column plus named value columns.
#[derive(Debug, Clone)]
pub(crate) struct Table {
    pub names: Vec<String>,
    pub wavelengths: Vec<f64>,
    pub columns: Vec<Vec<f64>>,
}

/// Reads a CSV whose first column is `wavelength_nm`. When `required` is
/// non-empty those columns are extracted in that order; otherwise every value
/// column is returned. Line numbers in errors are 1-based file lines.
pub(crate) fn read_table<R: Read>(reader: R, required: &[&str]) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();

    let header = match records.next() {
        Some(rec) => rec.map_err(|e| Error::parse(1, e.to_string()))?,
        None => return Err(Error::parse(1, "empty input, expected a header line")),
    };
    let header: Vec<String> = header.iter().map(str::to_ascii_lowercase).collect();
    if header.first().map(String::as_str) != Some("wavelength_nm") {
        return Err(Error::parse(1, "first column must be wavelength_nm"));
    }
    let selected: Vec<usize> = if required.is_empty() {
        (1..header.len()).collect()
    } else {
        required
            .iter()
            .skip(1)
            .map(|name| {
                header
                    .iter()
                    .position(|h| h == name)
                    .ok_or_else(|| Error::parse(1, format!("missing column {name}")))
            })
            .collect::<Result<_>>()?
    };
    if selected.is_empty() {
        return Err(Error::parse(1, "no value columns"));
    }

    let mut wavelengths = Vec::new();
    let mut columns = vec![Vec::new(); selected.len()];
    for (i, rec) in records.enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::parse(line, e.to_string()))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if rec.len() != header.len() {
            return Err(Error::parse(
                line,
                format!("expected {} fields, found {}", header.len(), rec.len()),
            ));
        }
        let field = |idx: usize| -> Result<f64> {
            let raw = &rec[idx];
            let v: f64 = raw
                .parse()
                .map_err(|_| Error::parse(line, format!("not a number: {raw:?}")))?;
            if !v.is_finite() {
                return Err(Error::parse(line, format!("non-finite value {raw:?}")));
            }
            Ok(v)
        };
        let w = field(0)?;
        if let Some(&prev) = wavelengths.last() {
            if w <= prev {
                return Err(Error::parse(
                    line,
                    format!("wavelengths must be strictly increasing ({w} after {prev})"),
                ));
            }
        }
        wavelengths.push(w);
        for (col, &idx) in columns.iter_mut().zip(&selected) {
            col.push(field(idx)?);
        }
    }
    if wavelengths.is_empty() {
        return Err(Error::parse(2, "no data rows"));
    }
    Ok(Table {
        names: selected.iter().map(|&i| header[i].clone()).collect(),
        wavelengths,
        columns,
    })
}

impl Table {
    fn require_coverage(&self, grid: &WavelengthGrid) -> Result<()> {
        let start = self.wavelengths[0];
        let end = *self.wavelengths.last().unwrap();
        let slack = 1e-9;
        if start > grid.start() + slack || end < grid.end() - slack {
            return Err(Error::InsufficientCoverage {
                start_nm: start,
                end_nm: end,
                need_start_nm: grid.start(),
                need_end_nm: grid.end(),
            });
        }
        Ok(())
    }

    fn require_nonnegative(&self, col: usize) -> Result<()> {
        if let Some(i) = self.columns[col].iter().position(|&v| v < 0.0) {
            return Err(Error::parse(
                i + 2,
                format!(
                    "negative {} value {}",
                    self.names[col], self.columns[col][i]
                ),
            ));
        }
        Ok(())
    }

    fn resampled(&self, col: usize, grid: &WavelengthGrid) -> Vec<f64> {
        grid.wavelengths()
            .map(|w| interpolate_points(&self.wavelengths, &self.columns[col], w))
            .collect()
    }
}

/// CIE 1931 2° standard observer on the canonical grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorMatchingFunctions {
    pub xbar: SpectralPowerDistribution,
    pub ybar: SpectralPowerDistribution,
    pub zbar: SpectralPowerDistribution,
}

impl ColorMatchingFunctions {
    pub fn grid(&self) -> &WavelengthGrid {
        self.xbar.grid()
    }

    /// Wavelength of the ȳ maximum.
    pub fn ybar_peak_nm(&self) -> f64 {
        let (i, _) = self
            .ybar
            .values()
            .iter()
            .enumerate()
            .fold(
                (0, f64::MIN),
                |best, (i, &v)| if v > best.1 { (i, v) } else { best },
            );
        self.grid().wavelength(i)
    }
}

/// Reads `wavelength_nm,xbar,ybar,zbar`.
pub fn load_cmf<R: Read>(source: R) -> Result<ColorMatchingFunctions> {
    let table = read_table(source, &["wavelength_nm", "xbar", "ybar", "zbar"])?;
    let grid = WavelengthGrid::canonical();
    for col in 0..3 {
        table.require_nonnegative(col)?;
    }
    table.require_coverage(&grid)?;
    let curve = |col| SpectralPowerDistribution::new(grid, table.resampled(col, &grid));
    let cmf = ColorMatchingFunctions {
        xbar: curve(0)?,
        ybar: curve(1)?,
        zbar: curve(2)?,
    };
    let peak = cmf.ybar_peak_nm();
    if (peak - 555.0).abs() > 10.0 {
        return Err(Error::InvalidSpectrum(format!(
            "ybar peaks at {peak} nm, expected 555 ± 10 nm"
        )));
    }
    Ok(cmf)
}

/// Daylight basis functions. S1 and S2 are signed, so they are kept as plain
/// sample vectors on the canonical grid rather than as SPDs.
#[derive(Debug, Clone, PartialEq)]
pub struct DaylightComponents {
    grid: WavelengthGrid,
    pub s0: Vec<f64>,
    pub s1: Vec<f64>,
    pub s2: Vec<f64>,
}

impl DaylightComponents {
    pub fn grid(&self) -> &WavelengthGrid {
        &self.grid
    }
}

/// Reads `wavelength_nm,s0,s1,s2`.
pub fn load_daylight_components<R: Read>(source: R) -> Result<DaylightComponents> {
    let table = read_table(source, &["wavelength_nm", "s0", "s1", "s2"])?;
    let grid = WavelengthGrid::canonical();
    table.require_coverage(&grid)?;
    table.require_nonnegative(0)?;
    Ok(DaylightComponents {
        grid,
        s0: table.resampled(0, &grid),
        s1: table.resampled(1, &grid),
        s2: table.resampled(2, &grid),
    })
}

/// Spectral reflectances of TCS01–TCS08.
#[derive(Debug, Clone, PartialEq)]
pub struct TestColorSamples {
    names: Vec<String>,
    reflectances: Vec<SpectralPowerDistribution>,
}

impl TestColorSamples {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn reflectances(&self) -> &[SpectralPowerDistribution] {
        &self.reflectances
    }

    pub fn grid(&self) -> &WavelengthGrid {
        self.reflectances[0].grid()
    }
}

/// Reads `wavelength_nm` followed by exactly eight reflectance columns.
pub fn load_tcs<R: Read>(source: R) -> Result<TestColorSamples> {
    let table = read_table(source, &[])?;
    if table.columns.len() != TCS_COUNT {
        return Err(Error::SampleCount {
            expected: TCS_COUNT,
            found: table.columns.len(),
        });
    }
    for (col, values) in table.columns.iter().enumerate() {
        if let Some(i) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::parse(
                i + 2,
                format!(
                    "reflectance {} of {} outside [0, 1]",
                    values[i], table.names[col]
                ),
            ));
        }
    }
    let grid = WavelengthGrid::canonical();
    table.require_coverage(&grid)?;
    let reflectances = (0..TCS_COUNT)
        .map(|col| SpectralPowerDistribution::new(grid, table.resampled(col, &grid)))
        .collect::<Result<_>>()?;
    Ok(TestColorSamples {
        names: table.names.clone(),
        reflectances,
    })
}

/// The three tables the CRI computation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct CieDatasets {
    pub cmf: ColorMatchingFunctions,
    pub daylight: DaylightComponents,
    pub tcs: TestColorSamples,
}

#[derive(Debug, Deserialize)]
struct ManifestEntry {
    path: PathBuf,
}

#[derive(Debug, Deserialize)]
struct Manifest {
    cmf: ManifestEntry,
    daylight: ManifestEntry,
    tcs: ManifestEntry,
}

impl CieDatasets {
    /// Tables compiled into the crate from `data/`.
    pub fn bundled() -> Self {
        Self {
            cmf: load_cmf(BUNDLED_CMF.as_bytes()).expect("bundled CMF table is valid"),
            daylight: load_daylight_components(BUNDLED_DAYLIGHT.as_bytes())
                .expect("bundled daylight table is valid"),
            tcs: load_tcs(BUNDLED_TCS.as_bytes()).expect("bundled TCS table is valid"),
        }
    }

    /// Loads the tables named by a TOML manifest with `[cmf]`, `[daylight]`
    /// and `[tcs]` sections, each carrying a `path` relative to the manifest.
    pub fn from_manifest(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        let manifest: Manifest = toml::from_str(&text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start].lines().count().max(1))
                .unwrap_or(1);
            Error::parse(line, e.message().to_string())
        })?;
        let dir = path.parent().unwrap_or_else(|| Path::new("."));
        let open = |entry: &ManifestEntry| fs::File::open(dir.join(&entry.path));
        Ok(Self {
            cmf: load_cmf(open(&manifest.cmf)?)?,
            daylight: load_daylight_components(open(&manifest.daylight)?)?,
            tcs: load_tcs(open(&manifest.tcs)?)?,
        })
    }
}
