//! Human-readable and CSV/SVG renderings of a [`CriReport`].
//!
//! Fixed precision: CCT 0 decimals, Ra and R_i 2 decimals, chromaticities 3.

use std::fmt::Write as _;
use std::io::Write;

use crate::cri::{CctSource, CriReport};
use crate::spectral::{format_wavelength, SpectralPowerDistribution};
use crate::{Error, Result};

fn fmt_cct(k: Option<f64>) -> String {
    k.map_or_else(|| "out of range".to_string(), |k| format!("{k:.0} K"))
}

pub fn text_report(r: &CriReport) -> String {
    let mut s = String::new();
    let exp_note = if r.cct_exponential.is_some() && !r.cct_exponential_valid {
        " (outside 3000-50000 K fit range)"
    } else {
        ""
    };
    let source = match r.cct_source {
        CctSource::Estimated(m) => format!("{m} estimate"),
        CctSource::Nominal(_) => "nominal override".to_string(),
    };
    let _ = writeln!(s, "CCT (polynomial):   {}", fmt_cct(r.cct_polynomial));
    let _ = writeln!(
        s,
        "CCT (exponential):  {}{exp_note}",
        fmt_cct(r.cct_exponential)
    );
    let _ = writeln!(
        s,
        "Reference:          {} at {:.0} K ({source})",
        r.reference.branch, r.reference.cct
    );
    let _ = writeln!(
        s,
        "Test xy:            ({:.3}, {:.3})",
        r.test.xy.x, r.test.xy.y
    );
    let _ = writeln!(
        s,
        "Test uv:            ({:.3}, {:.3})",
        r.test.uv.u, r.test.uv.v
    );
    let _ = writeln!(
        s,
        "Reference uv:       ({:.3}, {:.3})",
        r.reference_illuminant.uv.u, r.reference_illuminant.uv.v
    );
    let _ = writeln!(s);
    for (i, (sample, ri)) in r.samples.iter().zip(&r.special_indices).enumerate() {
        let flag = if *ri < 0.0 { "  [negative]" } else { "" };
        let _ = writeln!(s, "R{} ({}): {ri:>7.2}{flag}", i + 1, sample.name);
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "Ra: {:.2}", r.ra);
    s
}

/// One row per test sample with its color difference and R_i, then a
/// summary row carrying Ra.
pub fn write_samples_csv<W: Write>(r: &CriReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record([
        "sample",
        "test_u",
        "test_v",
        "adapted_u",
        "adapted_v",
        "reference_u",
        "reference_v",
        "delta_e",
        "R",
    ])
    .map_err(csv_err)?;
    for s in &r.samples {
        w.write_record([
            s.name.clone(),
            s.test_uv.u.to_string(),
            s.test_uv.v.to_string(),
            s.adapted_uv.u.to_string(),
            s.adapted_uv.v.to_string(),
            s.reference_uv.u.to_string(),
            s.reference_uv.v.to_string(),
            s.delta_e.to_string(),
            s.special_index.to_string(),
        ])
        .map_err(csv_err)?;
    }
    let mut summary = vec!["Ra".to_string()];
    summary.extend(std::iter::repeat_n(String::new(), 7));
    summary.push(r.ra.to_string());
    w.write_record(&summary).map_err(csv_err)?;
    w.flush()?;
    Ok(())
}

/// `wavelength_nm,test,reference` on the test SPD's grid.
pub fn write_spd_plot_csv<W: Write>(
    test: &SpectralPowerDistribution,
    reference: &SpectralPowerDistribution,
    mut out: W,
) -> Result<()> {
    let reference = reference.resample(test.grid());
    writeln!(out, "wavelength_nm,test,reference")?;
    for ((w, t), r) in test.samples().zip(reference.values()) {
        writeln!(out, "{},{t},{r}", format_wavelength(w))?;
    }
    Ok(())
}

/// Points for a chromaticity diagram: both illuminants and every sample
/// under each of them.
pub fn write_chromaticity_csv<W: Write>(r: &CriReport, mut out: W) -> Result<()> {
    writeln!(out, "label,u,v")?;
    writeln!(out, "test,{},{}", r.test.uv.u, r.test.uv.v)?;
    writeln!(
        out,
        "reference,{},{}",
        r.reference_illuminant.uv.u, r.reference_illuminant.uv.v
    )?;
    for s in &r.samples {
        writeln!(out, "{}_test,{},{}", s.name, s.adapted_uv.u, s.adapted_uv.v)?;
        writeln!(
            out,
            "{}_reference,{},{}",
            s.name, s.reference_uv.u, s.reference_uv.v
        )?;
    }
    Ok(())
}

/// Static SVG of the test and reference SPDs, each scaled to its own peak.
pub fn spd_plot_svg(
    test: &SpectralPowerDistribution,
    reference: &SpectralPowerDistribution,
) -> String {
    const W: f64 = 640.0;
    const H: f64 = 360.0;
    const PAD: f64 = 40.0;
    let g = test.grid();
    let (lo, hi) = (g.start(), g.end());
    let path = |spd: &SpectralPowerDistribution| {
        let spd = spd.resample(g);
        let peak = spd.max_value();
        let scale = if peak > 0.0 { 1.0 / peak } else { 0.0 };
        spd.samples()
            .map(|(w, v)| {
                let px = PAD + (w - lo) / (hi - lo) * (W - 2.0 * PAD);
                let py = H - PAD - v * scale * (H - 2.0 * PAD);
                format!("{px:.1},{py:.1}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{PAD},{y} H{x} M{PAD},{y} V{PAD}" stroke="black" fill="none"/>"#,
        y = H - PAD,
        x = W - PAD
    );
    let _ = writeln!(
        s,
        r#"<text x="{PAD}" y="{}" font-size="12">{lo:.0} nm</text>"#,
        H - PAD / 2.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{hi:.0} nm</text>"#,
        W - PAD,
        H - PAD / 2.0
    );
    let _ = writeln!(
        s,
        r##"<polyline points="{}" stroke="#888888" stroke-dasharray="4 3" fill="none"/>"##,
        path(reference)
    );
    let _ = writeln!(
        s,
        r##"<polyline points="{}" stroke="#c0392b" fill="none"/>"##,
        path(test)
    );
    let _ = writeln!(s, "</svg>");
    s
}
