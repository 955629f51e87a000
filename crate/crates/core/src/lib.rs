//! Lighting-quality metrology: correlated color temperature (CCT) and color
//! rendering index (CRI) from spectral power distributions, geometry for a
//! lens-free diffraction-grating spectrometer, and a simulator/decoder for the
//! linear CCD capture chain that feeds it.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`] – wavelength grids, SPDs, resampling and quadrature.
//! * [`cie_data`] – loaders for the CIE observer, daylight basis and test
//!   color sample tables (bundled copies ship with the crate).
//! * [`colorimetry`] – XYZ, (x, y), CIE 1960 (u, v) and CIE 1964 W\*U\*V\*.
//! * [`cct`] – closed-form CCT estimators.
//! * [`illuminant`] – Planckian and D-series reference sources.
//! * [`cri`] – chromatic adaptation, color differences, R1–R8 and Ra.
//! * [`optics`] – spectrometer geometry for the parallel and inclined layouts.
//! * [`sensor`] – raw frame decoding, wavelength calibration, responsivity
//!   compensation and the forward frame simulator.
//! * [`pipeline`] – the end-to-end analysis with an auditable step trace.
//! * [`report`] and [`synthetic`] – report rendering and test spectra.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cct;
pub mod cie_data;
pub mod colorimetry;
pub mod cri;
mod error;
pub mod illuminant;
pub mod optics;
pub mod pipeline;
pub mod report;
pub mod sensor;
pub mod spectral;
pub mod synthetic;

pub use error::{Error, Result};
