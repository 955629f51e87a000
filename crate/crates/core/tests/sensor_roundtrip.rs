use lumispec::cie_data::CieDatasets;
use lumispec::cri::{general_cri, CriOptions};
use lumispec::illuminant::planck_spd;
use lumispec::sensor::{
    decode_frame, frame_to_spd, simulate_frame, ResponsivityModel, SimulationParams,
    WavelengthCalibration,
};
use lumispec::spectral::{SpectralPowerDistribution, WavelengthGrid};
use proptest::prelude::*;

const EXPOSURE: f64 = 3000.0;

fn noiseless() -> SimulationParams {
    SimulationParams {
        exposure_scale: EXPOSURE,
        noise_sigma: 0.0,
        seed: 1,
    }
}

proptest! {
    /// Rounding to whole counts is the only loss on the noiseless path, so each
    /// pixel is recovered to within half a count divided by R(λ)·exposure.
    #[test]
    fn noiseless_pixels_within_half_count(values in prop::collection::vec(0.05f64..1.0, 81)) {
        let spd = SpectralPowerDistribution::new(WavelengthGrid::canonical(), values).unwrap();
        let calib = WavelengthCalibration::default();
        let model = ResponsivityModel::tcd1103();
        let frame = simulate_frame(&spd, &calib, &model, &noiseless()).unwrap();
        let decoded = decode_frame(&frame, &calib, &model).unwrap();
        let truth = spd.resample(&calib.pixel_grid());
        for ((w, got), want) in decoded.pixel_spd.samples().zip(truth.values()) {
            let r = model.responsivity(w).unwrap();
            let bound = 0.5 / (r * EXPOSURE) + 1e-12;
            prop_assert!((got / EXPOSURE - want).abs() <= bound, "{} nm: {} vs {}", w, got / EXPOSURE, want);
        }
    }
}

#[test]
fn compensation_is_exact_inverse_of_responsivity() {
    let calib = WavelengthCalibration::default();
    let model = ResponsivityModel::tcd1103();
    let spd = planck_spd(4000.0, &WavelengthGrid::canonical()).unwrap();
    let frame = simulate_frame(&spd, &calib, &model, &noiseless()).unwrap();
    let decoded = decode_frame(&frame, &calib, &model).unwrap();
    for (w, c) in calib.pixel_grid().wavelengths().zip(&decoded.compensation) {
        assert_eq!(*c, 1.0 / model.responsivity(w).unwrap());
    }
}

#[test]
fn flat_spd_recovered_flat_to_quantization() {
    let calib = WavelengthCalibration::default();
    let model = ResponsivityModel::tcd1103();
    let flat = SpectralPowerDistribution::constant(WavelengthGrid::canonical(), 1.0).unwrap();
    let frame = simulate_frame(&flat, &calib, &model, &noiseless()).unwrap();
    let spd = frame_to_spd(&frame, &calib, &model)
        .unwrap()
        .normalize_peak()
        .unwrap();
    // half a count at the weakest responsivity, on both the sample and the peak
    let bound = 2.0 * 0.5 / (0.70 * EXPOSURE);
    for (w, v) in spd.samples().filter(|(w, _)| (395.0..=720.0).contains(w)) {
        assert!((1.0 - v).abs() <= bound, "{w} nm: {v}");
    }
}

#[test]
fn noisy_planck_ra_close_to_noiseless() {
    let data = CieDatasets::bundled();
    let calib = WavelengthCalibration::default();
    let model = ResponsivityModel::tcd1103();
    let opts = CriOptions::default();
    let spd = planck_spd(3000.0, &WavelengthGrid::canonical()).unwrap();
    let clean = frame_to_spd(
        &simulate_frame(&spd, &calib, &model, &noiseless()).unwrap(),
        &calib,
        &model,
    )
    .unwrap();
    let clean_ra = general_cri(&clean, &data, &opts).unwrap().ra;
    for seed in 0..20 {
        let params = SimulationParams {
            noise_sigma: 2.0,
            seed,
            ..noiseless()
        };
        let noisy = frame_to_spd(
            &simulate_frame(&spd, &calib, &model, &params).unwrap(),
            &calib,
            &model,
        )
        .unwrap();
        let ra = general_cri(&noisy, &data, &opts).unwrap().ra;
        assert!(
            (ra - clean_ra).abs() <= 0.5,
            "seed {seed}: {ra} vs {clean_ra}"
        );
    }
}

#[test]
fn recovered_planck_cct_within_one_percent() {
    let data = CieDatasets::bundled();
    let calib = WavelengthCalibration::default();
    let model = ResponsivityModel::tcd1103();
    let spd = planck_spd(3000.0, &WavelengthGrid::canonical()).unwrap();
    let back = frame_to_spd(
        &simulate_frame(&spd, &calib, &model, &noiseless()).unwrap(),
        &calib,
        &model,
    )
    .unwrap();
    let direct = general_cri(&spd, &data, &CriOptions::default()).unwrap();
    let recovered = general_cri(&back, &data, &CriOptions::default()).unwrap();
    let rel = (recovered.reference.cct - direct.reference.cct).abs() / direct.reference.cct;
    assert!(rel < 0.01);
    let poly = recovered.cct_polynomial.unwrap();
    assert!((poly - 3000.0).abs() / 3000.0 < 0.01, "{poly}");
}
