use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavetank::spectrum::{crest_trough, spectral_analysis, SEGMENT};
use wavetank::Error;

#[test]
fn sinusoid_height_and_period() {
    let dt = 0.05;
    let a = 0.08;
    let f0 = 1.0 / 1.5;
    let eta: Vec<f64> = (0..4000).map(|k| a * (2.0 * std::f64::consts::PI * f0 * k as f64 * dt).sin()).collect();
    let s = spectral_analysis(&eta, dt).unwrap();
    let hs = 4.0 * a / 2f64.sqrt();
    assert!((s.hs - hs).abs() / hs < 0.02, "Hs {} vs {hs}", s.hs);
    let fpk = 1.0 / s.tp;
    assert!((fpk - f0).abs() <= s.df, "peak {fpk} vs {f0}");
}

#[test]
fn white_noise_variance() {
    let mut r = ChaCha8Rng::seed_from_u64(3);
    let sigma = 0.3;
    let eta: Vec<f64> = (0..200_000).map(|_| sigma * (r.random::<f64>() - 0.5) * 12f64.sqrt()).collect();
    let s = spectral_analysis(&eta, 0.1).unwrap();
    assert!((s.m0 - sigma * sigma).abs() / (sigma * sigma) < 0.05, "m0 {}", s.m0);
}

#[test]
fn short_series_is_an_error() {
    let e = spectral_analysis(&vec![0.0; SEGMENT - 1], 0.1).unwrap_err();
    assert!(matches!(e, Error::TooShort { .. }));
}

#[test]
fn crest_and_trough_of_a_sinusoid() {
    let eta: Vec<f64> = (0..3000).map(|k| 0.08 * (k as f64 * 0.01 * 4.0).sin()).collect();
    let (c, t) = crest_trough(&eta).unwrap();
    assert!((c - 0.08).abs() < 1e-3 && (t - 0.08).abs() < 1e-3);
}
