//! Noise-driven fluctuations around a stable focus peak at the frequency of
//! the least-damped eigenvalue pair.

use neurobif::cycles::TIME_SCALE;
use neurobif::model::System;
use neurobif::scenarios::*;
use neurobif::Jr;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Welch periodogram with `n_seg` non-overlapping segments; returns
/// `(frequency in Hz, power)` pairs, sample spacing `dtau` dimensionless.
fn welch(x: &[f64], dtau: f64, n_seg: usize) -> Vec<(f64, f64)> {
    let len = x.len() / n_seg;
    let fft = FftPlanner::new().plan_fft_forward(len);
    let hann: Vec<f64> = (0..len).map(|i| (std::f64::consts::PI * i as f64 / len as f64).sin().powi(2)).collect();
    let mut power = vec![0.0; len / 2];
    for seg in x.chunks_exact(len).take(n_seg) {
        let mean = seg.iter().sum::<f64>() / len as f64;
        let mut buf: Vec<Complex<f64>> = seg.iter().zip(&hann).map(|(v, w)| Complex::new((v - mean) * w, 0.0)).collect();
        fft.process(&mut buf);
        for (p, z) in power.iter_mut().zip(&buf) {
            *p += z.norm_sqr();
        }
    }
    let df = TIME_SCALE / (len as f64 * dtau);
    power.into_iter().enumerate().map(|(k, p)| (k as f64 * df, p)).collect()
}

#[test]
fn periodogram_peak_matches_linear_prediction() {
    let mut m = Jr::default();
    let p = 6.5;
    m.set_input(p);
    let x0 = lowest_equilibrium(&m, p).unwrap();
    let res = linear_noise_spectrum(&m, &x0).unwrap().expect("a resonant pair");
    let opts = SdeOptions::default();
    let tr = simulate_sde(&m, &x0, &NoiseSpec::constant(p, 0.05, 3), 2000.0, &opts).unwrap();
    let dtau = opts.dt * opts.record_every as f64;
    let spec = welch(&tr.component(m.x_index()), dtau, 10);
    let &(f_peak, _) = spec.iter().skip(1).max_by(|a, b| a.1.partial_cmp(&b.1).unwrap()).unwrap();
    assert!((f_peak - res.freq_hz).abs() < 0.1 * res.freq_hz + 0.5, "peak {f_peak} Hz, predicted {} Hz", res.freq_hz);
}
