//! Stochastic input scenarios: noisy simulations, spike and oscillation
//! detection, seizure phase segmentation and the linear noise resonance.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::cycles::band::{band_of_frequency, classify_band, Band, TIME_SCALE};
use crate::error::{Error, Result};
use crate::linalg::{eigen, linspace};
use crate::model::System;

/// Input `P(tau) = mean + slope * tau` plus white noise of intensity `std`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NoiseSpec {
    pub mean: f64,
    #[serde(default)]
    pub slope: f64,
    pub std: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn constant(mean: f64, std: f64, seed: u64) -> Self {
        NoiseSpec { mean, slope: 0.0, std, seed }
    }

    pub fn mean_at(&self, t: f64) -> f64 {
        self.mean + self.slope * t
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.std >= 0.0) || !self.mean.is_finite() || !self.slope.is_finite() {
            return Err(Error::Domain(format!("invalid noise specification {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdeOptions {
    pub dt: f64,
    /// Store every `record_every`-th step.
    pub record_every: usize,
    /// Component magnitude treated as blow-up.
    pub blowup: f64,
}

impl Default for SdeOptions {
    fn default() -> Self {
        SdeOptions { dt: 1e-3, record_every: 10, blowup: 1e6 }
    }
}

/// Sampled stochastic path with the instantaneous input at each sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SdeTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub p_inst: Vec<f64>,
}

impl SdeTrajectory {
    pub fn component(&self, k: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[k]).collect()
    }
}

/// Integrates the model with noisy input from `x0` over `[0, t_end]`.
///
/// The drift uses the mean input `mu(tau)`; the noise adds `std * dW` to the
/// equation where the input enters. Steps follow the stochastic Heun scheme,
/// which for additive noise has the Euler–Maruyama noise term and a
/// second-order drift, so `std = 0` reproduces the deterministic flow.
pub fn simulate_sde<S: System<f64>>(model: &S, x0: &[f64], noise: &NoiseSpec, t_end: f64, opts: &SdeOptions) -> Result<SdeTrajectory> {
    noise.validate()?;
    let n = model.dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x0.len() });
    }
    if !(opts.dt > 0.0 && opts.dt <= 1e-3) {
        return Err(Error::Domain(format!("dt must lie in (0, 1e-3], got {}", opts.dt)));
    }
    let steps = (t_end / opts.dt).round() as usize;
    if !(t_end > 0.0) || steps > 1_000_000_000 {
        return Err(Error::Domain(format!("invalid horizon {t_end}")));
    }
    let every = opts.record_every.max(1);
    let ie = model.input_equation();
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let mut m = model.clone();
    let sq = opts.dt.sqrt();
    let mut x = x0.to_vec();
    let (mut f0, mut f1, mut xt) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let cap = steps / every + 2;
    let mut out = SdeTrajectory { times: Vec::with_capacity(cap), states: Vec::with_capacity(cap), p_inst: Vec::with_capacity(cap) };
    out.times.push(0.0);
    out.states.push(x.clone());
    out.p_inst.push(noise.mean_at(0.0));
    for k in 0..steps {
        let t = k as f64 * opts.dt;
        let z: f64 = if noise.std > 0.0 { StandardNormal.sample(&mut rng) } else { 0.0 };
        let dw = noise.std * sq * z;
        m.set_input(noise.mean_at(t));
        m.eval(&x, &mut f0);
        for i in 0..n {
            xt[i] = x[i] + opts.dt * f0[i];
        }
        xt[ie] += dw;
        m.set_input(noise.mean_at(t + opts.dt));
        m.eval(&xt, &mut f1);
        for i in 0..n {
            x[i] += 0.5 * opts.dt * (f0[i] + f1[i]);
        }
        x[ie] += dw;
        if (k + 1) % every == 0 {
            if x.iter().any(|v| !(v.abs() < opts.blowup)) {
                return Err(Error::Divergence { t: t + opts.dt });
            }
            out.times.push((k + 1) as f64 * opts.dt);
            out.states.push(x.clone());
            out.p_inst.push(noise.mean_at(t) + noise.std * z);
        }
    }
    Ok(out)
}

/// Stable equilibrium on the lowest branch with input `p`, found on the
/// model's `X` parametrization.
pub fn lowest_equilibrium<S: System<f64>>(model: &S, p: f64) -> Result<Vec<f64>> {
    let (lo, hi, n) = crate::equilibria::default_x_range(model.kind());
    let grid = linspace(lo, hi, n);
    let f = |x: f64| model.equilibrium(x).1 - p;
    let roots = crate::equilibria::scan_roots(&f, &grid, 1e-12);
    let x = roots.first().copied().ok_or_else(|| Error::Domain(format!("no equilibrium with input {p}")))?;
    Ok(model.equilibrium(x).0)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Spike {
    pub time: f64,
    pub amplitude: f64,
    pub is_pds: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpikeTrain {
    pub spikes: Vec<Spike>,
}

impl SpikeTrain {
    pub fn len(&self) -> usize {
        self.spikes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spikes.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.spikes.iter().map(|s| s.time).collect()
    }

    pub fn pds_count(&self) -> usize {
        self.spikes.iter().filter(|s| s.is_pds).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SpikeOptions {
    /// Length of the trailing baseline window.
    pub baseline_window: f64,
    /// Minimum separation of spikes.
    pub refractory: f64,
    /// Threshold above the baseline centre in robust standard deviations.
    pub threshold_sd: f64,
    /// Minimum height above the baseline centre.
    pub min_height: f64,
}

impl Default for SpikeOptions {
    fn default() -> Self {
        SpikeOptions { baseline_window: 50.0, refractory: 2.0, threshold_sd: 4.0, min_height: 1.0 }
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Spikes of the signal `x` sampled at `times`: local maxima above the
/// trailing baseline (median plus `threshold_sd` robust deviations, from the
/// median absolute deviation). Maxima within 1.5 refractory windows of a
/// spike are merged into it and mark it as a PDS.
pub fn detect_spikes(times: &[f64], x: &[f64], opts: &SpikeOptions) -> SpikeTrain {
    let n = times.len().min(x.len());
    if n < 3 || times[n - 1] - times[0] <= opts.baseline_window {
        return SpikeTrain::default();
    }
    let t0 = times[0];
    // baseline statistics on a unit time grid, each from a thinned window
    let n_cells = ((times[n - 1] - t0).ceil() as usize).max(1) + 1;
    let mut stats = vec![(f64::NAN, f64::NAN); n_cells];
    let mut start = 0usize;
    let mut end = 0usize;
    for (c, st) in stats.iter_mut().enumerate() {
        let tc = t0 + c as f64;
        if tc - t0 < opts.baseline_window {
            continue;
        }
        while start < n && times[start] < tc - opts.baseline_window {
            start += 1;
        }
        while end < n && times[end] < tc {
            end += 1;
        }
        if end <= start + 2 {
            continue;
        }
        let stride = ((end - start) / 500).max(1);
        let mut w: Vec<f64> = (start..end).step_by(stride).map(|i| x[i]).collect();
        let med = median(&mut w);
        let mut dev: Vec<f64> = w.iter().map(|v| (v - med).abs()).collect();
        let mad = median(&mut dev);
        *st = (med, 1.4826 * mad);
    }
    let mut cands: Vec<(f64, f64, f64)> = Vec::new();
    for i in 1..n - 1 {
        if !(x[i] > x[i - 1] && x[i] >= x[i + 1]) {
            continue;
        }
        let c = (times[i] - t0).floor() as usize;
        let (med, sd) = stats[c.min(n_cells - 1)];
        if !med.is_finite() {
            continue;
        }
        let h = x[i] - med;
        if h > opts.threshold_sd * sd && h > opts.min_height {
            cands.push((times[i], x[i], h));
        }
    }
    let mut spikes: Vec<Spike> = Vec::new();
    let mut group_start = f64::NEG_INFINITY;
    let mut group_count = 0usize;
    for (t, v, h) in cands {
        if t - group_start < 1.5 * opts.refractory {
            group_count += 1;
            let s = spikes.last_mut().unwrap();
            s.is_pds = group_count >= 2;
            if h > s.amplitude {
                s.amplitude = h;
            }
            let _ = v;
        } else {
            spikes.push(Spike { time: t, amplitude: h, is_pds: false });
            group_start = t;
            group_count = 1;
        }
    }
    SpikeTrain { spikes }
}

/// Interval of regular oscillation.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Epoch {
    pub start: f64,
    pub end: f64,
    /// Mean cycle length (dimensionless).
    pub period: f64,
    pub cycles: usize,
    pub band: Band,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EpochOptions {
    /// Hysteresis band (peak to peak) a cycle has to span.
    pub amplitude: f64,
    /// Width of the moving average removing noise.
    pub smooth: f64,
    /// Width of the moving average giving the local centre line.
    pub centre: f64,
    /// Largest ratio between consecutive cycle lengths.
    pub ratio: f64,
    pub min_cycles: usize,
}

impl Default for EpochOptions {
    fn default() -> Self {
        EpochOptions { amplitude: 0.5, smooth: 1.0, centre: 20.0, ratio: 1.3, min_cycles: 5 }
    }
}

fn moving_average(times: &[f64], x: &[f64], width: f64) -> Vec<f64> {
    let n = x.len();
    let mut pre = vec![0.0; n + 1];
    for i in 0..n {
        pre[i + 1] = pre[i] + x[i];
    }
    let (mut lo, mut hi) = (0usize, 0usize);
    (0..n)
        .map(|i| {
            while times[lo] < times[i] - 0.5 * width {
                lo += 1;
            }
            while hi < n && times[hi] <= times[i] + 0.5 * width {
                hi += 1;
            }
            (pre[hi] - pre[lo]) / (hi - lo) as f64
        })
        .collect()
}

/// Runs of at least `min_cycles` regular cycles of the signal.
pub fn oscillation_epochs(times: &[f64], x: &[f64], opts: &EpochOptions) -> Vec<Epoch> {
    let n = times.len().min(x.len());
    if n < 3 {
        return Vec::new();
    }
    let s = moving_average(&times[..n], &x[..n], opts.smooth);
    let c = moving_average(&times[..n], &x[..n], opts.centre);
    let h = 0.5 * opts.amplitude;
    let mut up = s[0] > c[0] + h;
    let mut starts: Vec<f64> = Vec::new();
    for i in 0..n {
        let d = s[i] - c[i];
        if up && d < -h {
            up = false;
        } else if !up && d > h {
            up = true;
            starts.push(times[i]);
        }
    }
    let mut out = Vec::new();
    let mut k = 0;
    while k + 1 < starts.len() {
        let mut e = k + 1;
        while e + 1 < starts.len() {
            let a = starts[e] - starts[e - 1];
            let b = starts[e + 1] - starts[e];
            if b / a > opts.ratio || a / b > opts.ratio {
                break;
            }
            e += 1;
        }
        let cycles = e - k;
        if cycles >= opts.min_cycles {
            let period = (starts[e] - starts[k]) / cycles as f64;
            out.push(Epoch { start: starts[k], end: starts[e], period, cycles, band: band_of_frequency(TIME_SCALE / period) });
        }
        k = e;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeizurePhase {
    Normal,
    Onset,
    Seizure,
    Post,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PhaseSegment {
    pub phase: SeizurePhase,
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SegmentOptions {
    pub spikes: SpikeOptions,
    pub epochs: EpochOptions,
    /// Largest coefficient of variation of inter-spike intervals in a
    /// rhythmic run.
    pub cv_max: f64,
    /// Frequency range of rhythmic spiking in Hz.
    pub rate_hz: (f64, f64),
    /// Spikes per window when testing rhythmicity.
    pub window: usize,
}

impl Default for SegmentOptions {
    fn default() -> Self {
        SegmentOptions { spikes: SpikeOptions::default(), epochs: EpochOptions::default(), cv_max: 0.3, rate_hz: (0.5, 8.0), window: 5 }
    }
}

fn rhythmic(isi: &[f64], opts: &SegmentOptions) -> bool {
    let n = isi.len() as f64;
    let mean = isi.iter().sum::<f64>() / n;
    let var = isi.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let f = TIME_SCALE / mean;
    var.sqrt() / mean < opts.cv_max && f >= opts.rate_hz.0 && f < opts.rate_hz.1
}

/// Splits `[t0, t1]` into normal activity, onset (isolated spikes), seizure
/// (the longest rhythmic spiking run) and post-seizure alpha activity
/// outlasting it, from the spike train and oscillation epochs. Phases
/// without evidence are omitted.
pub fn segment_phases(t0: f64, t1: f64, train: &SpikeTrain, epochs: &[Epoch], opts: &SegmentOptions) -> Vec<PhaseSegment> {
    let times = train.times();
    if times.is_empty() {
        return vec![PhaseSegment { phase: SeizurePhase::Normal, start: t0, end: t1 }];
    }
    let w = opts.window.max(3);
    let isi: Vec<f64> = times.windows(2).map(|p| p[1] - p[0]).collect();
    // longest run of consecutive rhythmic windows, as spike indices
    let mut run: Option<(usize, usize)> = None;
    let mut k = 0;
    while k + w - 1 <= isi.len() {
        if !rhythmic(&isi[k..k + w - 1], opts) {
            k += 1;
            continue;
        }
        let mut e = k + w - 1;
        while e < isi.len() && rhythmic(&isi[e + 2 - w..=e], opts) {
            e += 1;
        }
        if run.map_or(true, |(a, b)| times[e] - times[k] > times[b] - times[a]) {
            run = Some((k, e));
        }
        k = e;
    }
    let mut out = vec![PhaseSegment { phase: SeizurePhase::Normal, start: t0, end: times[0] }];
    match run {
        None => out.push(PhaseSegment { phase: SeizurePhase::Onset, start: times[0], end: t1 }),
        Some((a, b)) => {
            let (s_start, s_last) = (times[a], times[b]);
            let mean_isi = (s_last - s_start) / (b - a) as f64;
            let s_end = (s_last + 0.5 * mean_isi).min(t1);
            if a > 0 {
                out.push(PhaseSegment { phase: SeizurePhase::Onset, start: times[0], end: s_start });
            }
            out.push(PhaseSegment { phase: SeizurePhase::Seizure, start: s_start, end: s_end });
            if epochs.iter().any(|e| e.band == Band::Alpha && e.start >= s_start && e.end > s_end) {
                out.push(PhaseSegment { phase: SeizurePhase::Post, start: s_end, end: t1 });
            }
        }
    }
    out
}

/// True when all four phases are present in their natural order.
pub fn all_phases_in_order(segments: &[PhaseSegment]) -> bool {
    let order: Vec<SeizurePhase> = segments.iter().map(|s| s.phase).collect();
    order == [SeizurePhase::Normal, SeizurePhase::Onset, SeizurePhase::Seizure, SeizurePhase::Post]
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeizureRun {
    pub trajectory: SdeTrajectory,
    pub spikes: SpikeTrain,
    pub epochs: Vec<Epoch>,
    pub phases: Vec<PhaseSegment>,
}

/// Slowly increasing mean input with noise, started at rest on the lowest
/// equilibrium branch, then segmented into phases.
pub fn seizure_scenario<S: System<f64>>(
    model: &S,
    noise: &NoiseSpec,
    t_end: f64,
    sde: &SdeOptions,
    opts: &SegmentOptions,
) -> Result<SeizureRun> {
    if !(noise.slope >= 0.0) {
        return Err(Error::Domain("seizure sweep needs a non-negative slope".into()));
    }
    let x0 = lowest_equilibrium(model, noise.mean)?;
    let trajectory = simulate_sde(model, &x0, noise, t_end, sde)?;
    let x = trajectory.component(model.x_index());
    let spikes = detect_spikes(&trajectory.times, &x, &opts.spikes);
    let epochs = oscillation_epochs(&trajectory.times, &x, &opts.epochs);
    let phases = segment_phases(0.0, t_end, &spikes, &epochs, opts);
    Ok(SeizureRun { trajectory, spikes, epochs, phases })
}

/// Spike counts over seeds `0..n_seeds` for a constant mean input, run in
/// parallel.
pub fn spike_counts<S: System<f64>>(model: &S, mean: f64, std: f64, seeds: &[u64], t_end: f64, sde: &SdeOptions, spikes: &SpikeOptions) -> Result<Vec<usize>> {
    let x0 = lowest_equilibrium(model, mean)?;
    seeds
        .par_iter()
        .map(|&seed| {
            let tr = simulate_sde(model, &x0, &NoiseSpec::constant(mean, std, seed), t_end, sde)?;
            let x = tr.component(model.x_index());
            Ok(detect_spikes(&tr.times, &x, spikes).len())
        })
        .collect()
}

/// Predicted spectral peak of noise-driven fluctuations around a stable
/// equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Resonance {
    pub freq_hz: f64,
    /// Decay rate in s^-1.
    pub damping: f64,
    pub band: Band,
}

/// Least-damped underdamped eigenvalue pair (`Im > |Re|`, the condition for
/// a spectral peak away from zero) of the linearization at `state`: frequency
/// `Im(lambda) a / (2 pi)` and damping `|Re(lambda)| a`. `None` when there is
/// no such pair.
pub fn linear_noise_spectrum<S: System<f64>>(model: &S, state: &[f64]) -> Result<Option<Resonance>> {
    let sp = eigen(&model.jacobian(state))?;
    if sp.max_real() >= 0.0 {
        return Err(Error::Domain("equilibrium is not stable".into()));
    }
    let pair: Option<&Complex64> = sp.values.iter().filter(|z| z.im > z.re.abs()).max_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
    Ok(pair.map(|z| {
        let f = z.im * TIME_SCALE / (2.0 * std::f64::consts::PI);
        Resonance { freq_hz: f, damping: z.re.abs() * TIME_SCALE, band: band_of_frequency(f) }
    }))
}

/// Band of a period; convenience re-export for scenario reports.
pub fn band_of_period(period: f64) -> Result<Band> {
    classify_band(period, TIME_SCALE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::{integrate, IntegratorOptions, Record};
    use crate::model::JrParams;

    fn jr(j: f64) -> JrParams<f64> {
        let mut m = JrParams::default();
        m.set_param("j", j).unwrap();
        m
    }

    #[test]
    fn zero_noise_matches_adaptive_integration() {
        let mut m = jr(12.285);
        m.set_input(2.3);
        let (eq, _) = m.equilibrium(1.2);
        let mut x0 = eq;
        x0[1] += 5.0;
        let sde = simulate_sde(&m, &x0, &NoiseSpec::constant(2.3, 0.0, 1), 100.0, &SdeOptions { record_every: 100, ..Default::default() }).unwrap();
        let ode = integrate(&m, &x0, (0.0, 100.0), &IntegratorOptions::with_tol(1e-11).record(Record::Every(0.1))).unwrap();
        let dev = sde.states.iter().zip(&ode.states).map(|(a, b)| (a[1] - b[1]).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-4, "{dev}");
    }

    #[test]
    fn paths_converge_as_noise_vanishes() {
        let mut m = jr(12.285);
        m.set_input(2.3);
        let (mut x0, _) = m.equilibrium(1.2);
        x0[1] += 5.0;
        let opts = SdeOptions { record_every: 100, ..Default::default() };
        let ode = integrate(&m, &x0, (0.0, 100.0), &IntegratorOptions::with_tol(1e-11).record(Record::Every(0.1))).unwrap();
        let dev: Vec<f64> = [0.1, 0.01, 0.001]
            .iter()
            .map(|&s| {
                let sde = simulate_sde(&m, &x0, &NoiseSpec::constant(2.3, s, 5), 100.0, &opts).unwrap();
                sde.states.iter().zip(&ode.states).map(|(a, b)| (a[1] - b[1]).abs()).fold(0.0, f64::max)
            })
            .collect();
        // the deviation scales linearly with the noise amplitude
        assert!(dev[0] > dev[1] && dev[1] > dev[2] && dev[2] < 0.05, "{dev:?}");
    }

    #[test]
    fn seeded_paths_are_identical() {
        let m = jr(12.285);
        let x0 = lowest_equilibrium(&m, 1.8).unwrap();
        let n = NoiseSpec::constant(1.8, 0.5, 7);
        let o = SdeOptions::default();
        let a = simulate_sde(&m, &x0, &n, 20.0, &o).unwrap();
        let b = simulate_sde(&m, &x0, &n, 20.0, &o).unwrap();
        assert_eq!(a, b);
        let c = simulate_sde(&m, &x0, &NoiseSpec { seed: 8, ..n }, 20.0, &o).unwrap();
        assert_ne!(a.states, c.states);
    }

    #[test]
    fn constant_signal_has_no_spikes() {
        let t = linspace(0.0, 200.0, 20001);
        let x = vec![1.0; t.len()];
        assert!(detect_spikes(&t, &x, &SpikeOptions::default()).is_empty());
        assert!(oscillation_epochs(&t, &x, &EpochOptions::default()).is_empty());
    }

    #[test]
    fn pulses_and_doublets() {
        let t = linspace(0.0, 300.0, 30001);
        let bump = |t: f64, c: f64| 5.0 * (-(t - c) * (t - c) / 0.05).exp();
        let x: Vec<f64> = t.iter().map(|&s| bump(s, 100.0) + bump(s, 150.0) + bump(s, 152.0) + 0.01 * (s * 3.0).sin()).collect();
        let tr = detect_spikes(&t, &x, &SpikeOptions::default());
        assert_eq!(tr.len(), 2);
        assert!(!tr.spikes[0].is_pds);
        assert!(tr.spikes[1].is_pds);
    }

    #[test]
    fn sine_epoch_band() {
        let t = linspace(0.0, 200.0, 20001);
        let x: Vec<f64> = t.iter().map(|&s| if s > 50.0 { 2.0 * (2.0 * std::f64::consts::PI * s / 9.3).sin() } else { 0.0 }).collect();
        let ep = oscillation_epochs(&t, &x, &EpochOptions::default());
        assert_eq!(ep.len(), 1);
        assert_eq!(ep[0].band, Band::Alpha);
        assert!((ep[0].period - 9.3).abs() < 0.1);
    }

    #[test]
    fn quiet_run_is_normal_only() {
        let seg = segment_phases(0.0, 100.0, &SpikeTrain::default(), &[], &SegmentOptions::default());
        assert_eq!(seg.len(), 1);
        assert_eq!(seg[0].phase, SeizurePhase::Normal);
    }

    #[test]
    fn four_phases_from_synthetic_train() {
        // short regular burst, isolated spikes, long regular run, alpha
        let mut t = vec![100.0, 130.0, 160.0, 190.0, 220.0, 300.0, 420.0, 470.0];
        t.extend((0..20).map(|k| 600.0 + 25.0 * k as f64));
        let train = SpikeTrain { spikes: t.iter().map(|&time| Spike { time, amplitude: 5.0, is_pds: false }).collect() };
        let alpha = Epoch { start: 1000.0, end: 1400.0, period: 9.3, cycles: 43, band: Band::Alpha };
        let seg = segment_phases(0.0, 1500.0, &train, &[alpha], &SegmentOptions::default());
        assert!(all_phases_in_order(&seg), "{seg:?}");
        assert_eq!(seg[2].start, 600.0);
        // alpha that ends inside the seizure is no recovery
        let early = Epoch { end: 900.0, ..alpha };
        assert!(!all_phases_in_order(&segment_phases(0.0, 1500.0, &train, &[early], &SegmentOptions::default())));
    }

    #[test]
    fn real_spectrum_has_no_resonance() {
        let m = jr(4.0);
        let (eq, _) = m.equilibrium(-10.0);
        // far down the branch the sigmoid is flat and the spectrum is that of
        // the linear synaptic filters
        let r = linear_noise_spectrum(&m, &eq).unwrap();
        assert!(r.is_none(), "{r:?}");
        let (eq, _) = m.equilibrium(1.0);
        let r = linear_noise_spectrum(&m, &eq).unwrap();
        assert!(r.map_or(true, |r| r.freq_hz > 0.0));
    }
}
