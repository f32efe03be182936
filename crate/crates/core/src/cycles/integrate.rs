//! Adaptive Dormand–Prince 5(4) integrator with continuous extension and
//! section-crossing location.

use crate::error::{Error, Result};
use crate::model::VectorField;
use crate::scalar::Real;

/// What an integration run keeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Record<T> {
    /// Every accepted step.
    Steps,
    /// Uniform output grid with the given spacing (dense output).
    Every(T),
    /// Only the final state.
    Final,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions<T> {
    pub rtol: T,
    pub atol: T,
    /// Largest allowed step; `None` means the span length.
    pub h_max: Option<T>,
    pub max_steps: usize,
    pub record: Record<T>,
    /// States with a component beyond this magnitude abort the run.
    pub blowup: T,
}

impl<T: Real> IntegratorOptions<T> {
    /// Relative and absolute tolerance both set to `tol`.
    pub fn with_tol(tol: T) -> Self {
        IntegratorOptions {
            rtol: tol,
            atol: tol,
            h_max: None,
            max_steps: 5_000_000,
            record: Record::Steps,
            blowup: T::lit(1e8),
        }
    }

    pub fn record(mut self, r: Record<T>) -> Self {
        self.record = r;
        self
    }

    pub fn h_max(mut self, h: T) -> Self {
        self.h_max = Some(h);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepStats {
    pub steps: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Sampled solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<Vec<T>>,
    pub stats: StepStats,
    pub tol: T,
}

impl<T: Real> Trajectory<T> {
    pub fn last(&self) -> &[T] {
        self.states.last().expect("trajectory has at least one sample")
    }

    pub fn component(&self, k: usize) -> Vec<T> {
        self.states.iter().map(|s| s[k]).collect()
    }
}

fn c<T: Real>(x: f64) -> T {
    T::lit(x)
}

/// Single-trajectory Dormand–Prince stepper. After each accepted step the
/// interval `[t_prev, t]` can be sampled with [`Dopri5::dense`].
pub struct Dopri5<'a, T, F> {
    f: &'a F,
    opts: IntegratorOptions<T>,
    n: usize,
    pub t: T,
    pub y: Vec<T>,
    pub t_prev: T,
    pub y_prev: Vec<T>,
    h: T,
    k: [Vec<T>; 7],
    cont: [Vec<T>; 5],
    ytmp: Vec<T>,
    pub stats: StepStats,
}

impl<'a, T: Real, F: VectorField<T>> Dopri5<'a, T, F> {
    pub fn new(f: &'a F, t0: T, y0: &[T], opts: IntegratorOptions<T>) -> Result<Self> {
        let n = f.dim();
        if y0.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: y0.len() });
        }
        let tol_lo = c::<T>(1e-14);
        if !(opts.rtol >= tol_lo && opts.rtol <= c(1e-2)) {
            return Err(Error::Domain(format!("tolerance {} outside supported range", opts.rtol)));
        }
        let z = || vec![T::zero(); n];
        let mut s = Dopri5 {
            f,
            opts,
            n,
            t: t0,
            y: y0.to_vec(),
            t_prev: t0,
            y_prev: y0.to_vec(),
            h: T::zero(),
            k: [z(), z(), z(), z(), z(), z(), z()],
            cont: [z(), z(), z(), z(), z()],
            ytmp: z(),
            stats: StepStats::default(),
        };
        f.eval(&s.y, &mut s.k[0]);
        s.stats.evaluations += 1;
        s.h = s.initial_step();
        Ok(s)
    }

    fn scale(&self, a: T, b: T) -> T {
        self.opts.atol + self.opts.rtol * a.abs().max(b.abs())
    }

    fn initial_step(&mut self) -> T {
        let n = T::lit(self.n as f64);
        let mut d0 = T::zero();
        let mut d1 = T::zero();
        for i in 0..self.n {
            let sc = self.scale(self.y[i], self.y[i]);
            d0 += (self.y[i] / sc).powi(2);
            d1 += (self.k[0][i] / sc).powi(2);
        }
        d0 = (d0 / n).sqrt();
        d1 = (d1 / n).sqrt();
        let mut h0 = if d0 < c(1e-5) || d1 < c(1e-5) { c(1e-6) } else { c::<T>(0.01) * d0 / d1 };
        if let Some(hm) = self.opts.h_max {
            h0 = h0.min(hm);
        }
        for i in 0..self.n {
            self.ytmp[i] = self.y[i] + h0 * self.k[0][i];
        }
        let mut f1 = vec![T::zero(); self.n];
        self.f.eval(&self.ytmp, &mut f1);
        self.stats.evaluations += 1;
        let mut d2 = T::zero();
        for i in 0..self.n {
            let sc = self.scale(self.y[i], self.y[i]);
            d2 += ((f1[i] - self.k[0][i]) / sc).powi(2);
        }
        d2 = (d2 / n).sqrt() / h0;
        let h1 = if d1.max(d2) <= c(1e-15) {
            (h0 * c(1e-3)).max(c(1e-6))
        } else {
            (c::<T>(0.01) / d1.max(d2)).powf(c(0.2))
        };
        let mut h = (h0 * c(100.0)).min(h1);
        if let Some(hm) = self.opts.h_max {
            h = h.min(hm);
        }
        h
    }

    /// Takes one accepted step, never passing `t_end`.
    pub fn step(&mut self, t_end: T) -> Result<()> {
        let n = self.n;
        let f = self.f;
        let mut facmax = c::<T>(10.0);
        loop {
            let remaining = t_end - self.t;
            let mut h = self.h.min(remaining);
            if let Some(hm) = self.opts.h_max {
                h = h.min(hm);
            }
            if h <= T::epsilon() * c::<T>(16.0) * (T::one() + self.t.abs()) {
                if remaining <= T::epsilon() * c::<T>(16.0) * (T::one() + self.t.abs()) {
                    // span exhausted up to roundoff
                    self.t_prev = self.t;
                    self.y_prev.clone_from(&self.y);
                    self.t = t_end;
                    return Ok(());
                }
                return Err(Error::Stiffness { t: self.t.to_f64_lossy(), h: h.to_f64_lossy() });
            }
            let y = &self.y;
            let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
            let yt = &mut self.ytmp;
            for i in 0..n {
                yt[i] = y[i] + h * c::<T>(0.2) * k1[i];
            }
            f.eval(yt, k2);
            for i in 0..n {
                yt[i] = y[i] + h * (c::<T>(3.0 / 40.0) * k1[i] + c::<T>(9.0 / 40.0) * k2[i]);
            }
            f.eval(yt, k3);
            for i in 0..n {
                yt[i] = y[i]
                    + h * (c::<T>(44.0 / 45.0) * k1[i] - c::<T>(56.0 / 15.0) * k2[i] + c::<T>(32.0 / 9.0) * k3[i]);
            }
            f.eval(yt, k4);
            for i in 0..n {
                yt[i] = y[i]
                    + h * (c::<T>(19372.0 / 6561.0) * k1[i] - c::<T>(25360.0 / 2187.0) * k2[i]
                        + c::<T>(64448.0 / 6561.0) * k3[i]
                        - c::<T>(212.0 / 729.0) * k4[i]);
            }
            f.eval(yt, k5);
            for i in 0..n {
                yt[i] = y[i]
                    + h * (c::<T>(9017.0 / 3168.0) * k1[i] - c::<T>(355.0 / 33.0) * k2[i]
                        + c::<T>(46732.0 / 5247.0) * k3[i]
                        + c::<T>(49.0 / 176.0) * k4[i]
                        - c::<T>(5103.0 / 18656.0) * k5[i]);
            }
            f.eval(yt, k6);
            let mut ynew = vec![T::zero(); n];
            for i in 0..n {
                ynew[i] = y[i]
                    + h * (c::<T>(35.0 / 384.0) * k1[i] + c::<T>(500.0 / 1113.0) * k3[i] + c::<T>(125.0 / 192.0) * k4[i]
                        - c::<T>(2187.0 / 6784.0) * k5[i]
                        + c::<T>(11.0 / 84.0) * k6[i]);
            }
            f.eval(&ynew, k7);
            self.stats.evaluations += 6;
            let mut err = T::zero();
            for i in 0..n {
                let e = h
                    * (c::<T>(71.0 / 57600.0) * k1[i] - c::<T>(71.0 / 16695.0) * k3[i] + c::<T>(71.0 / 1920.0) * k4[i]
                        - c::<T>(17253.0 / 339200.0) * k5[i]
                        + c::<T>(22.0 / 525.0) * k6[i]
                        - c::<T>(1.0 / 40.0) * k7[i]);
                let sc = self.opts.atol + self.opts.rtol * y[i].abs().max(ynew[i].abs());
                err += (e / sc).powi(2);
            }
            err = (err / T::lit(n as f64)).sqrt();
            if !err.is_finite() {
                self.stats.rejected += 1;
                self.h = h * c(0.1);
                facmax = T::one();
                continue;
            }
            let fac = (c::<T>(0.9) / err.max(c(1e-10)).powf(c(0.2))).max(c(0.2)).min(facmax);
            if err <= T::one() {
                for i in 0..n {
                    let d = c::<T>(-12715105075.0 / 11282082432.0) * k1[i]
                        + c::<T>(87487479700.0 / 32700410799.0) * k3[i]
                        + c::<T>(-10690763975.0 / 1880347072.0) * k4[i]
                        + c::<T>(701980252875.0 / 199316789632.0) * k5[i]
                        + c::<T>(-1453857185.0 / 822651844.0) * k6[i]
                        + c::<T>(69997945.0 / 29380423.0) * k7[i];
                    let dy = ynew[i] - y[i];
                    let bspl = h * k1[i] - dy;
                    self.cont[0][i] = y[i];
                    self.cont[1][i] = dy;
                    self.cont[2][i] = bspl;
                    self.cont[3][i] = dy - h * k7[i] - bspl;
                    self.cont[4][i] = h * d;
                }
                self.t_prev = self.t;
                std::mem::swap(&mut self.y_prev, &mut self.y);
                self.y = ynew;
                self.t = if h == remaining { t_end } else { self.t + h };
                let (a, b) = self.k.split_at_mut(6);
                a[0].copy_from_slice(&b[0]);
                self.stats.steps += 1;
                self.h = h * fac;
                if self.y.iter().any(|v| !v.is_finite() || v.abs() > self.opts.blowup) {
                    return Err(Error::Divergence { t: self.t.to_f64_lossy() });
                }
                if self.stats.steps > self.opts.max_steps {
                    return Err(Error::NumericalFailure(format!("step budget {} exhausted", self.opts.max_steps)));
                }
                return Ok(());
            }
            self.stats.rejected += 1;
            facmax = T::one();
            self.h = h * fac;
        }
    }

    /// Continuous extension on the last accepted step.
    pub fn dense(&self, t: T) -> Vec<T> {
        let h = self.t - self.t_prev;
        if h == T::zero() {
            return self.y.clone();
        }
        let th = (t - self.t_prev) / h;
        let th1 = T::one() - th;
        (0..self.n)
            .map(|i| {
                let cc = &self.cont;
                cc[0][i] + th * (cc[1][i] + th1 * (cc[2][i] + th * (cc[3][i] + th1 * cc[4][i])))
            })
            .collect()
    }

    /// Component `k` of the continuous extension.
    pub fn dense_component(&self, t: T, k: usize) -> T {
        let h = self.t - self.t_prev;
        if h == T::zero() {
            return self.y[k];
        }
        let th = (t - self.t_prev) / h;
        let th1 = T::one() - th;
        let cc = &self.cont;
        cc[0][k] + th * (cc[1][k] + th1 * (cc[2][k] + th * (cc[3][k] + th1 * cc[4][k])))
    }
}

/// Integrates `f` over `t_span` from `x0`.
pub fn integrate<T: Real, F: VectorField<T>>(
    f: &F,
    x0: &[T],
    t_span: (T, T),
    opts: &IntegratorOptions<T>,
) -> Result<Trajectory<T>> {
    let (t0, t1) = t_span;
    if !(t1 >= t0) {
        return Err(Error::Domain("integration span must be increasing".into()));
    }
    let mut st = Dopri5::new(f, t0, x0, *opts)?;
    let mut times = vec![t0];
    let mut states = vec![x0.to_vec()];
    let mut next_out = t0;
    if let Record::Every(dt) = opts.record {
        if !(dt > T::zero()) {
            return Err(Error::Domain("output spacing must be positive".into()));
        }
        next_out = t0 + dt;
    }
    let mut k_out = 1usize;
    while st.t < t1 {
        st.step(t1)?;
        match opts.record {
            Record::Steps => {
                times.push(st.t);
                states.push(st.y.clone());
            }
            Record::Every(dt) => {
                while next_out <= st.t * (T::one() + T::epsilon()) && next_out <= t1 {
                    times.push(next_out);
                    states.push(st.dense(next_out));
                    k_out += 1;
                    next_out = t0 + dt * T::lit(k_out as f64);
                }
            }
            Record::Final => {}
        }
    }
    if opts.record == Record::Final {
        times.push(st.t);
        states.push(st.y.clone());
    }
    Ok(Trajectory { times, states, stats: st.stats, tol: opts.rtol })
}

/// Convenience wrapper with equal relative/absolute tolerance, recording steps.
pub fn integrate_tol<T: Real, F: VectorField<T>>(f: &F, x0: &[T], t_span: (T, T), tol: T) -> Result<Trajectory<T>> {
    integrate(f, x0, t_span, &IntegratorOptions::with_tol(tol))
}

/// Hyperplane `x[index] = level`, crossed in the given direction (`+1`
/// increasing, `-1` decreasing).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Section<T> {
    pub index: usize,
    pub level: T,
    pub direction: i8,
}

/// First crossing of `section` after `t_min`, located on the dense output by
/// bisection with a secant finish. Returns `(t, state)`, or `None` when no
/// crossing happens before `t_max`.
pub fn first_crossing<T: Real, F: VectorField<T>>(
    f: &F,
    x0: &[T],
    t_min: T,
    t_max: T,
    section: Section<T>,
    opts: &IntegratorOptions<T>,
) -> Result<Option<(T, Vec<T>)>> {
    let mut st = Dopri5::new(f, T::zero(), x0, *opts)?;
    let g = |v: T| v - section.level;
    let dir_ok = |a: T, b: T| {
        if section.direction >= 0 {
            a < T::zero() && b >= T::zero()
        } else {
            a > T::zero() && b <= T::zero()
        }
    };
    while st.t < t_max {
        st.step(t_max)?;
        let (ga, gb) = (g(st.y_prev[section.index]), g(st.y[section.index]));
        if st.t > t_min && dir_ok(ga, gb) {
            let (mut lo, mut hi) = (st.t_prev, st.t);
            let (mut glo, mut ghi) = (ga, gb);
            let tol = T::epsilon() * c::<T>(64.0) * (T::one() + hi.abs());
            for _ in 0..200 {
                if hi - lo <= tol {
                    break;
                }
                // regula falsi guarded by bisection
                let mut m = lo - glo * (hi - lo) / (ghi - glo);
                let w = hi - lo;
                if !(m > lo + c::<T>(0.01) * w && m < hi - c::<T>(0.01) * w) {
                    m = lo + w / c(2.0);
                }
                let gm = g(st.dense_component(m, section.index));
                if gm == T::zero() {
                    lo = m;
                    hi = m;
                    break;
                }
                if (gm < T::zero()) == (glo < T::zero()) {
                    lo = m;
                    glo = gm;
                } else {
                    hi = m;
                    ghi = gm;
                }
            }
            let tc = if glo.abs() < ghi.abs() { lo } else { hi };
            if tc <= t_min {
                continue;
            }
            return Ok(Some((tc, st.dense(tc))));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Harmonic;

    impl VectorField<f64> for Harmonic {
        fn dim(&self) -> usize {
            2
        }
        fn eval(&self, x: &[f64], dx: &mut [f64]) {
            dx[0] = x[1];
            dx[1] = -x[0];
        }
    }

    struct Decay;

    impl VectorField<f32> for Decay {
        fn dim(&self) -> usize {
            1
        }
        fn eval(&self, x: &[f32], dx: &mut [f32]) {
            dx[0] = -x[0];
        }
    }

    #[test]
    fn harmonic_oscillator_accuracy() {
        let tr = integrate_tol(&Harmonic, &[1.0, 0.0], (0.0, 10.0), 1e-10).unwrap();
        let last = tr.last();
        assert!((last[0] - 10f64.cos()).abs() < 1e-8);
        assert!((last[1] + 10f64.sin()).abs() < 1e-8);
        assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(*tr.times.last().unwrap(), 10.0);
    }

    #[test]
    fn dense_output_grid() {
        let o = IntegratorOptions::with_tol(1e-10).record(Record::Every(0.5));
        let tr = integrate(&Harmonic, &[1.0, 0.0], (0.0, 5.0), &o).unwrap();
        assert_eq!(tr.times.len(), 11);
        for (t, s) in tr.times.iter().zip(&tr.states) {
            assert!((s[0] - t.cos()).abs() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn crossing_time_is_accurate() {
        let sec = Section { index: 1, level: 0.0, direction: 1 };
        let o = IntegratorOptions::with_tol(1e-11);
        let (t, s) = first_crossing(&Harmonic, &[1.0, 0.0], 1e-6, 20.0, sec, &o).unwrap().unwrap();
        assert!((t - std::f64::consts::PI).abs() < 1e-8, "t = {t}");
        assert!((s[0] + 1.0).abs() < 1e-8);
    }

    #[test]
    fn tighter_tolerance_converges() {
        let reference = integrate_tol(&Harmonic, &[1.0, 0.0], (0.0, 20.0), 1e-12).unwrap();
        let r = reference.last()[0];
        let e6 = (integrate_tol(&Harmonic, &[1.0, 0.0], (0.0, 20.0), 1e-6).unwrap().last()[0] - r).abs();
        let e8 = (integrate_tol(&Harmonic, &[1.0, 0.0], (0.0, 20.0), 1e-8).unwrap().last()[0] - r).abs();
        assert!(e8 <= 0.5 * e6);
    }

    #[test]
    fn single_precision_decay() {
        let tr = integrate_tol(&Decay, &[1.0f32], (0.0, 2.0), 1e-6).unwrap();
        assert!((tr.last()[0] - (-2f32).exp()).abs() < 1e-5);
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(integrate_tol(&Harmonic, &[1.0, 0.0], (0.0, 1.0), 0.5).is_err());
    }
}
