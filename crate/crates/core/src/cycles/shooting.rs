//! Periodic orbits by single shooting with the variational equations.

use num_complex::Complex64;

use super::band::{classify_band, Band, TIME_SCALE};
use super::integrate::{first_crossing, integrate, IntegratorOptions, Record, Section};
use crate::error::{Error, Result};
use crate::linalg::{eigen, Lu, Matrix};
use crate::model::{System, VectorField};

/// Flow of the model together with its state and input sensitivities,
/// packed as `[x, Phi (row-major n x n), dx/dP]`.
struct Variational<'a, S> {
    model: &'a S,
    n: usize,
}

impl<S: System<f64>> VectorField<f64> for Variational<'_, S> {
    fn dim(&self) -> usize {
        self.n * (self.n + 2)
    }

    fn eval(&self, u: &[f64], du: &mut [f64]) {
        let n = self.n;
        let x = &u[..n];
        self.model.eval(x, &mut du[..n]);
        let j = self.model.jacobian(x);
        let phi = &u[n..n + n * n];
        let s = &u[n + n * n..];
        for i in 0..n {
            for k in 0..n {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += j[(i, l)] * phi[l * n + k];
                }
                du[n + i * n + k] = acc;
            }
            let mut acc = 0.0;
            for l in 0..n {
                acc += j[(i, l)] * s[l];
            }
            du[n + n * n + i] = acc;
        }
        du[n + n * n + self.model.input_equation()] += 1.0;
    }
}

/// End state, monodromy (state Jacobian of the flow) and input sensitivity
/// after time `t`.
pub struct FlowMap {
    pub end: Vec<f64>,
    pub monodromy: Matrix<f64>,
    pub dp: Vec<f64>,
}

pub fn flow_map<S: System<f64>>(model: &S, x: &[f64], t: f64, tol: f64) -> Result<FlowMap> {
    let n = model.dim();
    let mut u0 = vec![0.0; n * (n + 2)];
    u0[..n].copy_from_slice(x);
    for i in 0..n {
        u0[n + i * n + i] = 1.0;
    }
    let var = Variational { model, n };
    let opts = IntegratorOptions::with_tol(tol).record(Record::Final);
    let traj = integrate(&var, &u0, (0.0, t), &opts)?;
    let u = traj.last();
    Ok(FlowMap {
        end: u[..n].to_vec(),
        monodromy: Matrix::from_vec(n, n, u[n..n + n * n].to_vec()),
        dp: u[n + n * n..].to_vec(),
    })
}

/// Phase condition pinning the anchor on a hyperplane.
#[derive(Debug, Clone, PartialEq)]
pub enum Phase {
    /// `x[index] = level`.
    Level { index: usize, level: f64 },
    /// `<normal, x - reference> = 0`, with `normal` the field at `reference`.
    Orthogonal { reference: Vec<f64>, normal: Vec<f64> },
}

impl Phase {
    pub fn orthogonal<S: System<f64>>(model: &S, reference: &[f64]) -> Self {
        Phase::Orthogonal { reference: reference.to_vec(), normal: model.eval_vec(reference) }
    }

    fn row(&self, n: usize) -> Vec<f64> {
        match self {
            Phase::Level { index, .. } => {
                let mut r = vec![0.0; n];
                r[*index] = 1.0;
                r
            }
            Phase::Orthogonal { normal, .. } => normal.clone(),
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        match self {
            Phase::Level { index, level } => x[*index] - level,
            Phase::Orthogonal { reference, normal } => {
                normal.iter().zip(x.iter().zip(reference)).map(|(c, (a, b))| c * (a - b)).sum()
            }
        }
    }
}

/// Settings for the shooting Newton iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootOptions {
    /// Integrator tolerance (relative and absolute).
    pub int_tol: f64,
    /// Required max-norm periodicity residual.
    pub residual_tol: f64,
    pub max_iter: usize,
    /// Largest time searched for the first return when estimating the period.
    pub max_return_time: f64,
}

impl Default for ShootOptions {
    fn default() -> Self {
        ShootOptions { int_tol: 1e-10, residual_tol: 1e-8, max_iter: 25, max_return_time: 1000.0 }
    }
}

/// Pseudo-arclength row: `<weights * tangent, u - predictor> = 0` on
/// `u = (x, T, P)`.
pub struct ArcConstraint<'a> {
    pub tangent: &'a [f64],
    pub predictor: &'a [f64],
    pub weights: &'a [f64],
}

/// Converged shooting solution.
pub struct Shot {
    pub x: Vec<f64>,
    pub period: f64,
    pub p: f64,
    pub monodromy: Matrix<f64>,
    pub residual: f64,
    pub iterations: usize,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, a| m.max(a.abs()))
}

/// Newton iteration on `phi(x, T; P) - x = 0` plus the phase condition, and
/// optionally a pseudo-arclength row with `P` free.
pub fn shoot<S: System<f64>>(
    model: &S,
    x0: &[f64],
    t0: f64,
    phase: &Phase,
    arc: Option<&ArcConstraint>,
    opts: &ShootOptions,
) -> Result<Shot> {
    let n = model.dim();
    let free_p = arc.is_some();
    let m = if free_p { n + 2 } else { n + 1 };
    let mut u: Vec<f64> = x0.to_vec();
    u.push(t0);
    if free_p {
        u.push(model.input());
    }
    let residual = |u: &[f64]| -> Result<(Vec<f64>, FlowMap, S)> {
        let mut mm = model.clone();
        if free_p {
            mm.set_input(u[n + 1]);
        }
        if !(u[n] > 0.0) {
            return Err(Error::NumericalFailure("non-positive period in shooting".into()));
        }
        let fm = flow_map(&mm, &u[..n], u[n], opts.int_tol)?;
        let mut r: Vec<f64> = (0..n).map(|i| fm.end[i] - u[i]).collect();
        r.push(phase.value(&u[..n]));
        if let Some(a) = arc {
            r.push((0..n + 2).map(|i| a.weights[i] * a.tangent[i] * (u[i] - a.predictor[i])).sum());
        }
        Ok((r, fm, mm))
    };
    let (mut r, mut fm, mut mm) = residual(&u)?;
    let mut rn = inf_norm(&r);
    for it in 0..opts.max_iter {
        if rn <= opts.residual_tol && it > 0 {
            return Ok(Shot { x: u[..n].to_vec(), period: u[n], p: mm.input(), monodromy: fm.monodromy, residual: rn, iterations: it });
        }
        let mut jac = Matrix::<f64>::zeros(m, m);
        let f_end = mm.eval_vec(&fm.end);
        for i in 0..n {
            for k in 0..n {
                jac[(i, k)] = fm.monodromy[(i, k)] - if i == k { 1.0 } else { 0.0 };
            }
            jac[(i, n)] = f_end[i];
            if free_p {
                jac[(i, n + 1)] = fm.dp[i];
            }
        }
        for (k, c) in phase.row(n).into_iter().enumerate() {
            jac[(n, k)] = c;
        }
        if let Some(a) = arc {
            for k in 0..n + 2 {
                jac[(n + 1, k)] = a.weights[k] * a.tangent[k];
            }
        }
        let lu = Lu::new(&jac);
        if lu.is_singular() {
            return Err(Error::NumericalFailure("singular shooting Jacobian".into()));
        }
        let neg: Vec<f64> = r.iter().map(|v| -v).collect();
        let du = lu.solve(&neg)?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..8 {
            let trial: Vec<f64> = u.iter().zip(&du).map(|(a, d)| a + lambda * d).collect();
            if let Ok((r2, fm2, mm2)) = residual(&trial) {
                let rn2 = inf_norm(&r2);
                if rn2.is_finite() && (rn2 < rn || rn2 <= opts.residual_tol) {
                    u = trial;
                    r = r2;
                    fm = fm2;
                    mm = mm2;
                    rn = rn2;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if rn <= opts.residual_tol {
        return Ok(Shot { x: u[..n].to_vec(), period: u[n], p: mm.input(), monodromy: fm.monodromy, residual: rn, iterations: opts.max_iter });
    }
    Err(Error::NoConvergence { iterations: opts.max_iter, residual: rn, last: u })
}

/// A periodic orbit with its Floquet data.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitCycle {
    /// Input value.
    pub p: f64,
    /// State on the section.
    pub anchor: Vec<f64>,
    /// Dimensionless period.
    pub period: f64,
    pub multipliers: Vec<Complex64>,
    pub x_min: f64,
    pub x_max: f64,
    pub stable: bool,
    pub band: Band,
    /// Periodicity residual of the last Newton iterate.
    pub residual: f64,
}

impl LimitCycle {
    pub fn amplitude(&self) -> f64 {
        self.x_max - self.x_min
    }

    fn trivial_index(&self) -> usize {
        (0..self.multipliers.len())
            .min_by(|&a, &b| (self.multipliers[a] - 1.0).norm().partial_cmp(&(self.multipliers[b] - 1.0).norm()).unwrap())
            .unwrap_or(0)
    }

    /// Distance of the multiplier closest to 1 from 1.
    pub fn trivial_multiplier_error(&self) -> f64 {
        self.multipliers.get(self.trivial_index()).map_or(f64::NAN, |m| (m - 1.0).norm())
    }

    pub fn nontrivial_multipliers(&self) -> Vec<Complex64> {
        let t = self.trivial_index();
        self.multipliers.iter().enumerate().filter(|(i, _)| *i != t).map(|(_, m)| *m).collect()
    }

    pub fn max_nontrivial_modulus(&self) -> f64 {
        self.nontrivial_multipliers().iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    /// Physical frequency in Hz for the time scale `a` (s^-1).
    pub fn freq_hz(&self, a: f64) -> f64 {
        a / self.period
    }
}

/// Builds the cycle record from a converged shot: Floquet multipliers and the
/// `X` range over one period.
pub fn limit_cycle_from_shot<S: System<f64>>(model: &S, shot: &Shot, opts: &ShootOptions) -> Result<LimitCycle> {
    let mut m = model.clone();
    m.set_input(shot.p);
    let spec = eigen(&shot.monodromy)?;
    let xi = m.x_index();
    let traj = integrate(&m, &shot.x, (0.0, shot.period), &IntegratorOptions::with_tol(opts.int_tol).record(Record::Every(shot.period / 2000.0)))?;
    let xs = traj.component(xi);
    let x_min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let x_max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut cyc = LimitCycle {
        p: shot.p,
        anchor: shot.x.clone(),
        period: shot.period,
        multipliers: spec.values.clone(),
        x_min,
        x_max,
        stable: false,
        band: classify_band(shot.period, TIME_SCALE)?,
        residual: shot.residual,
    };
    cyc.stable = cyc.max_nontrivial_modulus() < 1.0 - 1e-6;
    Ok(cyc)
}

/// Locates the periodic orbit through the section `X = guess[X]` crossed
/// with increasing `X`, starting from a state near the cycle.
pub fn find_cycle<S: System<f64>>(model: &S, guess: &[f64], opts: &ShootOptions) -> Result<LimitCycle> {
    let xi = model.x_index();
    let section = Section { index: xi, level: guess[xi], direction: 1 };
    let iopts = IntegratorOptions::with_tol(opts.int_tol);
    // move onto an upward crossing first, then time the next one
    let Some((_, on)) = first_crossing(model, guess, 0.0, opts.max_return_time, section, &iopts)? else {
        return Err(Error::NotACycle("no section crossing".into()));
    };
    let Some((t_ret, _)) = first_crossing(model, &on, 1e-3, opts.max_return_time, section, &iopts)? else {
        return Err(Error::NotACycle("no return to the section".into()));
    };
    let shot = shoot(model, &on, t_ret, &Phase::Level { index: xi, level: guess[xi] }, None, opts)?;
    if shot.period > 10.0 * t_ret || shot.period < 0.1 * t_ret {
        return Err(Error::NotACycle(format!("period {} far from return time {t_ret}", shot.period)));
    }
    let cyc = limit_cycle_from_shot(model, &shot, opts)?;
    if cyc.amplitude() < 1e-6 {
        return Err(Error::NotACycle("collapsed onto an equilibrium".into()));
    }
    Ok(cyc)
}

/// Runs a transient of length `transient` from `x0`, then shoots from the
/// final state.
pub fn cycle_from_transient<S: System<f64>>(model: &S, x0: &[f64], transient: f64, opts: &ShootOptions) -> Result<LimitCycle> {
    let traj = integrate(model, x0, (0.0, transient), &IntegratorOptions::with_tol(1e-9).record(Record::Final))?;
    let end = traj.last().to_vec();
    // use a mid-range level so the section is crossed transversally
    let probe = integrate(model, &end, (0.0, transient.min(200.0)), &IntegratorOptions::with_tol(1e-9).record(Record::Every(0.01)))?;
    let xi = model.x_index();
    let xs = probe.component(xi);
    let (lo, hi) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if hi - lo < 1e-6 {
        return Err(Error::NotACycle("transient settled on an equilibrium".into()));
    }
    let level = 0.5 * (lo + hi);
    let k = xs.windows(2).position(|w| w[0] < level && w[1] >= level).ok_or_else(|| Error::NotACycle("no upward crossing".into()))?;
    let mut start = probe.states[k + 1].clone();
    start[xi] = level;
    find_cycle(model, &start, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::JrParams;

    #[test]
    fn jr_alpha_and_epileptic_cycles_coexist() {
        let mut m = JrParams::<f64>::default();
        m.set_input(2.3);
        let opts = ShootOptions::default();
        // alpha side: start near the unstable focus on the upper branch
        let (eq, _) = m.equilibrium(4.3);
        let mut x0 = eq.clone();
        x0[1] += 0.05;
        let alpha = cycle_from_transient(&m, &x0, 200.0, &opts).unwrap();
        assert!(alpha.period > 9.0 && alpha.period < 9.6, "{}", alpha.period);
        assert!(alpha.stable);
        assert!(alpha.trivial_multiplier_error() < 1e-3);
        // down state kicked hard
        let (eq, _) = m.equilibrium(1.2);
        let mut x0 = eq;
        x0[1] += 8.0;
        let big = cycle_from_transient(&m, &x0, 200.0, &opts).unwrap();
        assert!(big.stable);
        assert!(big.amplitude() > 3.0 * alpha.amplitude(), "{} vs {}", big.amplitude(), alpha.amplitude());
        assert!(big.trivial_multiplier_error() < 1e-3);
    }
}
