//! One-parameter families of periodic orbits in the input `P`, continued by
//! secant pseudo-arclength shooting.

use log::debug;
use num_complex::Complex64;

use super::shooting::{limit_cycle_from_shot, shoot, ArcConstraint, LimitCycle, Phase, ShootOptions};
use crate::bifpoint::{BifKind, BifurcationPoint};
use crate::equilibria::{model_at, HopfInfo};
use crate::error::{Error, Result};
use crate::linalg::{eigenvector, newton_refine, NewtonOptions};
use crate::model::System;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleEvent {
    FoldOfCycles,
    SnicCandidate,
    HopfEndpoint,
}

impl CycleEvent {
    pub fn as_str(self) -> &'static str {
        match self {
            CycleEvent::FoldOfCycles => "fold_of_cycles",
            CycleEvent::SnicCandidate => "snic_candidate",
            CycleEvent::HopfEndpoint => "hopf_endpoint",
        }
    }
}

/// Why a continuation stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Amplitude shrank to zero at a Hopf point.
    HopfShrink,
    /// Period exceeded the stop threshold.
    PeriodBlowup,
    /// Step size fell below the minimum.
    StepUnderflow,
    /// Input left the requested range.
    OutOfRange,
    MaxSteps,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CyclePoint {
    pub cycle: LimitCycle,
    pub event: Option<CycleEvent>,
}

/// Fold of the family in `P`, located between two continuation points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleFold {
    pub p: f64,
    pub period: f64,
    pub x_max: f64,
    /// Real nontrivial multiplier closest to `+1` on either side.
    pub multiplier_before: f64,
    pub multiplier_after: f64,
    /// Index of the continuation point nearest the fold.
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleBranch {
    pub points: Vec<CyclePoint>,
    pub folds: Vec<CycleFold>,
    pub termination: Termination,
}

impl CycleBranch {
    pub fn periods(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.cycle.period).collect()
    }

    pub fn p_values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.cycle.p).collect()
    }

    pub fn p_extent(&self) -> (f64, f64) {
        self.points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.cycle.p), b.max(p.cycle.p)))
    }
}

/// Settings for [`continue_cycles`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationOptions {
    pub ds: f64,
    pub ds_min: f64,
    pub ds_max: f64,
    /// Largest `|dP|` of one step.
    pub dp_max: f64,
    /// Step size below which a fold counts as resolved.
    pub fold_ds: f64,
    pub max_steps: usize,
    /// Period at which a candidate SNIC is flagged.
    pub snic_period: f64,
    /// Period at which the continuation stops.
    pub period_stop: f64,
    /// `X` amplitude at which the family is taken to end at a Hopf point.
    pub amp_min: f64,
    /// Weight of the period in the arclength norm.
    pub period_weight: f64,
    pub shoot: ShootOptions,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        ContinuationOptions {
            ds: 0.05,
            ds_min: 1e-6,
            ds_max: 0.5,
            dp_max: 0.25,
            fold_ds: 2e-3,
            max_steps: 3000,
            snic_period: 100.0,
            period_stop: 600.0,
            amp_min: 0.02,
            period_weight: 0.1,
            shoot: ShootOptions::default(),
        }
    }
}

fn pack(c: &LimitCycle) -> Vec<f64> {
    let mut u = c.anchor.clone();
    u.push(c.period);
    u.push(c.p);
    u
}

fn weights(n: usize, w_t: f64) -> Vec<f64> {
    let mut w = vec![1.0; n + 2];
    w[n] = w_t * w_t;
    w
}

fn wnorm(v: &[f64], w: &[f64]) -> f64 {
    v.iter().zip(w).map(|(a, b)| a * a * b).sum::<f64>().sqrt()
}

fn nearest_one(c: &LimitCycle) -> f64 {
    c.nontrivial_multipliers()
        .iter()
        .filter(|z| z.im.abs() < 1e-6)
        .map(|z| z.re)
        .min_by(|a, b| (a - 1.0).abs().partial_cmp(&(b - 1.0).abs()).unwrap())
        .unwrap_or(f64::NAN)
}

/// Continues a family from two consecutive states `u_prev`, `u0` packed as
/// `(anchor, T, P)`; `c0` is the cycle at `u0`.
pub fn continue_from<S: System<f64>>(
    model: &S,
    u_prev: &[f64],
    c0: LimitCycle,
    p_range: (f64, f64),
    opts: &ContinuationOptions,
) -> CycleBranch {
    let n = model.dim();
    let w = weights(n, opts.period_weight);
    let mut points = vec![CyclePoint { cycle: c0.clone(), event: None }];
    let mut states: Vec<Vec<f64>> = vec![u_prev.to_vec(), pack(&c0)];
    let mut arcs: Vec<f64> = vec![0.0];
    let mut folds = Vec::new();
    let mut ds = opts.ds.min(opts.ds_max);
    let mut in_fold = false;
    let mut termination = Termination::MaxSteps;
    for _ in 0..opts.max_steps {
        let k = states.len() - 1;
        let (a, b) = (&states[k - 1], &states[k]);
        let diff: Vec<f64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
        let len = wnorm(&diff, &w);
        if !(len > 0.0) {
            termination = Termination::StepUnderflow;
            break;
        }
        let tangent: Vec<f64> = diff.iter().map(|d| d / len).collect();
        let mut step = ds;
        if (tangent[n + 1] * step).abs() > opts.dp_max {
            step = opts.dp_max / tangent[n + 1].abs();
        }
        let pred: Vec<f64> = b.iter().zip(&tangent).map(|(x, t)| x + step * t).collect();
        let mut m = model.clone();
        m.set_input(pred[n + 1]);
        let phase = Phase::orthogonal(&m, &b[..n]);
        let arc = ArcConstraint { tangent: &tangent, predictor: &pred, weights: &w };
        let mut sopts = opts.shoot;
        sopts.max_iter = 8;
        let attempt = shoot(&m, &pred[..n], pred[n], &phase, Some(&arc), &sopts)
            .and_then(|shot| Ok((limit_cycle_from_shot(model, &shot, &opts.shoot)?, shot.iterations)));
        let prev = &points.last().unwrap().cycle;
        let ok = match &attempt {
            Ok((c, _)) => {
                let ratio = c.period / prev.period;
                ratio > 0.7 && ratio < 1.0 / 0.7 && c.period > 0.0
            }
            Err(_) => false,
        };
        if !ok {
            ds *= 0.5;
            if ds < opts.ds_min {
                termination = Termination::StepUnderflow;
                break;
            }
            continue;
        }
        let (c, iters) = attempt.unwrap();
        let u_new = pack(&c);
        let dp_old = b[n + 1] - a[n + 1];
        let dp_new = u_new[n + 1] - b[n + 1];
        let turned = states.len() > 2 && dp_old * dp_new < 0.0;
        let before = if points.len() >= 2 { points[points.len() - 2].cycle.amplitude() } else { f64::INFINITY };
        let dip = prev.amplitude() < before && prev.amplitude() < c.amplitude();
        if turned && (dip || c.amplitude().min(prev.amplitude()) < 5.0 * opts.amp_min) {
            // passing through zero amplitude at a Hopf point reflects the family
            points.last_mut().unwrap().event = Some(CycleEvent::HopfEndpoint);
            termination = Termination::HopfShrink;
            break;
        }
        if turned && step > opts.fold_ds {
            // resolve the turning point with smaller steps
            in_fold = true;
            ds = (step * 0.25).max(opts.ds_min);
            continue;
        }
        let s_new = arcs.last().unwrap() + wnorm(&u_new.iter().zip(b.iter()).map(|(x, y)| x - y).collect::<Vec<_>>(), &w);
        if turned {
            // parabola through the last three points in (s, P)
            let (s0, s1, s2) = (arcs[arcs.len() - 2], arcs[arcs.len() - 1], s_new);
            let (p0, p1, p2) = (a[n + 1], b[n + 1], u_new[n + 1]);
            let p_fold = parabola_extremum((s0, p0), (s1, p1), (s2, p2)).unwrap_or(p1);
            folds.push(CycleFold {
                p: p_fold,
                period: prev.period,
                x_max: prev.x_max,
                multiplier_before: nearest_one(prev),
                multiplier_after: nearest_one(&c),
                index: points.len() - 1,
            });
            points.last_mut().unwrap().event = Some(CycleEvent::FoldOfCycles);
            in_fold = false;
        }
        let out = u_new[n + 1] < p_range.0 || u_new[n + 1] > p_range.1;
        let amp = c.amplitude();
        let period = c.period;
        points.push(CyclePoint { cycle: c, event: None });
        states.push(u_new);
        arcs.push(s_new);
        if amp < opts.amp_min {
            points.last_mut().unwrap().event = Some(CycleEvent::HopfEndpoint);
            termination = Termination::HopfShrink;
            break;
        }
        if period > opts.period_stop {
            termination = Termination::PeriodBlowup;
            break;
        }
        if out {
            termination = Termination::OutOfRange;
            break;
        }
        if !in_fold && iters <= 3 {
            ds = (ds * 1.5).min(opts.ds_max);
        }
    }
    debug!("cycle branch: {} points, {} folds, {:?}", points.len(), folds.len(), termination);
    CycleBranch { points, folds, termination }
}

fn parabola_extremum(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> Option<f64> {
    let (x0, y0) = a;
    let (x1, y1) = b;
    let (x2, y2) = c;
    let d1 = (y1 - y0) / (x1 - x0);
    let d2 = (y2 - y1) / (x2 - x1);
    let curv = (d2 - d1) / (x2 - x0);
    if !(curv.abs() > 0.0) || !curv.is_finite() {
        return None;
    }
    // y = y1 + d*(x - x1) + curv*(x - x1)^2 locally, with d the slope at x1
    let d = d1 + curv * (x1 - x0);
    let xm = x1 - d / (2.0 * curv);
    let ym = y1 + d * (xm - x1) + curv * (xm - x1) * (xm - x1);
    if (xm - x0) * (xm - x2) <= 0.0 {
        Some(ym)
    } else {
        None
    }
}

/// Starting data for the family emanating from a Hopf point: the equilibrium
/// state (a zero-amplitude cycle) and a small corrected cycle.
pub fn seed_from_hopf<S: System<f64>>(model: &S, hopf: &HopfInfo, amp_x: f64, opts: &ShootOptions) -> Result<(Vec<f64>, LimitCycle)> {
    let (mh, xh) = model_at(model, hopf.x);
    let j = mh.jacobian(&xh);
    let xi = model.x_index();
    let mut q = eigenvector(&j, Complex64::new(0.0, hopf.omega))?;
    let norm = q.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let rot = q[xi].conj() / q[xi].norm();
    for z in q.iter_mut() {
        *z = *z * rot / norm;
    }
    let r = amp_x / (2.0 * q[xi].norm());
    let mut dp = -hopf.omega * hopf.l1 * r * r / hopf.transversality;
    let cap = 0.05 * (1.0 + hopf.p.abs());
    if !dp.is_finite() || dp.abs() > cap {
        dp = cap * if dp.is_finite() { dp.signum() } else { 1.0 };
    }
    if dp.abs() < 1e-7 {
        dp = 1e-7 * if dp < 0.0 { -1.0 } else { 1.0 };
    }
    let mut u_h = xh.clone();
    u_h.push(2.0 * std::f64::consts::PI / hopf.omega);
    u_h.push(hopf.p);
    let mut last_err = Error::NotACycle("no seed".into());
    for sign in [1.0, -1.0] {
        let p0 = hopf.p + sign * dp;
        let x_eq = match equilibrium_near(model, hopf.x, p0) {
            Ok(v) => v,
            Err(e) => {
                last_err = e;
                continue;
            }
        };
        let (m0, eq) = model_at(model, x_eq);
        let x0: Vec<f64> = eq.iter().zip(&q).map(|(e, z)| e - 2.0 * r * z.im).collect();
        let phase = Phase::orthogonal(&m0, &x0);
        match shoot(&m0, &x0, u_h[xh.len()], &phase, None, opts).and_then(|s| limit_cycle_from_shot(&m0, &s, opts)) {
            Ok(c) if c.amplitude() > 0.2 * amp_x => return Ok((u_h, c)),
            Ok(c) => last_err = Error::NotACycle(format!("seed collapsed to amplitude {}", c.amplitude())),
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

/// Abscissa `X` near `x_guess` whose equilibrium has input `p`.
pub fn equilibrium_near<S: System<f64>>(model: &S, x_guess: f64, p: f64) -> Result<f64> {
    let v = newton_refine(
        |x: &[f64]| Ok(vec![model.equilibrium(x[0]).1 - p]),
        None::<fn(&[f64]) -> Result<crate::linalg::Matrix<f64>>>,
        &[x_guess],
        NewtonOptions::default(),
    )?;
    Ok(v[0])
}

/// Continues the family born at `hopf` across `p_range`.
pub fn continue_from_hopf<S: System<f64>>(model: &S, hopf: &HopfInfo, p_range: (f64, f64), opts: &ContinuationOptions) -> Result<CycleBranch> {
    let mut seeded = seed_from_hopf(model, hopf, 0.06, &opts.shoot);
    for amp in [0.03, 0.12] {
        if seeded.is_ok() {
            break;
        }
        seeded = seed_from_hopf(model, hopf, amp, &opts.shoot);
    }
    let (u_h, c0) = seeded?;
    let mut first = opts.clone();
    first.ds = opts.ds.min(wnorm(
        &pack(&c0).iter().zip(&u_h).map(|(a, b)| a - b).collect::<Vec<_>>(),
        &weights(model.dim(), opts.period_weight),
    ));
    let mut branch = continue_from(model, &u_h, c0, p_range, &first);
    branch.points[0].event = Some(CycleEvent::HopfEndpoint);
    Ok(branch)
}

/// Continues the family through `seed` in the direction of increasing
/// (`direction > 0`) or decreasing input.
pub fn continue_cycles<S: System<f64>>(
    model: &S,
    seed: &LimitCycle,
    direction: f64,
    p_range: (f64, f64),
    opts: &ContinuationOptions,
) -> Result<CycleBranch> {
    let dp = 1e-3 * direction.signum();
    let mut m = model.clone();
    m.set_input(seed.p + dp);
    let phase = Phase::orthogonal(&m, &seed.anchor);
    let shot = shoot(&m, &seed.anchor, seed.period, &phase, None, &opts.shoot)?;
    let c1 = limit_cycle_from_shot(&m, &shot, &opts.shoot)?;
    let u0 = pack(seed);
    let mut branch = continue_from(model, &u0, c1, p_range, opts);
    branch.points.insert(0, CyclePoint { cycle: seed.clone(), event: None });
    for f in &mut branch.folds {
        f.index += 1;
    }
    Ok(branch)
}

/// Folds of the family as bifurcation points in the input.
pub fn detect_fold_of_cycles<S: System<f64>>(model: &S, branch: &CycleBranch) -> Vec<BifurcationPoint> {
    let input = model.input_name();
    branch
        .folds
        .iter()
        .map(|f| {
            BifurcationPoint::new(BifKind::FoldOfCycles, &[input])
                .coord(input, f.p)
                .coord("X", f.x_max)
                .diag("period", f.period)
                .diag("multiplier_before", f.multiplier_before)
                .diag("multiplier_after", f.multiplier_after)
                .labelled("LPC")
        })
        .collect()
}

/// Indices flagged as candidate SNIC ends: the period exceeds
/// `snic_period`, has grown over the last five steps, and `P` lies within
/// `p_tol` of a saddle-node input value.
pub fn detect_snic(branch: &CycleBranch, sn_inputs: &[f64], snic_period: f64, p_tol: f64) -> Vec<usize> {
    let pts = &branch.points;
    let mut out = Vec::new();
    for k in 5..pts.len() {
        let c = &pts[k].cycle;
        if c.period <= snic_period {
            continue;
        }
        let growing = (k - 5..k).all(|i| pts[i + 1].cycle.period > pts[i].cycle.period);
        let near = sn_inputs.iter().any(|p| (c.p - p).abs() <= p_tol);
        if growing && near {
            out.push(k);
        }
    }
    out
}

/// Marks the last qualifying point of each SNIC run on the branch.
pub fn mark_snic(branch: &mut CycleBranch, sn_inputs: &[f64], snic_period: f64, p_tol: f64) -> Vec<BifurcationPoint> {
    let idx = detect_snic(branch, sn_inputs, snic_period, p_tol);
    let mut out = Vec::new();
    if let Some(&k) = idx.last() {
        let c = branch.points[k].cycle.clone();
        branch.points[k].event = Some(CycleEvent::SnicCandidate);
        out.push(
            BifurcationPoint::new(BifKind::SnicCandidate, &["P"])
                .coord("P", c.p)
                .coord("X", c.x_max)
                .diag("period", c.period)
                .labelled("SNIC"),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_vertex() {
        let v = parabola_extremum((0.0, 1.0), (1.0, 2.0), (2.0, 1.0)).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        assert!(parabola_extremum((0.0, 0.0), (1.0, 1.0), (2.0, 2.0)).is_none());
    }
}
