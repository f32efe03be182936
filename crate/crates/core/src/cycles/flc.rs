//! Curves of folds of cycles over a second parameter `theta`, and their
//! special points: merges of two folds and ends where the fold period blows
//! up.

use log::{debug, warn};
use rayon::prelude::*;

use super::branch::{continue_from_hopf, ContinuationOptions, CycleFold};
use crate::bifpoint::{BifKind, BifurcationPoint};
use crate::codim2::align;
use crate::equilibria::{default_x_range, locate_hopf, Codim1Tolerances};
use crate::error::{Error, Result};
use crate::linalg::linspace;
use crate::model::System;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlcOptions {
    pub cont: ContinuationOptions,
    /// Input range of the cycle continuations.
    pub p_range: (f64, f64),
    /// Grid in `X` for locating Hopf points; `None` uses the model default.
    pub x_grid: Option<(f64, f64, usize)>,
    /// Folds closer than this in `P`, with equal periods, are the same fold.
    pub dedup: f64,
    /// Largest `P` jump of a fold between consecutive slices.
    pub max_jump: f64,
    /// Fold period above which a curve end counts as a period blow-up.
    pub blowup_period: f64,
    /// Bisection steps for merge and end points.
    pub refine_steps: usize,
}

impl Default for FlcOptions {
    fn default() -> Self {
        let mut cont = ContinuationOptions::default();
        cont.period_stop = 80.0;
        FlcOptions { cont, p_range: (-6.0, 40.0), x_grid: None, dedup: 1e-3, max_jump: 0.6, blowup_period: 40.0, refine_steps: 7 }
    }
}

/// All folds of cycle families emanating from the Hopf points of `model`,
/// sorted by `P`.
pub fn fold_set<S: System<f64>>(model: &S, opts: &FlcOptions) -> Vec<CycleFold> {
    let (lo, hi, n) = opts.x_grid.unwrap_or_else(|| default_x_range(model.kind()));
    let grid = linspace(lo, hi, n);
    let hopf = locate_hopf(model, &grid, &Codim1Tolerances::default());
    let mut out: Vec<CycleFold> = Vec::new();
    for h in &hopf {
        match continue_from_hopf(model, h, opts.p_range, &opts.cont) {
            Ok(b) => {
                for f in b.folds {
                    // the same fold reached from two Hopf points has the same period
                    if !out.iter().any(|o| (o.p - f.p).abs() < opts.dedup && (o.period - f.period).abs() < 1e-2 * f.period) {
                        out.push(f);
                    }
                }
            }
            Err(e) => debug!("no cycle family from Hopf at P = {}: {e}", h.p),
        }
    }
    out.sort_by(|a, b| a.p.partial_cmp(&b.p).unwrap());
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlcSlice {
    pub theta: f64,
    pub folds: Vec<CycleFold>,
}

/// A connected piece of the fold curve, one sample per slice.
#[derive(Debug, Clone, PartialEq)]
pub struct FlcCurve {
    /// `(theta, P, period)` ordered by `theta`.
    pub samples: Vec<(f64, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlcReport {
    pub theta_name: String,
    pub slices: Vec<FlcSlice>,
    pub curves: Vec<FlcCurve>,
    /// Merge points (labels `CLC` where two folds annihilate as `theta`
    /// grows, `E` where they appear) and blow-up ends (label `S`).
    pub points: Vec<BifurcationPoint>,
}

fn with_theta<S: System<f64>>(model: &S, name: &str, theta: f64) -> Result<S> {
    let mut m = model.clone();
    m.set_param(name, theta)?;
    Ok(m)
}

/// Smaller continuation steps for the bisections, so that folds close to
/// their birth or merger are not stepped over.
fn fine(opts: &FlcOptions) -> FlcOptions {
    let mut o = *opts;
    o.cont.ds_max = o.cont.ds_max.min(0.05);
    o.cont.dp_max = o.cont.dp_max.min(0.01);
    o
}

fn in_window(folds: &[CycleFold], lo: f64, hi: f64) -> Vec<f64> {
    folds.iter().filter(|f| f.p >= lo && f.p <= hi).map(|f| f.p).collect()
}

/// Folds of `present` left after removing the nearest match of each fold in
/// `absent`.
fn unmatched(present: &[f64], absent: &[f64]) -> Vec<f64> {
    let mut rest = present.to_vec();
    for a in absent {
        if let Some(k) = (0..rest.len()).min_by(|&i, &j| (rest[i] - a).abs().partial_cmp(&(rest[j] - a).abs()).unwrap()) {
            rest.remove(k);
        }
    }
    rest
}

/// Two folds of `folds` nearest to `centre`, sorted.
fn nearest_pair(folds: &[f64], centre: f64) -> Option<(f64, f64)> {
    let mut f = folds.to_vec();
    f.sort_by(|a, b| (a - centre).abs().partial_cmp(&(b - centre).abs()).unwrap());
    (f.len() >= 2).then(|| (f[0].min(f[1]), f[0].max(f[1])))
}

/// Bisects in `theta` between a slice where a pair of folds near
/// `[pa, pb]` is present and one where it is absent. The sweep may miss a
/// narrow pair, so absence is first confirmed with finer steps, moving the
/// bracket outward while the pair persists. Returns the merge point
/// `(theta, P)` at the last slice where the pair was seen.
fn refine_merge<S: System<f64>>(
    model: &S,
    name: &str,
    (mut t_abs, mut t_pres): (f64, f64),
    (pa, pb): (f64, f64),
    opts: &FlcOptions,
) -> Result<(f64, f64)> {
    let opts = &fine(opts);
    let window = |(a, b): (f64, f64)| {
        let m = 0.3 + 0.5 * (b - a).abs();
        (a.min(b) - m, a.max(b) + m)
    };
    let mut pair = (pa.min(pb), pa.max(pb));
    let (mut lo, mut hi) = window(pair);
    let n_pres = in_window(&fold_set(&with_theta(model, name, t_pres)?, opts), lo, hi).len().max(2);
    let step = t_abs - t_pres;
    let mut absent_folds = in_window(&fold_set(&with_theta(model, name, t_abs)?, opts), lo, hi);
    for _ in 0..8 {
        if absent_folds.len() < n_pres {
            break;
        }
        match nearest_pair(&absent_folds, 0.5 * (pair.0 + pair.1)) {
            Some(p) => pair = p,
            None => break,
        }
        t_pres = t_abs;
        t_abs += step;
        (lo, hi) = window(pair);
        absent_folds = in_window(&fold_set(&with_theta(model, name, t_abs)?, opts), lo, hi);
    }
    for _ in 0..opts.refine_steps {
        let mid = 0.5 * (t_abs + t_pres);
        let folds = in_window(&fold_set(&with_theta(model, name, mid)?, opts), lo, hi);
        let extra = unmatched(&folds, &absent_folds);
        if extra.len() >= 2 {
            t_pres = mid;
            let mut e = extra;
            e.sort_by(|a, b| a.partial_cmp(b).unwrap());
            pair = (e[0], e[1]);
            let (l, h) = window(pair);
            lo = lo.max(l);
            hi = hi.min(h);
        } else {
            t_abs = mid;
        }
    }
    Ok((t_pres, 0.5 * (pair.0 + pair.1)))
}

/// Bisects in `theta` for the end of a single fold curve at `p_last`,
/// present at `t_pres` and gone at `t_abs`.
fn refine_end<S: System<f64>>(model: &S, name: &str, (mut t_abs, mut t_pres): (f64, f64), p_last: f64, opts: &FlcOptions) -> Result<(f64, f64, f64)> {
    let opts = &fine(opts);
    let mut p = p_last;
    let mut period = f64::NAN;
    for _ in 0..opts.refine_steps {
        let mid = 0.5 * (t_abs + t_pres);
        let folds = fold_set(&with_theta(model, name, mid)?, opts);
        match folds.iter().min_by(|a, b| (a.p - p).abs().partial_cmp(&(b.p - p).abs()).unwrap()) {
            Some(f) if (f.p - p).abs() <= opts.max_jump => {
                t_pres = mid;
                p = f.p;
                period = f.period;
            }
            _ => t_abs = mid,
        }
    }
    Ok((t_pres, p, period))
}

/// Traces folds of cycles over the `theta` values (sorted ascending).
pub fn trace_flc_curve<S: System<f64>>(model: &S, theta_name: &str, thetas: &[f64], opts: &FlcOptions) -> Result<FlcReport> {
    model.param(theta_name)?;
    if thetas.len() < 2 {
        return Err(Error::Domain("need at least 2 slices".into()));
    }
    let mut ts = thetas.to_vec();
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let slices: Vec<FlcSlice> = ts
        .par_iter()
        .filter_map(|&t| match with_theta(model, theta_name, t) {
            Ok(m) => Some(FlcSlice { theta: t, folds: fold_set(&m, opts) }),
            Err(e) => {
                warn!("skipping slice {theta_name} = {t}: {e}");
                None
            }
        })
        .collect();

    let mut done: Vec<FlcCurve> = Vec::new();
    let mut active: Vec<FlcCurve> = Vec::new();
    // (t_absent, t_present, pa, pb) for pair merges
    let mut merges: Vec<(f64, f64, f64, f64, bool)> = Vec::new();
    // (t_absent, t_present, p, period) for single ends
    let mut ends: Vec<(f64, f64, f64, f64)> = Vec::new();
    for (k, sl) in slices.iter().enumerate() {
        let prev_p: Vec<f64> = active.iter().map(|c| c.samples.last().unwrap().1).collect();
        let next_p: Vec<f64> = sl.folds.iter().map(|f| f.p).collect();
        let al = align(&prev_p, &next_p, opts.max_jump);
        let births: Vec<usize> = al.iter().filter_map(|a| if a.0.is_none() { a.1 } else { None }).collect();
        let deaths: Vec<usize> = al.iter().filter_map(|a| if a.1.is_none() { a.0 } else { None }).collect();
        let mut prev: Vec<Option<FlcCurve>> = active.drain(..).map(Some).collect();
        let mut next = Vec::new();
        for (pi, ni) in &al {
            match (pi, ni) {
                (Some(i), Some(j)) => {
                    let mut c = prev[*i].take().unwrap();
                    c.samples.push((sl.theta, sl.folds[*j].p, sl.folds[*j].period));
                    next.push(c);
                }
                (Some(i), None) => {
                    let c = prev[*i].take().unwrap();
                    let &(t, p, per) = c.samples.last().unwrap();
                    if deaths.contains(&(i + 1)) {
                        let p2 = prev_p[i + 1];
                        merges.push((sl.theta, t, p, p2, true));
                    } else if !(*i > 0 && deaths.contains(&(i - 1))) {
                        ends.push((sl.theta, t, p, per));
                    }
                    done.push(c);
                }
                (None, Some(j)) => {
                    let f = sl.folds[*j];
                    if k > 0 {
                        let t_abs = slices[k - 1].theta;
                        if births.contains(&(j + 1)) {
                            merges.push((t_abs, sl.theta, f.p, sl.folds[j + 1].p, false));
                        } else if !(*j > 0 && births.contains(&(j - 1))) {
                            ends.push((t_abs, sl.theta, f.p, f.period));
                        }
                    }
                    next.push(FlcCurve { samples: vec![(sl.theta, f.p, f.period)] });
                }
                (None, None) => unreachable!(),
            }
        }
        active = next;
    }
    done.extend(active);

    let mut points = Vec::new();
    let input = model.input_name();
    for (t_abs, t_pres, pa, pb, dies) in merges {
        match refine_merge(model, theta_name, (t_abs, t_pres), (pa, pb), opts) {
            Ok((t, p)) => points.push(
                BifurcationPoint::new(BifKind::CuspOfCycles, &[theta_name, input])
                    .coord(theta_name, t)
                    .coord(input, p)
                    .diag("bracket_width", (t_pres - t_abs).abs() / (1u64 << opts.refine_steps) as f64)
                    .labelled(if dies { "CLC" } else { "E" }),
            ),
            Err(e) => warn!("merge refinement failed: {e}"),
        }
    }
    for (t_abs, t_pres, p, period) in ends {
        if !(period >= opts.blowup_period) {
            continue;
        }
        match refine_end(model, theta_name, (t_abs, t_pres), p, opts) {
            Ok((t, p, per)) => points.push(
                BifurcationPoint::new(BifKind::FoldOfCycles, &[theta_name, input])
                    .coord(theta_name, t)
                    .coord(input, p)
                    .diag("period", per)
                    .labelled("S"),
            ),
            Err(e) => warn!("end refinement failed: {e}"),
        }
    }
    points.sort_by(|a, b| a.get(theta_name).partial_cmp(&b.get(theta_name)).unwrap());
    Ok(FlcReport { theta_name: theta_name.to_string(), slices, curves: done, points })
}
