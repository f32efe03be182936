//! Two-parameter curves of saddle-node and Hopf equilibria over a plane
//! `(theta, P)`, traced slice by slice in `theta`, and the codimension-two and
//! three points found on them.

use log::warn;
use rayon::prelude::*;

use crate::bifpoint::{BifKind, BifurcationPoint};
use crate::equilibria::{
    analyze_hopf, analyze_saddle_node, hopf_test, locate_hopf, locate_saddle_nodes, model_at, scan_roots, sn_test,
    Codim1Tolerances,
};
use crate::error::{Error, Result};
use crate::linalg::roots::{dichotomy_solve, linspace, Bracket};
use crate::linalg::{det, newton_refine, Matrix, NewtonOptions};
use crate::model::System;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    SaddleNode,
    Hopf,
}

/// One point of a two-parameter curve. Fields that do not apply to the curve
/// kind are NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub theta: f64,
    pub p: f64,
    pub x: f64,
    pub omega: f64,
    pub l1: f64,
    pub transversality: f64,
    pub quadratic: f64,
    pub lambda2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// The curve starts inside the theta range.
    Birth,
    /// The curve ends inside the theta range.
    Death,
}

/// Curve endpoint inside the traced range. `paired` endpoints are folds in
/// `theta` where this curve meets its neighbour in `X`; their location is
/// refined to `theta`, `p`, `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveEvent {
    pub kind: EventKind,
    pub theta: f64,
    pub p: f64,
    pub x: f64,
    pub paired: bool,
    pub refined: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifCurve {
    pub kind: CurveKind,
    pub theta_name: String,
    pub input_name: String,
    pub samples: Vec<CurveSample>,
    pub events: Vec<CurveEvent>,
}

impl BifCurve {
    pub fn theta_span(&self) -> (f64, f64) {
        (self.samples.first().map_or(f64::NAN, |s| s.theta), self.samples.last().map_or(f64::NAN, |s| s.theta))
    }
}

/// Settings for [`trace_curve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    pub x_range: (f64, f64),
    pub n_x: usize,
    /// Largest `X` jump allowed between consecutive samples of one curve.
    pub max_jump: f64,
    pub tol: Codim1Tolerances,
}

impl TraceOptions {
    pub fn for_model<S: System<f64>>(model: &S) -> Self {
        let (lo, hi, n) = crate::equilibria::default_x_range(model.kind());
        TraceOptions { x_range: (lo, hi), n_x: n, max_jump: 0.6, tol: Codim1Tolerances::default() }
    }
}

fn slice_points<S: System<f64>>(model: &S, kind: CurveKind, grid: &[f64], tol: &Codim1Tolerances, theta: f64) -> Vec<CurveSample> {
    let nan = f64::NAN;
    match kind {
        CurveKind::SaddleNode => locate_saddle_nodes(model, grid, tol)
            .into_iter()
            .map(|i| CurveSample {
                theta,
                p: i.p,
                x: i.x,
                omega: nan,
                l1: nan,
                transversality: i.transversality,
                quadratic: i.quadratic,
                lambda2: i.lambda2,
            })
            .collect(),
        CurveKind::Hopf => locate_hopf(model, grid, tol)
            .into_iter()
            .map(|h| CurveSample {
                theta,
                p: h.p,
                x: h.x,
                omega: h.omega,
                l1: h.l1,
                transversality: h.transversality,
                quadratic: nan,
                lambda2: nan,
            })
            .collect(),
    }
}

/// Order-preserving alignment of two sorted abscissa lists. Returns pairs of
/// optional indices: `(Some(i), Some(j))` matches, `(Some(i), None)` a curve
/// ending, `(None, Some(j))` a curve starting.
pub(crate) fn align(prev: &[f64], next: &[f64], max_jump: f64) -> Vec<(Option<usize>, Option<usize>)> {
    let (n, m) = (prev.len(), next.len());
    let gap = max_jump;
    let mut cost = vec![vec![f64::INFINITY; m + 1]; n + 1];
    cost[0][0] = 0.0;
    for i in 0..=n {
        for j in 0..=m {
            let c = cost[i][j];
            if !c.is_finite() {
                continue;
            }
            if i < n && c + gap < cost[i + 1][j] {
                cost[i + 1][j] = c + gap;
            }
            if j < m && c + gap < cost[i][j + 1] {
                cost[i][j + 1] = c + gap;
            }
            if i < n && j < m {
                let d = (prev[i] - next[j]).abs();
                if d <= max_jump && c + d < cost[i + 1][j + 1] {
                    cost[i + 1][j + 1] = c + d;
                }
            }
        }
    }
    let mut out = Vec::new();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let c = cost[i][j];
        if i > 0 && j > 0 {
            let d = (prev[i - 1] - next[j - 1]).abs();
            if d <= max_jump && (cost[i - 1][j - 1] + d - c).abs() <= 1e-12 * (1.0 + c) {
                out.push((Some(i - 1), Some(j - 1)));
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && (cost[i - 1][j] + gap - c).abs() <= 1e-12 * (1.0 + c) {
            out.push((Some(i - 1), None));
            i -= 1;
        } else {
            out.push((None, Some(j - 1)));
            j -= 1;
        }
    }
    out.reverse();
    out
}

fn with_theta<S: System<f64>>(model: &S, name: &str, theta: f64) -> Result<S> {
    let mut m = model.clone();
    m.set_param(name, theta)?;
    Ok(m)
}

fn test_value<S: System<f64>>(model: &S, kind: CurveKind, x: f64) -> f64 {
    match kind {
        CurveKind::SaddleNode => sn_test(model, x),
        CurveKind::Hopf => hopf_test(model, x),
    }
}

/// Traces all curves of `kind` over `theta_range` (`n_theta` slices).
pub fn trace_curve<S: System<f64>>(
    model: &S,
    kind: CurveKind,
    theta_name: &str,
    theta_range: (f64, f64),
    n_theta: usize,
    opts: &TraceOptions,
) -> Result<Vec<BifCurve>> {
    model.param(theta_name)?;
    if n_theta < 2 {
        return Err(Error::Domain("need at least 2 theta slices".into()));
    }
    let (lo, hi) = if theta_range.0 <= theta_range.1 { theta_range } else { (theta_range.1, theta_range.0) };
    let thetas = linspace(lo, hi, n_theta);
    let grid = linspace(opts.x_range.0, opts.x_range.1, opts.n_x);
    let slices: Vec<Option<Vec<CurveSample>>> = thetas
        .par_iter()
        .map(|&t| match with_theta(model, theta_name, t) {
            Ok(m) => Some(slice_points(&m, kind, &grid, &opts.tol, t)),
            Err(e) => {
                warn!("skipping slice {theta_name} = {t}: {e}");
                None
            }
        })
        .collect();

    let input_name = model.input_name().to_string();
    let mut finished: Vec<BifCurve> = Vec::new();
    let mut active: Vec<BifCurve> = Vec::new();
    let mut prev_theta = f64::NAN;
    for (k, slice) in slices.into_iter().enumerate() {
        let Some(points) = slice else { continue };
        let prev_x: Vec<f64> = active.iter().map(|c| c.samples.last().unwrap().x).collect();
        let next_x: Vec<f64> = points.iter().map(|s| s.x).collect();
        let alignment = align(&prev_x, &next_x, opts.max_jump);
        let mut next_active = Vec::new();
        let mut prev_curves: Vec<Option<BifCurve>> = active.drain(..).map(Some).collect();
        let births: Vec<usize> = alignment.iter().filter_map(|a| if a.0.is_none() { a.1 } else { None }).collect();
        let deaths: Vec<usize> = alignment.iter().filter_map(|a| if a.1.is_none() { a.0 } else { None }).collect();
        for (pi, ni) in &alignment {
            match (pi, ni) {
                (Some(i), Some(j)) => {
                    let mut c = prev_curves[*i].take().unwrap();
                    c.samples.push(points[*j]);
                    next_active.push(c);
                }
                (Some(i), None) => {
                    let mut c = prev_curves[*i].take().unwrap();
                    let last = *c.samples.last().unwrap();
                    let paired = deaths.contains(&(i + 1)) || (*i > 0 && deaths.contains(&(i - 1)));
                    c.events.push(CurveEvent {
                        kind: EventKind::Death,
                        theta: 0.5 * (last.theta + thetas[k]),
                        p: last.p,
                        x: last.x,
                        paired,
                        refined: false,
                    });
                    finished.push(c);
                }
                (None, Some(j)) => {
                    let s = points[*j];
                    let mut events = Vec::new();
                    if k > 0 && prev_theta.is_finite() {
                        let paired = births.contains(&(j + 1)) || (*j > 0 && births.contains(&(j - 1)));
                        events.push(CurveEvent {
                            kind: EventKind::Birth,
                            theta: 0.5 * (prev_theta + s.theta),
                            p: s.p,
                            x: s.x,
                            paired,
                            refined: false,
                        });
                    }
                    next_active.push(BifCurve {
                        kind,
                        theta_name: theta_name.to_string(),
                        input_name: input_name.clone(),
                        samples: vec![s],
                        events,
                    });
                }
                (None, None) => unreachable!(),
            }
        }
        active = next_active;
        prev_theta = thetas[k];
    }
    finished.extend(active);
    finished.sort_by(|a, b| {
        a.samples[0].theta.partial_cmp(&b.samples[0].theta).unwrap().then(a.samples[0].x.partial_cmp(&b.samples[0].x).unwrap())
    });
    refine_fold_events(model, &mut finished, opts);
    Ok(finished)
}

/// Fold of the test function in `(X, theta)`: `T = 0`, `T_X = 0`.
fn fold_residual<S: System<f64>>(model: &S, kind: CurveKind, name: &str, x: f64, theta: f64) -> Result<[f64; 2]> {
    let m = with_theta(model, name, theta)?;
    let h = 1e-5 * (1.0 + x.abs());
    let t0 = test_value(&m, kind, x);
    let tp = test_value(&m, kind, x + h);
    let tm = test_value(&m, kind, x - h);
    let scale = t0.abs().max(tp.abs()).max(tm.abs()).max(1e-300);
    let _ = scale;
    Ok([t0, (tp - tm) / (2.0 * h)])
}

/// Locates the fold in `theta` where two roots of the test function merge,
/// given a slice interval `[t_absent, t_present]` (either order) and the two
/// abscissae present at `t_present`.
pub fn refine_fold<S: System<f64>>(
    model: &S,
    kind: CurveKind,
    name: &str,
    t_absent: f64,
    t_present: f64,
    xa: f64,
    xb: f64,
) -> Result<(f64, f64, f64)> {
    let (xl, xr) = (xa.min(xb), xa.max(xb));
    let window = |t: f64, xl: f64, xr: f64| -> Result<Vec<f64>> {
        let m = with_theta(model, name, t)?;
        let w = (xr - xl).max(0.02);
        let grid = linspace(xl - 0.75 * w, xr + 0.75 * w, 161);
        let f = |x: f64| test_value(&m, kind, x);
        Ok(scan_roots(&f, &grid, 1e-12))
    };
    let (mut ta, mut tp) = (t_absent, t_present);
    let (mut cl, mut cr) = (xl, xr);
    for _ in 0..40 {
        if (tp - ta).abs() < 1e-9 * (1.0 + tp.abs()) {
            break;
        }
        let mid = 0.5 * (ta + tp);
        let roots = window(mid, cl, cr)?;
        // the pair is the two roots closest to the previous pair centre
        let centre = 0.5 * (cl + cr);
        let mut near: Vec<f64> = roots.clone();
        near.sort_by(|a, b| (a - centre).abs().partial_cmp(&(b - centre).abs()).unwrap());
        if near.len() >= 2 && (near[0] - near[1]).abs() <= 2.0 * (cr - cl).max(0.02) {
            tp = mid;
            cl = near[0].min(near[1]);
            cr = near[0].max(near[1]);
        } else {
            ta = mid;
        }
    }
    let mut guess = [0.5 * (cl + cr), tp];
    let newton = newton_refine(
        |v: &[f64]| fold_residual(model, kind, name, v[0], v[1]).map(|r| r.to_vec()),
        None::<fn(&[f64]) -> Result<Matrix<f64>>>,
        &guess,
        NewtonOptions { tol: 1e-9, max_iter: 30, fd_step: 1e-6, ..Default::default() },
    );
    match newton {
        Ok(v) if (v[1] - tp).abs() <= (t_present - t_absent).abs() && (v[0] - guess[0]).abs() < 0.2 => {
            guess = [v[0], v[1]];
        }
        Ok(_) | Err(_) => {}
    }
    let m = with_theta(model, name, guess[1])?;
    let (_, p) = m.equilibrium(guess[0]);
    Ok((guess[1], p, guess[0]))
}

fn refine_fold_events<S: System<f64>>(model: &S, curves: &mut [BifCurve], opts: &TraceOptions) {
    // pair up endpoints: adjacent curves with paired events at the same theta cell
    let n = curves.len();
    let mut updates: Vec<(usize, usize, (f64, f64, f64))> = Vec::new();
    for a in 0..n {
        for (ea, ev) in curves[a].events.iter().enumerate() {
            if !ev.paired || ev.refined {
                continue;
            }
            // partner: another curve with a paired event of the same kind and theta cell
            let partner = (0..n).filter(|&b| b != a).find_map(|b| {
                curves[b]
                    .events
                    .iter()
                    .position(|e| e.paired && e.kind == ev.kind && (e.theta - ev.theta).abs() < 1e-12)
                    .filter(|_| (curves[b].samples[0].x - curves[a].samples[0].x).abs() < 10.0)
                    .map(|eb| (b, eb))
            });
            let Some((b, _eb)) = partner else { continue };
            if a > b {
                continue;
            }
            let (sa, sb) = match ev.kind {
                EventKind::Birth => (curves[a].samples[0], curves[b].samples[0]),
                EventKind::Death => (*curves[a].samples.last().unwrap(), *curves[b].samples.last().unwrap()),
            };
            if (sa.x - sb.x).abs() > 2.0 * opts.max_jump {
                continue;
            }
            let t_present = sa.theta;
            let t_absent = 2.0 * ev.theta - t_present;
            match refine_fold(model, curves[a].kind, &curves[a].theta_name, t_absent, t_present, sa.x, sb.x) {
                Ok(r) => {
                    updates.push((a, ea, r));
                    if let Some(eb) = curves[b].events.iter().position(|e| e.paired && e.kind == ev.kind && (e.theta - ev.theta).abs() < 1e-12) {
                        updates.push((b, eb, r));
                    }
                }
                Err(e) => warn!("fold refinement failed near {} = {}: {e}", curves[a].theta_name, ev.theta),
            }
        }
    }
    for (c, e, (theta, p, x)) in updates {
        let ev = &mut curves[c].events[e];
        ev.theta = theta;
        ev.p = p;
        ev.x = x;
        ev.refined = true;
    }
}

/// Folds of the curves in `theta` (two curves meeting), deduplicated. Each is
/// `(theta, p, x, kind)` with kind birth or death.
pub fn curve_folds(curves: &[BifCurve]) -> Vec<CurveEvent> {
    let mut out: Vec<CurveEvent> = Vec::new();
    for c in curves {
        for e in &c.events {
            if e.paired && !out.iter().any(|o| (o.theta - e.theta).abs() < 1e-9 && (o.x - e.x).abs() < 1e-6) {
                out.push(*e);
            }
        }
    }
    out.sort_by(|a, b| a.theta.partial_cmp(&b.theta).unwrap());
    out
}

/// Cusp points: folds of saddle-node curves in `theta`, where two saddle-nodes
/// merge and the quadratic coefficient vanishes.
pub fn detect_cusp<S: System<f64>>(model: &S, sn_curves: &[BifCurve]) -> Vec<BifurcationPoint> {
    let mut out = Vec::new();
    for ev in curve_folds(sn_curves).into_iter().filter(|e| e.refined) {
        let Some(c) = sn_curves.first() else { break };
        let name = c.theta_name.as_str();
        let Ok(m) = with_theta(model, name, ev.theta) else { continue };
        let mut bp = BifurcationPoint::new(BifKind::Cusp, &[name, &c.input_name])
            .coord(name, ev.theta)
            .coord(&c.input_name, ev.p)
            .coord("X", ev.x)
            .labelled("C");
        if let Ok(info) = analyze_saddle_node(&m, ev.x) {
            bp = bp.diag("quadratic_coefficient", info.quadratic).diag("transversality", info.transversality);
        }
        out.push(bp);
    }
    out
}

/// Trace of the adjugate, `sum of principal (n-1)-minors`: on a saddle-node
/// curve it equals the product of the nonzero eigenvalues and changes sign
/// when a second real eigenvalue crosses zero.
pub fn adjugate_trace(j: &Matrix<f64>) -> f64 {
    let n = j.rows();
    (0..n)
        .map(|k| {
            let rows: Vec<Vec<f64>> = (0..n)
                .filter(|&r| r != k)
                .map(|r| (0..n).filter(|&c| c != k).map(|c| j[(r, c)]).collect())
                .collect();
            det(&Matrix::from_rows(&rows))
        })
        .sum()
}

/// Saddle-node abscissa near `x_guess` for parameter `theta`.
fn relocate<S: System<f64>>(model: &S, kind: CurveKind, name: &str, theta: f64, x_guess: f64, width: f64) -> Result<(S, f64)> {
    let m = with_theta(model, name, theta)?;
    let f = |x: f64| test_value(&m, kind, x);
    let mut w = width;
    for _ in 0..6 {
        let grid = linspace(x_guess - w, x_guess + w, 41);
        let roots = scan_roots(&f, &grid, 1e-12);
        if let Some(r) = roots.into_iter().min_by(|a, b| (a - x_guess).abs().partial_cmp(&(b - x_guess).abs()).unwrap()) {
            return Ok((m, r));
        }
        w *= 2.0;
    }
    Err(Error::NumericalFailure(format!("curve lost near {name} = {theta}")))
}

fn bt_function<S: System<f64>>(model: &S, name: &str, theta: f64, x_guess: f64) -> Result<(f64, f64)> {
    let (m, x) = relocate(model, CurveKind::SaddleNode, name, theta, x_guess, 0.05)?;
    let (mm, s) = model_at(&m, x);
    Ok((adjugate_trace(&mm.jacobian(&s)), x))
}

/// Bogdanov–Takens points along saddle-node curves.
pub fn detect_bt<S: System<f64>>(model: &S, sn_curves: &[BifCurve]) -> Vec<BifurcationPoint> {
    let mut out = Vec::new();
    for c in sn_curves {
        let name = c.theta_name.as_str();
        // samples plus refined fold endpoints, where the curve meets its twin
        let mut nodes: Vec<(f64, f64)> = c.samples.iter().map(|s| (s.theta, s.x)).collect();
        let mut fixed = vec![false; nodes.len()];
        for e in c.events.iter().filter(|e| e.paired && e.refined) {
            match e.kind {
                EventKind::Birth => {
                    nodes.insert(0, (e.theta, e.x));
                    fixed.insert(0, true);
                }
                EventKind::Death => {
                    nodes.push((e.theta, e.x));
                    fixed.push(true);
                }
            }
        }
        let vals: Vec<f64> = nodes
            .iter()
            .zip(&fixed)
            .map(|(&(t, x), &f)| {
                if f {
                    with_theta(model, name, t)
                        .map(|m| {
                            let (mm, s) = model_at(&m, x);
                            adjugate_trace(&mm.jacobian(&s))
                        })
                        .unwrap_or(f64::NAN)
                } else {
                    bt_function(model, name, t, x).map(|v| v.0).unwrap_or(f64::NAN)
                }
            })
            .collect();
        for k in 0..nodes.len().saturating_sub(1) {
            let (a, b) = (vals[k], vals[k + 1]);
            if !(a.is_finite() && b.is_finite()) || (a > 0.0) == (b > 0.0) {
                continue;
            }
            let ((t0, x0), (t1, x1)) = (nodes[k], nodes[k + 1]);
            let xmid = std::sync::Mutex::new(if fixed[k] { x1 } else if fixed[k + 1] { x0 } else { 0.5 * (x0 + x1) });
            let f = |t: f64| {
                let guess = *xmid.lock().unwrap();
                match bt_function(model, name, t, guess) {
                    Ok((v, x)) => {
                        *xmid.lock().unwrap() = x;
                        v
                    }
                    Err(_) => f64::NAN,
                }
            };
            let Ok(br) = Bracket::new(t0, t1, a, b) else { continue };
            match dichotomy_solve(f, br, 1e-10, 0.0, 200) {
                Ok(t) => {
                    let x = *xmid.lock().unwrap();
                    let Ok((m, x)) = relocate(model, CurveKind::SaddleNode, name, t, x, 0.02) else { continue };
                    let mut bp = BifurcationPoint::new(BifKind::BogdanovTakens, &[name, &c.input_name])
                        .coord(name, t)
                        .coord(&c.input_name, m.equilibrium(x).1)
                        .coord("X", x)
                        .labelled("BT");
                    if let Ok(info) = analyze_saddle_node(&m, x) {
                        bp = bp.diag("lambda2", info.lambda2).diag("quadratic_coefficient", info.quadratic);
                    }
                    out.push(bp);
                }
                Err(e) => warn!("BT refinement failed: {e}"),
            }
        }
    }
    out
}

/// Bautin (generalised Hopf) points: sign changes of `l1` along Hopf curves.
pub fn detect_bautin<S: System<f64>>(model: &S, hopf_curves: &[BifCurve]) -> Vec<BifurcationPoint> {
    let tol = Codim1Tolerances::default();
    let mut out = Vec::new();
    for c in hopf_curves {
        let name = c.theta_name.as_str();
        for w in c.samples.windows(2) {
            let (s0, s1) = (w[0], w[1]);
            if !(s0.l1.is_finite() && s1.l1.is_finite()) || (s0.l1 > 0.0) == (s1.l1 > 0.0) {
                continue;
            }
            let xmid = std::sync::Mutex::new(0.5 * (s0.x + s1.x));
            let l1_at = |t: f64| -> Result<(f64, f64, f64, f64)> {
                let guess = *xmid.lock().unwrap();
                let (m, x) = relocate(model, CurveKind::Hopf, name, t, guess, 0.05)?;
                *xmid.lock().unwrap() = x;
                match analyze_hopf(&m, x, &tol)? {
                    Some(h) => Ok((h.l1, h.p, x, h.omega)),
                    None => Err(Error::NumericalFailure("Hopf pair lost".into())),
                }
            };
            let f = |t: f64| l1_at(t).map(|v| v.0).unwrap_or(f64::NAN);
            let Ok(br) = Bracket::new(s0.theta, s1.theta, s0.l1, s1.l1) else { continue };
            match dichotomy_solve(f, br, 1e-9, 0.0, 200) {
                Ok(t) => {
                    if let Ok((l1, p, x, omega)) = l1_at(t) {
                        out.push(
                            BifurcationPoint::new(BifKind::Bautin, &[name, &c.input_name])
                                .coord(name, t)
                                .coord(&c.input_name, p)
                                .coord("X", x)
                                .diag("l1", l1)
                                .diag("omega", omega)
                                .labelled("GH"),
                        );
                    }
                }
                Err(e) => warn!("Bautin refinement failed: {e}"),
            }
        }
    }
    out
}

/// Degenerate Bogdanov–Takens points: a cusp and a Bogdanov–Takens point lying
/// within `radius` of each other in every plane coordinate. Symmetric in its
/// two arguments.
pub fn detect_dbt(a: &[BifurcationPoint], b: &[BifurcationPoint], radius: f64) -> Vec<BifurcationPoint> {
    let all: Vec<&BifurcationPoint> = a.iter().chain(b.iter()).collect();
    let cusps: Vec<&&BifurcationPoint> = all.iter().filter(|p| p.kind == BifKind::Cusp).collect();
    let bts: Vec<&&BifurcationPoint> = all.iter().filter(|p| p.kind == BifKind::BogdanovTakens).collect();
    let mut out: Vec<BifurcationPoint> = Vec::new();
    for c in &cusps {
        for t in &bts {
            if c.plane != t.plane {
                continue;
            }
            let names = &c.plane.names;
            let close = names.iter().all(|n| match (c.get(n), t.get(n)) {
                (Some(u), Some(v)) => (u - v).abs() <= radius,
                _ => false,
            });
            if !close {
                continue;
            }
            let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
            let mut bp = BifurcationPoint::new(BifKind::DegenerateBt, &refs).labelled("DBT");
            for n in names {
                let (u, v) = (c.get(n).unwrap(), t.get(n).unwrap());
                bp = bp.coord(n, 0.5 * (u + v)).diag(&format!("cusp_{n}"), u).diag(&format!("bt_{n}"), v);
            }
            if let (Some(u), Some(v)) = (c.get("X"), t.get("X")) {
                bp = bp.coord("X", 0.5 * (u + v));
            }
            if !out.contains(&bp) {
                out.push(bp);
            }
        }
    }
    out
}

/// Curves and points of one parameter plane.
#[derive(Debug, Clone)]
pub struct PlaneReport {
    pub sn_curves: Vec<BifCurve>,
    pub hopf_curves: Vec<BifCurve>,
    pub points: Vec<BifurcationPoint>,
    /// Folds of the Hopf curves in `theta`.
    pub hopf_folds: Vec<CurveEvent>,
}

/// Traces both curve kinds over a plane and collects cusp, Bogdanov–Takens,
/// Bautin and degenerate Bogdanov–Takens points.
pub fn analyze_plane<S: System<f64>>(
    model: &S,
    theta_name: &str,
    theta_range: (f64, f64),
    n_theta: usize,
    opts: &TraceOptions,
    dbt_radius: f64,
) -> Result<PlaneReport> {
    let sn_curves = trace_curve(model, CurveKind::SaddleNode, theta_name, theta_range, n_theta, opts)?;
    let hopf_curves = trace_curve(model, CurveKind::Hopf, theta_name, theta_range, n_theta, opts)?;
    let mut points = detect_cusp(model, &sn_curves);
    points.extend(detect_bt(model, &sn_curves));
    points.extend(detect_bautin(model, &hopf_curves));
    let dbt = detect_dbt(&points, &[], dbt_radius);
    points.extend(dbt);
    let hopf_folds = curve_folds(&hopf_curves);
    Ok(PlaneReport { sn_curves, hopf_curves, points, hopf_folds })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alignment_birth_and_death() {
        let a = align(&[1.0, 3.0], &[1.05, 2.0, 2.1, 3.02], 0.3);
        assert_eq!(a, vec![(Some(0), Some(0)), (None, Some(1)), (None, Some(2)), (Some(1), Some(3))]);
        let d = align(&[1.0, 2.0, 2.1, 3.0], &[1.0, 3.0], 0.3);
        assert_eq!(d.iter().filter(|p| p.1.is_none()).count(), 2);
    }

    #[test]
    fn adjugate_trace_is_product_of_others_when_singular() {
        let j = Matrix::from_diag(&[0.0, -2.0, 3.0]);
        assert!((adjugate_trace(&j) + 6.0).abs() < 1e-12);
    }

    #[test]
    fn dbt_is_symmetric() {
        let c = BifurcationPoint::new(BifKind::Cusp, &["j", "P"]).coord("j", 6.14).coord("P", 4.04).coord("X", 3.4);
        let b = BifurcationPoint::new(BifKind::BogdanovTakens, &["j", "P"]).coord("j", 6.16).coord("P", 4.05).coord("X", 3.41);
        let ab = detect_dbt(&[c.clone()], &[b.clone()], 0.05);
        let ba = detect_dbt(&[b], &[c], 0.05);
        assert_eq!(ab.len(), 1);
        assert_eq!(ab, ba);
        assert!((ab[0].get("j").unwrap() - 6.15).abs() < 1e-12);
    }
}
