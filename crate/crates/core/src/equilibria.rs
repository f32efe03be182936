//! Codimension-one analysis along the equilibrium manifold parametrized by `X`:
//! branch sweeps, saddle-node and Hopf detection, first Lyapunov coefficient.

use log::warn;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::bifpoint::{BifKind, BifurcationPoint};
use crate::error::{Error, Result};
use crate::linalg::diff::{bilinear_form, trilinear_form, B_STEP, C_STEP};
use crate::linalg::matrix::cdot;
use crate::linalg::roots::{brackets_from_values, dichotomy_solve, linspace};
use crate::linalg::{bialternate, det, eigen, eigenvector, left_eigenvector, Lu, Matrix, Spectrum};
use crate::model::{ModelKind, System};

/// Thresholds used by the codimension-one detectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Codim1Tolerances {
    /// Root location tolerance in `X`.
    pub xtol: f64,
    /// `|Re λ|` above which an eigenvalue counts as unstable.
    pub unstable_re: f64,
    /// Pure-imaginary pair and "other eigenvalues off the axis" threshold.
    pub imag_axis: f64,
    /// Smallest accepted Hopf frequency.
    pub omega_min: f64,
    /// Saddle-node transversality and quadratic coefficient must exceed this.
    pub sn_nondegenerate: f64,
    /// `|l1|` below this is reported as degenerate.
    pub l1_degenerate: f64,
}

impl Default for Codim1Tolerances {
    fn default() -> Self {
        Codim1Tolerances {
            xtol: 1e-12,
            unstable_re: 1e-9,
            imag_axis: 1e-6,
            omega_min: 1e-6,
            sn_nondegenerate: 1e-6,
            l1_degenerate: 1e-4,
        }
    }
}

/// Default abscissa sweep for a model.
pub fn default_x_range(kind: ModelKind) -> (f64, f64, usize) {
    match kind {
        ModelKind::Wc | ModelKind::WcPhysical => (-12.0, 25.0, 3000),
        ModelKind::Dbt => (-3.0, 3.0, 1201),
        _ => (-12.0, 20.0, 2000),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchSample {
    pub x: f64,
    pub p: f64,
    pub state: Vec<f64>,
    /// Empty when the eigensolver failed at this sample.
    pub eigenvalues: Vec<Complex64>,
    pub n_unstable: usize,
    pub stable: bool,
    pub flagged: bool,
}

/// Equilibria sampled along an `X` grid.
#[derive(Debug, Clone)]
pub struct EquilibriumBranch<S> {
    pub model: S,
    pub samples: Vec<BranchSample>,
}

impl<S: System<f64>> EquilibriumBranch<S> {
    pub fn xs(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.x).collect()
    }

    /// Indices `k` with `P'` changing sign between samples `k` and `k+1`.
    pub fn turning_points(&self) -> usize {
        let d: Vec<f64> = self.samples.windows(2).map(|w| w[1].p - w[0].p).collect();
        d.windows(2).filter(|w| (w[0] > 0.0) != (w[1] > 0.0)).count()
    }
}

/// The model with its input moved onto the equilibrium of abscissa `x`.
pub fn model_at<S: System<f64>>(model: &S, x: f64) -> (S, Vec<f64>) {
    let (state, p) = model.equilibrium(x);
    let mut m = model.clone();
    m.set_input(p);
    (m, state)
}

pub fn jacobian_at<S: System<f64>>(model: &S, x: f64) -> Matrix<f64> {
    let (m, s) = model_at(model, x);
    m.jacobian(&s)
}

/// Saddle-node test function `det J` along the manifold.
pub fn sn_test<S: System<f64>>(model: &S, x: f64) -> f64 {
    det(&jacobian_at(model, x))
}

/// Hopf test function `det(2J ⊙ I)` along the manifold.
pub fn hopf_test<S: System<f64>>(model: &S, x: f64) -> f64 {
    det(&bialternate(&jacobian_at(model, x)))
}

pub fn sweep_branch<S: System<f64>>(model: &S, x_range: (f64, f64), n_points: usize) -> Result<EquilibriumBranch<S>> {
    if n_points < 2 {
        return Err(Error::Domain("sweep needs at least 2 points".into()));
    }
    if !(x_range.0.is_finite() && x_range.1.is_finite() && x_range.0 < x_range.1) {
        return Err(Error::Domain(format!("invalid X range {:?}", x_range)));
    }
    let tol = Codim1Tolerances::default();
    let grid = linspace(x_range.0, x_range.1, n_points);
    let samples = grid
        .par_iter()
        .map(|&x| {
            let (m, state) = model_at(model, x);
            let p = m.input();
            match eigen(&m.jacobian(&state)) {
                Ok(sp) => {
                    let n_unstable = sp.n_unstable(tol.unstable_re);
                    BranchSample { x, p, state, eigenvalues: sp.values, n_unstable, stable: n_unstable == 0, flagged: false }
                }
                Err(e) => {
                    warn!("eigensolver failed at X = {x}: {e}");
                    BranchSample { x, p, state, eigenvalues: vec![], n_unstable: 0, stable: false, flagged: true }
                }
            }
        })
        .collect();
    Ok(EquilibriumBranch { model: model.clone(), samples })
}

/// Roots of `f` on `grid`: sign changes refined by dichotomy, plus a ×10 local
/// refinement of cells whose parabolic interpolant dips through zero (two roots
/// hidden in one cell).
pub fn scan_roots(f: &(dyn Fn(f64) -> f64 + Sync), grid: &[f64], xtol: f64) -> Vec<f64> {
    let values: Vec<f64> = grid.par_iter().map(|&x| f(x)).collect();
    roots_from_values(f, grid, &values, xtol)
}

pub fn roots_from_values(f: &(dyn Fn(f64) -> f64 + Sync), grid: &[f64], values: &[f64], xtol: f64) -> Vec<f64> {
    let mut brackets = brackets_from_values(grid, values);
    for k in 1..grid.len().saturating_sub(1) {
        let (a, b, c) = (values[k - 1], values[k], values[k + 1]);
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            continue;
        }
        let same = (a > 0.0) == (b > 0.0) && (b > 0.0) == (c > 0.0);
        if !same || b.abs() >= a.abs() || b.abs() >= c.abs() {
            continue;
        }
        // vertex of the parabola through the three samples (uniform spacing assumed locally)
        let curv = a - 2.0 * b + c;
        if curv == 0.0 {
            continue;
        }
        let vertex = b - (c - a).powi(2) / (8.0 * curv);
        if (vertex > 0.0) == (b > 0.0) && vertex.abs() > 0.05 * b.abs() {
            continue;
        }
        let fine = linspace(grid[k - 1], grid[k + 1], 21);
        let fv: Vec<f64> = fine.iter().map(|&x| f(x)).collect();
        brackets.extend(brackets_from_values(&fine, &fv));
    }
    let mut roots: Vec<f64> = brackets
        .into_par_iter()
        .filter_map(|b| dichotomy_solve(f, b, xtol, 0.0, 400).ok())
        .collect();
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() <= 10.0 * xtol.max(1e-12));
    roots
}

/// Real unit right null vector oriented with a positive `X` component, and the
/// left null vector scaled so that `<w, v> = 1`.
pub fn null_vectors(j: &Matrix<f64>, lambda: f64, x_index: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let lam = Complex64::new(lambda, 0.0);
    let realify = |z: Vec<Complex64>| -> Vec<f64> {
        let v: Vec<f64> = z.iter().map(|c| c.re).collect();
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v.into_iter().map(|a| a / n).collect()
    };
    let mut v = realify(eigenvector(j, lam)?);
    if v[x_index] < 0.0 {
        v.iter_mut().for_each(|a| *a = -*a);
    }
    let w = realify(left_eigenvector(j, lam)?);
    let wv: f64 = w.iter().zip(&v).map(|(a, b)| a * b).sum();
    if wv.abs() < 1e-14 {
        return Err(Error::NumericalFailure("left and right null vectors are orthogonal".into()));
    }
    Ok((v, w.into_iter().map(|a| a / wv).collect()))
}

/// Signed real eigenvalue closest to zero other than the one at `skip`.
pub fn second_real_eigenvalue(sp: &Spectrum<f64>, skip: usize, imag_tol: f64) -> f64 {
    sp.values
        .iter()
        .enumerate()
        .filter(|(i, z)| *i != skip && z.im.abs() <= imag_tol)
        .min_by(|a, b| a.1.re.abs().partial_cmp(&b.1.re.abs()).unwrap())
        .map(|(_, z)| z.re)
        .unwrap_or(f64::NAN)
}

/// Saddle-node data at a root of `det J`.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleNodeInfo {
    pub x: f64,
    pub p: f64,
    /// `<w, ∂f/∂P>`.
    pub transversality: f64,
    /// `<w, D²f(v, v)>`.
    pub quadratic: f64,
    pub lambda: f64,
    /// Second real eigenvalue nearest zero (signed), NaN if none.
    pub lambda2: f64,
    pub simple: bool,
}

pub fn analyze_saddle_node<S: System<f64>>(model: &S, x: f64) -> Result<SaddleNodeInfo> {
    let (m, state) = model_at(model, x);
    let j = m.jacobian(&state);
    let sp = eigen(&j)?;
    let idx = sp.nearest(Complex64::new(0.0, 0.0));
    let lambda = sp.values[idx].re;
    let simple = sp.is_simple(idx, 1e-6 * (1.0 + j.norm_inf()));
    let (v, w) = null_vectors(&j, lambda, m.x_index())?;
    let transversality = w[m.input_equation()];
    let field = |y: &[f64]| Ok(m.eval_vec(y));
    let bvv = bilinear_form(field, &state, &v, &v, B_STEP)?;
    let quadratic = w.iter().zip(&bvv).map(|(a, b)| a * b).sum();
    Ok(SaddleNodeInfo {
        x,
        p: m.input(),
        transversality,
        quadratic,
        lambda,
        lambda2: second_real_eigenvalue(&sp, idx, 1e-9),
        simple,
    })
}

impl SaddleNodeInfo {
    pub fn to_point(&self, plane: &[&str], extra: &[(&str, f64)], input: &str, tol: &Codim1Tolerances) -> BifurcationPoint {
        let mut bp = BifurcationPoint::new(BifKind::SaddleNode, plane);
        for (k, v) in extra {
            bp = bp.coord(k, *v);
        }
        bp = bp
            .coord(input, self.p)
            .coord("X", self.x)
            .diag("transversality", self.transversality)
            .diag("quadratic_coefficient", self.quadratic)
            .diag("lambda", self.lambda)
            .diag("lambda2", self.lambda2);
        if !self.simple {
            bp = bp.warn("zero eigenvalue is not simple");
        }
        if self.transversality.abs() <= tol.sn_nondegenerate || self.quadratic.abs() <= tol.sn_nondegenerate {
            bp = bp.diag("degenerate", 1.0).warn("degenerate saddle-node (cusp or Bogdanov-Takens candidate)");
        }
        bp
    }
}

/// Hopf data at a root of the bialternate determinant.
#[derive(Debug, Clone, PartialEq)]
pub struct HopfInfo {
    pub x: f64,
    pub p: f64,
    pub omega: f64,
    pub l1: f64,
    /// `d Re λ / dP` along the branch.
    pub transversality: f64,
    pub warnings: Vec<String>,
}

impl HopfInfo {
    pub fn kind(&self, tol: &Codim1Tolerances) -> BifKind {
        if self.l1.abs() < tol.l1_degenerate {
            BifKind::HopfDegenerate
        } else if self.l1 < 0.0 {
            BifKind::HopfSupercritical
        } else {
            BifKind::HopfSubcritical
        }
    }

    pub fn to_point(&self, plane: &[&str], extra: &[(&str, f64)], input: &str, tol: &Codim1Tolerances) -> BifurcationPoint {
        let mut bp = BifurcationPoint::new(self.kind(tol), plane);
        for (k, v) in extra {
            bp = bp.coord(k, *v);
        }
        bp = bp
            .coord(input, self.p)
            .coord("X", self.x)
            .diag("omega", self.omega)
            .diag("l1", self.l1)
            .diag("transversality", self.transversality);
        for w in &self.warnings {
            bp = bp.warn(w.clone());
        }
        bp
    }
}

/// Index of the critical pair member with positive imaginary part, if the
/// spectrum has a genuine pure-imaginary pair and nothing else on the axis.
pub fn critical_pair(sp: &Spectrum<f64>, tol: &Codim1Tolerances) -> Option<usize> {
    let idx = sp
        .values
        .iter()
        .enumerate()
        .filter(|(_, z)| z.im > tol.omega_min)
        .min_by(|a, b| a.1.re.abs().partial_cmp(&b.1.re.abs()).unwrap())
        .map(|(i, _)| i)?;
    let z = sp.values[idx];
    if z.re.abs() > tol.imag_axis {
        return None;
    }
    let others_off_axis = sp
        .values
        .iter()
        .all(|w| (w - z).norm() < 1e-12 || (w - z.conj()).norm() < 1e-12 || w.re.abs() > tol.imag_axis);
    others_off_axis.then_some(idx)
}

pub fn analyze_hopf<S: System<f64>>(model: &S, x: f64, tol: &Codim1Tolerances) -> Result<Option<HopfInfo>> {
    let (m, state) = model_at(model, x);
    let j = m.jacobian(&state);
    let sp = eigen(&j)?;
    let Some(idx) = critical_pair(&sp, tol) else {
        return Ok(None);
    };
    let omega = sp.values[idx].im;
    let lyap = first_lyapunov(&m, &state, omega)?;
    // transversality along the branch
    let h = 1e-5;
    let re_at = |xx: f64| -> Result<(f64, f64)> {
        let (mm, ss) = model_at(model, xx);
        let s = eigen(&mm.jacobian(&ss))?;
        let k = s.nearest(Complex64::new(0.0, omega));
        Ok((s.values[k].re, mm.input()))
    };
    let (rp, pp) = re_at(x + h)?;
    let (rm, pm) = re_at(x - h)?;
    let transversality = (rp - rm) / (pp - pm);
    let mut warnings = lyap.warnings;
    if transversality.abs() <= 1e-6 {
        warnings.push("Hopf transversality is close to zero".into());
    }
    Ok(Some(HopfInfo { x, p: m.input(), omega, l1: lyap.l1, transversality, warnings }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovReport {
    pub l1: f64,
    pub warnings: Vec<String>,
}

/// First Lyapunov coefficient at a Hopf equilibrium `x_star` with frequency
/// `omega`, from the projection formula with critical eigenvectors normalised
/// by `<q, q> = 1`, `<p, q> = 1`. Multilinear forms come from finite
/// differences of the field.
pub fn first_lyapunov<S: System<f64>>(model: &S, x_star: &[f64], omega: f64) -> Result<LyapunovReport> {
    if !(omega > 0.0) {
        return Err(Error::Domain("first Lyapunov coefficient needs omega > 0".into()));
    }
    let a = model.jacobian(x_star);
    let n = a.rows();
    let iw = Complex64::new(0.0, omega);
    let mut q = eigenvector(&a, iw)?;
    let qn = cdot(&q, &q).re.sqrt();
    q.iter_mut().for_each(|z| *z /= qn);
    let mut p = left_eigenvector(&a, iw.conj())?;
    let s = cdot(&p, &q);
    p.iter_mut().for_each(|z| *z /= s.conj());

    let mut warnings = Vec::new();
    if let Ok(sp) = eigen(&a) {
        let near_zero = sp.values.iter().any(|z| z.norm() < 1e-4);
        let near_2w = sp.values.iter().any(|z| (z - 2.0 * iw).norm() < 1e-4 || (z + 2.0 * iw).norm() < 1e-4);
        if near_zero || near_2w {
            warnings.push("near-resonant spectrum at Hopf point".to_string());
        }
    }

    let re: Vec<f64> = q.iter().map(|z| z.re).collect();
    let im: Vec<f64> = q.iter().map(|z| z.im).collect();
    let f = |y: &[f64]| Ok(model.eval_vec(y));
    let b = |u: &[f64], v: &[f64]| bilinear_form(f, x_star, u, v, B_STEP);
    let c = |u: &[f64], v: &[f64], w: &[f64]| trilinear_form(f, x_star, u, v, w, C_STEP);
    let cx = |r: Vec<f64>, i: Vec<f64>| -> Vec<Complex64> { r.into_iter().zip(i).map(|(a, b)| Complex64::new(a, b)).collect() };
    let add = |a: &[f64], b: &[f64], s: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + s * y).collect() };

    let baa = b(&re, &re)?;
    let bbb = b(&im, &im)?;
    let bab = b(&re, &im)?;
    let b_qqbar = add(&baa, &bbb, 1.0);
    let b_qq = cx(add(&baa, &bbb, -1.0), bab.iter().map(|v| 2.0 * v).collect());
    let caaa = c(&re, &re, &re)?;
    let cabb = c(&re, &im, &im)?;
    let caab = c(&re, &re, &im)?;
    let cbbb = c(&im, &im, &im)?;
    let c_qqqbar = cx(add(&caaa, &cabb, 1.0), add(&caab, &cbbb, 1.0));

    let lu = Lu::new(&a);
    if lu.is_singular() {
        return Err(Error::NumericalFailure("singular Jacobian at Hopf point".into()));
    }
    let h1 = lu.solve(&b_qqbar)?;
    let mut shifted = a.to_complex().scale(Complex64::new(-1.0, 0.0));
    for i in 0..n {
        shifted[(i, i)] += 2.0 * iw;
    }
    let h2 = Lu::new(&shifted).solve(&b_qq)?;

    let b_q_h1 = cx(b(&re, &h1)?, b(&im, &h1)?);
    let h2r: Vec<f64> = h2.iter().map(|z| z.re).collect();
    let h2i: Vec<f64> = h2.iter().map(|z| z.im).collect();
    let (bac, bbd, bad, bbc) = (b(&re, &h2r)?, b(&im, &h2i)?, b(&re, &h2i)?, b(&im, &h2r)?);
    let b_qbar_h2 = cx(add(&bac, &bbd, 1.0), add(&bad, &bbc, -1.0));

    let total = cdot(&p, &c_qqqbar) - 2.0 * cdot(&p, &b_q_h1) + cdot(&p, &b_qbar_h2);
    Ok(LyapunovReport { l1: total.re / (2.0 * omega), warnings })
}

/// Saddle-node points along the branch grid.
pub fn detect_saddle_nodes<S: System<f64>>(branch: &EquilibriumBranch<S>) -> Vec<BifurcationPoint> {
    let tol = Codim1Tolerances::default();
    locate_saddle_nodes(&branch.model, &branch.xs(), &tol)
        .iter()
        .map(|i| i.to_point(&[branch.model.input_name()], &[], branch.model.input_name(), &tol))
        .collect()
}

pub fn locate_saddle_nodes<S: System<f64>>(model: &S, grid: &[f64], tol: &Codim1Tolerances) -> Vec<SaddleNodeInfo> {
    let f = |x: f64| sn_test(model, x);
    scan_roots(&f, grid, tol.xtol)
        .into_iter()
        .filter_map(|x| match analyze_saddle_node(model, x) {
            Ok(i) => Some(i),
            Err(e) => {
                warn!("saddle-node analysis failed at X = {x}: {e}");
                None
            }
        })
        .collect()
}

pub fn detect_hopf<S: System<f64>>(branch: &EquilibriumBranch<S>) -> Vec<BifurcationPoint> {
    let tol = Codim1Tolerances::default();
    locate_hopf(&branch.model, &branch.xs(), &tol)
        .iter()
        .map(|i| i.to_point(&[branch.model.input_name()], &[], branch.model.input_name(), &tol))
        .collect()
}

pub fn locate_hopf<S: System<f64>>(model: &S, grid: &[f64], tol: &Codim1Tolerances) -> Vec<HopfInfo> {
    let f = |x: f64| hopf_test(model, x);
    scan_roots(&f, grid, tol.xtol)
        .into_iter()
        .filter_map(|x| match analyze_hopf(model, x, tol) {
            Ok(h) => h,
            Err(e) => {
                warn!("Hopf analysis failed at X = {x}: {e}");
                None
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct Codim1Report<S> {
    pub branch: EquilibriumBranch<S>,
    /// Saddle-node and Hopf points ordered by the input parameter.
    pub points: Vec<BifurcationPoint>,
}

impl<S> Codim1Report<S> {
    pub fn count(&self, kind: BifKind) -> usize {
        self.points.iter().filter(|p| p.kind == kind).count()
    }

    pub fn hopf_count(&self) -> usize {
        self.points.iter().filter(|p| p.kind.is_hopf()).count()
    }
}

pub fn codim1_report<S: System<f64>>(model: &S, x_range: (f64, f64), n_points: usize) -> Result<Codim1Report<S>> {
    let branch = sweep_branch(model, x_range, n_points)?;
    let mut points = detect_saddle_nodes(&branch);
    points.extend(detect_hopf(&branch));
    let input = model.input_name();
    points.sort_by(|a, b| a.get(input).unwrap().partial_cmp(&b.get(input).unwrap()).unwrap());
    Ok(Codim1Report { branch, points })
}

/// Grid cells where the unstable count changes without a detected point in
/// between. Empty for a consistent report.
pub fn unexplained_stability_changes<S: System<f64>>(report: &Codim1Report<S>) -> Vec<(f64, f64)> {
    let xs: Vec<f64> = report.points.iter().filter_map(|p| p.get("X")).collect();
    report
        .branch
        .samples
        .windows(2)
        .filter(|w| !w[0].flagged && !w[1].flagged && w[0].n_unstable != w[1].n_unstable)
        .filter(|w| !xs.iter().any(|&x| x >= w[0].x - 1e-9 && x <= w[1].x + 1e-9))
        .map(|w| (w[0].x, w[1].x))
        .collect()
}
