//! Finite-difference derivatives: Jacobians and the multilinear forms
//! `B(u, v) = D²f(x)[u, v]` and `C(u, v, w) = D³f(x)[u, v, w]`.

use crate::error::Result;
use crate::linalg::matrix::Matrix;

/// Default step for the second-order form.
pub const B_STEP: f64 = 1e-4;
/// Default step for the third-order form.
pub const C_STEP: f64 = 1e-3;

/// Central-difference Jacobian of `f` at `x`, step scaled by `1 + |x_j|`.
pub fn fd_jacobian<F>(f: F, x: &[f64], h: f64) -> Result<Matrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = x.len();
    let m = f(x)?.len();
    let mut jac = Matrix::zeros(m, n);
    let mut xp = x.to_vec();
    for j in 0..n {
        let step = h * (1.0 + x[j].abs());
        xp[j] = x[j] + step;
        let fp = f(&xp)?;
        xp[j] = x[j] - step;
        let fm = f(&xp)?;
        xp[j] = x[j];
        for i in 0..m {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * step);
        }
    }
    Ok(jac)
}

/// Central derivative of a scalar function.
pub fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

fn shifted(x: &[f64], dirs: &[(&[f64], f64)]) -> Vec<f64> {
    let mut y = x.to_vec();
    for (d, c) in dirs {
        for (yi, di) in y.iter_mut().zip(d.iter()) {
            *yi += c * di;
        }
    }
    y
}

fn bilinear_raw<F>(f: &F, x: &[f64], u: &[f64], v: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let pp = f(&shifted(x, &[(u, h), (v, h)]))?;
    let pm = f(&shifted(x, &[(u, h), (v, -h)]))?;
    let mp = f(&shifted(x, &[(u, -h), (v, h)]))?;
    let mm = f(&shifted(x, &[(u, -h), (v, -h)]))?;
    let s = 4.0 * h * h;
    Ok((0..pp.len()).map(|i| (pp[i] - pm[i] - mp[i] + mm[i]) / s).collect())
}

fn trilinear_raw<F>(f: &F, x: &[f64], u: &[f64], v: &[f64], w: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let mut acc: Option<Vec<f64>> = None;
    for &su in &[1.0, -1.0] {
        for &sv in &[1.0, -1.0] {
            for &sw in &[1.0, -1.0] {
                let y = f(&shifted(x, &[(u, su * h), (v, sv * h), (w, sw * h)]))?;
                let sign = su * sv * sw;
                let a = acc.get_or_insert_with(|| vec![0.0; y.len()]);
                for (ai, yi) in a.iter_mut().zip(y) {
                    *ai += sign * yi;
                }
            }
        }
    }
    let s = 8.0 * h * h * h;
    Ok(acc.unwrap_or_default().into_iter().map(|a| a / s).collect())
}

fn richardson(coarse: Vec<f64>, fine: Vec<f64>) -> Vec<f64> {
    coarse.iter().zip(fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect()
}

/// `D²f(x)[u, v]` with step `h` and one Richardson extrapolation.
pub fn bilinear_form<F>(f: F, x: &[f64], u: &[f64], v: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let coarse = bilinear_raw(&f, x, u, v, h)?;
    let fine = bilinear_raw(&f, x, u, v, h / 2.0)?;
    Ok(richardson(coarse, fine))
}

/// `D³f(x)[u, v, w]` with step `h` and one Richardson extrapolation.
pub fn trilinear_form<F>(f: F, x: &[f64], u: &[f64], v: &[f64], w: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let coarse = trilinear_raw(&f, x, u, v, w, h)?;
    let fine = trilinear_raw(&f, x, u, v, w, h / 2.0)?;
    Ok(richardson(coarse, fine))
}
