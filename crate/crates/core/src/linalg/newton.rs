//! Damped Newton iteration for square nonlinear systems.

use crate::error::{Error, Result};
use crate::linalg::diff::fd_jacobian;
use crate::linalg::lu::Lu;
use crate::linalg::matrix::Matrix;

/// Settings for [`newton_refine`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Stop when the max-norm of the residual drops to this level.
    pub tol: f64,
    pub max_iter: usize,
    /// Number of step halvings tried when the residual grows.
    pub max_halvings: usize,
    /// Finite-difference step used when no Jacobian is supplied.
    pub fd_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: 1e-10, max_iter: 50, max_halvings: 12, fd_step: 1e-7 }
    }
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| if x.is_nan() { f64::INFINITY } else { m.max(x.abs()) })
}

/// Solves `F(x) = 0` from `x0`. When `jac` is `None` the Jacobian is
/// approximated by central differences.
pub fn newton_refine<F, J>(f: F, jac: Option<J>, x0: &[f64], opts: NewtonOptions) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
    J: Fn(&[f64]) -> Result<Matrix<f64>>,
{
    let mut x = x0.to_vec();
    let mut fx = f(&x)?;
    if fx.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: fx.len() });
    }
    let mut res = max_norm(&fx);
    for it in 0..=opts.max_iter {
        if res <= opts.tol {
            return Ok(x);
        }
        if it == opts.max_iter {
            break;
        }
        let jm = match &jac {
            Some(j) => j(&x)?,
            None => fd_jacobian(|y| f(y), &x, opts.fd_step)?,
        };
        let lu = Lu::new(&jm);
        if lu.is_singular() {
            return Err(Error::NumericalFailure(format!("singular Jacobian in Newton at iteration {it}")));
        }
        let dx = lu.solve(&fx)?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a - lambda * d).collect();
            if let Ok(ft) = f(&trial) {
                let rt = max_norm(&ft);
                if rt < res || rt <= opts.tol {
                    x = trial;
                    fx = ft;
                    res = rt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence { iterations: it + 1, residual: res, last: x });
        }
    }
    Err(Error::NoConvergence { iterations: opts.max_iter, residual: res, last: x })
}

#[cfg(test)]
mod tests {
    use super::*;

    type NoJac = fn(&[f64]) -> Result<Matrix<f64>>;

    #[test]
    fn scalar_square_root() {
        let x = newton_refine(|x| Ok(vec![x[0] * x[0] - 4.0]), None::<NoJac>, &[3.0], NewtonOptions {
            tol: 1e-12,
            ..Default::default()
        })
        .unwrap();
        assert!((x[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn linear_system_with_jacobian() {
        let jac = |_x: &[f64]| Ok(Matrix::<f64>::from_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]]));
        let x = newton_refine(
            |x| Ok(vec![x[0] + x[1] - 3.0, x[0] - x[1] - 1.0]),
            Some(jac),
            &[0.0, 0.0],
            NewtonOptions::default(),
        )
        .unwrap();
        assert!((x[0] - 2.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn no_root_reports_last_iterate() {
        let e = newton_refine(|x| Ok(vec![x[0] * x[0] + 1.0]), None::<NoJac>, &[0.5], NewtonOptions {
            max_iter: 20,
            ..Default::default()
        })
        .unwrap_err();
        assert!(matches!(e, Error::NoConvergence { .. } | Error::NumericalFailure(_)));
    }
}
