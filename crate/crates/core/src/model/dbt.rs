//! Planar normal form `x' = y`, `y' = x² + α + y(β + γx ± x³)`.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{ModelKind, System, VectorField};
use crate::scalar::Real;

pub const DBT_PARAM_NAMES: &[&str] = &["alpha", "beta", "gamma", "sign"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DbtParams<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    /// `+1` or `-1`, the sign of the cubic term.
    pub sign: T,
}

impl<T: Real> Default for DbtParams<T> {
    fn default() -> Self {
        DbtParams { alpha: T::zero(), beta: T::zero(), gamma: T::one(), sign: T::one() }
    }
}

impl<T: Real> DbtParams<T> {
    pub fn validate(&self) -> Result<()> {
        if self.sign != T::one() && self.sign != -T::one() {
            return Err(Error::Domain(format!("sign must be +1 or -1, got {}", self.sign)));
        }
        if ![self.alpha, self.beta, self.gamma].iter().all(|v| v.is_finite()) {
            return Err(Error::Domain("non-finite normal-form coefficient".into()));
        }
        Ok(())
    }
}

impl<T: Real> VectorField<T> for DbtParams<T> {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, s: &[T], ds: &mut [T]) {
        let (x, y) = (s[0], s[1]);
        ds[0] = y;
        ds[1] = x * x + self.alpha + y * (self.beta + self.gamma * x + self.sign * x * x * x);
    }
}

impl<T: Real> System<T> for DbtParams<T> {
    fn kind(&self) -> ModelKind {
        ModelKind::Dbt
    }

    fn jacobian(&self, s: &[T]) -> Matrix<T> {
        let (x, y) = (s[0], s[1]);
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let mut m = Matrix::zeros(2, 2);
        m[(0, 1)] = T::one();
        m[(1, 0)] = two * x + y * (self.gamma + three * self.sign * x * x);
        m[(1, 1)] = self.beta + self.gamma * x + self.sign * x * x * x;
        m
    }

    fn input(&self) -> T {
        self.alpha
    }

    fn set_input(&mut self, a: T) {
        self.alpha = a;
    }

    fn input_equation(&self) -> usize {
        1
    }

    fn input_name(&self) -> &'static str {
        "alpha"
    }

    fn x_index(&self) -> usize {
        0
    }

    fn equilibrium(&self, x: T) -> (Vec<T>, T) {
        (vec![x, T::zero()], -x * x)
    }

    fn param(&self, name: &str) -> Result<T> {
        Ok(match name {
            "alpha" => self.alpha,
            "beta" => self.beta,
            "gamma" => self.gamma,
            "sign" => self.sign,
            _ => return Err(Error::UnknownParameter(name.to_string())),
        })
    }

    fn set_param(&mut self, name: &str, v: T) -> Result<()> {
        let mut next = *self;
        match name {
            "alpha" => next.alpha = v,
            "beta" => next.beta = v,
            "gamma" => next.gamma = v,
            "sign" => next.sign = v,
            _ => return Err(Error::UnknownParameter(name.to_string())),
        }
        next.validate()?;
        *self = next;
        Ok(())
    }

    fn param_names(&self) -> &'static [&'static str] {
        DBT_PARAM_NAMES
    }
}
