//! Vector fields, Jacobians, parameter reductions and equilibrium
//! parametrizations for the Jansen–Rit, Wendling–Chauvel and planar normal-form
//! models.

pub mod dbt;
pub mod jr;
pub mod sigmoid;
pub mod wc;

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

pub use dbt::DbtParams;
pub use jr::{jr_to_physical, jr_to_reduced, reduce_jr, JrOriginal, JrParams, PhysicalJrParams};
pub use sigmoid::{sigmoid, sigmoid_prime};
pub use wc::{reduce_wc, wc_to_physical, wc_to_reduced, PhysicalWcParams, WcOriginal, WcParams};

/// Autonomous right-hand side `x' = f(x)`.
pub trait VectorField<T: Real>: Send + Sync {
    fn dim(&self) -> usize;

    /// Writes `f(x)` into `dx`. Both slices have length [`VectorField::dim`].
    fn eval(&self, x: &[T], dx: &mut [T]);

    fn eval_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.dim(), "state dimension mismatch");
        let mut dx = vec![T::zero(); self.dim()];
        self.eval(x, &mut dx);
        dx
    }
}

/// A parametrized model with a scalar input entering one equation additively
/// with unit coefficient, and equilibria parametrized by one state coordinate.
pub trait System<T: Real>: VectorField<T> + Clone {
    fn kind(&self) -> ModelKind;

    /// Analytic Jacobian of the field at `x`.
    fn jacobian(&self, x: &[T]) -> Matrix<T>;

    /// Current value of the input parameter.
    fn input(&self) -> T;

    fn set_input(&mut self, p: T);

    /// Index of the equation the input enters (`∂f/∂P` is that unit vector).
    fn input_equation(&self) -> usize;

    /// Name of the input parameter.
    fn input_name(&self) -> &'static str {
        "P"
    }

    /// Index of the coordinate that parametrizes the equilibria.
    fn x_index(&self) -> usize {
        1
    }

    /// Equilibrium with the given abscissa and the input at which it exists.
    fn equilibrium(&self, x: T) -> (Vec<T>, T);

    fn param(&self, name: &str) -> Result<T>;

    /// Sets a named parameter, rejecting unknown names and invalid values.
    fn set_param(&mut self, name: &str, v: T) -> Result<()>;

    fn param_names(&self) -> &'static [&'static str];

    /// `∂f/∂P`.
    fn input_derivative(&self) -> Vec<T> {
        let mut v = vec![T::zero(); self.dim()];
        v[self.input_equation()] = T::one();
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Jr,
    Wc,
    Dbt,
    JrPhysical,
    WcPhysical,
}

impl ModelKind {
    /// Component names in state order.
    pub fn component_names(self) -> &'static [&'static str] {
        match self {
            ModelKind::Jr => &["Y0", "X", "Y2", "Y3", "Y4", "Y5"],
            ModelKind::Wc => &["Y0", "X", "Y2", "Y3", "Z", "Y5", "Y6", "Y7", "Y8", "Y9"],
            ModelKind::Dbt => &["x", "y"],
            ModelKind::JrPhysical => &["y0", "y1", "y2", "y3", "y4", "y5"],
            ModelKind::WcPhysical => &["y0", "y1", "y2", "y3", "y4", "y5", "y6", "y7", "y8", "y9"],
        }
    }

    pub fn dim(self) -> usize {
        self.component_names().len()
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Jr => "jr",
            ModelKind::Wc => "wc",
            ModelKind::Dbt => "dbt",
            ModelKind::JrPhysical => "jr-physical",
            ModelKind::WcPhysical => "wc-physical",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Phase-space point tagged with its model.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    pub kind: ModelKind,
    pub values: Vec<T>,
}

impl<T: Real> StateVector<T> {
    pub fn new(kind: ModelKind, values: Vec<T>) -> Result<Self> {
        if values.len() != kind.dim() {
            return Err(Error::DimensionMismatch { expected: kind.dim(), got: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("state has non-finite components".into()));
        }
        Ok(StateVector { kind, values })
    }

    pub fn get(&self, name: &str) -> Option<T> {
        self.kind.component_names().iter().position(|&n| n == name).map(|i| self.values[i])
    }
}

/// One of the three dimensionless models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model<T> {
    Jr(JrParams<T>),
    Wc(WcParams<T>),
    Dbt(DbtParams<T>),
}

macro_rules! dispatch {
    ($self:expr, $p:ident => $e:expr) => {
        match $self {
            Model::Jr($p) => $e,
            Model::Wc($p) => $e,
            Model::Dbt($p) => $e,
        }
    };
}

impl<T: Real> VectorField<T> for Model<T> {
    fn dim(&self) -> usize {
        dispatch!(self, p => p.dim())
    }

    fn eval(&self, x: &[T], dx: &mut [T]) {
        dispatch!(self, p => p.eval(x, dx))
    }
}

impl<T: Real> System<T> for Model<T> {
    fn kind(&self) -> ModelKind {
        dispatch!(self, p => p.kind())
    }

    fn jacobian(&self, x: &[T]) -> Matrix<T> {
        dispatch!(self, p => p.jacobian(x))
    }

    fn input(&self) -> T {
        dispatch!(self, p => p.input())
    }

    fn set_input(&mut self, v: T) {
        dispatch!(self, p => p.set_input(v))
    }

    fn input_equation(&self) -> usize {
        dispatch!(self, p => p.input_equation())
    }

    fn input_name(&self) -> &'static str {
        dispatch!(self, p => p.input_name())
    }

    fn x_index(&self) -> usize {
        dispatch!(self, p => p.x_index())
    }

    fn equilibrium(&self, x: T) -> (Vec<T>, T) {
        dispatch!(self, p => p.equilibrium(x))
    }

    fn param(&self, name: &str) -> Result<T> {
        dispatch!(self, p => p.param(name))
    }

    fn set_param(&mut self, name: &str, v: T) -> Result<()> {
        dispatch!(self, p => p.set_param(name, v))
    }

    fn param_names(&self) -> &'static [&'static str] {
        dispatch!(self, p => p.param_names())
    }
}

/// Names accepted by [`preset`].
pub const PRESET_NAMES: &[&str] = &["jr-default", "wc-default", "dbt-default"];

/// Named default parameter sets.
pub fn preset<T: Real>(name: &str) -> Result<Model<T>> {
    match name {
        "jr-default" | "jr" => Ok(Model::Jr(JrParams::default())),
        "wc-default" | "wc" => Ok(Model::Wc(WcParams::default())),
        "dbt-default" | "dbt" => Ok(Model::Dbt(DbtParams::default())),
        _ => Err(Error::Config { path: "preset".into(), msg: format!("unknown preset `{name}`") }),
    }
}
