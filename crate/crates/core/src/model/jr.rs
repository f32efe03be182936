//! Reduced Jansen–Rit model in six dimensions, state `(Y0, X, Y2, Y3, Y4, Y5)`.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::sigmoid::{sig, sig_prime, sigm_physical};
use crate::model::{ModelKind, System, VectorField};
use crate::scalar::Real;

pub const JR_DIM: usize = 6;
pub const JR_PARAM_NAMES: &[&str] =
    &["j", "G", "d", "alpha1", "alpha2", "alpha3", "alpha4", "k0", "ln_k0", "P"];

/// Dimensionless Jansen–Rit parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JrParams<T> {
    /// Scaled connectivity.
    pub j: T,
    /// Inhibitory/excitatory PSP amplitude ratio `B/A`.
    pub g: T,
    /// Rate ratio `b/a`.
    pub d: T,
    pub alpha: [T; 4],
    /// Sigmoid offset `e^{r v0}`.
    pub k0: T,
    /// Scaled input.
    pub p: T,
}

impl<T: Real> Default for JrParams<T> {
    fn default() -> Self {
        reduce_jr(&PhysicalJrParams::default())
    }
}

impl<T: Real> JrParams<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Domain(format!("invalid JR parameter: {what}")));
        if !(self.j >= T::zero()) {
            return bad("j must be >= 0");
        }
        if !(self.g > T::zero()) {
            return bad("G must be > 0");
        }
        if !(self.d > T::zero()) {
            return bad("d must be > 0");
        }
        if !(self.k0 > T::zero()) {
            return bad("k0 must be > 0");
        }
        if self.alpha.iter().chain([self.p].iter()).any(|x| !x.is_finite()) {
            return bad("non-finite value");
        }
        Ok(())
    }
}

/// Physical Jansen–Rit parameters (mV, s⁻¹).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalJrParams<T> {
    /// Excitatory PSP amplitude `A`.
    pub amp_a: T,
    /// Inhibitory PSP amplitude `B`.
    pub amp_b: T,
    /// Excitatory rate constant `a`.
    pub rate_a: T,
    /// Inhibitory rate constant `b`.
    pub rate_b: T,
    pub alpha: [T; 4],
    /// Mean synapse count `J`.
    pub n_syn: T,
    pub v0: T,
    pub r: T,
    pub nu_max: T,
    /// Input firing rate `p`.
    pub p: T,
}

impl<T: Real> Default for PhysicalJrParams<T> {
    fn default() -> Self {
        PhysicalJrParams {
            amp_a: T::lit(3.25),
            amp_b: T::lit(22.0),
            rate_a: T::lit(100.0),
            rate_b: T::lit(50.0),
            alpha: [T::lit(1.0), T::lit(0.8), T::lit(0.25), T::lit(0.25)],
            n_syn: T::lit(135.0),
            v0: T::lit(6.0),
            r: T::lit(0.56),
            nu_max: T::lit(5.0),
            p: T::zero(),
        }
    }
}

impl<T: Real> PhysicalJrParams<T> {
    pub fn validate(&self) -> Result<()> {
        let z = T::zero();
        let ok = self.rate_a > z
            && self.rate_b > z
            && self.r > z
            && self.nu_max > z
            && self.amp_a > z
            && self.amp_b > z
            && self.n_syn >= z
            && self.alpha.iter().all(|&a| a >= z && a <= T::one());
        if ok {
            Ok(())
        } else {
            Err(Error::Domain("invalid physical JR parameters".into()))
        }
    }

    /// Scaled input `P` matching a physical input rate `p`.
    pub fn scaled_input(&self, p: T) -> T {
        self.r * self.amp_a * p / self.rate_a
    }
}

pub fn reduce_jr<T: Real>(ph: &PhysicalJrParams<T>) -> JrParams<T> {
    JrParams {
        j: ph.r * ph.amp_a * ph.nu_max * ph.n_syn / ph.rate_a,
        g: ph.amp_b / ph.amp_a,
        d: ph.rate_b / ph.rate_a,
        alpha: ph.alpha,
        k0: (ph.r * ph.v0).exp(),
        p: ph.scaled_input(ph.p),
    }
}

/// Physical state `(y0..y5)` to reduced state.
pub fn jr_to_reduced<T: Real>(ph: &PhysicalJrParams<T>, y: &[T]) -> Vec<T> {
    let (jr, r, a) = (ph.n_syn * ph.r, ph.r, ph.rate_a);
    vec![jr * y[0], r * (y[1] - y[2]), r * y[2], jr * y[3] / a, r * y[4] / a, r * y[5] / a]
}

/// Reduced state to physical state `(y0..y5)`.
pub fn jr_to_physical<T: Real>(ph: &PhysicalJrParams<T>, s: &[T]) -> Vec<T> {
    let (jr, r, a) = (ph.n_syn * ph.r, ph.r, ph.rate_a);
    let y2 = s[2] / r;
    vec![s[0] / jr, s[1] / r + y2, y2, a * s[3] / jr, a * s[4] / r, a * s[5] / r]
}

impl<T: Real> VectorField<T> for JrParams<T> {
    fn dim(&self) -> usize {
        JR_DIM
    }

    fn eval(&self, x: &[T], dx: &mut [T]) {
        let two = T::lit(2.0);
        let [a1, a2, a3, a4] = self.alpha;
        let (j, d, k0) = (self.j, self.d, self.k0);
        dx[0] = x[3];
        dx[1] = x[4] - x[5];
        dx[2] = x[5];
        dx[3] = j * sig(x[1], k0) - two * x[3] - x[0];
        dx[4] = self.p + a2 * j * sig(a1 * x[0], k0) - two * x[4] - (x[2] + x[1]);
        dx[5] = d * a4 * self.g * j * sig(a3 * x[0], k0) - two * d * x[5] - d * d * x[2];
    }
}

impl<T: Real> System<T> for JrParams<T> {
    fn kind(&self) -> ModelKind {
        ModelKind::Jr
    }

    fn jacobian(&self, x: &[T]) -> Matrix<T> {
        let two = T::lit(2.0);
        let one = T::one();
        let [a1, a2, a3, a4] = self.alpha;
        let (j, d, k0) = (self.j, self.d, self.k0);
        let mut m = Matrix::zeros(JR_DIM, JR_DIM);
        m[(0, 3)] = one;
        m[(1, 4)] = one;
        m[(1, 5)] = -one;
        m[(2, 5)] = one;
        m[(3, 0)] = -one;
        m[(3, 1)] = j * sig_prime(x[1], k0);
        m[(3, 3)] = -two;
        m[(4, 0)] = a2 * a1 * j * sig_prime(a1 * x[0], k0);
        m[(4, 1)] = -one;
        m[(4, 2)] = -one;
        m[(4, 4)] = -two;
        m[(5, 0)] = d * a4 * self.g * j * a3 * sig_prime(a3 * x[0], k0);
        m[(5, 2)] = -d * d;
        m[(5, 5)] = -two * d;
        m
    }

    fn input(&self) -> T {
        self.p
    }

    fn set_input(&mut self, p: T) {
        self.p = p;
    }

    fn input_equation(&self) -> usize {
        4
    }

    fn equilibrium(&self, x: T) -> (Vec<T>, T) {
        let [a1, a2, a3, a4] = self.alpha;
        let (j, k0) = (self.j, self.k0);
        let y0 = j * sig(x, k0);
        let y2 = a4 * self.g / self.d * j * sig(a3 * y0, k0);
        let p = x + y2 - a2 * j * sig(a1 * y0, k0);
        let z = T::zero();
        (vec![y0, x, y2, z, z, z], p)
    }

    fn param(&self, name: &str) -> Result<T> {
        Ok(match name {
            "j" => self.j,
            "G" => self.g,
            "d" => self.d,
            "alpha1" => self.alpha[0],
            "alpha2" => self.alpha[1],
            "alpha3" => self.alpha[2],
            "alpha4" => self.alpha[3],
            "k0" => self.k0,
            "ln_k0" => self.k0.ln(),
            "P" => self.p,
            _ => return Err(Error::UnknownParameter(name.to_string())),
        })
    }

    fn set_param(&mut self, name: &str, v: T) -> Result<()> {
        let mut next = *self;
        match name {
            "j" => next.j = v,
            "G" => next.g = v,
            "d" => next.d = v,
            "alpha1" => next.alpha[0] = v,
            "alpha2" => next.alpha[1] = v,
            "alpha3" => next.alpha[2] = v,
            "alpha4" => next.alpha[3] = v,
            "k0" => next.k0 = v,
            "ln_k0" => next.k0 = v.exp(),
            "P" => next.p = v,
            _ => return Err(Error::UnknownParameter(name.to_string())),
        }
        next.validate()?;
        *self = next;
        Ok(())
    }

    fn param_names(&self) -> &'static [&'static str] {
        JR_PARAM_NAMES
    }
}

/// The original six-dimensional physical system in seconds, state `(y0..y5)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JrOriginal<T>(pub PhysicalJrParams<T>);

impl<T: Real> VectorField<T> for JrOriginal<T> {
    fn dim(&self) -> usize {
        JR_DIM
    }

    fn eval(&self, y: &[T], dy: &mut [T]) {
        let p = &self.0;
        let two = T::lit(2.0);
        let (a, b) = (p.rate_a, p.rate_b);
        let s = |v: T| sigm_physical(v, p.nu_max, p.r, p.v0);
        let jj = |i: usize| p.alpha[i] * p.n_syn;
        dy[0] = y[3];
        dy[1] = y[4];
        dy[2] = y[5];
        dy[3] = p.amp_a * a * s(y[1] - y[2]) - two * a * y[3] - a * a * y[0];
        dy[4] = p.amp_a * a * (p.p + jj(1) * s(jj(0) * y[0])) - two * a * y[4] - a * a * y[1];
        dy[5] = p.amp_b * b * jj(3) * s(jj(2) * y[0]) - two * b * y[5] - b * b * y[2];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values_reduce_to_defaults() {
        let p: JrParams<f64> = reduce_jr(&PhysicalJrParams::default());
        assert!((p.j - 12.285).abs() < 1e-12);
        assert!((p.g - 6.7692).abs() < 1e-4);
        assert!((p.d - 0.5).abs() < 1e-15);
        assert!((p.k0.ln() - 3.36).abs() < 1e-12);
        assert_eq!(p.p, 0.0);
    }

    #[test]
    fn state_maps_round_trip() {
        let ph = PhysicalJrParams::<f64>::default();
        let y = vec![0.01, 7.5, 12.0, -0.3, 40.0, -12.0];
        let back = jr_to_physical(&ph, &jr_to_reduced(&ph, &y));
        for (a, b) in y.iter().zip(&back) {
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn equilibrium_zeroes_field() {
        let mut p = JrParams::<f64>::default();
        for k in -40..=60 {
            let x = k as f64 * 0.3;
            let (s, pin) = p.equilibrium(x);
            p.p = pin;
            let f = p.eval_vec(&s);
            assert!(f.iter().all(|v| v.abs() <= 1e-10), "X = {x}: {f:?}");
        }
    }

    #[test]
    fn y0_at_zero() {
        let p = JrParams::<f64>::default();
        let (s, _) = p.equilibrium(0.0);
        assert!((s[0] - 12.285 / (1.0 + 3.36f64.exp())).abs() < 1e-14);
        assert!((s[0] - 0.412398).abs() < 1e-6);
    }

    #[test]
    fn far_left_spectrum() {
        let p = JrParams::<f64>::default();
        let (s, _) = p.equilibrium(-60.0);
        let sp = crate::linalg::eigen(&p.jacobian(&s)).unwrap();
        let mut re: Vec<f64> = sp.values.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // -1 has multiplicity four (two Jordan blocks), -d multiplicity two
        for v in &re[..4] {
            assert!((v + 1.0).abs() < 1e-5);
        }
        for v in &re[4..] {
            assert!((v + 0.5).abs() < 1e-5);
        }
    }

    #[test]
    fn parameter_access() {
        let mut p = JrParams::<f64>::default();
        p.set_param("j", 14.0).unwrap();
        assert_eq!(p.param("j").unwrap(), 14.0);
        p.set_param("ln_k0", 2.0).unwrap();
        assert!((p.k0 - 2f64.exp()).abs() < 1e-12);
        assert!(matches!(p.set_param("q", 1.0), Err(Error::UnknownParameter(_))));
        assert!(p.set_param("d", -1.0).is_err());
        assert_eq!(p.d, 0.5);
    }
}
