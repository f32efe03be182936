//! Reduced Wendling–Chauvel model in ten dimensions, state
//! `(Y0, X, Y2, Y3, Z, Y5, Y6, Y7, Y8, Y9)`.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::jr::PhysicalJrParams;
use crate::model::sigmoid::{sig, sig_prime, sigm_physical};
use crate::model::{ModelKind, System, VectorField};
use crate::scalar::Real;

pub const WC_DIM: usize = 10;
pub const WC_PARAM_NAMES: &[&str] = &[
    "j", "P", "k0", "ln_k0", "alpha1", "alpha2", "alpha3", "alpha4", "alpha5", "alpha6", "alpha7", "G1", "G2",
    "d1", "d2",
];

/// Dimensionless Wendling–Chauvel parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WcParams<T> {
    pub j: T,
    pub p: T,
    pub k0: T,
    pub alpha: [T; 7],
    /// Slow inhibition amplitude ratio `B/A`.
    pub g1: T,
    /// Fast inhibition amplitude ratio `C/A`.
    pub g2: T,
    /// Slow inhibition rate ratio `b/a`.
    pub d1: T,
    /// Fast inhibition rate ratio `c/a`.
    pub d2: T,
}

impl<T: Real> Default for WcParams<T> {
    fn default() -> Self {
        reduce_wc(&PhysicalWcParams::default())
    }
}

impl<T: Real> WcParams<T> {
    pub fn validate(&self) -> Result<()> {
        let z = T::zero();
        if !(self.j >= z) {
            return Err(Error::Domain("invalid WC parameter: j must be >= 0".into()));
        }
        if !(self.g1 > z && self.g2 > z && self.d1 > z && self.d2 > z) {
            return Err(Error::Domain("invalid WC parameter: G1, G2, d1, d2 must be > 0".into()));
        }
        if !(self.k0 > z) {
            return Err(Error::Domain("invalid WC parameter: k0 must be > 0".into()));
        }
        if self.alpha[5] == z {
            return Err(Error::Domain("invalid WC parameter: alpha6 must be nonzero".into()));
        }
        if self.alpha.iter().chain([self.p].iter()).any(|x| !x.is_finite()) {
            return Err(Error::Domain("invalid WC parameter: non-finite value".into()));
        }
        Ok(())
    }
}

/// Physical Wendling–Chauvel parameters: the Jansen–Rit set plus the fast
/// inhibitory loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalWcParams<T> {
    pub base: PhysicalJrParams<T>,
    /// Fast inhibition amplitude `C`.
    pub amp_c: T,
    /// Fast inhibition rate `c`.
    pub rate_c: T,
    /// `alpha5`, `alpha6`, `alpha7`.
    pub alpha_fast: [T; 3],
}

impl<T: Real> Default for PhysicalWcParams<T> {
    fn default() -> Self {
        let base = PhysicalJrParams { rate_b: T::lit(1000.0 / 35.0), ..PhysicalJrParams::default() };
        PhysicalWcParams {
            base,
            amp_c: T::lit(20.0),
            rate_c: T::lit(200.0),
            alpha_fast: [T::lit(0.1), T::lit(0.1), T::lit(0.8)],
        }
    }
}

impl<T: Real> PhysicalWcParams<T> {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.amp_c > T::zero() && self.rate_c > T::zero() {
            Ok(())
        } else {
            Err(Error::Domain("invalid physical WC parameters".into()))
        }
    }
}

pub fn reduce_wc<T: Real>(ph: &PhysicalWcParams<T>) -> WcParams<T> {
    let b = &ph.base;
    let [a1, a2, a3, a4] = b.alpha;
    let [a5, a6, a7] = ph.alpha_fast;
    WcParams {
        j: b.r * b.amp_a * b.nu_max * b.n_syn / b.rate_a,
        p: b.scaled_input(b.p),
        k0: (b.r * b.v0).exp(),
        alpha: [a1, a2, a3, a4, a5, a6, a7],
        g1: b.amp_b / b.amp_a,
        g2: ph.amp_c / b.amp_a,
        d1: b.rate_b / b.rate_a,
        d2: ph.rate_c / b.rate_a,
    }
}

/// Physical state `(y0..y9)` to reduced state.
pub fn wc_to_reduced<T: Real>(ph: &PhysicalWcParams<T>, y: &[T]) -> Vec<T> {
    let b = &ph.base;
    let (jr, r, a) = (b.n_syn * b.r, b.r, b.rate_a);
    let [a5, a6, _] = ph.alpha_fast;
    vec![
        jr * y[0],
        r * (y[1] - y[2] - y[3]),
        r * y[2],
        r * y[3],
        a5 * jr * y[0] - a6 * jr * y[4],
        jr * y[5] / a,
        r * y[6] / a,
        r * y[7] / a,
        r * y[8] / a,
        jr * y[9] / a,
    ]
}

/// Reduced state to physical state `(y0..y9)`.
pub fn wc_to_physical<T: Real>(ph: &PhysicalWcParams<T>, s: &[T]) -> Vec<T> {
    let b = &ph.base;
    let (jr, r, a) = (b.n_syn * b.r, b.r, b.rate_a);
    let [a5, a6, _] = ph.alpha_fast;
    let y2 = s[2] / r;
    let y3 = s[3] / r;
    vec![
        s[0] / jr,
        s[1] / r + y2 + y3,
        y2,
        y3,
        (a5 * s[0] - s[4]) / (a6 * jr),
        a * s[5] / jr,
        a * s[6] / r,
        a * s[7] / r,
        a * s[8] / r,
        a * s[9] / jr,
    ]
}

impl<T: Real> VectorField<T> for WcParams<T> {
    fn dim(&self) -> usize {
        WC_DIM
    }

    fn eval(&self, x: &[T], dx: &mut [T]) {
        let two = T::lit(2.0);
        let [a1, a2, a3, a4, a5, a6, a7] = self.alpha;
        let (j, k0, d1, d2) = (self.j, self.k0, self.d1, self.d2);
        let s3 = sig(a3 * x[0], k0);
        dx[0] = x[5];
        dx[1] = x[6] - x[7] - x[8];
        dx[2] = x[7];
        dx[3] = x[8];
        dx[4] = a5 * x[5] - a6 * x[9];
        dx[5] = j * sig(x[1], k0) - two * x[5] - x[0];
        dx[6] = j * a2 * sig(a1 * x[0], k0) - two * x[6] - (x[1] + x[2] + x[3]) + self.p;
        dx[7] = j * d1 * self.g1 * a4 * s3 - two * d1 * x[7] - d1 * d1 * x[2];
        dx[8] = j * d2 * self.g2 * a7 * sig(x[4], k0) - two * d2 * x[8] - d2 * d2 * x[3];
        dx[9] = j * d1 * self.g1 * s3 - two * d1 * x[9] - d1 * d1 * (a5 * x[0] - x[4]) / a6;
    }
}

impl<T: Real> System<T> for WcParams<T> {
    fn kind(&self) -> ModelKind {
        ModelKind::Wc
    }

    fn jacobian(&self, x: &[T]) -> Matrix<T> {
        let two = T::lit(2.0);
        let one = T::one();
        let [a1, a2, a3, a4, a5, a6, a7] = self.alpha;
        let (j, k0, d1, d2) = (self.j, self.k0, self.d1, self.d2);
        let ds3 = sig_prime(a3 * x[0], k0);
        let mut m = Matrix::zeros(WC_DIM, WC_DIM);
        m[(0, 5)] = one;
        m[(1, 6)] = one;
        m[(1, 7)] = -one;
        m[(1, 8)] = -one;
        m[(2, 7)] = one;
        m[(3, 8)] = one;
        m[(4, 5)] = a5;
        m[(4, 9)] = -a6;
        m[(5, 0)] = -one;
        m[(5, 1)] = j * sig_prime(x[1], k0);
        m[(5, 5)] = -two;
        m[(6, 0)] = j * a2 * a1 * sig_prime(a1 * x[0], k0);
        m[(6, 1)] = -one;
        m[(6, 2)] = -one;
        m[(6, 3)] = -one;
        m[(6, 6)] = -two;
        m[(7, 0)] = j * d1 * self.g1 * a4 * a3 * ds3;
        m[(7, 2)] = -d1 * d1;
        m[(7, 7)] = -two * d1;
        m[(8, 3)] = -d2 * d2;
        m[(8, 4)] = j * d2 * self.g2 * a7 * sig_prime(x[4], k0);
        m[(8, 8)] = -two * d2;
        m[(9, 0)] = j * d1 * self.g1 * a3 * ds3 - d1 * d1 * a5 / a6;
        m[(9, 4)] = d1 * d1 / a6;
        m[(9, 9)] = -two * d1;
        m
    }

    fn input(&self) -> T {
        self.p
    }

    fn set_input(&mut self, p: T) {
        self.p = p;
    }

    fn input_equation(&self) -> usize {
        6
    }

    fn equilibrium(&self, x: T) -> (Vec<T>, T) {
        let [a1, a2, a3, a4, a5, a6, a7] = self.alpha;
        let (j, k0) = (self.j, self.k0);
        let y0 = j * sig(x, k0);
        let s3 = sig(a3 * y0, k0);
        let y2 = j * self.g1 * a4 / self.d1 * s3;
        let y4 = j * self.g1 / self.d1 * s3;
        let z = a5 * y0 - a6 * y4;
        let y3 = j * self.g2 * a7 / self.d2 * sig(z, k0);
        let p = x + y2 + y3 - a2 * j * sig(a1 * y0, k0);
        let o = T::zero();
        (vec![y0, x, y2, y3, z, o, o, o, o, o], p)
    }

    fn param(&self, name: &str) -> Result<T> {
        Ok(match name {
            "j" => self.j,
            "P" => self.p,
            "k0" => self.k0,
            "ln_k0" => self.k0.ln(),
            "G1" => self.g1,
            "G2" => self.g2,
            "d1" => self.d1,
            "d2" => self.d2,
            _ => match alpha_slot(name) {
                Some(i) => self.alpha[i],
                None => return Err(Error::UnknownParameter(name.to_string())),
            },
        })
    }

    fn set_param(&mut self, name: &str, v: T) -> Result<()> {
        let mut next = *self;
        match name {
            "j" => next.j = v,
            "P" => next.p = v,
            "k0" => next.k0 = v,
            "ln_k0" => next.k0 = v.exp(),
            "G1" => next.g1 = v,
            "G2" => next.g2 = v,
            "d1" => next.d1 = v,
            "d2" => next.d2 = v,
            _ => match alpha_slot(name) {
                Some(i) => next.alpha[i] = v,
                None => return Err(Error::UnknownParameter(name.to_string())),
            },
        }
        next.validate()?;
        *self = next;
        Ok(())
    }

    fn param_names(&self) -> &'static [&'static str] {
        WC_PARAM_NAMES
    }
}

fn alpha_slot(name: &str) -> Option<usize> {
    let k: usize = name.strip_prefix("alpha")?.parse().ok()?;
    (1..=7).contains(&k).then(|| k - 1)
}

/// The original ten-dimensional physical system in seconds, state `(y0..y9)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WcOriginal<T>(pub PhysicalWcParams<T>);

impl<T: Real> VectorField<T> for WcOriginal<T> {
    fn dim(&self) -> usize {
        WC_DIM
    }

    fn eval(&self, y: &[T], dy: &mut [T]) {
        let ph = &self.0;
        let p = &ph.base;
        let two = T::lit(2.0);
        let (a, b, c) = (p.rate_a, p.rate_b, ph.rate_c);
        let s = |v: T| sigm_physical(v, p.nu_max, p.r, p.v0);
        let jj = |i: usize| if i < 4 { p.alpha[i] * p.n_syn } else { ph.alpha_fast[i - 4] * p.n_syn };
        dy[0] = y[5];
        dy[1] = y[6];
        dy[2] = y[7];
        dy[3] = y[8];
        dy[4] = y[9];
        dy[5] = p.amp_a * a * s(y[1] - y[2] - y[3]) - two * a * y[5] - a * a * y[0];
        dy[6] = p.amp_a * a * (p.p + jj(1) * s(jj(0) * y[0])) - two * a * y[6] - a * a * y[1];
        dy[7] = p.amp_b * b * jj(3) * s(jj(2) * y[0]) - two * b * y[7] - b * b * y[2];
        dy[8] = ph.amp_c * c * jj(6) * s(jj(4) * y[0] - jj(5) * y[4]) - two * c * y[8] - c * c * y[3];
        dy[9] = p.amp_b * b * s(jj(2) * y[0]) - two * b * y[9] - b * b * y[4];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values_reduce_to_defaults() {
        let p: WcParams<f64> = WcParams::default();
        assert!((p.g1 - 6.76923).abs() < 1e-5);
        assert!((p.g2 - 6.15385).abs() < 1e-5);
        assert!((p.d1 - 0.2857).abs() < 1e-4);
        assert!((p.d2 - 2.0).abs() < 1e-15);
        assert_eq!(p.alpha[4..], [0.1, 0.1, 0.8]);
    }

    #[test]
    fn equal_amplitudes_give_unit_ratio() {
        let mut ph = PhysicalWcParams::<f64>::default();
        ph.base.amp_b = ph.base.amp_a;
        assert_eq!(reduce_wc(&ph).g1, 1.0);
    }

    #[test]
    fn state_maps_round_trip() {
        let ph = PhysicalWcParams::<f64>::default();
        let y: Vec<f64> = (0..10).map(|i| (i as f64 * 0.7).sin() * 10.0).collect();
        let back = wc_to_physical(&ph, &wc_to_reduced(&ph, &y));
        for (a, b) in y.iter().zip(&back) {
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn equilibrium_zeroes_field_and_velocities() {
        let mut p = WcParams::<f64>::default();
        for k in -40..=80 {
            let x = k as f64 * 0.3;
            let (s, pin) = p.equilibrium(x);
            assert!(s[5..].iter().all(|&v| v == 0.0));
            p.p = pin;
            let f = p.eval_vec(&s);
            assert!(f.iter().all(|v| v.abs() <= 1e-10), "X = {x}: {f:?}");
        }
    }

    #[test]
    fn alpha_names() {
        let mut p = WcParams::<f64>::default();
        p.set_param("alpha7", 0.5).unwrap();
        assert_eq!(p.param("alpha7").unwrap(), 0.5);
        assert!(p.param("alpha8").is_err());
        assert!(p.set_param("alpha6", 0.0).is_err());
    }
}
