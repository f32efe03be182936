//! Dimensionless sigmoid `S(x) = 1 / (1 + k0 e^{-x})`.

use crate::error::{Error, Result};
use crate::scalar::Real;

fn check<T: Real>(x: T, k0: T) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("sigmoid argument must be finite, got {x}")));
    }
    if !(k0 > T::zero()) || !k0.is_finite() {
        return Err(Error::Domain(format!("sigmoid offset k0 must be positive, got {k0}")));
    }
    Ok(())
}

pub fn sigmoid<T: Real>(x: T, k0: T) -> Result<T> {
    check(x, k0)?;
    Ok(sig(x, k0))
}

/// `S'(x) = S(x)(1 - S(x))`.
pub fn sigmoid_prime<T: Real>(x: T, k0: T) -> Result<T> {
    check(x, k0)?;
    Ok(sig_prime(x, k0))
}

#[inline]
pub(crate) fn sig<T: Real>(x: T, k0: T) -> T {
    T::one() / (T::one() + k0 * (-x).exp())
}

#[inline]
pub(crate) fn sig_prime<T: Real>(x: T, k0: T) -> T {
    let s = sig(x, k0);
    s * (T::one() - s)
}

/// Physical firing-rate sigmoid `nu_max / (1 + e^{r (v0 - v)})`.
#[inline]
pub(crate) fn sigm_physical<T: Real>(v: T, nu_max: T, r: T, v0: T) -> T {
    nu_max / (T::one() + (r * (v0 - v)).exp())
}
