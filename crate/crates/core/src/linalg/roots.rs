//! Scalar root bracketing and bisection.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Interval carrying a sign change of a scalar function. A degenerate bracket
/// (`lo == hi`, `f_lo == f_hi == 0`) marks an exact zero found on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket<T> {
    pub lo: T,
    pub hi: T,
    pub f_lo: T,
    pub f_hi: T,
}

impl<T: Real> Bracket<T> {
    pub fn new(lo: T, hi: T, f_lo: T, f_hi: T) -> Result<Self> {
        let b = Bracket { lo, hi, f_lo, f_hi };
        b.validate()?;
        Ok(b)
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    fn validate(&self) -> Result<()> {
        if self.is_degenerate() && self.f_lo == T::zero() {
            return Ok(());
        }
        let ok = self.lo < self.hi
            && self.f_lo.is_finite()
            && self.f_hi.is_finite()
            && (self.f_lo == T::zero() || self.f_hi == T::zero() || (self.f_lo > T::zero()) != (self.f_hi > T::zero()));
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidBracket {
                lo: self.lo.to_f64_lossy(),
                hi: self.hi.to_f64_lossy(),
                f_lo: self.f_lo.to_f64_lossy(),
                f_hi: self.f_hi.to_f64_lossy(),
            })
        }
    }
}

/// Brackets for every sign change of `f` between adjacent grid points.
pub fn bracket_scan<T: Real>(f: impl Fn(T) -> T, grid: &[T]) -> Vec<Bracket<T>> {
    let values: Vec<T> = grid.iter().map(|&x| f(x)).collect();
    brackets_from_values(grid, &values)
}

/// Same as [`bracket_scan`] on precomputed samples. Non-finite samples break the
/// chain: no bracket is formed across them.
pub fn brackets_from_values<T: Real>(grid: &[T], values: &[T]) -> Vec<Bracket<T>> {
    assert_eq!(grid.len(), values.len());
    let mut out = Vec::new();
    for k in 0..grid.len() {
        let fk = values[k];
        if fk == T::zero() {
            out.push(Bracket { lo: grid[k], hi: grid[k], f_lo: fk, f_hi: fk });
            continue;
        }
        if k + 1 < grid.len() {
            let fn_ = values[k + 1];
            if fk.is_finite() && fn_.is_finite() && fn_ != T::zero() && (fk > T::zero()) != (fn_ > T::zero()) {
                out.push(Bracket { lo: grid[k], hi: grid[k + 1], f_lo: fk, f_hi: fn_ });
            }
        }
    }
    out
}

/// Outcome of [`dichotomy`], with the number of halvings performed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootReport<T> {
    pub root: T,
    pub f_root: T,
    pub bisections: usize,
    pub polished: bool,
}

/// Bisection until the bracket is narrower than `xtol` or `|f| <= ftol`, then a
/// single secant step inside the final bracket, kept only if it lowers `|f|`.
pub fn dichotomy<T: Real>(
    f: impl Fn(T) -> T,
    bracket: Bracket<T>,
    xtol: T,
    ftol: T,
    max_iter: usize,
) -> Result<RootReport<T>> {
    bracket.validate()?;
    if bracket.is_degenerate() {
        return Ok(RootReport { root: bracket.lo, f_root: T::zero(), bisections: 0, polished: false });
    }
    let (mut lo, mut hi, mut flo, mut fhi) = (bracket.lo, bracket.hi, bracket.f_lo, bracket.f_hi);
    if flo == T::zero() {
        return Ok(RootReport { root: lo, f_root: flo, bisections: 0, polished: false });
    }
    if fhi == T::zero() {
        return Ok(RootReport { root: hi, f_root: fhi, bisections: 0, polished: false });
    }
    let mut it = 0;
    loop {
        let mid = lo + (hi - lo) / T::lit(2.0);
        if hi - lo <= xtol {
            break;
        }
        if it >= max_iter {
            return Err(Error::NoConvergence {
                iterations: it,
                residual: flo.abs().min(fhi.abs()).to_f64_lossy(),
                last: vec![lo.to_f64_lossy(), hi.to_f64_lossy()],
            });
        }
        let fm = f(mid);
        it += 1;
        if !fm.is_finite() {
            return Err(Error::NumericalFailure(format!("non-finite value at {mid}")));
        }
        if fm == T::zero() || fm.abs() <= ftol {
            return Ok(RootReport { root: mid, f_root: fm, bisections: it, polished: false });
        }
        if (fm > T::zero()) == (flo > T::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    let mid = lo + (hi - lo) / T::lit(2.0);
    let fmid = f(mid);
    let mut best = (mid, fmid);
    let mut polished = false;
    if fhi != flo {
        let s = lo - flo * (hi - lo) / (fhi - flo);
        if s > lo && s < hi {
            let fs = f(s);
            if fs.is_finite() && fs.abs() < fmid.abs() {
                best = (s, fs);
                polished = true;
            }
        }
    }
    Ok(RootReport { root: best.0, f_root: best.1, bisections: it, polished })
}

/// Root of `f` inside `bracket` by [`dichotomy`].
pub fn dichotomy_solve<T: Real>(
    f: impl Fn(T) -> T,
    bracket: Bracket<T>,
    xtol: T,
    ftol: T,
    max_iter: usize,
) -> Result<T> {
    dichotomy(f, bracket, xtol, ftol, max_iter).map(|r| r.root)
}

/// Upper bound on bisection count for a bracket of width `w` and tolerance `xtol`.
pub fn bisection_bound(w: f64, xtol: f64) -> usize {
    if w <= xtol {
        0
    } else {
        (w / xtol).log2().ceil() as usize
    }
}

/// Evenly spaced grid with `n >= 2` points including both ends.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two() {
        let b = Bracket::new(1.0, 2.0, -1.0, 2.0).unwrap();
        let r = dichotomy_solve(|x: f64| x * x - 2.0, b, 1e-10, 0.0, 200).unwrap();
        assert!((r - 1.4142135624).abs() < 1e-10);
    }

    #[test]
    fn identity_root() {
        let b = Bracket::new(-1.0, 2.0, -1.0, 2.0).unwrap();
        let r = dichotomy_solve(|x: f64| x, b, 1e-12, 0.0, 200).unwrap();
        assert!(r.abs() < 1e-12);
    }

    #[test]
    fn invalid_bracket_rejected() {
        assert!(matches!(Bracket::new(0.0, 1.0, 1.0, 2.0), Err(Error::InvalidBracket { .. })));
        let bad = Bracket { lo: 0.0, hi: 1.0, f_lo: 1.0, f_hi: 2.0 };
        assert!(dichotomy_solve(|x: f64| x + 1.0, bad, 1e-8, 0.0, 50).is_err());
    }

    #[test]
    fn iteration_cap() {
        let b = Bracket::new(1.0, 2.0, -1.0, 2.0).unwrap();
        let e = dichotomy_solve(|x: f64| x * x - 2.0, b, 1e-14, 0.0, 5).unwrap_err();
        assert!(matches!(e, Error::NoConvergence { .. }));
    }

    #[test]
    fn sine_brackets() {
        let b = bracket_scan(f64::sin, &[0.1, 2.0, 4.0, 7.0]);
        assert_eq!(b.len(), 2);
        assert!(b[0].lo < std::f64::consts::PI && std::f64::consts::PI < b[0].hi);
        assert!(b[1].lo < 2.0 * std::f64::consts::PI && 2.0 * std::f64::consts::PI < b[1].hi);
    }

    #[test]
    fn constant_has_no_brackets() {
        assert!(bracket_scan(|_x: f64| 3.0, &linspace(0.0, 1.0, 11)).is_empty());
    }

    #[test]
    fn exact_grid_zero_is_degenerate() {
        let b = bracket_scan(|x: f64| x, &[-1.0, 0.0, 1.0]);
        assert_eq!(b.len(), 1);
        assert!(b[0].is_degenerate());
        assert_eq!(dichotomy_solve(|x: f64| x, b[0], 1e-9, 0.0, 10).unwrap(), 0.0);
    }

    #[test]
    fn halving_bound_respected() {
        let b = Bracket::new(0.0, 3.0, -1.0, 2.0).unwrap();
        let r = dichotomy(|x: f64| x - 1.0 / 3.0, b, 1e-9, 0.0, 1000).unwrap();
        assert!(r.bisections <= bisection_bound(3.0, 1e-9));
    }
}
