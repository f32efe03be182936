//! Dense nonsymmetric eigensolver: balancing, reduction to upper Hessenberg form
//! by stabilised elementary similarity transforms, then the Francis double-shift
//! QR iteration. Eigenvectors for selected eigenvalues come from complex inverse
//! iteration.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::lu::Lu;
use crate::linalg::matrix::Matrix;
use crate::scalar::Real;

const MAX_DIM: usize = 64;
const MAX_ITS_PER_EIGENVALUE: usize = 60;

/// Eigenvalues of a real square matrix, sorted by decreasing real part (ties by
/// decreasing imaginary part).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    pub values: Vec<Complex<T>>,
}

impl<T: Real> Spectrum<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of eigenvalues with real part above `tol`.
    pub fn n_unstable(&self, tol: T) -> usize {
        self.values.iter().filter(|z| z.re > tol).count()
    }

    /// Index of the eigenvalue closest to `target`.
    pub fn nearest(&self, target: Complex<T>) -> usize {
        let mut best = 0;
        let mut dist = T::infinity();
        for (i, z) in self.values.iter().enumerate() {
            let d = (*z - target).norm();
            if d < dist {
                dist = d;
                best = i;
            }
        }
        best
    }

    /// `true` when no other eigenvalue lies within `tol` of eigenvalue `idx`.
    pub fn is_simple(&self, idx: usize, tol: T) -> bool {
        let z = self.values[idx];
        self.values.iter().enumerate().all(|(i, w)| i == idx || (*w - z).norm() > tol)
    }

    pub fn max_real(&self) -> T {
        self.values.iter().fold(T::neg_infinity(), |m, z| m.max(z.re))
    }

    pub fn sum(&self) -> Complex<T> {
        self.values.iter().fold(Complex::new(T::zero(), T::zero()), |a, &z| a + z)
    }

    pub fn product(&self) -> Complex<T> {
        self.values.iter().fold(Complex::new(T::one(), T::zero()), |a, &z| a * z)
    }
}

/// Computes all eigenvalues of `m`.
pub fn eigen<T: Real>(m: &Matrix<T>) -> Result<Spectrum<T>> {
    assert!(m.is_square(), "eigen of non-square matrix");
    let n = m.rows();
    assert!(n <= MAX_DIM, "eigen supports n <= {MAX_DIM}");
    if n == 0 {
        return Ok(Spectrum { values: vec![] });
    }
    if m.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericalFailure("non-finite entry in eigen input".into()));
    }
    // 1-based working copy keeps the index arithmetic of the classical algorithm readable.
    let mut a = vec![vec![T::zero(); n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            a[i + 1][j + 1] = m[(i, j)];
        }
    }
    balance(&mut a, n);
    hessenberg(&mut a, n);
    let (wr, wi) = match hqr(&mut a, n) {
        Some(w) => w,
        None => {
            return Err(Error::EigenNoConvergence {
                n,
                matrix: m.as_slice().iter().map(|x| x.to_f64_lossy()).collect(),
            })
        }
    };
    let mut values: Vec<Complex<T>> = (1..=n).map(|i| Complex::new(wr[i], wi[i])).collect();
    values.sort_by(|x, y| {
        y.re.partial_cmp(&x.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(y.im.partial_cmp(&x.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(Spectrum { values })
}

fn balance<T: Real>(a: &mut [Vec<T>], n: usize) {
    let radix = T::lit(2.0);
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 1..=n {
            let mut r = T::zero();
            let mut c = T::zero();
            for j in 1..=n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c != T::zero() && r != T::zero() {
                let mut g = r / radix;
                let mut f = T::one();
                let s = c + r;
                while c < g {
                    f *= radix;
                    c *= sqrdx;
                }
                g = r * radix;
                while c > g {
                    f /= radix;
                    c /= sqrdx;
                }
                if (c + r) / f < T::lit(0.95) * s {
                    done = false;
                    let g = T::one() / f;
                    for j in 1..=n {
                        a[i][j] *= g;
                    }
                    for j in 1..=n {
                        a[j][i] *= f;
                    }
                }
            }
        }
    }
}

fn hessenberg<T: Real>(a: &mut [Vec<T>], n: usize) {
    for m in 2..n {
        let mut x = T::zero();
        let mut i = m;
        for j in m..=n {
            if a[j][m - 1].abs() > x.abs() {
                x = a[j][m - 1];
                i = j;
            }
        }
        if i != m {
            for j in (m - 1)..=n {
                let t = a[i][j];
                a[i][j] = a[m][j];
                a[m][j] = t;
            }
            for row in a.iter_mut().take(n + 1).skip(1) {
                row.swap(i, m);
            }
        }
        if x != T::zero() {
            for i in (m + 1)..=n {
                let mut y = a[i][m - 1];
                if y != T::zero() {
                    y /= x;
                    a[i][m - 1] = y;
                    for j in m..=n {
                        let amj = a[m][j];
                        a[i][j] -= y * amj;
                    }
                    for row in a.iter_mut().take(n + 1).skip(1) {
                        let rji = row[i];
                        row[m] += y * rji;
                    }
                }
            }
        }
    }
    for i in 3..=n {
        for j in 1..i - 1 {
            a[i][j] = T::zero();
        }
    }
}

#[allow(clippy::many_single_char_names)]
fn hqr<T: Real>(a: &mut [Vec<T>], n: usize) -> Option<(Vec<T>, Vec<T>)> {
    let mut wr = vec![T::zero(); n + 1];
    let mut wi = vec![T::zero(); n + 1];
    let zero = T::zero();
    let mut anorm = zero;
    for i in 1..=n {
        for j in (i.saturating_sub(1)).max(1)..=n {
            anorm += a[i][j].abs();
        }
    }
    let sign = |a: T, b: T| if b >= T::zero() { a.abs() } else { -a.abs() };
    let mut nn = n;
    let mut t = zero;
    let (mut p, mut q, mut r, mut s, mut w, mut x, mut y, mut z);
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == zero {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = zero;
                    break;
                }
                l -= 1;
            }
            x = a[nn][nn];
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = zero;
                nn -= 1;
            } else {
                y = a[nn - 1][nn - 1];
                w = a[nn][nn - 1] * a[nn - 1][nn];
                if l == nn - 1 {
                    p = T::lit(0.5) * (y - x);
                    q = p * p + w;
                    z = q.abs().sqrt();
                    x += t;
                    if q >= zero {
                        z = p + sign(z, p);
                        wr[nn - 1] = x + z;
                        wr[nn] = x + z;
                        if z != zero {
                            wr[nn] = x - w / z;
                        }
                        wi[nn - 1] = zero;
                        wi[nn] = zero;
                    } else {
                        wr[nn - 1] = x + p;
                        wr[nn] = x + p;
                        wi[nn - 1] = -z;
                        wi[nn] = z;
                    }
                    nn = nn.saturating_sub(2);
                } else {
                    if its == MAX_ITS_PER_EIGENVALUE {
                        return None;
                    }
                    if its > 0 && its % 10 == 0 {
                        // exceptional shift
                        t += x;
                        for i in 1..=nn {
                            a[i][i] -= x;
                        }
                        s = a[nn][nn - 1].abs() + a[nn - 1][nn - 2].abs();
                        x = T::lit(0.75) * s;
                        y = x;
                        w = T::lit(-0.4375) * s * s;
                    }
                    its += 1;
                    let mut m = nn - 2;
                    loop {
                        z = a[m][m];
                        r = x - z;
                        s = y - z;
                        p = (r * s - w) / a[m + 1][m] + a[m][m + 1];
                        q = a[m + 1][m + 1] - z - r - s;
                        r = a[m + 2][m + 1];
                        s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in (m + 2)..=nn {
                        a[i][i - 2] = zero;
                        if i != m + 2 {
                            a[i][i - 3] = zero;
                        }
                    }
                    let mut k = m;
                    while k < nn {
                        if k != m {
                            p = a[k][k - 1];
                            q = a[k + 1][k - 1];
                            r = zero;
                            if k != nn - 1 {
                                r = a[k + 2][k - 1];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != zero {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != zero {
                            if k == m {
                                if l != m {
                                    a[k][k - 1] = -a[k][k - 1];
                                }
                            } else {
                                a[k][k - 1] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                p = a[k][j] + q * a[k + 1][j];
                                if k != nn - 1 {
                                    p += r * a[k + 2][j];
                                    a[k + 2][j] -= p * z;
                                }
                                a[k + 1][j] -= p * y;
                                a[k][j] -= p * x;
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                p = x * a[i][k] + y * a[i][k + 1];
                                if k != nn - 1 {
                                    p += z * a[i][k + 2];
                                    a[i][k + 2] -= p * r;
                                }
                                a[i][k + 1] -= p * q;
                                a[i][k] -= p;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if nn < 1 || l + 1 >= nn {
                break;
            }
        }
    }
    Some((wr, wi))
}

/// Right eigenvector `v` with `M v = lambda v`, unit 2-norm, by inverse iteration.
pub fn eigenvector<T: Real>(m: &Matrix<T>, lambda: Complex<T>) -> Result<Vec<Complex<T>>> {
    let n = m.rows();
    let scale = T::one() + T::lit(m.norm_inf());
    let mut shifted = m.to_complex();
    // An exact eigenvalue gives an exactly singular pivot; nudge the shift.
    let nudge = Complex::new(scale * T::epsilon() * T::lit(64.0), scale * T::epsilon() * T::lit(16.0));
    for i in 0..n {
        shifted[(i, i)] = shifted[(i, i)] - lambda - nudge;
    }
    let lu = Lu::new(&shifted);
    if lu.is_singular() {
        return Err(Error::NumericalFailure("singular shifted matrix in inverse iteration".into()));
    }
    let mut v: Vec<Complex<T>> = (0..n)
        .map(|i| Complex::new(T::one() + T::lit(0.1 * i as f64), T::lit(0.05 * (i % 3) as f64)))
        .collect();
    for _ in 0..4 {
        v = lu.solve(&v)?;
        normalize(&mut v);
    }
    let residual = residual_norm(m, lambda, &v);
    if residual > 1e-8 * (1.0 + m.norm_inf()) {
        return Err(Error::NumericalFailure(format!(
            "eigenvector residual {residual:.3e} exceeds tolerance"
        )));
    }
    Ok(v)
}

/// Left eigenvector `w` with `w^T M = lambda w^T`, i.e. an eigenvector of `M^T`.
pub fn left_eigenvector<T: Real>(m: &Matrix<T>, lambda: Complex<T>) -> Result<Vec<Complex<T>>> {
    eigenvector(&m.transpose(), lambda)
}

fn normalize<T: Real>(v: &mut [Complex<T>]) {
    let nrm = v.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt();
    if nrm > T::zero() {
        // fix the phase so the largest component is real positive
        let big = v.iter().fold(Complex::new(T::zero(), T::zero()), |b, z| if z.norm() > b.norm() { *z } else { b });
        let phase = if big.norm() > T::zero() { big.conj() / big.norm() } else { Complex::new(T::one(), T::zero()) };
        for z in v.iter_mut() {
            *z = *z * phase / nrm;
        }
    }
}

/// `||(M - lambda I) v||_2`.
pub fn residual_norm<T: Real>(m: &Matrix<T>, lambda: Complex<T>, v: &[Complex<T>]) -> f64 {
    let n = m.rows();
    let mut acc = 0.0;
    for i in 0..n {
        let mut s = Complex::new(T::zero(), T::zero());
        for j in 0..n {
            s = s + v[j] * m[(i, j)];
        }
        s = s - lambda * v[i];
        acc += s.norm_sqr().to_f64_lossy();
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::lu::det;

    fn close(a: Complex<f64>, re: f64, im: f64, tol: f64) -> bool {
        (a.re - re).abs() < tol && (a.im - im).abs() < tol
    }

    #[test]
    fn diagonal() {
        let s = eigen(&Matrix::<f64>::from_diag(&[1.0, 2.0, 3.0])).unwrap();
        assert!(close(s.values[0], 3.0, 0.0, 1e-14));
        assert!(close(s.values[1], 2.0, 0.0, 1e-14));
        assert!(close(s.values[2], 1.0, 0.0, 1e-14));
    }

    #[test]
    fn rotation_generator() {
        let s = eigen(&Matrix::<f64>::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]])).unwrap();
        assert!(close(s.values[0], 0.0, 1.0, 1e-14));
        assert!(close(s.values[1], 0.0, -1.0, 1e-14));
    }

    #[test]
    fn companion_of_product_polynomial() {
        // (l^2 + 2l + 1)(l^2 + l + 1) = l^4 + 3l^3 + 4l^2 + 3l + 1
        let c = Matrix::<f64>::from_rows(&[
            vec![-3.0, -4.0, -3.0, -1.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ]);
        let s = eigen(&c).unwrap();
        // quadratic formula: -1 (double), (-1 +- i sqrt 3)/2
        let h = 3f64.sqrt() / 2.0;
        assert!(close(s.values[0], -0.5, h, 1e-10));
        assert!(close(s.values[1], -0.5, -h, 1e-10));
        // the double root is only accurate to ~sqrt(eps)
        assert!(close(s.values[2], -1.0, 0.0, 1e-6));
        assert!(close(s.values[3], -1.0, 0.0, 1e-6));
    }

    #[test]
    fn eigenvectors_and_left_eigenvectors() {
        let m = Matrix::<f64>::from_rows(&[vec![1.0, 2.0, 0.0], vec![-2.0, 1.0, 1.0], vec![0.5, 0.0, -3.0]]);
        let s = eigen(&m).unwrap();
        for &lam in &s.values {
            let v = eigenvector(&m, lam).unwrap();
            assert!(residual_norm(&m, lam, &v) < 1e-10);
            let w = left_eigenvector(&m, lam).unwrap();
            assert!(residual_norm(&m.transpose(), lam, &w) < 1e-10);
        }
    }

    #[test]
    fn trace_and_determinant_identities() {
        let m = Matrix::<f64>::from_rows(&[
            vec![4.0, -2.0, 1.0, 0.3],
            vec![1.0, 0.0, 2.5, -1.0],
            vec![0.0, 3.0, -1.0, 2.0],
            vec![1.5, 0.2, 0.1, -2.0],
        ]);
        let s = eigen(&m).unwrap();
        assert!((s.sum().re - m.trace()).abs() < 1e-10);
        assert!(s.sum().im.abs() < 1e-10);
        assert!((s.product().re - det(&m)).abs() < 1e-9 * det(&m).abs().max(1.0));
    }

    #[test]
    fn single_precision_works() {
        let s = eigen(&Matrix::<f32>::from_rows(&[vec![0.0, 1.0], vec![-4.0, 0.0]])).unwrap();
        assert!((s.values[0].im - 2.0).abs() < 1e-5);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(eigen(&Matrix::<f64>::from_diag(&[f64::NAN, 1.0])).is_err());
    }
}
