//! Bialternate product `2M ⊙ I`.
//!
//! Rows and columns are indexed by pairs `(i, j)` with `i < j` in lexicographic
//! order: `(0,1), (0,2), ..., (0,n-1), (1,2), ...`. The spectrum of the result is
//! `{λ_i + λ_j : i < j}`, so its determinant vanishes when two eigenvalues of `M`
//! sum to zero (a pure-imaginary pair, or a real pair `±μ`).

use crate::linalg::matrix::Matrix;
use crate::scalar::Real;

/// Dimension `n(n-1)/2` of the bialternate product of an `n x n` matrix.
pub fn bialternate_dim(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Lexicographic list of the index pairs labelling rows/columns.
pub fn pair_index(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(bialternate_dim(n));
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j));
        }
    }
    out
}

pub fn bialternate<T: Real>(m: &Matrix<T>) -> Matrix<T> {
    assert!(m.is_square() && m.rows() >= 2, "bialternate needs a square matrix with n >= 2");
    let n = m.rows();
    let pairs = pair_index(n);
    let dim = pairs.len();
    let mut out = Matrix::zeros(dim, dim);
    for (r, &(i, j)) in pairs.iter().enumerate() {
        for (c, &(k, l)) in pairs.iter().enumerate() {
            let mut v = T::zero();
            if l == j {
                v += m[(i, k)];
            }
            if l == i {
                v -= m[(j, k)];
            }
            if k == i {
                v += m[(j, l)];
            }
            if k == j {
                v -= m[(i, l)];
            }
            out[(r, c)] = v;
        }
    }
    out
}
