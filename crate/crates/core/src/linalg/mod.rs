//! Dense linear algebra and root-finding kernels.

pub mod bialternate;
pub mod diff;
pub mod eigen;
pub mod lu;
pub mod matrix;
pub mod newton;
pub mod roots;

pub use bialternate::{bialternate, pair_index};
pub use eigen::{eigen, eigenvector, left_eigenvector, Spectrum};
pub use lu::{det, solve, Lu};
pub use matrix::Matrix;
pub use newton::{newton_refine, NewtonOptions};
pub use roots::{bracket_scan, dichotomy, dichotomy_solve, linspace, Bracket};
