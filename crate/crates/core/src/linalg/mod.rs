//! Matrix types and the dense reference eigensolver.

mod block;
mod dense;
mod sparse;

pub use block::{axpy, dot, max_principal_angle, norm, orthonormalize, sym_eig_small};
pub use dense::{dense_sym_eig, sym_matrix_power, DenseSymMatrix, EigenDecomposition};
pub use sparse::SparseSymMatrix;
