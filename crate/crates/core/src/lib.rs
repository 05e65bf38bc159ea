//! Spectral clustering of multilayer graphs via matrix power means of the
//! layers' normalized Laplacians.
//!
//! The central object is the power mean Laplacian
//!
//! ```text
//! L_p = ( (1/T) * sum_t (L_sym^(t) + eps*I)^p )^(1/p)
//! ```
//!
//! whose smallest eigenvectors generalize single-layer spectral embeddings to
//! T layers. Negative exponents emphasize layers in which a partition is far
//! from random, which is where the interesting behaviour lives; for p < 0 the
//! solver never forms L_p explicitly and works matrix-free through Krylov
//! approximations of `(L_sym + eps*I)^p x`.
//!
//! Module map:
//! - [`linalg`]: CSR/dense symmetric matrices, the dense eigensolver used as
//!   the reference route, block orthonormalization.
//! - [`graphs`]: multilayer graphs, shifted Laplacian operators, k-NN graph
//!   construction, Matrix Market / bundle I/O.
//! - [`powermean`]: scalar and matrix power means, the Krylov matrix-power
//!   kernel, and the matrix-free eigensolver.
//! - [`sbm`]: stochastic block model generators with known eigenstructure.
//! - [`clustering`]: k-means, the end-to-end spectral pipeline, baselines,
//!   and the permutation-matched clustering error.

pub mod clustering;
pub mod error;
pub mod graphs;
pub mod linalg;
pub mod powermean;
pub mod rng;
pub mod sbm;

pub use error::{Error, Result};
