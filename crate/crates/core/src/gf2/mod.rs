//! Linear algebra over GF(2).
//!
//! Vectors are stored by support and matrices keep both row and column
//! adjacency, since message passing walks edges in both directions.
//! Elimination runs on packed 64-bit rows.

mod bitvec;
mod dense;
pub mod io;
mod linalg;
mod matrix;

pub use bitvec::BitVec;
pub use linalg::{in_rowspace, inverse, mat_mat_t, mat_vec_t, nullspace, rank, solve, RowSpace};
pub use matrix::{MatrixBuilder, SparseBinMatrix};
