//! Packed GF(2) vectors and matrices.

mod matrix;
mod vector;

pub use matrix::{mat_vec_mul, random_matrix, rank, row_from_hex, row_space_intersection, row_to_hex, solve_left, BitMatrix};
pub use vector::BitVector;
