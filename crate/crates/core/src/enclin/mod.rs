//! Encrypted linear algebra on `d×d` slot grids.

mod encoding;
mod linear_map;
mod matmul;

pub use encoding::{
    decode_matrix, decode_vector, encode_matrix, encode_vector_replicated, EncodedMatrix, EncodedVector,
    GridCiphertext,
};
pub use linear_map::{flatten, make_vk, make_wk, permuted_product, PlainLinearMap};
pub use matmul::{lin_trans, mmult, mmult_rotation_steps};
