//! Exact linear algebra over the supported fields.

pub mod dense;
pub mod matrix;
pub mod sparse;
pub mod subspace;

pub use matrix::{parse_tsv_header, Matrix};
pub use sparse::{rank, rank_with_stats, RankStats, RankStrategy};
pub use subspace::{kernel_basis, random_subspace, SubspaceBasis, PRNG_NAME};
