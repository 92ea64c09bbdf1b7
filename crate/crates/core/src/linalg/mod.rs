//! Dense complex linear algebra: the matrix type, tensor structure,
//! spectral checks, numerical rank and seeded sampling.

mod checks;
mod matrix;
pub mod random;
mod rank;
mod tensor;

pub use checks::{
    density_defect, eigenvalues, hermitian_eigenvalues, is_density, is_unitary, min_eigenvalue,
    unitarity_defect, DensityDefect,
};
pub use matrix::ComplexMatrix;
pub use random::{haar_unitary, haar_unitary_with, random_density, rng_from_seed, SeededRng};
pub use rank::{rank_and_nullspace, NumericalRank, RankPolicy};
pub use tensor::{kron, partial_trace_env};
