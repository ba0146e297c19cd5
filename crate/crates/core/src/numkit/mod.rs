//! Floating-point numerics: factorization checks, antisymmetric spectral
//! pairs, NMF witness search and CP-ALS.

mod cp;
mod factorization;
mod nmf;
mod spectral;

pub use cp::{cp_als, CpDecomposition};
pub use factorization::{
    verify_nonneg_factorization, CheckFailure, FactorizationCheck, NonnegFactorization, Scalar,
};
pub use nmf::{
    hals, multiplicative_updates, nmf_search, projected_lm, relative_error, NmfOptions, NmfOutcome,
    DEFAULT_TOLERANCE, MU_EPSILON,
};
pub use spectral::{
    antisym_spectral, antisym_spectral_scaled, hermitian_jacobi, ComplexVector, SpectralPair,
    JACOBI_TOLERANCE,
};
