//! Transition and Fredholm matrices, their spectra, and mixing rates.

pub mod checks;
pub mod circulant;
pub mod eigen;
pub mod fredholm;
pub mod matrices;
pub mod rate;

pub use checks::{algebraic_eigenvalue_check, decelerates_exact, shrink_check, zero_multiplicities_of_b, AlgebraicReport, ShrinkReport};
pub use circulant::{circulant_eigs, circulant_max_modulus, stochastic_eta};
pub use eigen::{eigen_spectrum, eigenvalues, spectra_match, Eigenvalue, Spectrum, DEFAULT_TOL};
pub use fredholm::{
    density_evolution_rate, fredholm_determinant, fredholm_determinant_exact, fredholm_matrix, fredholm_zeros,
    invariant_density, r_ess_and_entropy, zeta_identity_check, FredholmModel,
};
pub use matrices::{build_a, build_ap, build_b, build_bq, build_c, build_p, build_q};
pub use rate::{lambda_sigma, worst_permutation, worst_rate_bound, RateReport};
