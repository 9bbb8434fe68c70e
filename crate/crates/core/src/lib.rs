//! Finite free multiplicative convolution of real-rooted polynomials and
//! the law of large numbers for the roots of its powers.

pub mod convolution;
pub mod empirical;
pub mod error;
pub mod experiments;
pub mod free_limit;
pub mod io;
pub mod precise;
pub mod quadrature;
pub mod solver;
pub mod symmetric;

pub use convolution::{
    additive_convolve, additive_convolve_normalized, constant_root_profile, laguerre_profile,
    lln_limit_polynomial, lln_limit_roots, multiplicative_convolve, multiplicative_power,
    multiplicative_power_log, two_root_profile, LimitRoots,
};
pub use empirical::{
    discretize_measure, ks_distance, ks_distance_exact, log_moment, mean_and_harmonic,
    EmpiricalMeasure, MeanHarmonic,
};
pub use error::{Error, Result};
pub use free_limit::{
    phi_quantile, psi_inverse, psi_transform, s_transform, support_endpoints, MeasureSpec,
    PhiQuantileFn,
};
pub use io::PolynomialFile;
pub use solver::{
    roots_of_power, solve_real_rooted, sturm_count, theorem_brackets, RootBracket, SolvedRoots,
    SolverConfig,
};
pub use symmetric::{elementary_symmetric, BigPoly, RootMultiset, SymmetricProfile};
