//! Entanglement spectra and von Neumann entropies of blocks in
//! permutation-invariant spin states of arbitrary local spin.
//!
//! The [`spectrum`] module builds block spectra from bounded compositions,
//! [`entropy`] evaluates exact and closed-form entropies, [`gaussian`] holds
//! the multivariate normal approximation of the composition distribution, and
//! [`oracle`] re-derives spectra by brute-force partial trace for checking.
//! [`sweep`], [`verify`] and [`plot`] drive batch runs and their outputs.

pub mod combinatorics;
pub mod entropy;
pub mod error;
pub mod gaussian;
pub mod oracle;
pub mod plot;
pub mod spectrum;
pub mod sweep;
pub mod verify;

pub use combinatorics::{
    binom_exact, enumerate_compositions, log2_binom, multinomial_log2, BoundedCompositions, LogWeight,
};
pub use entropy::{
    asymptotic_entropy, block_entropy, effective_spin, entropy_of_spectrum, entropy_report,
    finite_size_corrections, fit_prefactor, max_entropy_bound, CorrectionReport, EffectiveSpin,
    EntropyReport,
};
pub use error::{Error, Result};
pub use gaussian::{build_gaussian, composition_moments, gaussian_entropy, GaussianModel};
pub use oracle::{
    build_state, dense_eigenvalues, partial_trace, verify_theorem, verify_uniform_mixture, MatchReport,
};
pub use spectrum::{
    dimension_symmetric_subspace, exact_spectrum, exact_spectrum_rational, thermo_spectrum,
    uniform_mixed_spectrum, Composition, SectorConfig, Spectrum, SpectrumSource,
};
