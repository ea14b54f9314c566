//! Exact dissipative dynamics of an `N`-qubit register coupled to an
//! `N_b`-mode bosonic bath under an excitation-conserving Hamiltonian.
//!
//! The total excitation number is conserved, so the dynamics of a single
//! excitation lives in an `N + N_b` dimensional space and can be solved by
//! dense diagonalization. On top of that the crate provides the
//! register observables (fidelity, decoherence function, entropies), the
//! secular-equation spectrum of the symmetric sector, a key-value run
//! configuration with CSV output, and a self-checking acceptance suite.

pub mod acceptance;
pub mod config;
pub mod dynamics;
pub mod model;
pub mod oracle;
pub mod scenario;
pub mod sector;
pub mod spectral;

pub use config::{parse_config, ConfigError, Preparation, RunConfig};
pub use dynamics::{
    decoherence_function, entropy, evolve, fidelity, initial_amplitudes, reduce, related_entropies,
    run_time_series, AmplitudeVector, ReducedState, TimeGrid, TimeSeries, TimeSeriesRecord,
};
pub use model::{build_h1, CouplingSpec, Dispersion, HermitianMatrix, ModelParams};
pub use scenario::{run_preset, run_scenario, run_spectrum};
pub use sector::{
    dimension, enumerate_basis, m_superposition, momentum_state, su2_multiplicity, symmetric_state,
    RegisterShape, SpinVector, TwiceSpin,
};
pub use spectral::{diagonalize, secular_roots, SpectralDecomposition};
