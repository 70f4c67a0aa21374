//! Oscillator coupled to a finite reservoir of equidistant modes.
//!
//! The reservoir returns energy to the oscillator every `T_R = 2π/δω`, and
//! the n-th return evolves as `e^{-γt} L_n^{(-1)}(2γt)`: the dynamics of a
//! non-Hermitian system sitting at an exceptional point of order `n + 1`.
//!
//! Modules, bottom-up:
//!
//! * [`model`]: physical parameters, derived rates and the arrowhead
//!   coupling matrix.
//! * [`eigen`]: transcendental eigenfrequency equations (finite and
//!   infinite reservoir), mode weights, and a dense Jacobi oracle.
//! * [`dynamics`]: exact eigenbasis propagation and an RK4 oracle.
//! * [`revivals`]: closed-form revival amplitudes, their recurrence and
//!   quadrature oracles, the reconstruction of `a(t)`, and the
//!   exceptional-point cascade matrix.
//! * [`spectra`]: analytic revival spectra, windowed DFTs of simulated
//!   trajectories, peak finding and widths.

pub mod dynamics;
pub mod eigen;
mod error;
pub mod model;
mod ode;
pub mod quadrature;
pub mod revivals;
pub mod spectra;

pub use num_complex::Complex64;

pub use dynamics::{
    evolve_eigenbasis, evolve_rk4, max_rk4_step, total_norm, EvolutionMethod, SpectralModel,
    StateTrajectory, TimeGrid,
};
pub use eigen::{
    decompose_finite, decompose_infinite, default_truncation, diagonalize_oracle, digamma,
    eigen_residual, mode_weight, mode_weight_finite, solve_alpha_finite, solve_alpha_infinite,
    Branch, DecompositionMethod, EigenDecomposition, EigenMode,
};
pub use error::{Error, Result};
pub use model::{build_matrix, coupling_for_rate, derive_rates, CoupledSystemMatrix, Rates, SystemConfig};
pub use revivals::{
    ep_chain_residual, ep_matrix, jordan_analysis, laguerre_gen, reconstruct, revival_amplitude,
    revival_quadrature, revival_recurrence, EpMatrix, JordanStructure, RevivalSeries,
};
pub use spectra::{
    analytic_spectrum, find_peaks, peak_fwhm, windowed_spectrum, Peak, PeakList, SpectrumGrid,
    SpectrumKind,
};
