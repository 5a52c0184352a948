//! Dissipative semiclassical dynamics of a two-level atom in a strong
//! standing laser wave.
//!
//! The crate simulates the coupled motion of the atomic center of mass
//! (position ξ, momentum p) and the internal Bloch vector (dipole
//! quadratures u, v and inversion z) in the field of a pumped standing
//! wave, together with the analysis machinery built on top of the
//! trajectories: friction curves and velocity grouping, limit-cycle
//! classification and bifurcation scans, Lyapunov exponents and fractal
//! dimension, basins of attraction, fluorescence spectra, and exit-time
//! scattering experiments.
//!
//! All frequencies are measured in units of the single-photon Rabi
//! frequency Ω₀, time in Ω₀⁻¹, position in k_f⁻¹ and momentum in ħk_f.

pub mod basins;
pub mod chaos;
pub mod cycles;
pub mod error;
pub mod integrator;
pub mod io;
pub mod model;
pub mod observables;
pub mod scattering;
pub mod spectra;

pub use error::Error;
pub use model::{FullState, NoiseSpec, ReducedState, SystemParams};

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
