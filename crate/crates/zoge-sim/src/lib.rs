//! Simulation engine for localization diagnostics on the interacting
//! Harper-Hofstadter-Aubry-Andre spin chain.
//!
//! The crate covers three layers:
//!
//! - exact one-body solvers for the non-interacting chain ([`onebody`]):
//!   spectra, amplitude propagation, participation ratios, decimation LDOS,
//!   edge-state classification;
//! - full 2^N state-vector machinery ([`manybody`]): random-phase sector
//!   states, Trotter and exact-sector propagators, gradient kicks, local
//!   magnetization;
//! - the gradient-echo protocol ([`zoge`]): Loschmidt echoes under a field
//!   gradient kick, their Fourier spectrum over the kick angle (gradient
//!   entanglement amplitudes), forward-only polarization traces S^2(t) and
//!   P00(t);
//!
//! plus ensemble statistics and curve fitting ([`analysis`]) and sweep
//! orchestration ([`cli`]). Energies are quoted in units of J and times in
//! units of 1/J.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod io;
pub mod linalg;
pub mod manybody;
pub mod model;
pub mod onebody;
pub mod rng;
pub mod zoge;

pub use error::{Error, Result};
pub use model::{ChainSpec, RealizationSet, SiteFieldTable, GOLDEN_RATIO};
