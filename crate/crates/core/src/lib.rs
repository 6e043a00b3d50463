//! Interparticle entanglement generated when two distinguishable particles
//! scatter off a one-dimensional potential.
//!
//! Everything works in the momentum representation with natural units
//! (ħ = 1). The main entry points are:
//!
//! * [`kinematics`]: mass fractions and the maps between particle momenta
//!   `(p1, p2)` and total/relative momenta `(p, q)`.
//! * [`amplitudes`]: transmission and reflection amplitudes for the hard
//!   core, Dirac delta, double delta and arbitrary delta chains.
//! * [`wavefunction`]: the Gaussian in-state and the transmitted, reflected
//!   and full out-state bi-momentum wave functions.
//! * [`purity`]: quadrature discretization plus spectral reduction giving the
//!   purity of the one-particle reduced density matrix.
//! * [`analytic`]: closed-form reflected-Gaussian purity and the two
//!   constant-amplitude approximations.
//! * [`sweep`]: configuration, CSV/JSON reports and the built-in validation
//!   suite used by the `scatter-entangle` command line tool.

pub mod amplitudes;
pub mod analytic;
mod error;
pub mod kinematics;
pub mod purity;
pub mod quadrature;
pub mod sweep;
pub mod wavefunction;

pub use amplitudes::{AmplitudeModel, AmplitudePair, PotentialKind, Scatterer, TransferMatrix};
pub use analytic::{approx_c, approx_cr, reflected_gaussian_purity, schulman_satisfied};
pub use error::{Error, Result};
pub use kinematics::{JacobiMomentum, MassPartition, PairMomentum};
pub use purity::{EngineSettings, PurityReport, WeightedAmplitudeMatrix};
pub use quadrature::{Axis, GridSpec};
pub use wavefunction::{BiMomentum, GaussianInState, Mode, ModeWavefunction};

pub use num_complex::Complex64;
