//! Steady-state heat transport through one-dimensional harmonic chains whose
//! edge beads are attached to independent Langevin baths.
//!
//! The crate is organised around the data flow of a transport calculation:
//!
//! * [`model`] holds the chain geometry, the bath layout and the temperature
//!   reversal used to probe rectification.
//! * [`greens`] builds the frequency-domain inverse Green's matrix, solves it
//!   with a tridiagonal LU and provides closed-form cofactor oracles.
//! * [`quadrature`] integrates vector-valued spectral integrands on
//!   `[0, omega_max]` with deterministic ordered reductions.
//! * [`transport`] turns Green's functions into bath-to-bath transmission
//!   coefficients, classical and quantum currents, and rectification metrics.
//! * [`md`] is an independent route: classical Langevin molecular dynamics
//!   (BBK integrator) for harmonic and Frenkel-Kontorova chains.
//! * [`config`] loads the human-editable TOML description of all of the above.
//!
//! Units are natural throughout (`hbar = k_B = 1`).

pub mod config;
pub mod error;
pub mod greens;
pub mod md;
pub mod model;
pub mod output;
pub mod quadrature;
pub mod transport;

pub use error::{Error, Result};
pub use model::{BathSpec, ChainSpec, EffectiveFrictionSpec, Model, ValidationReport, Violation};
pub use quadrature::{QuadratureSpec, Scheme};
pub use transport::{CurrentReport, Currents, Ratio, Regime, TransmissionMatrix};
