//! Named rectification experiments built on `tgho_core`, their CSV output,
//! run summaries and the numerical acceptance checks.
//!
//! * [`experiment`] resolves an experiment name plus overrides into a grid,
//!   evaluates it in parallel and writes CSV files with a provenance line.
//! * [`models`] holds the pinned chains and bath layouts.
//! * [`summary`] condenses results into `summary.json` and `summary.txt`.
//! * [`checks`] implements each acceptance criterion as a function.

pub mod checks;
pub mod error;
pub mod experiment;
pub mod models;
pub mod summary;
pub mod sweep;

pub use error::{Error, Result};
pub use experiment::{run, ExperimentName, ExperimentSpec, Grid, IntRange, Outcome, Overrides};
pub use sweep::{Axis, Provenance, SweepResult};
