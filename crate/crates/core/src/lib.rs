//! Exact numerical toolkit for testing whether a quantum map acting on an
//! escaping subsystem can signal into a distant laboratory.
//!
//! The crate builds the output state of a two-crystal aligned-signal-beam
//! interferometer, evolves the escaping probe mode under linear (Kraus)
//! channels or a nonlinear final-state-projection map, and checks the
//! no-signaling property: for linear probability-preserving evolution the
//! laboratory interference pattern is provably unaffected, while the
//! nonlinear probe map shifts the interference nulls by 45 degrees and is
//! flagged as signaling by the analyzer.
//!
//! Modules:
//! - [`linalg`]: dense complex tensor-product linear algebra (partial
//!   trace, Kronecker products, projectors, density-operator validation).
//! - [`maps`]: Kraus channels, local lifts, the nonlinear probe map,
//!   local product maps, linearity probing, random channel/state sampling.
//! - [`signaling`]: reduced-state deviation tests, witness search, and the
//!   linear / nonlinear-nonsignaling / signaling classification.
//! - [`interferometer`]: the output state, detector projectors, click
//!   probabilities in closed form and via the trace pipeline, and 2-D
//!   (phi, theta) interference scans.
//! - [`cli`]: the command-line front end and its file formats.

pub mod cli;
pub mod error;
pub mod interferometer;
pub mod linalg;
pub mod maps;
pub mod signaling;

pub use error::{Error, Result};
