//! Robust 1-bit compressed sensing by constrained hinge-loss minimization.
//!
//! The crate simulates quantized Gaussian measurements ([`measure`]),
//! recovers structured signals by convex programming ([`estimate`]) over
//! convex signal sets ([`signal_sets`]), computes the geometric and
//! quantizer parameters that govern recovery ([`complexity`]), and runs
//! reproducible Monte Carlo sweeps ([`harness`]).

pub mod complexity;
pub mod error;
pub mod estimate;
pub mod harness;
pub mod measure;
pub mod par;
pub mod quadrature;
pub mod rng;
pub mod signal_sets;

/// Dense real vector used for signals, measurement rows and estimates.
pub type Vector = ndarray::Array1<f64>;

pub use error::{Error, Result};
pub use estimate::{Estimate, SolverConfig};
pub use measure::{Dataset, Quantizer};
pub use par::Execution;
pub use signal_sets::{SignalKind, SignalSet};
