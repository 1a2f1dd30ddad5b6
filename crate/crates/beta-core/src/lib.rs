//! Event-state systems over orthomodular subspace logic.
//!
//! The crate is organized around four layers:
//!
//! - [`linalg`]: dense complex vectors and matrices with eigen- and polar
//!   decomposition, sized for desk-scale systems.
//! - [`omega`]: analysis of the quasi-periodic operator class — golden-ratio
//!   convergence, worst-case Euclid traces, substitution words, almost-period
//!   search, and the linear-map impossibility scan for an elementary
//!   cellular automaton.
//! - [`logic`]: composite event-state systems, subspace propositions with
//!   non-distributive meets and joins, combined states with prime indexing,
//!   and the extended observables that read them out.
//! - [`machine`]: the register machine driving those systems — spectrum
//!   measurement, conditional gates, entropy convergence, operator-recovery
//!   search, and natural-function transport.
//!
//! Construction of anything whose dimension could explode goes through a
//! global cap (default 4096, `BETA_DIM_CAP` overrides).

pub mod cap;
pub mod error;
pub mod linalg;
pub mod logic;
pub mod machine;
pub mod omega;
mod primes;

pub use error::{Error, Result};

/// Identifier stamped into every machine-readable report this crate emits.
pub const REPORT_SCHEMA: &str = "beta-machine/1";
