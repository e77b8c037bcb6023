//! Temporal quantum eraser heralding between pairs of modally-impure
//! single-photon sources.
//!
//! Analytic engines for parametric pair sources ([`spdc`]), Λ-emitter
//! single-photon extraction ([`lambda`]) and fusion gates ([`fusion`]),
//! all cross-checked against an exact brute-force Fock-space simulator
//! ([`oracle`]).

pub mod cli;
pub mod error;
pub mod fusion;
pub mod optics;
pub mod spdc;
pub mod lambda;
pub mod oracle;
pub mod temporal;
pub mod verify;

pub use error::{Error, Result};
