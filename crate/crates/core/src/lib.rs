//! Multi-input inner-product functional encryption for federated aggregation.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the algorithmic
//! core:
//!
//! * [`algebra`]: modular arithmetic, prime-order groups, bounded discrete
//!   logarithms, discrete Gaussian sampling and `Z_q` rings.
//! * [`ipfe`]: single-input inner-product FE from DDH and from LWE, each in a
//!   selective and an adaptive variant.
//! * [`mife`]: the compiler lifting any two-step, linearly encrypting IPFE to
//!   `n` inputs with one-time pads.
//! * [`protocol`]: the encrypted federated aggregation protocol (TPA, server
//!   and clients), round labels, encodings, training-load assignment,
//!   termination and membership changes.
//! * [`params`] and [`memcost`]: parameter presets and memory-cost formulas.
//!
//! IO, threads, wall clocks and the command line live in the `fedmife` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod algebra;
mod error;
pub mod ipfe;
pub mod memcost;
pub mod mife;
pub mod params;
pub mod protocol;

pub use error::{Error, Result};
