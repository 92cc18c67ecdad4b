//! Exact simulator for a quantum bit commitment protocol built on an
//! asymmetric-beam-splitter Mach-Zehnder interferometer.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs and an explicit random source, so sessions can be
//! replayed from a seed and fanned out across threads by the caller.
//!
//! Layout:
//!
//! * [`optics`]: time-binned dual-rail single-photon states, beam splitters,
//!   storage rings, and the receiving interferometer.
//! * [`codes`]: binary linear codes, the parity split against the public
//!   mask, and brute-force combinatorics.
//! * [`strategies`]: the receiver-side intercept-resend strategies and their
//!   exact detection probabilities.
//! * [`protocol`]: commit/unveil state machine, mismatch counting, and the
//!   closed-form binding/concealing quantities.
//! * [`nogo`]: the three-register operator model used to argue against the
//!   local-unitary cheat.
//! * [`counterfactual`]: the chained-beam-splitter probe attack and the
//!   random-phase defense.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod codes;
pub mod counterfactual;
mod error;
pub mod linalg;
pub mod nogo;
pub mod optics;
pub mod protocol;
pub mod seeding;
pub mod stats;
pub mod strategies;

pub use error::{Error, Result};
