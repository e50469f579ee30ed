//! Dynamic capacity region of quantum channels.
//!
//! This crate computes the three-way trade-off between classical
//! communication (C), quantum communication (Q) and shared entanglement (E)
//! achievable over a noisy quantum channel:
//!
//! * [`qmat`]: small dense complex linear algebra (Jacobi eigensolver,
//!   tensor products, partial traces, purification).
//! * [`entropy`]: von Neumann entropy and the mutual/coherent informations.
//! * [`channel`]: Kraus channels, isometric extensions, complementary
//!   channels, and the dephasing and erasure families.
//! * [`cqstate`]: one-shot entropic bounds of a classical-quantum ensemble.
//! * [`dcap`]: the weighted dynamic capacity objective and its maximization.
//! * [`region`]: rate triples, the unit-resource cone, closed-form boundary
//!   surfaces, membership and supporting hyperplanes.
//! * [`oracle`]: brute-force grid searches used to cross-check the above.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;

pub mod channel;
pub mod cqstate;
pub mod dcap;
pub mod entropy;
mod error;
pub mod oracle;
pub mod qmat;
pub mod region;
pub mod sample;

pub use error::{Error, Result};

/// Quantities of information, measured in bits (base-two logarithms).
pub type Bits = f64;
