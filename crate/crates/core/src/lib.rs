//! Core machinery for iterated shifted-totient recurrences.
//!
//! Everything in this crate is pure computation over integers: totient and
//! factorization primitives, a generic d-term orbit engine with cycle
//! detection, inequality verifiers for the orbit bounds, and exact
//! prime-product arithmetic (Mertens envelopes, Chebyshev-type products,
//! CRT block witnesses).
//!
//! The crate is `no_std` (with `alloc`); all IO, CLI, and serialization
//! live in the companion `torbit-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bounds;
pub mod mertens;
pub mod orbit;
pub mod primes;
pub mod totient;
