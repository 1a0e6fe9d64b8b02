//! Link-level models for a multiple-access relay channel: two (or more)
//! users share a relay that forwards the analogue sum of the blocks it
//! decoded, and the destination separates users by nulling and successive
//! interference cancellation.
//!
//! The crate is `no_std` (with `alloc`) and holds the numerics, signal
//! models, detectors, channel coding and closed-form bounds. Sweeps, file
//! formats and the command line live in the companion `marc-sim` crate.
#![no_std]
// When anything in the build links std, its inherent float methods shadow `Float`.
#![allow(unused_imports)]

extern crate alloc;

pub mod baselines;
pub mod bounds;
pub mod channel;
pub mod coding;
pub mod detector;
pub mod error;
pub mod phy;
pub mod protocol;
pub mod quad;
pub mod rng;
pub mod special;
pub mod trial;

pub use error::{DomainError, Error, Result};
