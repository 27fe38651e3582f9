//! Expected-hitting-time analysis for (λ+λ) evolutionary neural architecture
//! search over the combination encoding (binary edge slots followed by
//! categorical operation slots).
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! * [`genotype`]: the encoding, Hamming-distance machinery and exact
//!   counting of solution-space and population-space distance classes.
//! * [`operators`]: initialization, the four mutation operators and elitist
//!   truncation selection.
//! * [`transition`]: closed-form offspring-distance distributions for every
//!   operator, together with an exhaustive enumeration oracle.
//! * [`drift`]: distance-class distributions and the expected-hitting-time
//!   lower bounds built from average drift.
//! * [`landscape`] and [`simulator`]: fitness landscapes and the generational
//!   loop used to measure hitting times empirically.
//!
//! File formats, parallel sweeps and the command-line front end live in the
//! companion `enas-runtime` crate.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod drift;
mod error;
pub mod genotype;
pub mod landscape;
pub mod operators;
pub mod rng;
pub mod simulator;
pub mod transition;

pub use error::{Error, Result};
pub use genotype::{BigCount, DistanceProfile, Genotype, SearchSpaceParams};
pub use operators::{MutationOp, Population};
pub use rng::RandomSeed;
