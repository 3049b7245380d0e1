//! Genetic algorithm engine over binary genotypes with feedback control of
//! the per-bit mutation probability and the population size.
//!
//! The controllers steer the mutation probability toward the error threshold
//! of the current search neighborhood by bisecting a bracket around it, using
//! only the generation-to-generation behavior of the best fitness as feedback:
//! constant best fitness means selection dominates (raise mutation), a drop
//! means mutation dominates (lower it), an improvement means the search moved
//! to a new neighborhood (restart the bracket).  A deterministic
//! infinite-population quasispecies oracle ([`quasispecies`]) locates the
//! error threshold on the sharp-peak landscape so the control heuristics can
//! be validated against it.
//!
//! The crate is `no_std`-compatible (requires `alloc`); all I/O, file formats
//! and the CLI live in the companion `criga-harness` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod control;
pub mod error;
pub mod ga;
pub mod genotype;
pub mod landscape;
pub mod quasispecies;

pub use control::{
    ControlAction, ControlStrategy, ControllerKind, DichotomyState, RunConfig, RunResult,
    SizePolicy, Termination,
};
pub use error::{Error, Result};
pub use ga::{CrossoverKind, GaParams, GenerationRecord, Individual, Population, Selection};
pub use genotype::Genotype;
pub use landscape::FitnessLandscape;
