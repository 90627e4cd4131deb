//! Gathering of oblivious robots under a Round-Robin scheduler.
//!
//! * [`topology`]: hypercubes and the square grid, with automorphisms.
//! * [`swarm`]: the Look-Compute-Move engine and traces.
//! * [`hypercube`]: the hypercube gathering algorithm and its endgame table.
//! * [`grid`]: the square-grid gathering algorithm and its 3×2 table.
//! * [`table`]: synthesis of endgame move tables.
//! * [`adversary`]: ungatherability witnesses and strawman algorithms.
//! * [`verifier`]: table certificates and model-checking sweeps.

pub mod adversary;
pub mod error;
pub mod grid;
pub mod hypercube;
pub mod swarm;
pub mod table;
pub mod topology;
pub mod verifier;

pub use error::{Error, Result};
