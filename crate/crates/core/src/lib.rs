//! Almost-uniform generation of satisfying assignments for CNF formulas.
//!
//! Witnesses are drawn by partitioning the solution space with random affine
//! XOR hash functions over a *sampling set* (ideally an independent support of
//! the formula), enumerating one small cell with a bounded SAT enumeration, and
//! picking a member of the cell uniformly at random. The hash width is anchored
//! once per formula by an approximate model count, so repeated draws only pay
//! for the per-cell enumeration.
//!
//! Module map:
//!
//! * [`formula`]: CNF model, DIMACS with `c ind` sampling-set lines, evaluation.
//! * [`hashing`]: the affine XOR hash family and its constraint form.
//! * [`engine`]: CDCL engine with XOR constraints and bounded enumeration.
//! * [`counting`]: exact and hashing-based approximate model counters.
//! * [`sampler`]: thresholds, presampling and per-draw cell sampling.
//! * [`harness`]: uniformity evaluation against an exact uniform sampler.
//!
//! With the default `parallel` feature, independent draws and counter trials
//! fan out over rayon; without it the same code runs sequentially. Every draw
//! owns its own random stream, so results do not depend on the schedule.

pub mod counting;
pub mod engine;
mod error;
pub mod exec;
pub mod formula;
pub mod harness;
pub mod hashing;
pub mod rng;
pub mod sampler;

pub use error::{Error, Result};
