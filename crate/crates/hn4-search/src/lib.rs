//! State-vector simulator and experiment harness for coined quantum-walk
//! spatial search on degree-4 Hanoi networks (HN4).
//!
//! The crate covers the full pipeline behind the `hn4-search` binary:
//!
//! * [`topology`] — the HN4 graph (`N = 2^n` backbone cycle plus one
//!   hierarchy of long-range edges) and the port map of the shift operator;
//! * [`walker`] — coin-position state vectors, the epsilon coin family, and
//!   the plain, marked and ancilla-controlled one-step evolutions;
//! * [`search`] — full runs of the three search methods with first-peak
//!   detection and cost accounting;
//! * [`analysis`] — parameter sweeps over size / coin bias / ancilla
//!   rotation and log-log power-law fits of the results;
//! * [`tables`] — the CSV formats every surface of the harness emits;
//! * [`cli`] — the `topology` / `run` / `sweep` / `fit` subcommands.
//!
//! Everything is deterministic: there is no randomness anywhere in the
//! pipeline, and sweep tables come out byte-identical across reruns and
//! worker counts.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod search;
pub mod tables;
pub mod topology;
pub mod walker;

pub use error::{Error, Result};
