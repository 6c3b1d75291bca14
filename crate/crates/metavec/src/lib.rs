//! File formats and the command-line pipeline around [`metavec_core`].
//!
//! * [`formats`]: word-vector text and binary files, bilingual dictionaries,
//!   word-similarity datasets, synthesis audit dumps.
//! * [`provenance`]: the JSON sidecar written next to every combined embedding.
//! * [`report`]: evaluation tables and the machine-readable evaluation report.
//! * [`cli`]: the `metavec` binary.

pub mod cli;
mod error;
pub mod formats;
pub mod output;
pub mod provenance;
pub mod report;

pub use error::FormatError;
