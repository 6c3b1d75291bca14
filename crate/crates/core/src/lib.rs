//! Meta-embedding construction from pre-trained word vectors.
//!
//! The pipeline implemented here combines several source embeddings into one:
//!
//! 1. every source is length-normalized and mean-centered ([`linalg::normalize_step0`]),
//! 2. each source is projected onto a chosen target space with an orthogonal
//!    Procrustes map learned from a mapping dictionary ([`align`]),
//! 3. words missing from a space are synthesized as the centroid of their nearest
//!    neighbours' vectors ([`oov`]),
//! 4. the aligned, vocabulary-complete spaces are averaged ([`combine`]).
//!
//! Baseline combiners (plain averaging, concatenation, concatenation followed by
//! PCA) and an intrinsic word-similarity evaluator ([`eval`]) are included.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, IO and the CLI live
//! in the `metavec` crate. Enable the `parallel` feature to spread per-source
//! alignment and per-word synthesis over a rayon pool; results do not depend on
//! the number of threads.
#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod align;
pub mod combine;
mod error;
pub mod eval;
pub mod linalg;
pub mod oov;
mod par;
mod space;

pub use error::{Error, Result};
pub use space::{EmbeddingSpace, TokenIndex};
