//! JSON sidecar describing how an output embedding was built.

use std::path::{Path, PathBuf};

use metavec_core::combine::Provenance;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceEntry {
    pub path: String,
    pub label: String,
    pub vocab_size: usize,
    pub dim: usize,
    pub duplicates_dropped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisCounts {
    pub source: usize,
    pub synthesized: usize,
    pub skipped_zero: usize,
    pub short_lists: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub path: String,
    pub format: String,
    pub vocab_size: usize,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub method: String,
    pub oov_policy: String,
    pub sources: Vec<SourceEntry>,
    /// Only meaningful for mvm.
    pub target_index: Option<usize>,
    pub k_neighbors: usize,
    pub dictionary_sizes: Vec<usize>,
    pub filtered_pairs: Vec<usize>,
    pub residuals: Vec<f64>,
    pub synthesis: Vec<SynthesisCounts>,
    pub reduce_dim: Option<usize>,
    pub post_remove: Option<usize>,
    pub output: OutputEntry,
}

impl Sidecar {
    pub fn from_provenance(p: &Provenance, sources: Vec<SourceEntry>, output: OutputEntry) -> Self {
        let synthesis = p
            .synthesis
            .as_ref()
            .map(|r| {
                r.per_space
                    .iter()
                    .enumerate()
                    .map(|(i, c)| SynthesisCounts {
                        source: i,
                        synthesized: c.synthesized,
                        skipped_zero: c.skipped_zero,
                        short_lists: c.short_lists,
                    })
                    .collect()
            })
            .unwrap_or_default();
        Sidecar {
            method: p.method.name().into(),
            oov_policy: p.oov.name().into(),
            sources,
            target_index: (p.method == metavec_core::combine::Method::Mvm).then_some(p.target_index),
            k_neighbors: p.k_neighbors,
            dictionary_sizes: p.dictionary_sizes.clone(),
            filtered_pairs: p.filtered_pairs.clone(),
            residuals: p.residuals.clone(),
            synthesis,
            reduce_dim: None,
            post_remove: None,
            output,
        }
    }
}

/// `<output>.provenance.json`
pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".provenance.json");
    output.with_file_name(name)
}
