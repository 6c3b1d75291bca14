//! Readers and writers for every on-disk format the pipeline uses.

mod binary;
mod dataset;
mod dictionary;
mod text;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use metavec_core::oov::SynthesisReport;
use metavec_core::EmbeddingSpace;

pub use binary::{parse_binary_embeddings, write_binary_embeddings};
pub use dataset::{load_groups, load_similarity_dataset, Delimiter};
pub use dictionary::load_bilingual_dictionary;
pub use text::{parse_text_embeddings, write_text_embeddings, HeaderMode, Precision};

use crate::FormatError;

/// What to do with a token that appears more than once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OnDuplicate {
    #[default]
    KeepFirst,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReadOptions {
    pub header: HeaderMode,
    pub on_duplicate: OnDuplicate,
    /// Stop after this many (kept) words.
    pub max_vocab: Option<usize>,
}

/// A parsed embedding file.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub space: EmbeddingSpace,
    /// Rows dropped under [`OnDuplicate::KeepFirst`].
    pub duplicates: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Binary,
}

impl Format {
    /// `.bin` files are binary, everything else text.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("bin") => Format::Binary,
            _ => Format::Text,
        }
    }
}

pub fn read_embeddings(path: &Path, format: Format, options: &ReadOptions) -> Result<Loaded, FormatError> {
    let reader = BufReader::new(File::open(path)?);
    let mut loaded = match format {
        Format::Text => parse_text_embeddings(reader, options)?,
        Format::Binary => parse_binary_embeddings(reader, options)?,
    };
    let label = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
    loaded.space = loaded.space.with_meta(label);
    Ok(loaded)
}

pub fn write_embeddings<W: Write>(
    space: &EmbeddingSpace,
    format: Format,
    precision: Precision,
    writer: W,
) -> Result<(), FormatError> {
    match format {
        Format::Text => write_text_embeddings(space, precision, writer),
        Format::Binary => write_binary_embeddings(space, writer),
    }
}

/// One line per synthesized word: `word TAB neighbour1,neighbour2,...`.
pub fn write_audit<W: Write>(report: &SynthesisReport, writer: W) -> Result<(), FormatError> {
    let mut w = BufWriter::new(writer);
    for e in &report.entries {
        writeln!(w, "{}\t{}", e.word, e.neighbors.join(","))?;
    }
    w.flush()?;
    Ok(())
}
