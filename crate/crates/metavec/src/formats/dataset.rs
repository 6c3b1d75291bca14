use std::collections::BTreeMap;
use std::io::BufRead;

use metavec_core::eval::{Group, SimilarityDataset, SimilarityPair};

use crate::FormatError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Delimiter {
    #[default]
    Tab,
    Comma,
    Whitespace,
}

impl Delimiter {
    fn split(self, line: &str) -> Vec<&str> {
        match self {
            Delimiter::Tab => line.split('\t').map(str::trim).collect(),
            Delimiter::Comma => line.split(',').map(str::trim).collect(),
            Delimiter::Whitespace => line.split_whitespace().collect(),
        }
    }
}

fn lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String), FormatError>> {
    reader.split(b'\n').enumerate().filter_map(|(i, l)| {
        let line_no = i + 1;
        let bytes = match l {
            Ok(b) => b,
            Err(e) => return Some(Err(e.into())),
        };
        let text = match String::from_utf8(bytes) {
            Ok(t) => t,
            Err(_) => return Some(Err(FormatError::Utf8 { line: line_no })),
        };
        let trimmed = text.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            None
        } else {
            Some(Ok((line_no, trimmed.to_owned())))
        }
    })
}

/// Reads `word1 DELIM word2 DELIM score` lines; `#` lines are comments.
pub fn load_similarity_dataset<R: BufRead>(
    reader: R,
    name: &str,
    delimiter: Delimiter,
) -> Result<SimilarityDataset, FormatError> {
    let mut pairs = Vec::new();
    for item in lines(reader) {
        let (line, text) = item?;
        let fields = delimiter.split(&text);
        let [w1, w2, score] = fields.as_slice() else {
            return Err(FormatError::Malformed { line, reason: format!("expected 3 fields, found {}", fields.len()) });
        };
        let gold: f64 = score.parse().map_err(|_| FormatError::BadNumber { line, value: (*score).into() })?;
        if !gold.is_finite() {
            return Err(FormatError::NonFinite { line, value: (*score).into() });
        }
        if w1.is_empty() || w2.is_empty() {
            return Err(FormatError::Malformed { line, reason: "empty word".into() });
        }
        pairs.push(SimilarityPair { word1: (*w1).into(), word2: (*w2).into(), gold });
    }
    Ok(SimilarityDataset::new(name, pairs)?)
}

/// Reads `dataset TAB sim|rel` lines.
pub fn load_groups<R: BufRead>(reader: R) -> Result<BTreeMap<String, Group>, FormatError> {
    let mut groups = BTreeMap::new();
    for item in lines(reader) {
        let (line, text) = item?;
        let fields: Vec<&str> = text.split_whitespace().collect();
        let group = match fields.as_slice() {
            [_, g] if g.eq_ignore_ascii_case("sim") => Group::Similarity,
            [_, g] if g.eq_ignore_ascii_case("rel") => Group::Relatedness,
            _ => return Err(FormatError::Malformed { line, reason: "expected `dataset sim|rel`".into() }),
        };
        groups.insert(fields[0].to_owned(), group);
    }
    Ok(groups)
}
