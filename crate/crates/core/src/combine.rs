//! Meta-embedding combiners: map + synthesize + average, and the plain
//! average, concatenation and concatenation + PCA baselines.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::align::{align_to_target, MappingDictionary};
use crate::error::{Error, Result};
use crate::linalg::{apply_reduction, fit_reduction, normalize_rows_in_place, Matrix, Step0};
use crate::oov::{extend_all, union_vocabulary, SynthesisOptions, SynthesisReport, DEFAULT_NEIGHBORS};
use crate::space::EmbeddingSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Orthogonal mapping to a common space, OOV synthesis, averaging.
    Mvm,
    Average,
    Concat,
    ConcatReduce,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Mvm => "mvm",
            Method::Average => "average",
            Method::Concat => "concat",
            Method::ConcatReduce => "concat-reduce",
        }
    }
}

/// What a space contributes for a word it does not contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OovPolicy {
    /// Synthesize the vector from nearest neighbours before combining.
    NearestNeighbor,
    /// Average only the representations that exist. For concatenation this
    /// is the same as [`OovPolicy::Zero`].
    Available,
    /// Treat the word's vector as zero.
    Zero,
}

impl OovPolicy {
    pub fn name(self) -> &'static str {
        match self {
            OovPolicy::NearestNeighbor => "nn",
            OovPolicy::Available => "available",
            OovPolicy::Zero => "zero",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CombineConfig {
    pub method: Method,
    /// Source whose (normalized) space is the common space. Only used by MVM.
    pub target_index: usize,
    pub k_neighbors: usize,
    /// Output dimension; required for, and only for, `ConcatReduce`.
    pub reduce_dim: Option<usize>,
    /// Dominant directions removed after reduction.
    pub post_remove: usize,
    /// One prefix per source, prepended to every token (and to the matching
    /// side of explicit dictionaries).
    pub language_prefixes: Option<Vec<String>>,
    pub oov: OovPolicy,
    pub step0: Step0,
    /// Either empty or one entry per source; entries map that source's
    /// tokens onto the target's. `None` means vocabulary intersection.
    pub dictionaries: Vec<Option<MappingDictionary>>,
    /// Keep per-word neighbour lists in the synthesis report.
    pub audit: bool,
}

impl CombineConfig {
    pub fn new(method: Method) -> Self {
        let oov = match method {
            Method::Mvm => OovPolicy::NearestNeighbor,
            Method::Average => OovPolicy::Available,
            Method::Concat | Method::ConcatReduce => OovPolicy::Zero,
        };
        Self {
            method,
            target_index: 0,
            k_neighbors: DEFAULT_NEIGHBORS,
            reduce_dim: None,
            post_remove: 0,
            language_prefixes: None,
            oov,
            step0: Step0::default(),
            dictionaries: Vec::new(),
            audit: false,
        }
    }

    pub fn mvm() -> Self {
        Self::new(Method::Mvm)
    }

    pub fn average() -> Self {
        Self::new(Method::Average)
    }

    pub fn concat() -> Self {
        Self::new(Method::Concat)
    }

    pub fn concat_reduce(dim: usize) -> Self {
        Self { reduce_dim: Some(dim), ..Self::new(Method::ConcatReduce) }
    }

    pub fn validate(&self, n_sources: usize) -> Result<()> {
        match (self.method, self.reduce_dim) {
            (Method::ConcatReduce, None) => {
                return Err(Error::InvalidParameter("concat-reduce needs a target dimension".into()))
            }
            (Method::Mvm | Method::Average | Method::Concat, Some(_)) => {
                return Err(Error::InvalidParameter("a target dimension is only valid for concat-reduce".into()))
            }
            _ => {}
        }
        if self.target_index >= n_sources {
            return Err(Error::IndexOutOfRange { index: self.target_index, len: n_sources });
        }
        if self.k_neighbors == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if let Some(p) = &self.language_prefixes {
            if p.len() != n_sources {
                return Err(Error::InvalidParameter(alloc::format!(
                    "{} prefixes given for {n_sources} sources",
                    p.len()
                )));
            }
        }
        if !self.dictionaries.is_empty() && self.dictionaries.len() != n_sources {
            return Err(Error::InvalidParameter(alloc::format!(
                "{} dictionaries given for {n_sources} sources",
                self.dictionaries.len()
            )));
        }
        Ok(())
    }
}

/// How a meta-embedding was produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub method: Method,
    pub oov: OovPolicy,
    pub source_labels: Vec<String>,
    pub target_index: usize,
    pub k_neighbors: usize,
    /// Per source; empty for methods without alignment.
    pub dictionary_sizes: Vec<usize>,
    pub filtered_pairs: Vec<usize>,
    pub residuals: Vec<f64>,
    pub synthesis: Option<SynthesisReport>,
    pub output_dim: usize,
    pub vocab_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetaEmbedding {
    pub space: EmbeddingSpace,
    pub provenance: Provenance,
}

/// Runs the combiner selected by `config.method`.
pub fn combine(sources: &[EmbeddingSpace], config: &CombineConfig) -> Result<MetaEmbedding> {
    match config.method {
        Method::Mvm => combine_mvm(sources, config),
        Method::Average => combine_average(sources, config),
        Method::Concat => combine_concat(sources, config),
        Method::ConcatReduce => combine_concat_reduce(sources, config),
    }
}

/// Prepends `prefix` to every token.
pub fn apply_language_prefixes(space: &EmbeddingSpace, prefix: &str) -> Result<EmbeddingSpace> {
    if prefix.chars().any(char::is_whitespace) {
        return Err(Error::InvalidPrefix(prefix.into()));
    }
    if prefix.is_empty() {
        return Ok(space.clone());
    }
    let tokens = space.tokens().iter().map(|t| alloc::format!("{prefix}{t}")).collect();
    let mut out = EmbeddingSpace::new(tokens, space.matrix().clone())?;
    if let Some(m) = space.meta() {
        out = out.with_meta(m);
    }
    Ok(out)
}

fn prefixed(sources: &[EmbeddingSpace], config: &CombineConfig) -> Result<Vec<EmbeddingSpace>> {
    match &config.language_prefixes {
        None => Ok(sources.to_vec()),
        Some(p) => sources.iter().zip(p).map(|(s, p)| apply_language_prefixes(s, p)).collect(),
    }
}

fn labels(sources: &[EmbeddingSpace]) -> Vec<String> {
    sources
        .iter()
        .enumerate()
        .map(|(i, s)| s.meta().map_or_else(|| alloc::format!("source{i}"), String::from))
        .collect()
}

fn check_same_dim(sources: &[EmbeddingSpace]) -> Result<usize> {
    let dim = sources[0].dim();
    for s in sources {
        if s.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: s.dim() });
        }
    }
    Ok(dim)
}

fn normalized_copies(sources: &[EmbeddingSpace]) -> Vec<EmbeddingSpace> {
    sources
        .iter()
        .map(|s| {
            let mut m = s.matrix().clone();
            normalize_rows_in_place(&mut m);
            s.with_matrix(m).expect("normalization keeps invariants")
        })
        .collect()
}

fn synthesis_options(config: &CombineConfig) -> SynthesisOptions {
    SynthesisOptions { k: config.k_neighbors, audit: config.audit }
}

/// Per-word mean across spaces. A missing word contributes nothing
/// (`zero_fill = false`) or a zero vector (`zero_fill = true`). Contributions are
/// summed in sorted order so the result does not depend on source order.
fn average_spaces(spaces: &[EmbeddingSpace], vocab: &[String], zero_fill: bool) -> Result<Matrix> {
    let dim = spaces[0].dim();
    let mut out = Matrix::zeros(vocab.len(), dim);
    let mut values = Vec::with_capacity(spaces.len());
    for (r, w) in vocab.iter().enumerate() {
        let rows: Vec<&[f64]> = spaces.iter().filter_map(|s| s.get(w)).collect();
        let count = if zero_fill { spaces.len() } else { rows.len() };
        let row = out.row_mut(r);
        for (c, slot) in row.iter_mut().enumerate() {
            values.clear();
            values.extend(rows.iter().map(|v| v[c]));
            values.sort_by(f64::total_cmp);
            *slot = values.iter().sum::<f64>() / count as f64;
        }
    }
    Ok(out)
}

/// Map every source onto the target with orthogonal Procrustes, fill missing
/// words, average, and normalize rows.
pub fn combine_mvm(sources: &[EmbeddingSpace], config: &CombineConfig) -> Result<MetaEmbedding> {
    if sources.len() < 2 {
        return Err(Error::TooFew { needed: 2, got: sources.len() });
    }
    config.validate(sources.len())?;
    check_same_dim(sources)?;
    let spaces = prefixed(sources, config)?;
    let dictionaries: Vec<Option<MappingDictionary>> = match &config.language_prefixes {
        Some(p) if !config.dictionaries.is_empty() => config
            .dictionaries
            .iter()
            .enumerate()
            .map(|(i, d)| d.as_ref().map(|d| d.with_prefixes(&p[i], &p[config.target_index])))
            .collect(),
        _ => config.dictionaries.clone(),
    };
    let aligned = align_to_target(&spaces, config.target_index, &dictionaries, config.step0)?;

    let vocab = union_vocabulary(&aligned.spaces);
    let (matrix, synthesis) = match config.oov {
        OovPolicy::NearestNeighbor => {
            let (extended, report) = extend_all(&aligned.spaces, synthesis_options(config))?;
            (average_spaces(&extended, &vocab, false)?, Some(report))
        }
        OovPolicy::Available => (average_spaces(&aligned.spaces, &vocab, false)?, None),
        OovPolicy::Zero => (average_spaces(&aligned.spaces, &vocab, true)?, None),
    };
    let mut matrix = matrix;
    normalize_rows_in_place(&mut matrix);
    let space = EmbeddingSpace::new(vocab, matrix)?;
    let provenance = Provenance {
        method: Method::Mvm,
        oov: config.oov,
        source_labels: labels(sources),
        target_index: config.target_index,
        k_neighbors: config.k_neighbors,
        dictionary_sizes: aligned.reports.iter().map(|r| r.dictionary_size).collect(),
        filtered_pairs: aligned.reports.iter().map(|r| r.filtered).collect(),
        residuals: aligned.reports.iter().map(|r| r.residual).collect(),
        synthesis,
        output_dim: space.dim(),
        vocab_size: space.len(),
    };
    Ok(MetaEmbedding { space, provenance })
}

fn baseline_provenance(
    method: Method,
    sources: &[EmbeddingSpace],
    config: &CombineConfig,
    synthesis: Option<SynthesisReport>,
    space: &EmbeddingSpace,
) -> Provenance {
    Provenance {
        method,
        oov: config.oov,
        source_labels: labels(sources),
        target_index: config.target_index,
        k_neighbors: config.k_neighbors,
        dictionary_sizes: Vec::new(),
        filtered_pairs: Vec::new(),
        residuals: Vec::new(),
        synthesis,
        output_dim: space.dim(),
        vocab_size: space.len(),
    }
}

/// Row-normalized sources averaged per word, without any mapping.
pub fn combine_average(sources: &[EmbeddingSpace], config: &CombineConfig) -> Result<MetaEmbedding> {
    if sources.is_empty() {
        return Err(Error::TooFew { needed: 1, got: 0 });
    }
    config.validate(sources.len())?;
    check_same_dim(sources)?;
    let spaces = normalized_copies(&prefixed(sources, config)?);
    let vocab = union_vocabulary(&spaces);
    let (matrix, synthesis) = match config.oov {
        OovPolicy::NearestNeighbor => {
            let (extended, report) = extend_all(&spaces, synthesis_options(config))?;
            (average_spaces(&extended, &vocab, false)?, Some(report))
        }
        OovPolicy::Available => (average_spaces(&spaces, &vocab, false)?, None),
        OovPolicy::Zero => (average_spaces(&spaces, &vocab, true)?, None),
    };
    let space = EmbeddingSpace::new(vocab, matrix)?;
    let provenance = baseline_provenance(Method::Average, sources, config, synthesis, &space);
    Ok(MetaEmbedding { space, provenance })
}

fn concat_matrix(
    sources: &[EmbeddingSpace],
    config: &CombineConfig,
) -> Result<(EmbeddingSpace, Option<SynthesisReport>)> {
    if sources.is_empty() {
        return Err(Error::TooFew { needed: 1, got: 0 });
    }
    config.validate(sources.len())?;
    let spaces = normalized_copies(&prefixed(sources, config)?);
    let vocab = union_vocabulary(&spaces);
    let (spaces, synthesis) = match config.oov {
        OovPolicy::NearestNeighbor => {
            let (extended, report) = extend_all(&spaces, synthesis_options(config))?;
            (extended, Some(report))
        }
        OovPolicy::Available | OovPolicy::Zero => (spaces, None),
    };
    let total: usize = spaces.iter().map(EmbeddingSpace::dim).sum();
    let mut data = vec![0.0; vocab.len() * total];
    for (r, w) in vocab.iter().enumerate() {
        let mut offset = r * total;
        for s in &spaces {
            if let Some(v) = s.get(w) {
                data[offset..offset + s.dim()].copy_from_slice(v);
            }
            offset += s.dim();
        }
    }
    Ok((EmbeddingSpace::from_rows(vocab, total, data)?, synthesis))
}

/// Per-word concatenation of the row-normalized sources; missing blocks are
/// zero unless NN synthesis is requested.
pub fn combine_concat(sources: &[EmbeddingSpace], config: &CombineConfig) -> Result<MetaEmbedding> {
    let (space, synthesis) = concat_matrix(sources, config)?;
    let provenance = baseline_provenance(Method::Concat, sources, config, synthesis, &space);
    Ok(MetaEmbedding { space, provenance })
}

/// Concatenation followed by PCA to `reduce_dim` dimensions.
pub fn combine_concat_reduce(sources: &[EmbeddingSpace], config: &CombineConfig) -> Result<MetaEmbedding> {
    let (concat, synthesis) = concat_matrix(sources, config)?;
    let dim = config.reduce_dim.expect("validated");
    let rmap = fit_reduction(&concat, dim, config.post_remove)?;
    let space = apply_reduction(&concat, &rmap)?;
    let provenance = baseline_provenance(Method::ConcatReduce, sources, config, synthesis, &space);
    Ok(MetaEmbedding { space, provenance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cosine, norm, normalize_step0};
    use alloc::string::ToString;

    fn space(tokens: &[&str], dim: usize, data: Vec<f64>) -> EmbeddingSpace {
        EmbeddingSpace::from_rows(tokens.iter().map(|t| t.to_string()).collect(), dim, data).unwrap()
    }

    #[test]
    fn average_of_orthogonal_pair() {
        let a = space(&["w"], 2, vec![1.0, 0.0]);
        let b = space(&["w"], 2, vec![0.0, 1.0]);
        let m = combine_average(&[a, b], &CombineConfig::average()).unwrap();
        assert_eq!(m.space.row(0), &[0.5, 0.5]);
    }

    #[test]
    fn average_uses_available_representations() {
        let a = space(&["w", "x"], 2, vec![3.0, 4.0, 1.0, 0.0]);
        let b = space(&["w"], 2, vec![0.0, 2.0]);
        let m = combine_average(&[a.clone(), b.clone()], &CombineConfig::average()).unwrap();
        assert_eq!(m.space.get("x").unwrap(), &[1.0, 0.0]);
        let mut zero = CombineConfig::average();
        zero.oov = OovPolicy::Zero;
        let m = combine_average(&[a, b], &zero).unwrap();
        assert_eq!(m.space.get("x").unwrap(), &[0.5, 0.0]);
    }

    #[test]
    fn average_with_itself_is_normalized_space() {
        let a = space(&["u", "v"], 2, vec![3.0, 4.0, 0.0, -2.0]);
        let m = combine_average(&[a.clone(), a], &CombineConfig::average()).unwrap();
        assert_eq!(m.space.matrix(), &Matrix::from_rows(&[[0.6, 0.8], [0.0, -1.0]]));
    }

    #[test]
    fn average_rejects_dim_mismatch() {
        let a = space(&["w"], 2, vec![1.0, 0.0]);
        let b = space(&["w"], 3, vec![0.0, 1.0, 0.0]);
        assert!(matches!(combine_average(&[a, b], &CombineConfig::average()), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn concat_blocks_and_zero_fill() {
        let a = space(&["w", "x"], 2, vec![1.0, 0.0, 0.0, 2.0]);
        let b = space(&["w"], 2, vec![0.0, 1.0]);
        let m = combine_concat(&[a, b], &CombineConfig::concat()).unwrap();
        assert_eq!(m.space.get("w").unwrap(), &[1.0, 0.0, 0.0, 1.0]);
        assert_eq!(m.space.get("x").unwrap(), &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(m.space.dim(), 4);
    }

    #[test]
    fn concat_accepts_mixed_dimensions() {
        let a = space(&["w"], 2, vec![1.0, 0.0]);
        let b = space(&["w"], 3, vec![0.0, 0.0, 5.0]);
        let m = combine_concat(&[a, b], &CombineConfig::concat()).unwrap();
        assert_eq!(m.space.row(0), &[1.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn concat_reduce_shape_and_config_checks() {
        let a = space(&["p", "q", "r"], 2, vec![1.0, 0.0, 0.0, 1.0, 0.5, 0.5]);
        let b = space(&["p", "q", "r"], 2, vec![0.2, 1.0, 1.0, 0.1, -0.5, 0.5]);
        let m = combine_concat_reduce(&[a.clone(), b.clone()], &CombineConfig::concat_reduce(2)).unwrap();
        assert_eq!(m.space.dim(), 2);
        let mut bad = CombineConfig::concat_reduce(2);
        bad.reduce_dim = None;
        assert!(combine_concat_reduce(&[a.clone(), b.clone()], &bad).is_err());
        assert!(combine_concat_reduce(&[a, b], &CombineConfig::concat_reduce(5)).is_err());
    }

    #[test]
    fn prefixes() {
        let s = space(&["dog", "cat"], 1, vec![1.0, 2.0]);
        let p = apply_language_prefixes(&s, "en:").unwrap();
        assert_eq!(p.tokens(), ["en:dog", "en:cat"]);
        assert_eq!(p.matrix(), s.matrix());
        assert_eq!(apply_language_prefixes(&s, "").unwrap(), s);
        assert_eq!(apply_language_prefixes(&s, "e n").unwrap_err(), Error::InvalidPrefix("e n".into()));
    }

    #[test]
    fn prefixed_spaces_need_a_dictionary() {
        let s = space(&["a", "b", "c"], 2, vec![1.0, 0.0, 0.0, 1.0, 0.7, 0.7]);
        let mut cfg = CombineConfig::mvm();
        cfg.language_prefixes = Some(vec!["en:".into(), "es:".into()]);
        assert_eq!(combine_mvm(&[s.clone(), s.clone()], &cfg).unwrap_err(), Error::EmptyIntersection);
        let pairs = ["a", "b", "c"].iter().map(|t| (t.to_string(), t.to_string())).collect();
        cfg.dictionaries = vec![None, Some(MappingDictionary::new(pairs))];
        // alignment now works, but the two vocabularies share no neighbour candidates
        assert_eq!(combine_mvm(&[s.clone(), s.clone()], &cfg).unwrap_err(), Error::EmptyIntersection);
        cfg.oov = OovPolicy::Available;
        let m = combine_mvm(&[s.clone(), s], &cfg).unwrap();
        assert_eq!(m.space.len(), 6);
        assert!(m.space.contains("es:b"));
        assert_eq!(m.provenance.dictionary_sizes[1], 3);
    }

    #[test]
    fn mvm_union_vocabulary_and_unit_rows() {
        let a = space(&["a", "b", "c"], 2, vec![1.0, 0.1, 0.2, 1.0, 0.8, 0.7]);
        let b = space(&["b", "c", "d"], 2, vec![0.1, 1.0, 0.9, 0.6, 1.0, 0.0]);
        let mut cfg = CombineConfig::mvm();
        cfg.audit = true;
        let m = combine_mvm(&[a, b], &cfg).unwrap();
        assert_eq!(m.space.tokens(), ["a", "b", "c", "d"]);
        let rep = m.provenance.synthesis.unwrap();
        assert_eq!(rep.per_space[0].synthesized, 1);
        assert_eq!(rep.per_space[1].synthesized, 1);
        assert!(rep.entries.iter().any(|e| e.word == "a") && rep.entries.iter().any(|e| e.word == "d"));
        for r in m.space.matrix().iter_rows() {
            assert!((norm(r) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mvm_self_ensemble_preserves_cosines() {
        let s = space(
            &["a", "b", "c", "d", "e"],
            3,
            vec![1.0, 0.2, 0.1, 0.3, 1.0, -0.2, -0.4, 0.1, 1.0, 0.5, 0.5, 0.5, -1.0, 0.3, 0.2],
        );
        let m = combine_mvm(&[s.clone(), s.clone()], &CombineConfig::mvm()).unwrap();
        let n = normalize_step0(&s, Step0::default()).space;
        for i in 0..5 {
            for j in 0..5 {
                let a = cosine(m.space.row(i), m.space.row(j)).unwrap();
                let b = cosine(n.row(i), n.row(j)).unwrap();
                assert!((a - b).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn mvm_needs_two_sources() {
        let s = space(&["a"], 1, vec![1.0]);
        assert_eq!(combine_mvm(&[s], &CombineConfig::mvm()).unwrap_err(), Error::TooFew { needed: 2, got: 1 });
    }

    #[test]
    fn config_validation() {
        let mut c = CombineConfig::mvm();
        c.reduce_dim = Some(3);
        assert!(c.validate(2).is_err());
        let mut c = CombineConfig::mvm();
        c.target_index = 2;
        assert!(c.validate(2).is_err());
        assert!(CombineConfig::concat_reduce(3).validate(2).is_ok());
    }
}
