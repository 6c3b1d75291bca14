//! Mapping dictionaries and projection of several spaces into one common space.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{apply_map, normalize_step0, solve_procrustes, Normalized, OrthogonalMap, Step0};
use crate::par;
use crate::space::EmbeddingSpace;

/// Ordered `(source token, target token)` anchor pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MappingDictionary {
    pairs: Vec<(String, String)>,
}

impl MappingDictionary {
    /// Keeps the first occurrence of every repeated pair.
    pub fn new(pairs: Vec<(String, String)>) -> Self {
        let mut seen = BTreeSet::new();
        let pairs = pairs.into_iter().filter(|p| seen.insert(p.clone())).collect();
        Self { pairs }
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Drops pairs whose source token is missing from `source` or whose target
    /// token is missing from `target`. Returns the kept dictionary and the number
    /// of dropped pairs.
    pub fn restrict(&self, source: &EmbeddingSpace, target: &EmbeddingSpace) -> (MappingDictionary, usize) {
        let pairs: Vec<_> =
            self.pairs.iter().filter(|(s, t)| source.contains(s) && target.contains(t)).cloned().collect();
        let filtered = self.pairs.len() - pairs.len();
        (MappingDictionary { pairs }, filtered)
    }

    /// Prepends `source_prefix` to every source token and `target_prefix` to every target token.
    pub fn with_prefixes(&self, source_prefix: &str, target_prefix: &str) -> MappingDictionary {
        let pairs = self
            .pairs
            .iter()
            .map(|(s, t)| (alloc::format!("{source_prefix}{s}"), alloc::format!("{target_prefix}{t}")))
            .collect();
        MappingDictionary { pairs }
    }
}

/// Pairs `(t, t)` for every token shared by both vocabularies, in source order.
pub fn build_intersection_dictionary(source: &EmbeddingSpace, target: &EmbeddingSpace) -> Result<MappingDictionary> {
    let pairs: Vec<_> = source.tokens().iter().filter(|t| target.contains(t)).map(|t| (t.clone(), t.clone())).collect();
    if pairs.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    Ok(MappingDictionary { pairs })
}

/// Bookkeeping for one source's alignment.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentReport {
    /// Pairs actually used to fit the map.
    pub dictionary_size: usize,
    /// Explicit-dictionary pairs dropped because a token was absent.
    pub filtered: usize,
    /// `‖x·w − z‖_F` over the dictionary rows.
    pub residual: f64,
    /// Rows left zero by normalization.
    pub zero_rows: usize,
}

/// All sources expressed in the coordinates of the (normalized) target space.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedCollection {
    pub target_index: usize,
    /// Normalized and mapped spaces, in input order. The target is only normalized.
    pub spaces: Vec<EmbeddingSpace>,
    /// Learned maps, in input order. The target's map is the identity.
    pub maps: Vec<OrthogonalMap>,
    pub reports: Vec<AlignmentReport>,
}

impl AlignedCollection {
    pub fn target(&self) -> &EmbeddingSpace {
        &self.spaces[self.target_index]
    }
}

/// Learns the orthogonal map taking already-normalized `source` onto `target`
/// using the paired rows named by `dictionary`.
pub fn fit_pair(
    source: &EmbeddingSpace,
    target: &EmbeddingSpace,
    dictionary: &MappingDictionary,
) -> Result<(OrthogonalMap, AlignmentReport)> {
    if source.dim() != target.dim() {
        return Err(Error::DimensionMismatch { expected: target.dim(), found: source.dim() });
    }
    let (dict, filtered) = dictionary.restrict(source, target);
    if dict.is_empty() {
        return Err(Error::EmptyDictionary { filtered });
    }
    let (src_rows, tgt_rows): (Vec<usize>, Vec<usize>) =
        dict.pairs().iter().map(|(s, t)| (source.index().get(s).unwrap(), target.index().get(t).unwrap())).unzip();
    let x = source.matrix().select_rows(&src_rows);
    let z = target.matrix().select_rows(&tgt_rows);
    let map = solve_procrustes(&x, &z)?;
    let residual = map.apply_matrix(&x)?.frobenius_distance(&z)?;
    Ok((map, AlignmentReport { dictionary_size: dict.len(), filtered, residual, zero_rows: 0 }))
}

/// Normalizes every source and maps each non-target source onto the target.
///
/// `dictionaries` is either empty (intersection dictionaries everywhere) or has
/// one entry per source; `None` entries fall back to the vocabulary intersection
/// and the target's own entry is ignored. Each source is aligned independently,
/// so its result does not depend on which other sources take part.
pub fn align_to_target(
    sources: &[EmbeddingSpace],
    target_index: usize,
    dictionaries: &[Option<MappingDictionary>],
    step0: Step0,
) -> Result<AlignedCollection> {
    if sources.is_empty() {
        return Err(Error::Empty("no sources to align"));
    }
    if target_index >= sources.len() {
        return Err(Error::IndexOutOfRange { index: target_index, len: sources.len() });
    }
    if !dictionaries.is_empty() && dictionaries.len() != sources.len() {
        return Err(Error::InvalidParameter(alloc::format!(
            "{} dictionaries given for {} sources",
            dictionaries.len(),
            sources.len()
        )));
    }
    let dim = sources[target_index].dim();
    for s in sources {
        if s.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: s.dim() });
        }
    }

    let Normalized { space: target, zero_rows: target_zero } = normalize_step0(&sources[target_index], step0);
    let indices: Vec<usize> = (0..sources.len()).collect();
    let results = par::map(&indices, |&i| -> Result<_> {
        if i == target_index {
            let report =
                AlignmentReport { dictionary_size: target.len(), filtered: 0, residual: 0.0, zero_rows: target_zero };
            return Ok((target.clone(), OrthogonalMap::identity(dim), report));
        }
        let Normalized { space, zero_rows } = normalize_step0(&sources[i], step0);
        let dict = match dictionaries.get(i).and_then(Option::as_ref) {
            Some(d) => d.clone(),
            None => build_intersection_dictionary(&space, &target)?,
        };
        let (map, mut report) = fit_pair(&space, &target, &dict)?;
        report.zero_rows = zero_rows;
        Ok((apply_map(&space, &map)?, map, report))
    });

    let mut spaces = Vec::with_capacity(sources.len());
    let mut maps = Vec::with_capacity(sources.len());
    let mut reports = Vec::with_capacity(sources.len());
    for r in results {
        let (s, m, rep) = r?;
        spaces.push(s);
        maps.push(m);
        reports.push(rep);
    }
    Ok(AlignedCollection { target_index, spaces, maps, reports })
}
