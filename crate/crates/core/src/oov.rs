//! Nearest-neighbour synthesis of vectors for words a space lacks.
//!
//! A word `w` missing from space `E2` but present in `E1` gets, in `E2`, the
//! centroid of the `E2` vectors of its `k` nearest neighbours in `E1`. Only
//! words present in both spaces from the start are eligible neighbours, so a
//! synthesized vector never feeds another synthesis.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::linalg::{cosine_with_norms, norm, Matrix};
use crate::par;
use crate::space::EmbeddingSpace;

pub const DEFAULT_NEIGHBORS: usize = 10;

/// Neighbours of `query`, best first.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborList {
    pub query: String,
    pub neighbors: Vec<(String, f64)>,
}

impl NeighborList {
    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.neighbors.iter().map(|(t, _)| t.as_str())
    }
}

/// The `k` tokens with highest cosine to `query`, excluding `query` itself.
///
/// Ties are broken by ascending token order. Tokens with a zero vector have no
/// cosine and are never returned. Fewer than `k` results come back when there
/// are fewer candidates.
pub fn nearest_neighbors(space: &EmbeddingSpace, query: &str, k: usize) -> Result<NeighborList> {
    nearest_neighbors_among(space, query, k, |_| true)
}

/// [`nearest_neighbors`] limited to tokens accepted by `restrict_to`.
pub fn nearest_neighbors_among<F>(space: &EmbeddingSpace, query: &str, k: usize, restrict_to: F) -> Result<NeighborList>
where
    F: Fn(&str) -> bool,
{
    let q = space.index().get(query).ok_or_else(|| Error::UnknownToken(query.into()))?;
    let norms = row_norms(space.matrix());
    let hits = top_k(space, &norms, q, k, |i| restrict_to(&space.tokens()[i]))?;
    Ok(to_list(space, q, &hits))
}

fn to_list(space: &EmbeddingSpace, q: usize, hits: &[(usize, f64)]) -> NeighborList {
    NeighborList {
        query: space.tokens()[q].clone(),
        neighbors: hits.iter().map(|&(i, s)| (space.tokens()[i].clone(), s)).collect(),
    }
}

pub(crate) fn row_norms(m: &Matrix) -> Vec<f64> {
    m.iter_rows().map(norm).collect()
}

fn top_k<F>(space: &EmbeddingSpace, norms: &[f64], q: usize, k: usize, accept: F) -> Result<Vec<(usize, f64)>>
where
    F: Fn(usize) -> bool,
{
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let m = space.matrix();
    let qv = m.row(q);
    if norms[q] == 0.0 {
        return Err(Error::ZeroVector(space.tokens()[q].clone()));
    }
    let tokens = space.tokens();
    let mut hits: Vec<(usize, f64)> = (0..space.len())
        .filter(|&i| i != q && accept(i))
        .filter_map(|i| cosine_with_norms(qv, norms[q], m.row(i), norms[i]).map(|c| (i, c)))
        .collect();
    if hits.is_empty() {
        return Err(Error::NoCandidates(tokens[q].clone()));
    }
    let order = |a: &(usize, f64), b: &(usize, f64)| -> Ordering {
        b.1.total_cmp(&a.1).then_with(|| tokens[a.0].cmp(&tokens[b.0]))
    };
    if hits.len() > k {
        hits.select_nth_unstable_by(k - 1, order);
        hits.truncate(k);
    }
    hits.sort_by(order);
    Ok(hits)
}

fn centroid(m: &Matrix, rows: impl Iterator<Item = usize>) -> Vec<f64> {
    let mut acc = vec![0.0; m.cols()];
    let mut n = 0usize;
    for i in rows {
        for (a, x) in acc.iter_mut().zip(m.row(i)) {
            *a += x;
        }
        n += 1;
    }
    if n > 0 {
        acc.iter_mut().for_each(|a| *a /= n as f64);
    }
    acc
}

/// Vector for `w` in `e2`: the centroid in `e2` of `w`'s `k` nearest neighbours
/// in `e1` among the tokens both spaces share.
pub fn synthesize_word(w: &str, e1: &EmbeddingSpace, e2: &EmbeddingSpace, k: usize) -> Result<Vec<f64>> {
    if e1.dim() != e2.dim() {
        return Err(Error::DimensionMismatch { expected: e1.dim(), found: e2.dim() });
    }
    if e2.contains(w) {
        return Err(Error::AlreadyPresent(w.into()));
    }
    let list = nearest_neighbors_among(e1, w, k, |t| e2.contains(t))?;
    let rows = list.tokens().map(|t| e2.index().get(t).expect("candidate present in e2"));
    Ok(centroid(e2.matrix(), rows))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthesisOptions {
    /// Number of neighbours averaged per synthesized word.
    pub k: usize,
    /// Record every synthesized word with its neighbours in the report.
    pub audit: bool,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self { k: DEFAULT_NEIGHBORS, audit: false }
    }
}

/// Per-space synthesis counts. `synthesized + skipped_zero` is the number of words
/// the space was missing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpaceSynthesis {
    pub synthesized: usize,
    /// Missing words whose query vector was zero in every donor; filled with zeros.
    pub skipped_zero: usize,
    /// Synthesized words that had fewer than `k` candidate neighbours.
    pub short_lists: usize,
}

/// One synthesized word, for audit dumps.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisEntry {
    /// Index of the receiving space.
    pub space: usize,
    pub word: String,
    /// Index of the space the neighbours were searched in; `None` when skipped.
    pub donor: Option<usize>,
    pub neighbors: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SynthesisReport {
    pub per_space: Vec<SpaceSynthesis>,
    pub entries: Vec<SynthesisEntry>,
}

/// Extends two spaces already in a common space to their union vocabulary.
///
/// Each output keeps its original rows untouched and in order, followed by the
/// synthesized words in union order (`e1`'s tokens, then `e2`-only tokens).
pub fn extend_to_union(
    e1: &EmbeddingSpace,
    e2: &EmbeddingSpace,
    options: SynthesisOptions,
) -> Result<(EmbeddingSpace, EmbeddingSpace, SynthesisReport)> {
    if e1.dim() != e2.dim() {
        return Err(Error::DimensionMismatch { expected: e1.dim(), found: e2.dim() });
    }
    if !e1.tokens().iter().any(|t| e2.contains(t)) {
        return Err(Error::EmptyIntersection);
    }
    let (mut spaces, report) = extend_all(&[e1.clone(), e2.clone()], options)?;
    let second = spaces.pop().expect("two spaces");
    let first = spaces.pop().expect("two spaces");
    Ok((first, second, report))
}

/// Tokens of all spaces, first occurrence order.
pub fn union_vocabulary(spaces: &[EmbeddingSpace]) -> Vec<String> {
    let mut seen = alloc::collections::BTreeSet::new();
    let mut out = Vec::new();
    for s in spaces {
        for t in s.tokens() {
            if seen.insert(t.as_str()) {
                out.push(t.clone());
            }
        }
    }
    out
}

/// Extends every space to the union vocabulary of all of them.
///
/// For a word missing from space `j`, every other space holding the word is a
/// candidate donor. The neighbour search runs in each donor over the words that
/// donor shares with space `j`; the donor whose best neighbour has the highest
/// cosine wins (lowest index on ties). With two spaces this is exactly the
/// pairwise procedure. Spaces may differ in dimension since cosines are only
/// taken inside a donor and centroids only inside the receiver.
pub fn extend_all(
    spaces: &[EmbeddingSpace],
    options: SynthesisOptions,
) -> Result<(Vec<EmbeddingSpace>, SynthesisReport)> {
    if options.k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if spaces.is_empty() {
        return Ok((Vec::new(), SynthesisReport::default()));
    }
    let union = union_vocabulary(spaces);
    let norms: Vec<Vec<f64>> = spaces.iter().map(|s| row_norms(s.matrix())).collect();
    // shared[i][j][r]: row r of space i is also a token of space j
    let shared: Vec<Vec<Vec<bool>>> = spaces
        .iter()
        .map(|si| spaces.iter().map(|sj| si.tokens().iter().map(|t| sj.contains(t)).collect()).collect())
        .collect();

    let mut out = Vec::with_capacity(spaces.len());
    let mut report = SynthesisReport::default();
    for (j, receiver) in spaces.iter().enumerate() {
        let missing: Vec<&String> = union.iter().filter(|t| !receiver.contains(t)).collect();
        if !missing.is_empty() && !(0..spaces.len()).any(|i| i != j && shared[j][i].iter().any(|&b| b)) {
            return Err(Error::EmptyIntersection);
        }
        let filled = par::map(&missing, |w| -> Result<Filled> {
            let mut best: Option<(usize, Vec<(usize, f64)>)> = None;
            for (i, donor) in spaces.iter().enumerate() {
                if i == j {
                    continue;
                }
                let Some(q) = donor.index().get(w) else { continue };
                let hits = match top_k(donor, &norms[i], q, options.k, |r| shared[i][j][r]) {
                    Ok(h) => h,
                    Err(Error::ZeroVector(_) | Error::NoCandidates(_)) => continue,
                    Err(e) => return Err(e),
                };
                let better = match &best {
                    None => true,
                    Some((_, b)) => hits[0].1 > b[0].1,
                };
                if better {
                    best = Some((i, hits));
                }
            }
            let zero_everywhere = spaces
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .filter_map(|(i, d)| d.index().get(w).map(|q| norms[i][q]))
                .all(|n| n == 0.0);
            match best {
                Some((donor, hits)) => {
                    let rows = hits
                        .iter()
                        .map(|&(r, _)| receiver.index().get(&spaces[donor].tokens()[r]).expect("shared token"));
                    Ok(Filled {
                        vector: centroid(receiver.matrix(), rows),
                        donor: Some(donor),
                        short: hits.len() < options.k,
                        neighbors: hits.iter().map(|&(r, _)| spaces[donor].tokens()[r].clone()).collect(),
                    })
                }
                None if zero_everywhere => {
                    Ok(Filled { vector: vec![0.0; receiver.dim()], donor: None, short: false, neighbors: Vec::new() })
                }
                None => Err(Error::NoCandidates((*w).clone())),
            }
        });

        let mut counts = SpaceSynthesis::default();
        let (mut tokens, matrix) = receiver.clone().into_parts();
        let mut data = matrix.into_vec();
        for (w, f) in missing.iter().zip(filled) {
            let f = f?;
            match f.donor {
                Some(_) => counts.synthesized += 1,
                None => counts.skipped_zero += 1,
            }
            counts.short_lists += usize::from(f.short);
            tokens.push((*w).clone());
            data.extend_from_slice(&f.vector);
            if options.audit {
                report.entries.push(SynthesisEntry {
                    space: j,
                    word: (*w).clone(),
                    donor: f.donor,
                    neighbors: f.neighbors,
                });
            }
        }
        let mut extended = EmbeddingSpace::from_rows(tokens, receiver.dim(), data)?;
        if let Some(meta) = receiver.meta() {
            extended = extended.with_meta(meta);
        }
        out.push(extended);
        report.per_space.push(counts);
    }
    Ok((out, report))
}

struct Filled {
    vector: Vec<f64>,
    donor: Option<usize>,
    short: bool,
    neighbors: Vec<String>,
}
