//! Intrinsic word-similarity evaluation: cosine scores against gold ratings,
//! Spearman correlation and coverage. Pairs with an unrepresented word are
//! skipped rather than given an arbitrary score.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::cosine;
use crate::space::EmbeddingSpace;

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityPair {
    pub word1: String,
    pub word2: String,
    pub gold: f64,
}

/// Word pairs with gold similarity scores. Never empty; all scores finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityDataset {
    name: String,
    pairs: Vec<SimilarityPair>,
}

impl SimilarityDataset {
    pub fn new(name: impl Into<String>, pairs: Vec<SimilarityPair>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Empty("similarity dataset has no pairs"));
        }
        if let Some(i) = pairs.iter().position(|p| !p.gold.is_finite()) {
            return Err(Error::NonFinite { row: i, col: 2 });
        }
        Ok(Self { name: name.into(), pairs })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn pairs(&self) -> &[SimilarityPair] {
        &self.pairs
    }
}

/// Average (fractional) ranks, 1-based.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = alloc::vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        // positions i..=j (0-based) share the mean of ranks i+1..=j+1
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = r;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Spearman rank correlation with average ranks for ties.
///
/// `Ok(None)` when either list is constant.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<Option<f64>> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), found: ys.len() });
    }
    if xs.len() < 2 {
        return Err(Error::TooFew { needed: 2, got: xs.len() });
    }
    for (col, v) in [xs, ys].iter().enumerate() {
        if let Some(row) = v.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { row, col });
        }
    }
    Ok(pearson(&average_ranks(xs), &average_ranks(ys)))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum EvalMode {
    #[default]
    Monolingual,
    /// The first word of each pair is looked up with `prefix1`, the second with `prefix2`.
    Crosslingual { prefix1: String, prefix2: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EvalOptions {
    pub mode: EvalMode,
    /// Retry a failed lookup with the lowercased word.
    pub lowercase_fallback: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub dataset: String,
    /// `None` when fewer than two pairs were usable or a score list was constant.
    pub spearman_rho: Option<f64>,
    pub coverage_pct: f64,
    pub pairs_total: usize,
    pub pairs_used: usize,
}

fn lookup<'a>(space: &'a EmbeddingSpace, prefix: &str, word: &str, lowercase_fallback: bool) -> Option<&'a [f64]> {
    let key = alloc::format!("{prefix}{word}");
    space.get(&key).or_else(|| {
        if !lowercase_fallback {
            return None;
        }
        let lower = alloc::format!("{prefix}{}", word.to_lowercase());
        if lower == key {
            None
        } else {
            space.get(&lower)
        }
    })
}

/// Scores every pair by cosine and correlates with the gold scores over the
/// pairs where both words have a (nonzero) vector.
pub fn evaluate(space: &EmbeddingSpace, dataset: &SimilarityDataset, options: &EvalOptions) -> EvalReport {
    let (p1, p2) = match &options.mode {
        EvalMode::Monolingual => ("", ""),
        EvalMode::Crosslingual { prefix1, prefix2 } => (prefix1.as_str(), prefix2.as_str()),
    };
    let mut predicted = Vec::new();
    let mut gold = Vec::new();
    for pair in dataset.pairs() {
        let v1 = lookup(space, p1, &pair.word1, options.lowercase_fallback);
        let v2 = lookup(space, p2, &pair.word2, options.lowercase_fallback);
        if let (Some(a), Some(b)) = (v1, v2) {
            if let Some(c) = cosine(a, b) {
                predicted.push(c);
                gold.push(pair.gold);
            }
        }
    }
    let total = dataset.pairs().len();
    let used = predicted.len();
    let rho = if used >= 2 { spearman(&predicted, &gold).ok().flatten() } else { None };
    EvalReport {
        dataset: dataset.name().into(),
        spearman_rho: rho,
        coverage_pct: 100.0 * used as f64 / total as f64,
        pairs_total: total,
        pairs_used: used,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    Similarity,
    Relatedness,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSummary {
    pub reports: Vec<EvalReport>,
    /// Mean rho over all datasets with a defined rho.
    pub average: Option<f64>,
    pub similarity: Option<f64>,
    pub relatedness: Option<f64>,
    /// Datasets left out of the means because their rho is undefined.
    pub undefined: Vec<String>,
}

fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Evaluates each dataset and takes unweighted means of the defined rhos, overall
/// and per group. Datasets absent from `groups` only count towards the overall mean.
pub fn evaluate_suite(
    space: &EmbeddingSpace,
    datasets: &[SimilarityDataset],
    groups: &BTreeMap<String, Group>,
    options: &EvalOptions,
) -> Result<SuiteSummary> {
    if datasets.is_empty() {
        return Err(Error::Empty("no datasets to evaluate"));
    }
    let reports: Vec<EvalReport> = datasets.iter().map(|d| evaluate(space, d, options)).collect();
    let (mut all, mut sim, mut rel, mut undefined) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for r in &reports {
        let Some(rho) = r.spearman_rho else {
            undefined.push(r.dataset.clone());
            continue;
        };
        all.push(rho);
        match groups.get(&r.dataset) {
            Some(Group::Similarity) => sim.push(rho),
            Some(Group::Relatedness) => rel.push(rho),
            None => {}
        }
    }
    Ok(SuiteSummary { average: mean(&all), similarity: mean(&sim), relatedness: mean(&rel), reports, undefined })
}
