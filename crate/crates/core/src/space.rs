use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Map from token to row index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenIndex {
    map: BTreeMap<String, usize>,
}

impl TokenIndex {
    /// Builds the index of a space. Space invariants guarantee it is bijective.
    pub fn build(space: &EmbeddingSpace) -> Self {
        space.index.clone()
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.map.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.map.contains_key(token)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// An ordered vocabulary paired with a row-aligned matrix of word vectors.
///
/// A constructed space always has unique tokens, finite values and `dim >= 1`.
/// It is immutable; every transformation returns a new space.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSpace {
    tokens: Vec<String>,
    matrix: Matrix,
    index: TokenIndex,
    meta: Option<String>,
}

impl EmbeddingSpace {
    pub fn new(tokens: Vec<String>, matrix: Matrix) -> Result<Self> {
        if matrix.cols() == 0 {
            return Err(Error::ZeroDimension);
        }
        if matrix.rows() != tokens.len() {
            return Err(Error::RowCountMismatch { rows: matrix.rows(), tokens: tokens.len() });
        }
        if let Some(pos) = matrix.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: pos / matrix.cols(), col: pos % matrix.cols() });
        }
        let mut map = BTreeMap::new();
        for (i, t) in tokens.iter().enumerate() {
            if map.insert(t.clone(), i).is_some() {
                return Err(Error::DuplicateToken(t.clone()));
            }
        }
        Ok(Self { tokens, matrix, index: TokenIndex { map }, meta: None })
    }

    /// Builds a space from row-major data.
    pub fn from_rows(tokens: Vec<String>, dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::RaggedMatrix { len: data.len(), dim });
        }
        let rows = data.len() / dim;
        Self::new(tokens, Matrix::from_vec(rows, dim, data))
    }

    /// Same tokens and label, new matrix of the same row count.
    pub fn with_matrix(&self, matrix: Matrix) -> Result<Self> {
        if matrix.rows() != self.tokens.len() {
            return Err(Error::RowCountMismatch { rows: matrix.rows(), tokens: self.tokens.len() });
        }
        if matrix.cols() == 0 {
            return Err(Error::ZeroDimension);
        }
        if let Some(pos) = matrix.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: pos / matrix.cols(), col: pos % matrix.cols() });
        }
        Ok(Self { tokens: self.tokens.clone(), matrix, index: self.index.clone(), meta: self.meta.clone() })
    }

    pub fn with_meta(mut self, meta: impl Into<String>) -> Self {
        self.meta = Some(meta.into());
        self
    }

    pub fn meta(&self) -> Option<&str> {
        self.meta.as_deref()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn index(&self) -> &TokenIndex {
        &self.index
    }

    pub fn dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.matrix.row(i)
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.index.get(token).map(|i| self.matrix.row(i))
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains(token)
    }

    pub fn into_parts(self) -> (Vec<String>, Matrix) {
        (self.tokens, self.matrix)
    }
}
