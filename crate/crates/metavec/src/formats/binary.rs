//! word2vec-style binary vectors: ASCII header `vocab dim\n`, then per word the
//! token, one space and `dim` little-endian `f32` values.

use std::collections::HashSet;
use std::io::{self, BufRead, BufWriter, Write};

use metavec_core::EmbeddingSpace;

use super::text::check_token;
use super::{Loaded, OnDuplicate, ReadOptions};
use crate::FormatError;

struct Counted<R> {
    inner: R,
    offset: u64,
}

impl<R: BufRead> Counted<R> {
    fn read_until(&mut self, delim: u8, buf: &mut Vec<u8>) -> io::Result<usize> {
        let n = self.inner.read_until(delim, buf)?;
        self.offset += n as u64;
        Ok(n)
    }

    fn peek(&mut self) -> io::Result<Option<u8>> {
        Ok(self.inner.fill_buf()?.first().copied())
    }

    fn skip_byte(&mut self) {
        self.inner.consume(1);
        self.offset += 1;
    }

    /// Reads exactly `buf.len()` bytes or reports how many were available.
    fn read_full(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        let mut filled = 0;
        while filled < buf.len() {
            let n = self.inner.read(&mut buf[filled..])?;
            if n == 0 {
                break;
            }
            filled += n;
            self.offset += n as u64;
        }
        Ok(filled)
    }
}

pub fn parse_binary_embeddings<R: BufRead>(reader: R, options: &ReadOptions) -> Result<Loaded, FormatError> {
    let mut r = Counted { inner: reader, offset: 0 };
    let mut line = Vec::new();
    if r.read_until(b'\n', &mut line)? == 0 {
        return Err(FormatError::Empty);
    }
    let text = std::str::from_utf8(&line).map_err(|_| FormatError::Utf8 { line: 1 })?;
    let fields: Vec<&str> = text.split_ascii_whitespace().collect();
    let bad_header = || FormatError::BadHeader { line: 1, text: text.trim_end().into() };
    let (vocab, dim) = match fields.as_slice() {
        [a, b] => (a.parse::<usize>().map_err(|_| bad_header())?, b.parse::<usize>().map_err(|_| bad_header())?),
        _ => return Err(bad_header()),
    };
    if dim == 0 || !line.ends_with(b"\n") {
        return Err(bad_header());
    }

    let keep = options.max_vocab.map_or(vocab, |m| m.min(vocab));
    let mut tokens = Vec::with_capacity(keep);
    let mut data = Vec::with_capacity(keep * dim);
    let mut seen = HashSet::new();
    let mut duplicates = 0;
    let mut raw = vec![0u8; dim * 4];
    let mut word = Vec::new();
    for index in 0..vocab {
        if tokens.len() >= keep {
            // remaining words are not needed and not checked
            return finish(tokens, dim, data, duplicates);
        }
        // classic word2vec output puts a newline after every vector
        while r.peek()? == Some(b'\n') {
            r.skip_byte();
        }
        let start = r.offset;
        word.clear();
        r.read_until(b' ', &mut word)?;
        if word.last() != Some(&b' ') {
            return Err(FormatError::Truncated { offset: r.offset, what: "a token" });
        }
        word.pop();
        let token = String::from_utf8(std::mem::take(&mut word)).map_err(|_| FormatError::Malformed {
            line: index + 2,
            reason: format!("token at byte {start} is not UTF-8"),
        })?;
        let got = r.read_full(&mut raw)?;
        if got < raw.len() {
            return Err(FormatError::Truncated { offset: r.offset, what: "a vector" });
        }
        let values = raw.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64);
        let vector_offset = r.offset - raw.len() as u64;
        let before = data.len();
        data.extend(values);
        if data[before..].iter().any(|v| !v.is_finite()) {
            return Err(FormatError::NonFiniteBinary { offset: vector_offset, token });
        }
        if !seen.insert(token.clone()) {
            data.truncate(before);
            match options.on_duplicate {
                OnDuplicate::KeepFirst => duplicates += 1,
                OnDuplicate::Error => return Err(FormatError::DuplicateBinaryToken { index, token }),
            }
        } else {
            tokens.push(token);
        }
    }
    while let Some(b) = r.peek()? {
        if b != b'\n' {
            return Err(FormatError::TrailingData { offset: r.offset });
        }
        r.skip_byte();
    }
    finish(tokens, dim, data, duplicates)
}

fn finish(tokens: Vec<String>, dim: usize, data: Vec<f64>, duplicates: usize) -> Result<Loaded, FormatError> {
    Ok(Loaded { space: EmbeddingSpace::from_rows(tokens, dim, data)?, duplicates })
}

/// Values are narrowed to `f32`.
pub fn write_binary_embeddings<W: Write>(space: &EmbeddingSpace, writer: W) -> Result<(), FormatError> {
    for t in space.tokens() {
        check_token(t)?;
    }
    let mut w = BufWriter::new(writer);
    writeln!(w, "{} {}", space.len(), space.dim())?;
    for (t, row) in space.tokens().iter().zip(space.matrix().iter_rows()) {
        w.write_all(t.as_bytes())?;
        w.write_all(b" ")?;
        for &v in row {
            w.write_all(&(v as f32).to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}
