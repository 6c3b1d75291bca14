//! Whitespace-separated text vectors: an optional `vocab dim` header line, then
//! `token v1 ... vd` per line.

use std::collections::HashSet;
use std::io::{BufRead, BufWriter, Write};

use metavec_core::EmbeddingSpace;

use super::{Loaded, OnDuplicate, ReadOptions};
use crate::FormatError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeaderMode {
    /// A first line of exactly two unsigned integers is a header.
    #[default]
    Auto,
    Present,
    Absent,
}

/// Number formatting for text output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    /// Fixed number of digits after the decimal point.
    Fixed(usize),
    /// Shortest representation that parses back to the same `f64`.
    Exact,
}

impl Precision {
    /// `digits >= 17` selects [`Precision::Exact`].
    pub fn digits(digits: usize) -> Self {
        if digits >= 17 {
            Precision::Exact
        } else {
            Precision::Fixed(digits)
        }
    }

    fn write<W: Write>(self, w: &mut W, v: f64) -> std::io::Result<()> {
        match self {
            Precision::Fixed(p) => write!(w, "{v:.p$}"),
            Precision::Exact => write!(w, "{v:?}"),
        }
    }
}

fn parse_header(fields: &[&str]) -> Option<(usize, usize)> {
    match fields {
        [a, b] => Some((a.parse().ok()?, b.parse().ok()?)),
        _ => None,
    }
}

pub fn parse_text_embeddings<R: BufRead>(mut reader: R, options: &ReadOptions) -> Result<Loaded, FormatError> {
    let mut buf = Vec::new();
    let mut line_no = 0usize;
    let mut header: Option<(usize, usize)> = None;
    let mut dim: Option<usize> = None;
    let mut tokens = Vec::new();
    let mut data = Vec::new();
    let mut seen = HashSet::new();
    let mut duplicates = 0usize;
    let mut data_lines = 0usize;
    let mut saw_anything = false;
    let mut truncated = false;

    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let line = std::str::from_utf8(&buf).map_err(|_| FormatError::Utf8 { line: line_no })?;
        let fields: Vec<&str> = line.split_ascii_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if !saw_anything {
            saw_anything = true;
            let is_header = match options.header {
                HeaderMode::Absent => false,
                HeaderMode::Auto => parse_header(&fields).is_some(),
                HeaderMode::Present => true,
            };
            if is_header {
                let (n, d) = parse_header(&fields)
                    .filter(|&(_, d)| d > 0)
                    .ok_or_else(|| FormatError::BadHeader { line: line_no, text: line.trim_end().into() })?;
                header = Some((n, d));
                dim = Some(d);
                continue;
            }
        }
        data_lines += 1;
        if options.max_vocab.is_some_and(|m| tokens.len() >= m) {
            truncated = true;
            continue;
        }
        let (token, values) = (fields[0], &fields[1..]);
        let expected = *dim.get_or_insert(values.len());
        if values.len() != expected || expected == 0 {
            return Err(FormatError::DimensionMismatch { line: line_no, expected, found: values.len() });
        }
        if !seen.insert(token.to_owned()) {
            match options.on_duplicate {
                OnDuplicate::KeepFirst => {
                    duplicates += 1;
                    continue;
                }
                OnDuplicate::Error => return Err(FormatError::DuplicateToken { line: line_no, token: token.into() }),
            }
        }
        for v in values {
            let x: f64 = v.parse().map_err(|_| FormatError::BadNumber { line: line_no, value: (*v).into() })?;
            if !x.is_finite() {
                return Err(FormatError::NonFinite { line: line_no, value: (*v).into() });
            }
            data.push(x);
        }
        tokens.push(token.to_owned());
    }

    let Some(dim) = dim else {
        return Err(FormatError::Empty);
    };
    if let Some((n, _)) = header {
        if !truncated && n != data_lines {
            return Err(FormatError::HeaderCount { expected: n, found: data_lines });
        }
    }
    let space = EmbeddingSpace::from_rows(tokens, dim, data)?;
    Ok(Loaded { space, duplicates })
}

pub(crate) fn check_token(token: &str) -> Result<(), FormatError> {
    if token.is_empty() || token.chars().any(char::is_whitespace) {
        return Err(FormatError::UnrepresentableToken(token.into()));
    }
    Ok(())
}

pub fn write_text_embeddings<W: Write>(
    space: &EmbeddingSpace,
    precision: Precision,
    writer: W,
) -> Result<(), FormatError> {
    for t in space.tokens() {
        check_token(t)?;
    }
    let mut w = BufWriter::new(writer);
    writeln!(w, "{} {}", space.len(), space.dim())?;
    for (t, row) in space.tokens().iter().zip(space.matrix().iter_rows()) {
        w.write_all(t.as_bytes())?;
        for &v in row {
            w.write_all(b" ")?;
            precision.write(&mut w, v)?;
        }
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use metavec_core::linalg::Matrix;
    use proptest::prelude::*;

    fn parse(s: &str) -> Result<Loaded, FormatError> {
        parse_text_embeddings(s.as_bytes(), &ReadOptions::default())
    }

    fn write(space: &EmbeddingSpace, p: Precision) -> String {
        let mut out = Vec::new();
        write_text_embeddings(space, p, &mut out).unwrap();
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn minimal_file() {
        let l = parse("2 2\na 1.0 0.0\nb 0.0 1.0\n").unwrap();
        assert_eq!(l.space.tokens(), ["a", "b"]);
        assert_eq!(l.space.matrix(), &Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]]));
        assert_eq!(l.space.dim(), 2);
    }

    #[test]
    fn headerless_file_infers_dimension() {
        let l = parse("a 1.0 0.0 2\nb 0.0 1.0 3\n").unwrap();
        assert_eq!(l.space.dim(), 3);
    }

    #[test]
    fn dimension_mismatch_reports_line() {
        match parse("a 1.0 0.0\nb 0.5\n") {
            Err(FormatError::DimensionMismatch { line: 2, expected: 2, found: 1 }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicates_keep_first_or_fail() {
        let l = parse("a 1\nb 2\na 3\n").unwrap();
        assert_eq!(l.space.tokens(), ["a", "b"]);
        assert_eq!(l.space.row(0), &[1.0]);
        assert_eq!(l.duplicates, 1);
        let strict = ReadOptions { on_duplicate: OnDuplicate::Error, ..Default::default() };
        assert!(matches!(
            parse_text_embeddings("a 1\nb 2\na 3\n".as_bytes(), &strict),
            Err(FormatError::DuplicateToken { line: 3, .. })
        ));
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse(""), Err(FormatError::Empty)));
        assert!(matches!(parse("\n\n"), Err(FormatError::Empty)));
        assert!(matches!(parse("a 1.0 nan\n"), Err(FormatError::NonFinite { line: 1, .. })));
        assert!(matches!(parse("a 1.0 inf\n"), Err(FormatError::NonFinite { line: 1, .. })));
        assert!(matches!(parse("a 1.0 x\n"), Err(FormatError::BadNumber { line: 1, .. })));
        assert!(matches!(parse("3 2\na 1 2\n"), Err(FormatError::HeaderCount { expected: 3, found: 1 })));
        assert!(matches!(parse("a\n"), Err(FormatError::DimensionMismatch { .. })));
        let need_header = ReadOptions { header: HeaderMode::Present, ..Default::default() };
        assert!(matches!(
            parse_text_embeddings("a 1 2\n".as_bytes(), &need_header),
            Err(FormatError::BadHeader { line: 1, .. })
        ));
        assert!(matches!(
            parse_text_embeddings(&b"\xff 1\n"[..], &ReadOptions::default()),
            Err(FormatError::Utf8 { line: 1 })
        ));
    }

    #[test]
    fn header_mode_absent_reads_numeric_tokens() {
        let opts = ReadOptions { header: HeaderMode::Absent, ..Default::default() };
        let l = parse_text_embeddings("3 5\n4 6\n".as_bytes(), &opts).unwrap();
        assert_eq!(l.space.tokens(), ["3", "4"]);
    }

    #[test]
    fn max_vocab_stops_early() {
        let opts = ReadOptions { max_vocab: Some(2), ..Default::default() };
        let l = parse_text_embeddings("3 1\na 1\nb 2\nc 3\n".as_bytes(), &opts).unwrap();
        assert_eq!(l.space.len(), 2);
    }

    #[test]
    fn tolerates_crlf_and_trailing_space() {
        let l = parse("a 1.0 2.0 \r\nb 3 4\r\n").unwrap();
        assert_eq!(l.space.row(1), &[3.0, 4.0]);
    }

    #[test]
    fn writes_identity_with_one_digit() {
        let l = parse("2 2\na 1.0 0.0\nb 0.0 1.0\n").unwrap();
        assert_eq!(write(&l.space, Precision::Fixed(1)), "2 2\na 1.0 0.0\nb 0.0 1.0\n");
        assert_eq!(Precision::digits(1), Precision::Fixed(1));
        assert_eq!(Precision::digits(17), Precision::Exact);
    }

    #[test]
    fn phrase_tokens_cannot_be_written() {
        let s = EmbeddingSpace::from_rows(vec!["new york".into()], 1, vec![1.0]).unwrap();
        let mut out = Vec::new();
        assert!(matches!(
            write_text_embeddings(&s, Precision::Exact, &mut out),
            Err(FormatError::UnrepresentableToken(t)) if t == "new york"
        ));
        let s = EmbeddingSpace::from_rows(vec!["a\nb".into()], 1, vec![1.0]).unwrap();
        assert!(write_text_embeddings(&s, Precision::Exact, &mut out).is_err());
    }

    proptest! {
        #[test]
        fn exact_round_trip(values in proptest::collection::vec(-1e6f64..1e6, 50 * 10), tiny in -1e-300f64..1e-300) {
            let mut values = values;
            values[0] = tiny;
            let tokens = (0..50).map(|i| format!("tok{i}")).collect();
            let s = EmbeddingSpace::from_rows(tokens, 10, values).unwrap();
            let back = parse(&write(&s, Precision::digits(17))).unwrap();
            prop_assert_eq!(back.space.tokens(), s.tokens());
            prop_assert_eq!(back.space.matrix(), s.matrix());
        }
    }
}
