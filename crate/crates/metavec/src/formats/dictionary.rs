use std::io::BufRead;

use metavec_core::align::MappingDictionary;

use crate::FormatError;

/// Reads `source TAB target` lines. Blank lines are ignored.
pub fn load_bilingual_dictionary<R: BufRead>(reader: R) -> Result<MappingDictionary, FormatError> {
    let mut pairs = Vec::new();
    for (i, line) in reader.split(b'\n').enumerate() {
        let line_no = i + 1;
        let bytes = line?;
        let text = std::str::from_utf8(&bytes).map_err(|_| FormatError::Utf8 { line: line_no })?;
        let text = text.strip_suffix('\r').unwrap_or(text);
        if text.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = text.split('\t').collect();
        match fields.as_slice() {
            [s, t] if !s.is_empty() && !t.is_empty() => pairs.push((s.to_string(), t.to_string())),
            _ => {
                return Err(FormatError::Malformed {
                    line: line_no,
                    reason: format!("expected `source<TAB>target`, found {} field(s)", fields.len()),
                })
            }
        }
    }
    Ok(MappingDictionary::new(pairs))
}
