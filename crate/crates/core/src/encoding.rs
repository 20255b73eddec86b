//! Table-driven conversion of legacy 8-bit font text to UTF-8.
//!
//! A mapping table lists byte sequences and the Unicode text they stand for,
//! one per line: `hex-bytes<TAB>target`, with `#` comment lines. Conversion
//! scans left to right taking the longest matching source sequence; bytes
//! with no mapping pass through when they lie in 0x09..=0x7E (tab, newline,
//! carriage return and printable ASCII among them) and are an error
//! otherwise.

use std::collections::HashSet;

use thiserror::Error;

/// A small illustrative table in the supported format.
pub const SAMPLE_MAPPING: &str = include_str!("../data/smriti-sample.tsv");

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodingError {
    #[error("line {line}: {message}")]
    Table { line: usize, message: String },
    #[error("line {line}: source bytes {source_hex} mapped twice")]
    Duplicate { line: usize, source_hex: String },
    #[error("byte 0x{byte:02X} at offset {offset} has no mapping")]
    Unmappable { offset: usize, byte: u8 },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MappingTable {
    /// Longest source first; ties in file order.
    entries: Vec<(Vec<u8>, String)>,
    /// Entry indices by first source byte, longest first.
    by_first: Vec<Vec<usize>>,
}

fn parse_hex(s: &str) -> Option<Vec<u8>> {
    let digits: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if digits.is_empty() || !digits.len().is_multiple_of(2) {
        return None;
    }
    (0..digits.len())
        .step_by(2)
        .map(|i| u8::from_str_radix(digits.get(i..i + 2)?, 16).ok())
        .collect()
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02X}")).collect()
}

impl MappingTable {
    /// Parses a mapping file. The input is bytes so that a target which is
    /// not valid UTF-8 can be reported against its line.
    pub fn parse(source: &[u8]) -> Result<MappingTable, EncodingError> {
        let mut entries = Vec::new();
        let mut seen: HashSet<Vec<u8>> = HashSet::new();
        for (i, raw) in source.split(|&b| b == b'\n').enumerate() {
            let line = i + 1;
            let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
            let bad = |message: String| EncodingError::Table { line, message };
            let text = std::str::from_utf8(raw).map_err(|_| bad("target is not valid UTF-8".into()))?;
            if text.trim().is_empty() || text.starts_with('#') {
                continue;
            }
            let (src, target) = text
                .split_once('\t')
                .ok_or_else(|| bad("expected hex-bytes<TAB>target".into()))?;
            let bytes = parse_hex(src).ok_or_else(|| bad(format!("malformed hex {src:?}")))?;
            if !seen.insert(bytes.clone()) {
                return Err(EncodingError::Duplicate {
                    line,
                    source_hex: hex(&bytes),
                });
            }
            entries.push((bytes, target.to_string()));
        }
        Ok(MappingTable::from_entries(entries))
    }

    fn from_entries(mut entries: Vec<(Vec<u8>, String)>) -> MappingTable {
        // stable: equal lengths keep file order
        entries.sort_by_key(|e| std::cmp::Reverse(e.0.len()));
        let mut by_first = vec![Vec::new(); 256];
        for (k, (src, _)) in entries.iter().enumerate() {
            by_first[src[0] as usize].push(k);
        }
        MappingTable { entries, by_first }
    }

    pub fn sample() -> MappingTable {
        MappingTable::parse(SAMPLE_MAPPING.as_bytes()).expect("sample table is valid")
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries, longest source first.
    pub fn entries(&self) -> impl Iterator<Item = (&[u8], &str)> {
        self.entries.iter().map(|(s, t)| (s.as_slice(), t.as_str()))
    }

    /// Converts `input` by greedy longest match.
    pub fn convert(&self, input: &[u8]) -> Result<String, EncodingError> {
        let mut out = String::with_capacity(input.len() * 3);
        let mut i = 0;
        while i < input.len() {
            let rest = &input[i..];
            let hit = self.by_first.get(rest[0] as usize).and_then(|ks| {
                ks.iter()
                    .map(|&k| &self.entries[k])
                    .find(|(src, _)| rest.starts_with(src))
            });
            match hit {
                Some((src, target)) => {
                    out.push_str(target);
                    i += src.len();
                }
                None if matches!(rest[0], 0x09..=0x7E) => {
                    out.push(rest[0] as char);
                    i += 1;
                }
                None => {
                    return Err(EncodingError::Unmappable {
                        offset: i,
                        byte: rest[0],
                    })
                }
            }
        }
        Ok(out)
    }
}
