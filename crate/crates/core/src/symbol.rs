//! Symbol tables: a bijection between symbol strings and dense integer ids.
//!
//! Id 0 is reserved for epsilon. Every other symbol is either a single
//! Unicode scalar value or a multicharacter symbol such as a morphological
//! tag (`+Noun`, `+Pl`). Tables only ever grow by appending, which lets two
//! machines built at different moments of a compilation share ids as long as
//! one table is a prefix of the other.

use std::collections::HashMap;

use thiserror::Error;

pub type SymbolId = u32;

/// The reserved epsilon id.
pub const EPSILON: SymbolId = 0;

/// How epsilon is spelled in interchange files.
pub const EPSILON_NAME: &str = "@0@";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymbolError {
    #[error("empty symbol")]
    Empty,
    #[error("symbol {0:?} contains a tab or line break")]
    BadCharacter(String),
    #[error("symbol {0:?} is reserved for epsilon")]
    ReservedEpsilon(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolTable {
    symbols: Vec<String>,
    index: HashMap<String, SymbolId>,
    /// Longest multicharacter symbol, in scalars. Bounds the longest-match scan.
    max_multichar: usize,
}

impl Default for SymbolTable {
    fn default() -> Self {
        Self::new()
    }
}

impl SymbolTable {
    pub fn new() -> Self {
        let mut index = HashMap::new();
        index.insert(EPSILON_NAME.to_string(), EPSILON);
        SymbolTable {
            symbols: vec![EPSILON_NAME.to_string()],
            index,
            max_multichar: 0,
        }
    }

    /// Registers `symbol` if needed and returns its id.
    pub fn intern(&mut self, symbol: &str) -> Result<SymbolId, SymbolError> {
        if let Some(&id) = self.index.get(symbol) {
            if id == EPSILON {
                return Err(SymbolError::ReservedEpsilon(symbol.to_string()));
            }
            return Ok(id);
        }
        if symbol.is_empty() {
            return Err(SymbolError::Empty);
        }
        if symbol.contains(['\t', '\n', '\r']) {
            return Err(SymbolError::BadCharacter(symbol.to_string()));
        }
        let id = self.symbols.len() as SymbolId;
        self.symbols.push(symbol.to_string());
        self.index.insert(symbol.to_string(), id);
        let scalars = symbol.chars().count();
        if scalars > 1 {
            self.max_multichar = self.max_multichar.max(scalars);
        }
        Ok(id)
    }

    pub fn id(&self, symbol: &str) -> Option<SymbolId> {
        self.index.get(symbol).copied()
    }

    pub fn symbol(&self, id: SymbolId) -> Option<&str> {
        self.symbols.get(id as usize).map(String::as_str)
    }

    /// Number of entries, epsilon included.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.len() == 1
    }

    /// `(id, symbol)` pairs in id order, epsilon first.
    pub fn iter(&self) -> impl Iterator<Item = (SymbolId, &str)> {
        self.symbols
            .iter()
            .enumerate()
            .map(|(i, s)| (i as SymbolId, s.as_str()))
    }

    pub fn is_multichar(&self, id: SymbolId) -> bool {
        id != EPSILON && self.symbol(id).is_some_and(|s| s.chars().nth(1).is_some())
    }

    /// Symbols of the form `@...@` are internal (epsilon, rule markers) and
    /// never part of a user alphabet.
    pub fn is_reserved(&self, id: SymbolId) -> bool {
        self.symbol(id).is_some_and(is_reserved_name)
    }

    /// All non-reserved, non-epsilon ids.
    pub fn alphabet(&self) -> Vec<SymbolId> {
        self.iter()
            .filter(|&(id, s)| id != EPSILON && !is_reserved_name(s))
            .map(|(id, _)| id)
            .collect()
    }

    /// True when one table extends the other: ids they share mean the same
    /// symbols.
    pub fn compatible(&self, other: &SymbolTable) -> bool {
        let n = self.symbols.len().min(other.symbols.len());
        self.symbols[..n] == other.symbols[..n]
    }

    /// Greedy longest-match tokenization that registers unseen scalars.
    pub fn tokenize_interning(&mut self, s: &str) -> Result<Vec<SymbolId>, SymbolError> {
        let mut out = Vec::new();
        for piece in self.segment(s) {
            out.push(self.intern(piece)?);
        }
        Ok(out)
    }

    /// Greedy longest-match tokenization against the current table. Returns
    /// `None` when some scalar is not registered.
    pub fn tokenize(&self, s: &str) -> Option<Vec<SymbolId>> {
        self.segment(s)
            .into_iter()
            .map(|piece| self.id(piece).filter(|&id| id != EPSILON))
            .collect()
    }

    /// Splits `s` into symbol strings: at each position the longest registered
    /// multicharacter symbol, otherwise one scalar.
    pub fn segment<'a>(&self, s: &'a str) -> Vec<&'a str> {
        let mut out = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            // ends[k] is the byte offset after k + 1 scalars
            let ends: Vec<usize> = rest
                .char_indices()
                .map(|(i, c)| i + c.len_utf8())
                .take(self.max_multichar.max(1))
                .collect();
            let mut cut = ends[0];
            for &end in ends[1..].iter().rev() {
                if self.index.contains_key(&rest[..end]) {
                    cut = end;
                    break;
                }
            }
            out.push(&rest[..cut]);
            rest = &rest[cut..];
        }
        out
    }

    /// Concatenates the spellings of `ids`, skipping epsilon.
    pub fn render(&self, ids: &[SymbolId]) -> String {
        ids.iter()
            .filter(|&&id| id != EPSILON)
            .filter_map(|&id| self.symbol(id))
            .collect()
    }
}

pub fn is_reserved_name(s: &str) -> bool {
    s.len() >= 3 && s.starts_with('@') && s.ends_with('@')
}

/// Splits `s` into symbol ids by longest match over the table's multicharacter
/// symbols, registering any scalar not yet known.
pub fn tokenize_lexical(s: &str, symtab: &mut SymbolTable) -> Result<Vec<SymbolId>, SymbolError> {
    symtab.tokenize_interning(s)
}
