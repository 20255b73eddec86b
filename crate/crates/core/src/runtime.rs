//! Lexical transducers: lexicon composed with rules, queried in both
//! directions.
//!
//! The upper side of a [`Grammar`]'s net is the lexical form (root followed by
//! tags), the lower side the surface word. Analysis (apply-up) reads a surface
//! word scalar by scalar; generation (apply-down) reads a lexical string
//! segmented over the tag inventory.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;
use std::sync::Arc as Shared;

use thiserror::Error;

use crate::fst::interchange::{read_fst, read_symtab, write_fst, write_symtab, InterchangeError};
use crate::fst::{compose, determinize_min, invert, transduce, trim, Fst, FstError};
use crate::lexc::{compile_lexicon, parse_lexc, LexcError};
use crate::rules::{compile_ruleset, parse_rules, RuleError};
use crate::symbol::{SymbolId, SymbolTable, EPSILON};

/// Default bound on the length (in symbols) of any single output.
pub const DEFAULT_MAX_OUTPUT: usize = 64;

/// Version written to and expected in saved manifests.
pub const FORMAT_VERSION: u32 = 1;

pub const NET_FILE: &str = "grammar.att";
pub const SYMS_FILE: &str = "grammar.syms";
pub const MANIFEST_FILE: &str = "manifest.txt";

#[derive(Debug, Error)]
pub enum RuntimeError {
    #[error("lexicon: {0}")]
    Lexc(#[from] LexcError),
    #[error("rules: {0}")]
    Rules(#[from] RuleError),
    #[error(transparent)]
    Fst(#[from] FstError),
    #[error("the rules leave no surface form for any lexicon path")]
    EmptyComposition,
    #[error("unknown tag {tag} in {input}")]
    UnknownTag { input: String, tag: String },
    #[error("{file}: {source}")]
    Interchange {
        file: &'static str,
        #[source]
        source: InterchangeError,
    },
    #[error("manifest: {0}")]
    Manifest(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// One analysis: the root followed by its tags, in path order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Analysis {
    pub root: String,
    pub tags: Vec<String>,
}

impl Analysis {
    /// Parses a rendered analysis (`root+Tag+Tag`). Tags start at the first
    /// `+` that begins a tag; a `+` is otherwise part of the root.
    pub fn parse(s: &str) -> Analysis {
        match s.find('+') {
            None => Analysis {
                root: s.to_string(),
                tags: Vec::new(),
            },
            Some(i) => Analysis {
                root: s[..i].to_string(),
                tags: s[i + 1..].split('+').map(|t| format!("+{t}")).collect(),
            },
        }
    }
}

impl fmt::Display for Analysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.root)?;
        for t in &self.tags {
            f.write_str(t)?;
        }
        Ok(())
    }
}

/// A compiled lexical transducer. Immutable and safe to query from many
/// threads at once.
#[derive(Debug, Clone)]
pub struct Grammar {
    net: Fst,
    /// `net` with sides swapped, kept for analysis.
    up: Fst,
    tags: Vec<String>,
    max_output: usize,
}

impl Grammar {
    /// Wraps an already trimmed lexical net. The tag inventory is every
    /// multicharacter symbol on its upper side.
    pub fn from_net(net: Fst) -> Grammar {
        let t = net.symtab();
        let ids: BTreeSet<SymbolId> = net
            .arcs()
            .iter()
            .map(|a| a.input)
            .filter(|&x| t.is_multichar(x) && !t.is_reserved(x))
            .collect();
        let tags = ids
            .into_iter()
            .filter_map(|x| t.symbol(x))
            .map(str::to_string)
            .collect();
        Grammar {
            up: invert(&net),
            net,
            tags,
            max_output: DEFAULT_MAX_OUTPUT,
        }
    }

    /// Sets the output length cap used by both query directions.
    pub fn with_max_output(mut self, max_output: usize) -> Grammar {
        self.max_output = max_output;
        self
    }

    pub fn net(&self) -> &Fst {
        &self.net
    }

    pub fn symtab(&self) -> &SymbolTable {
        self.net.symtab()
    }

    /// Tags in symbol-id order.
    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn max_output(&self) -> usize {
        self.max_output
    }

    fn is_tag(&self, s: &str) -> bool {
        self.tags.iter().any(|t| t == s)
    }

    /// Surface scalars as symbol ids; `None` if any scalar is unknown.
    fn surface_ids(&self, surface: &str) -> Option<Vec<SymbolId>> {
        let t = self.symtab();
        let mut buf = [0u8; 4];
        surface
            .chars()
            .map(|c| t.id(c.encode_utf8(&mut buf)).filter(|&id| id != EPSILON))
            .collect()
    }

    /// All analyses of `surface`, in symbol-id order of their lexical
    /// strings. Unknown words yield nothing.
    pub fn apply_up(&self, surface: &str) -> Result<Vec<Analysis>, FstError> {
        let Some(ids) = self.surface_ids(surface) else {
            return Ok(Vec::new());
        };
        let outs = transduce(&self.up, &ids, self.max_output)?;
        Ok(outs.iter().map(|o| self.analysis(o)).collect())
    }

    fn analysis(&self, ids: &[SymbolId]) -> Analysis {
        let t = self.symtab();
        let mut root = String::new();
        let mut tags = Vec::new();
        for &id in ids {
            let s = t.symbol(id).unwrap_or_default();
            if !tags.is_empty() || self.is_tag(s) {
                tags.push(s.to_string());
            } else {
                root.push_str(s);
            }
        }
        Analysis { root, tags }
    }

    /// Segments a lexical string over the grammar's symbols. Fails when a
    /// `+`-prefixed segment is not a known tag; returns `Ok(None)` when some
    /// other scalar is simply not in the grammar.
    pub fn parse_lexical(&self, lexical: &str) -> Result<Option<Vec<SymbolId>>, RuntimeError> {
        let t = self.symtab();
        let pieces = t.segment(lexical);
        // A '+' left over after segmentation starts a tag the grammar lacks.
        if let Some(i) = pieces.iter().position(|p| *p == "+") {
            let tag: String = std::iter::once("+")
                .chain(
                    pieces[i + 1..]
                        .iter()
                        .copied()
                        .take_while(|p| *p != "+" && !self.is_tag(p)),
                )
                .collect();
            return Err(RuntimeError::UnknownTag {
                input: lexical.to_string(),
                tag,
            });
        }
        Ok(t.tokenize(lexical))
    }

    /// All surface forms of `lexical`, in symbol-id order. Underivable or
    /// unparseable input yields nothing.
    pub fn apply_down(&self, lexical: &str) -> Result<Vec<String>, FstError> {
        let Ok(Some(ids)) = self.parse_lexical(lexical) else {
            return Ok(Vec::new());
        };
        self.apply_down_ids(&ids)
    }

    pub fn apply_down_ids(&self, ids: &[SymbolId]) -> Result<Vec<String>, FstError> {
        let t = self.symtab();
        let outs = transduce(&self.net, ids, self.max_output)?;
        Ok(outs.iter().map(|o| t.render(o)).collect())
    }

    /// Writes the net, its symbol table and a manifest into `dir`.
    pub fn save(&self, dir: &Path) -> Result<(), RuntimeError> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(NET_FILE), write_fst(&self.net))?;
        fs::write(dir.join(SYMS_FILE), write_symtab(self.symtab()))?;
        fs::write(dir.join(MANIFEST_FILE), self.manifest())?;
        Ok(())
    }

    pub fn manifest(&self) -> String {
        format!(
            "format\t{FORMAT_VERSION}\nstates\t{}\narcs\t{}\ntags\t{}\n",
            self.net.num_states(),
            self.net.num_arcs(),
            self.tags.join(" ")
        )
    }

    pub fn load(dir: &Path) -> Result<Grammar, RuntimeError> {
        let manifest = fs::read_to_string(dir.join(MANIFEST_FILE))?;
        let version = manifest
            .lines()
            .find_map(|l| l.strip_prefix("format\t"))
            .ok_or_else(|| RuntimeError::Manifest("missing format line".into()))?;
        if version.trim() != FORMAT_VERSION.to_string() {
            return Err(RuntimeError::Manifest(format!("unsupported format {version:?}")));
        }
        let syms = fs::read_to_string(dir.join(SYMS_FILE))?;
        let net = fs::read_to_string(dir.join(NET_FILE))?;
        let symtab = read_symtab(&syms).map_err(|source| RuntimeError::Interchange {
            file: SYMS_FILE,
            source,
        })?;
        let net = read_fst(&net, Shared::new(symtab))
            .map_err(|source| RuntimeError::Interchange { file: NET_FILE, source })?;
        Ok(Grammar::from_net(net))
    }
}

/// Composes a lexicon with a rule transducer, trims and determinizes the
/// result. Fails when no lexicon path survives the rules.
pub fn build_grammar(lexicon: &Fst, rules: &Fst) -> Result<Grammar, RuntimeError> {
    let net = trim(&compose(lexicon, rules)?);
    if net.finals().next().is_none() {
        return Err(RuntimeError::EmptyComposition);
    }
    Ok(Grammar::from_net(determinize_min(&net)))
}

/// Parses and compiles lexicon and rule sources into a grammar.
pub fn compile_grammar(lexc_source: &str, rules_source: &str) -> Result<Grammar, RuntimeError> {
    let ast = parse_lexc(lexc_source)?;
    let rs = parse_rules(rules_source)?;
    let mut symtab = SymbolTable::new();
    let lexicon = compile_lexicon(&ast, &mut symtab)?;
    let rules = compile_ruleset(&rs, &mut symtab)?;
    build_grammar(&lexicon, &rules)
}
