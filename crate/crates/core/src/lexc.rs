//! Continuation-class lexicons.
//!
//! Source grammar:
//!
//! ```text
//! Multichar_Symbols +Pl +Sg +CM        ! optional, tags up to the first LEXICON
//! LEXICON Nouns
//! মামা N;                              ! upper = lower = মামা
//! LEXICON N
//! %+Noun:0 NPL;                        ! upper:lower, 0 is epsilon
//! LEXICON NPL
//! +Pl:গাছি #;                          ! # ends the word
//! ```
//!
//! `%` escapes the next character and `!` starts a comment. The first block
//! is the start lexicon unless a block is literally named `Root`.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::sync::Arc as Shared;

use thiserror::Error;

use crate::fst::{trim, Fst, FstBuilder, StateId};
use crate::symbol::{SymbolError, SymbolTable, EPSILON};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LexcError {
    #[error("line {line}: unknown continuation \"{name}\"")]
    UnknownContinuation { line: usize, name: String },
    #[error("line {line}: duplicate lexicon \"{name}\"")]
    DuplicateLexicon { line: usize, name: String },
    #[error("line {line}: entry is missing its terminating ';'")]
    MissingSemicolon { line: usize },
    #[error("line {line}: tag \"{tag}\" is not declared in Multichar_Symbols")]
    UndeclaredTag { line: usize, tag: String },
    #[error("line {line}: duplicate multichar symbol \"{tag}\"")]
    DuplicateMultichar { line: usize, tag: String },
    #[error("line {line}: lexicon \"{name}\" has no entries")]
    EmptyLexicon { line: usize, name: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("lexicon source defines no LEXICON blocks")]
    Empty,
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

impl LexcError {
    pub fn line(&self) -> Option<usize> {
        match self {
            LexcError::UnknownContinuation { line, .. }
            | LexcError::DuplicateLexicon { line, .. }
            | LexcError::MissingSemicolon { line }
            | LexcError::UndeclaredTag { line, .. }
            | LexcError::DuplicateMultichar { line, .. }
            | LexcError::EmptyLexicon { line, .. }
            | LexcError::Syntax { line, .. } => Some(*line),
            LexcError::Empty | LexcError::Symbol(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Continuation {
    Lexicon(String),
    /// `#`
    End,
}

impl Continuation {
    fn name(&self) -> &str {
        match self {
            Continuation::Lexicon(n) => n,
            Continuation::End => "#",
        }
    }
}

#[derive(Debug, Clone, Eq)]
pub struct Entry {
    pub upper: String,
    pub lower: String,
    pub continuation: Continuation,
    /// Source line, ignored by equality.
    pub line: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.upper == other.upper && self.lower == other.lower && self.continuation == other.continuation
    }
}

#[derive(Debug, Clone, Eq)]
pub struct LexiconBlock {
    pub name: String,
    pub entries: Vec<Entry>,
    pub line: usize,
}

impl PartialEq for LexiconBlock {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.entries == other.entries
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LexiconAst {
    pub multichar_symbols: Vec<String>,
    pub lexicons: Vec<LexiconBlock>,
}

impl LexiconAst {
    pub fn entry_count(&self) -> usize {
        self.lexicons.iter().map(|b| b.entries.len()).sum()
    }

    /// Index of the start lexicon.
    pub fn root_index(&self) -> Option<usize> {
        if self.lexicons.is_empty() {
            return None;
        }
        Some(self.lexicons.iter().position(|b| b.name == "Root").unwrap_or(0))
    }

    pub fn block(&self, name: &str) -> Option<&LexiconBlock> {
        self.lexicons.iter().find(|b| b.name == name)
    }
}

/// A whitespace-delimited word with per-character escape flags.
#[derive(Debug, Clone)]
struct Word {
    chars: Vec<(char, bool)>,
    line: usize,
}

impl Word {
    fn is(&self, s: &str) -> bool {
        self.chars.iter().all(|&(_, esc)| !esc) && self.chars.iter().map(|&(c, _)| c).eq(s.chars())
    }

    fn text(&self) -> String {
        self.chars.iter().map(|&(c, _)| c).collect()
    }
}

#[derive(Debug, Clone)]
enum Token {
    Word(Word),
    Semicolon(usize),
}

fn lex(source: &str) -> Result<Vec<Token>, LexcError> {
    let mut tokens = Vec::new();
    let mut line = 1;
    let mut cur: Option<Word> = None;
    let mut chars = source.chars().peekable();
    let flush = |cur: &mut Option<Word>, tokens: &mut Vec<Token>| {
        if let Some(w) = cur.take() {
            tokens.push(Token::Word(w));
        }
    };
    while let Some(c) = chars.next() {
        match c {
            '%' => match chars.next() {
                Some('\n') | None => {
                    return Err(LexcError::Syntax {
                        line,
                        message: "dangling '%' escape".into(),
                    })
                }
                Some(e) => cur
                    .get_or_insert(Word {
                        chars: Vec::new(),
                        line,
                    })
                    .chars
                    .push((e, true)),
            },
            '!' => {
                flush(&mut cur, &mut tokens);
                for d in chars.by_ref() {
                    if d == '\n' {
                        line += 1;
                        break;
                    }
                }
            }
            ';' => {
                flush(&mut cur, &mut tokens);
                tokens.push(Token::Semicolon(line));
            }
            c if c.is_whitespace() => {
                flush(&mut cur, &mut tokens);
                if c == '\n' {
                    line += 1;
                }
            }
            c => cur
                .get_or_insert(Word {
                    chars: Vec::new(),
                    line,
                })
                .chars
                .push((c, false)),
        }
    }
    flush(&mut cur, &mut tokens);
    Ok(tokens)
}

/// Unescaped side of an entry: unescaped `0` is epsilon, `#` is reserved.
fn side(chars: &[(char, bool)], line: usize) -> Result<String, LexcError> {
    let mut out = String::new();
    for &(c, esc) in chars {
        match (c, esc) {
            ('0', false) => {}
            ('#', false) => {
                return Err(LexcError::Syntax {
                    line,
                    message: "'#' is only valid as a continuation".into(),
                })
            }
            (c, _) => out.push(c),
        }
    }
    Ok(out)
}

fn parse_entry(words: &[Word], line: usize) -> Result<Entry, LexcError> {
    let (form, cont) = match words {
        [cont] => (None, cont),
        [form, cont] => (Some(form), cont),
        [] => {
            return Err(LexcError::Syntax {
                line,
                message: "empty entry".into(),
            })
        }
        _ => {
            return Err(LexcError::Syntax {
                line,
                message: format!("expected 'upper[:lower] Continuation ;', found {} words", words.len()),
            })
        }
    };
    let continuation = if cont.is("#") {
        Continuation::End
    } else {
        Continuation::Lexicon(cont.text())
    };
    let (upper, lower) = match form {
        None => (String::new(), String::new()),
        Some(w) => {
            let colons: Vec<usize> = w
                .chars
                .iter()
                .enumerate()
                .filter(|(_, &(c, esc))| c == ':' && !esc)
                .map(|(i, _)| i)
                .collect();
            match colons.as_slice() {
                [] => {
                    let s = side(&w.chars, line)?;
                    (s.clone(), s)
                }
                [i] => (side(&w.chars[..*i], line)?, side(&w.chars[i + 1..], line)?),
                _ => {
                    return Err(LexcError::Syntax {
                        line,
                        message: "more than one ':' in entry".into(),
                    })
                }
            }
        }
    };
    Ok(Entry {
        upper,
        lower,
        continuation,
        line,
    })
}

pub fn parse_lexc(source: &str) -> Result<LexiconAst, LexcError> {
    let tokens = lex(source)?;
    let mut ast = LexiconAst::default();
    let mut i = 0;
    let mut header_present = false;
    let mut multichar_lines: Vec<usize> = Vec::new();

    if let Some(Token::Word(w)) = tokens.first() {
        if w.is("Multichar_Symbols") {
            header_present = true;
            i = 1;
            while i < tokens.len() {
                match &tokens[i] {
                    Token::Word(w) if w.is("LEXICON") => break,
                    Token::Word(w) => {
                        let tag = w.text();
                        if ast.multichar_symbols.contains(&tag) {
                            return Err(LexcError::DuplicateMultichar { line: w.line, tag });
                        }
                        ast.multichar_symbols.push(tag);
                        multichar_lines.push(w.line);
                    }
                    Token::Semicolon(line) => {
                        return Err(LexcError::Syntax {
                            line: *line,
                            message: "unexpected ';' in Multichar_Symbols".into(),
                        })
                    }
                }
                i += 1;
            }
        }
    }

    let mut pending: Vec<Word> = Vec::new();
    while i < tokens.len() {
        match &tokens[i] {
            Token::Word(w) if w.is("LEXICON") => {
                if let Some(p) = pending.first() {
                    return Err(LexcError::MissingSemicolon { line: p.line });
                }
                let name = match tokens.get(i + 1) {
                    Some(Token::Word(n)) if !n.is("LEXICON") => n.text(),
                    _ => {
                        return Err(LexcError::Syntax {
                            line: w.line,
                            message: "LEXICON without a name".into(),
                        })
                    }
                };
                if ast.lexicons.iter().any(|b| b.name == name) {
                    return Err(LexcError::DuplicateLexicon { line: w.line, name });
                }
                ast.lexicons.push(LexiconBlock {
                    name,
                    entries: Vec::new(),
                    line: w.line,
                });
                i += 2;
                continue;
            }
            Token::Word(w) => {
                if ast.lexicons.is_empty() {
                    return Err(LexcError::Syntax {
                        line: w.line,
                        message: format!("{:?} appears before any LEXICON", w.text()),
                    });
                }
                pending.push(w.clone());
            }
            Token::Semicolon(line) => {
                let entry_line = pending.first().map_or(*line, |w| w.line);
                let entry = parse_entry(&pending, entry_line)?;
                pending.clear();
                match ast.lexicons.last_mut() {
                    Some(block) => block.entries.push(entry),
                    None => {
                        return Err(LexcError::Syntax {
                            line: *line,
                            message: "entry outside a LEXICON".into(),
                        })
                    }
                }
            }
        }
        i += 1;
    }
    if let Some(p) = pending.first() {
        return Err(LexcError::MissingSemicolon { line: p.line });
    }
    validate(&ast, header_present)?;
    Ok(ast)
}

fn validate(ast: &LexiconAst, header_present: bool) -> Result<(), LexcError> {
    let names: HashSet<&str> = ast.lexicons.iter().map(|b| b.name.as_str()).collect();
    let mut tags = SymbolTable::new();
    for t in &ast.multichar_symbols {
        tags.intern(t)?;
    }
    for block in &ast.lexicons {
        if block.entries.is_empty() {
            return Err(LexcError::EmptyLexicon {
                line: block.line,
                name: block.name.clone(),
            });
        }
        for e in &block.entries {
            if let Continuation::Lexicon(n) = &e.continuation {
                if !names.contains(n.as_str()) {
                    return Err(LexcError::UnknownContinuation {
                        line: e.line,
                        name: n.clone(),
                    });
                }
            }
            if header_present {
                if let Some(tag) = undeclared_tag(&tags, &e.upper) {
                    return Err(LexcError::UndeclaredTag { line: e.line, tag });
                }
            }
        }
    }
    Ok(())
}

/// A `+` followed by a letter that no declared multichar symbol covers.
fn undeclared_tag(tags: &SymbolTable, upper: &str) -> Option<String> {
    let pieces = tags.segment(upper);
    for (k, p) in pieces.iter().enumerate() {
        if *p != "+" {
            continue;
        }
        let rest: String = pieces[k + 1..]
            .iter()
            .take_while(|q| q.chars().count() == 1 && q.chars().all(|c| c.is_ascii_alphanumeric()))
            .copied()
            .collect();
        if rest.starts_with(|c: char| c.is_ascii_alphabetic()) {
            return Some(format!("+{rest}"));
        }
    }
    None
}

fn escape(s: &str) -> String {
    let mut out = String::new();
    for c in s.chars() {
        if matches!(c, '%' | ':' | ';' | '!' | '0' | '#') || c.is_whitespace() {
            out.push('%');
        }
        out.push(c);
    }
    out
}

fn print_side(s: &str) -> String {
    if s.is_empty() {
        "0".to_string()
    } else {
        escape(s)
    }
}

/// Renders an AST back to source. `parse_lexc(&print_lexc(ast))` reproduces
/// `ast`.
pub fn print_lexc(ast: &LexiconAst) -> String {
    let mut out = String::new();
    if !ast.multichar_symbols.is_empty() {
        out.push_str("Multichar_Symbols\n");
        let tags: Vec<String> = ast.multichar_symbols.iter().map(|t| escape(t)).collect();
        let _ = writeln!(out, "{}\n", tags.join(" "));
    }
    for block in &ast.lexicons {
        let _ = writeln!(out, "LEXICON {}", escape(&block.name));
        for e in &block.entries {
            let form = if e.upper == e.lower {
                print_side(&e.upper)
            } else {
                format!("{}:{}", print_side(&e.upper), print_side(&e.lower))
            };
            let cont = match &e.continuation {
                Continuation::End => "#".to_string(),
                Continuation::Lexicon(n) => escape(n),
            };
            let _ = writeln!(out, "{form} {cont} ;");
        }
        out.push('\n');
    }
    out
}

/// Compiles a lexicon into a transducer whose upper side is the lexical form
/// and lower side the surface morpheme sequence. Each entry becomes a path
/// from its block's start state, with the shorter side padded by epsilon at
/// the end, followed by an epsilon arc to the continuation.
pub fn compile_lexicon(ast: &LexiconAst, symtab: &mut SymbolTable) -> Result<Fst, LexcError> {
    let root = ast.root_index().ok_or(LexcError::Empty)?;
    for t in &ast.multichar_symbols {
        symtab.intern(t)?;
    }
    // States: one entry state per block, one shared final state, then the
    // interior states of each entry path.
    let mut block_start: HashMap<&str, StateId> = HashMap::new();
    for (k, b) in ast.lexicons.iter().enumerate() {
        block_start.insert(b.name.as_str(), k as StateId);
    }
    let final_state = ast.lexicons.len() as StateId;
    let mut next_state = final_state + 1;
    let mut arcs = Vec::new();
    for block in &ast.lexicons {
        let from = block_start[block.name.as_str()];
        for e in &block.entries {
            let up = symtab.tokenize_interning(&e.upper)?;
            let low = symtab.tokenize_interning(&e.lower)?;
            let mut cur = from;
            for i in 0..up.len().max(low.len()) {
                let x = up.get(i).copied().unwrap_or(EPSILON);
                let y = low.get(i).copied().unwrap_or(EPSILON);
                arcs.push((cur, x, y, next_state));
                cur = next_state;
                next_state += 1;
            }
            let dst = match &e.continuation {
                Continuation::End => final_state,
                Continuation::Lexicon(n) => {
                    *block_start
                        .get(n.as_str())
                        .ok_or_else(|| LexcError::UnknownContinuation {
                            line: e.line,
                            name: e.continuation.name().to_string(),
                        })?
                }
            };
            arcs.push((cur, EPSILON, EPSILON, dst));
        }
    }
    let mut b = FstBuilder::new(Shared::new(symtab.clone()));
    for _ in 0..next_state {
        b.add_state();
    }
    b.set_start(root as StateId);
    b.set_final(final_state, true);
    for (s, x, y, t) in arcs {
        b.add_arc(s, x, y, t);
    }
    Ok(trim(&b.build()))
}
