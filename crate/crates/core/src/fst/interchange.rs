//! Tab-separated text interchange format.
//!
//! Machine file, one line per arc or final state:
//!
//! ```text
//! src<TAB>dst<TAB>in_sym<TAB>out_sym
//! state<TAB>
//! ```
//!
//! The start state's lines come first; the remaining states follow in
//! ascending order, each with its arcs (in canonical order) and then its final
//! line. Epsilon is spelled `@0@`. The symbol table is stored beside it as
//! `symbol<TAB>id` lines in id order. Writing, reading and writing again is
//! byte-identical.

use std::fmt::Write as _;
use std::sync::Arc as Shared;

use thiserror::Error;

use crate::symbol::{SymbolId, SymbolTable, EPSILON, EPSILON_NAME};

use super::{Fst, FstBuilder, StateId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct InterchangeError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> InterchangeError {
    InterchangeError {
        line,
        message: message.into(),
    }
}

pub fn write_symtab(t: &SymbolTable) -> String {
    let mut out = String::new();
    for (id, s) in t.iter() {
        let _ = writeln!(out, "{s}\t{id}");
    }
    out
}

pub fn read_symtab(text: &str) -> Result<SymbolTable, InterchangeError> {
    let mut t = SymbolTable::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        if line.is_empty() {
            continue;
        }
        let (sym, id) = line.rsplit_once('\t').ok_or_else(|| err(n, "expected symbol<TAB>id"))?;
        let id: SymbolId = id.parse().map_err(|_| err(n, format!("bad id {id:?}")))?;
        if id == EPSILON {
            if sym != EPSILON_NAME {
                return Err(err(n, format!("id 0 must be {EPSILON_NAME}")));
            }
            continue;
        }
        let got = t.intern(sym).map_err(|e| err(n, e.to_string()))?;
        if got != id {
            return Err(err(n, format!("symbol {sym:?} has id {id}, expected {got}")));
        }
    }
    Ok(t)
}

fn label(t: &SymbolTable, id: SymbolId) -> &str {
    if id == EPSILON {
        EPSILON_NAME
    } else {
        t.symbol(id).unwrap_or("@?@")
    }
}

pub fn write_fst(f: &Fst) -> String {
    let t = f.symtab();
    let mut out = String::new();
    let emit = |s: StateId, out: &mut String| {
        for a in f.arcs_from(s) {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}",
                a.source,
                a.target,
                label(t, a.input),
                label(t, a.output)
            );
        }
        if f.is_final(s) {
            let _ = writeln!(out, "{s}\t");
        }
    };
    let has_lines = |s: StateId| f.is_final(s) || !f.arcs_from(s).is_empty();
    if !has_lines(f.start()) {
        // Nothing leaves the start state: the relation is empty.
        return out;
    }
    emit(f.start(), &mut out);
    for s in 0..f.num_states() as StateId {
        if s != f.start() {
            emit(s, &mut out);
        }
    }
    out
}

pub fn read_fst(text: &str, symtab: Shared<SymbolTable>) -> Result<Fst, InterchangeError> {
    let mut arcs: Vec<(StateId, StateId, SymbolId, SymbolId)> = Vec::new();
    let mut finals: Vec<StateId> = Vec::new();
    let mut start: Option<StateId> = None;
    let mut max_state: StateId = 0;
    let state = |s: &str, n: usize| -> Result<StateId, InterchangeError> {
        s.parse().map_err(|_| err(n, format!("bad state id {s:?}")))
    };
    let sym = |s: &str, n: usize| -> Result<SymbolId, InterchangeError> {
        if s == EPSILON_NAME {
            return Ok(EPSILON);
        }
        symtab.id(s).ok_or_else(|| err(n, format!("unknown symbol {s:?}")))
    };
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        match fields.as_slice() {
            [s, ""] | [s] => {
                let s = state(s, n)?;
                start.get_or_insert(s);
                max_state = max_state.max(s);
                finals.push(s);
            }
            [src, dst, x, y] => {
                let (src, dst) = (state(src, n)?, state(dst, n)?);
                start.get_or_insert(src);
                max_state = max_state.max(src).max(dst);
                arcs.push((src, dst, sym(x, n)?, sym(y, n)?));
            }
            _ => return Err(err(n, "expected 4 fields (arc) or 1 field (final state)")),
        }
    }
    let mut b = FstBuilder::new(Shared::clone(&symtab));
    for _ in 0..=max_state {
        b.add_state();
    }
    b.set_start(start.unwrap_or(0));
    for f in finals {
        b.set_final(f, true);
    }
    for (src, dst, x, y) in arcs {
        b.add_arc(src, x, y, dst);
    }
    Ok(b.build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fst::{atom, concat, paths, star, union};

    #[test]
    fn round_trip_is_byte_identical() {
        let mut t = SymbolTable::new();
        let a = atom(&mut t, "+Pl", "গ").unwrap();
        let b = atom(&mut t, "0", "ু").unwrap();
        let f = star(&union(&a, &concat(&a, &b).unwrap()).unwrap());
        let text = write_fst(&f);
        let syms = write_symtab(f.symtab());
        let t2 = Shared::new(read_symtab(&syms).unwrap());
        assert_eq!(write_symtab(&t2), syms);
        let g = read_fst(&text, t2).unwrap();
        assert_eq!(write_fst(&g), text);
        assert_eq!(paths(&g, 4).unwrap(), paths(&f, 4).unwrap());
        assert!(text.contains("@0@"));
        assert!(text.lines().any(|l| l.ends_with('\t') && l.split('\t').count() == 2));
    }

    #[test]
    fn empty_machine_writes_nothing() {
        let f = Fst::empty(Shared::new(SymbolTable::new()));
        assert_eq!(write_fst(&f), "");
        let g = read_fst("", f.shared_symtab()).unwrap();
        assert!(paths(&g, 3).unwrap().is_empty());
    }

    #[test]
    fn reader_reports_line_numbers() {
        let t = Shared::new(SymbolTable::new());
        let e = read_fst("0\t1\t@0@\t@0@\n0\t1\tzz\tzz\n", t.clone()).unwrap_err();
        assert_eq!(e.line, 2);
        let e = read_fst("0\t1\t2\n", t).unwrap_err();
        assert_eq!(e.line, 1);
        assert!(read_symtab("@0@\t0\na\t5\n").is_err());
    }
}
