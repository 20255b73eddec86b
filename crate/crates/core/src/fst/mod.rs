//! Unweighted finite-state transducers and their algebra.
//!
//! An [`Fst`] is immutable once built. Arcs are kept sorted by
//! `(source, input, output, target)` so that two machines built by the same
//! sequence of operations compare equal arc-for-arc, and so that the arcs
//! leaving a state can be searched by input label.

mod compose;
mod determinize;
pub mod interchange;
mod ops;
mod paths;

use std::sync::Arc as Shared;

use thiserror::Error;

use crate::symbol::{SymbolError, SymbolId, SymbolTable, EPSILON};

pub use compose::compose;
pub use determinize::determinize_min;
pub use ops::{concat, invert, optional, project, star, trim, union, Side};
pub use paths::{paths, paths_ids, paths_with_cap, transduce, IdPath, PathPair, DEFAULT_PATH_CAP};

pub type StateId = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FstError {
    #[error("operands use incompatible symbol tables")]
    SymbolTableMismatch,
    #[error("path length {requested} exceeds the enumeration cap of {cap}")]
    PathCapExceeded { requested: usize, cap: usize },
    #[error("output exceeded {cap} symbols (unbounded epsilon cycle?)")]
    OutputCapExceeded { cap: usize },
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error("invalid machine: {0}")]
    Invalid(String),
}

/// A transition. Field order gives the canonical sort order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arc {
    pub source: StateId,
    /// Upper (lexical) side.
    pub input: SymbolId,
    /// Lower (surface) side.
    pub output: SymbolId,
    pub target: StateId,
}

/// An arc label viewed as one symbol of a pair alphabet. Lets acceptor
/// algorithms (determinization, minimization) run on transducers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairSymbol {
    pub input: SymbolId,
    pub output: SymbolId,
}

impl PairSymbol {
    pub const EPSILON: PairSymbol = PairSymbol {
        input: EPSILON,
        output: EPSILON,
    };

    pub fn fuse(arc: &Arc) -> Self {
        PairSymbol {
            input: arc.input,
            output: arc.output,
        }
    }

    pub fn unfuse(self, source: StateId, target: StateId) -> Arc {
        Arc {
            source,
            input: self.input,
            output: self.output,
            target,
        }
    }

    pub fn is_epsilon(self) -> bool {
        self == Self::EPSILON
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fst {
    symtab: Shared<SymbolTable>,
    start: StateId,
    finals: Vec<bool>,
    arcs: Vec<Arc>,
    /// `arcs[offsets[s]..offsets[s + 1]]` leave state `s`.
    offsets: Vec<usize>,
}

impl Fst {
    /// A one-state machine with the empty relation.
    pub fn empty(symtab: Shared<SymbolTable>) -> Fst {
        let mut b = FstBuilder::new(symtab);
        b.add_state();
        b.build()
    }

    /// Accepts exactly the empty pair (ε, ε).
    pub fn epsilon(symtab: Shared<SymbolTable>) -> Fst {
        let mut b = FstBuilder::new(symtab);
        let s = b.add_state();
        b.set_final(s, true);
        b.build()
    }

    /// Identity relation over `alphabet*`.
    pub fn identity(symtab: Shared<SymbolTable>, alphabet: &[SymbolId]) -> Fst {
        let mut b = FstBuilder::new(symtab);
        let s = b.add_state();
        b.set_final(s, true);
        for &x in alphabet {
            b.add_arc(s, x, x, s);
        }
        b.build()
    }

    /// A single path spelling `input:output`, padding the shorter side with
    /// epsilon at the end.
    pub fn string_pair(symtab: Shared<SymbolTable>, input: &[SymbolId], output: &[SymbolId]) -> Fst {
        let mut b = FstBuilder::new(symtab);
        let mut cur = b.add_state();
        for i in 0..input.len().max(output.len()) {
            let next = b.add_state();
            let x = input.get(i).copied().unwrap_or(EPSILON);
            let y = output.get(i).copied().unwrap_or(EPSILON);
            b.add_arc(cur, x, y, next);
            cur = next;
        }
        b.set_final(cur, true);
        b.build()
    }

    pub fn symtab(&self) -> &SymbolTable {
        &self.symtab
    }

    pub fn shared_symtab(&self) -> Shared<SymbolTable> {
        Shared::clone(&self.symtab)
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn num_states(&self) -> usize {
        self.finals.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_final(&self, s: StateId) -> bool {
        self.finals.get(s as usize).copied().unwrap_or(false)
    }

    pub fn finals(&self) -> impl Iterator<Item = StateId> + '_ {
        self.finals
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(s, _)| s as StateId)
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arcs_from(&self, s: StateId) -> &[Arc] {
        let s = s as usize;
        &self.arcs[self.offsets[s]..self.offsets[s + 1]]
    }

    /// Arcs leaving `s` whose input label is `input`.
    pub fn arcs_matching(&self, s: StateId, input: SymbolId) -> &[Arc] {
        let arcs = self.arcs_from(s);
        let lo = arcs.partition_point(|a| a.input < input);
        let hi = arcs.partition_point(|a| a.input <= input);
        &arcs[lo..hi]
    }

    /// Same machine over an extended symbol table.
    pub fn with_symtab(&self, symtab: Shared<SymbolTable>) -> Result<Fst, FstError> {
        if !symtab.compatible(&self.symtab) || symtab.len() < self.symtab.len() {
            return Err(FstError::SymbolTableMismatch);
        }
        let mut out = self.clone();
        out.symtab = symtab;
        Ok(out)
    }

    /// Checks the structural invariants: start and finals in range, arc
    /// endpoints valid, labels registered, arcs sorted.
    pub fn validate(&self) -> Result<(), FstError> {
        let n = self.num_states();
        if n == 0 {
            return Err(FstError::Invalid("no states".into()));
        }
        if self.start as usize >= n {
            return Err(FstError::Invalid(format!("start {} out of range", self.start)));
        }
        let nsym = self.symtab.len() as SymbolId;
        for a in &self.arcs {
            if a.source as usize >= n || a.target as usize >= n {
                return Err(FstError::Invalid(format!("arc {a:?} has an endpoint out of range")));
            }
            if a.input >= nsym || a.output >= nsym {
                return Err(FstError::Invalid(format!("arc {a:?} uses an unregistered symbol")));
            }
        }
        if !self.arcs.windows(2).all(|w| w[0] < w[1]) {
            return Err(FstError::Invalid("arcs not sorted and unique".into()));
        }
        if self.offsets.len() != n + 1 {
            return Err(FstError::Invalid("bad arc index".into()));
        }
        Ok(())
    }

    /// States reachable from the start.
    pub(crate) fn accessible(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![self.start];
        seen[self.start as usize] = true;
        while let Some(s) = stack.pop() {
            for a in self.arcs_from(s) {
                if !seen[a.target as usize] {
                    seen[a.target as usize] = true;
                    stack.push(a.target);
                }
            }
        }
        seen
    }

    /// States from which some final state is reachable.
    pub(crate) fn coaccessible(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut rev: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for a in &self.arcs {
            rev[a.target as usize].push(a.source);
        }
        let mut seen = vec![false; n];
        let mut stack: Vec<StateId> = self.finals().collect();
        for &f in &stack {
            seen[f as usize] = true;
        }
        while let Some(s) = stack.pop() {
            for &p in &rev[s as usize] {
                if !seen[p as usize] {
                    seen[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }
}

/// Mutable construction site for an [`Fst`].
#[derive(Debug, Clone)]
pub struct FstBuilder {
    symtab: Shared<SymbolTable>,
    start: StateId,
    finals: Vec<bool>,
    arcs: Vec<Arc>,
}

impl FstBuilder {
    pub fn new(symtab: Shared<SymbolTable>) -> Self {
        FstBuilder {
            symtab,
            start: 0,
            finals: Vec::new(),
            arcs: Vec::new(),
        }
    }

    pub fn add_state(&mut self) -> StateId {
        self.finals.push(false);
        (self.finals.len() - 1) as StateId
    }

    pub fn num_states(&self) -> usize {
        self.finals.len()
    }

    pub fn set_start(&mut self, s: StateId) {
        self.start = s;
    }

    pub fn set_final(&mut self, s: StateId, is_final: bool) {
        self.finals[s as usize] = is_final;
    }

    pub fn add_arc(&mut self, source: StateId, input: SymbolId, output: SymbolId, target: StateId) {
        self.arcs.push(Arc {
            source,
            input,
            output,
            target,
        });
    }

    /// Sorts and deduplicates arcs and freezes the machine.
    pub fn build(mut self) -> Fst {
        if self.finals.is_empty() {
            self.finals.push(false);
        }
        self.arcs.sort_unstable();
        self.arcs.dedup();
        let n = self.finals.len();
        let mut offsets = vec![0usize; n + 1];
        for a in &self.arcs {
            offsets[a.source as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Fst {
            symtab: self.symtab,
            start: self.start,
            finals: self.finals,
            arcs: self.arcs,
            offsets,
        }
    }
}

/// A two-state machine accepting exactly the pair `input:output`. `"0"` on
/// either side denotes epsilon.
pub fn atom(symtab: &mut SymbolTable, input: &str, output: &str) -> Result<Fst, FstError> {
    let mut label = |s: &str| -> Result<SymbolId, FstError> {
        if s == "0" {
            Ok(EPSILON)
        } else {
            Ok(symtab.intern(s)?)
        }
    };
    let x = label(input)?;
    let y = label(output)?;
    let mut b = FstBuilder::new(Shared::new(symtab.clone()));
    let s = b.add_state();
    let t = b.add_state();
    b.add_arc(s, x, y, t);
    b.set_final(t, true);
    Ok(b.build())
}

/// Picks the larger of two prefix-compatible symbol tables.
pub(crate) fn merge_symtabs(a: &Shared<SymbolTable>, b: &Shared<SymbolTable>) -> Result<Shared<SymbolTable>, FstError> {
    if Shared::ptr_eq(a, b) {
        return Ok(Shared::clone(a));
    }
    if !a.compatible(b) {
        return Err(FstError::SymbolTableMismatch);
    }
    Ok(if a.len() >= b.len() {
        Shared::clone(a)
    } else {
        Shared::clone(b)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atom_shapes() {
        let mut t = SymbolTable::new();
        let f = atom(&mut t, "ক", "ক").unwrap();
        assert_eq!(f.num_states(), 2);
        assert_eq!(f.num_arcs(), 1);
        let k = t.id("ক").unwrap();
        assert_eq!((f.arcs()[0].input, f.arcs()[0].output), (k, k));

        t.intern("+Pl").unwrap();
        let f = atom(&mut t, "+Pl", "গ").unwrap();
        assert_eq!(f.arcs()[0].input, t.id("+Pl").unwrap());
        assert_eq!(f.arcs()[0].output, t.id("গ").unwrap());

        let f = atom(&mut t, "0", "ই").unwrap();
        assert_eq!(f.arcs()[0].input, EPSILON);
        f.validate().unwrap();
    }

    #[test]
    fn pair_symbol_round_trip() {
        let a = Arc {
            source: 3,
            input: 1,
            output: 0,
            target: 7,
        };
        assert_eq!(PairSymbol::fuse(&a).unfuse(3, 7), a);
    }

    #[test]
    fn arcs_matching_finds_label_range() {
        let mut t = SymbolTable::new();
        let a = t.intern("a").unwrap();
        let b = t.intern("b").unwrap();
        let mut fb = FstBuilder::new(Shared::new(t));
        let s = fb.add_state();
        fb.add_arc(s, b, a, s);
        fb.add_arc(s, a, a, s);
        fb.add_arc(s, a, b, s);
        let f = fb.build();
        assert_eq!(f.arcs_matching(s, a).len(), 2);
        assert_eq!(f.arcs_matching(s, b).len(), 1);
        assert!(f.arcs_matching(s, EPSILON).is_empty());
    }

    #[test]
    fn validator_rejects_bad_endpoints() {
        let t = Shared::new(SymbolTable::new());
        let mut fb = FstBuilder::new(t);
        fb.add_state();
        fb.add_arc(0, 0, 0, 5);
        // build() does not check; validate() must.
        assert!(fb.build().validate().is_err());
    }

    #[test]
    fn mismatched_tables_are_rejected() {
        let mut t1 = SymbolTable::new();
        t1.intern("a").unwrap();
        let mut t2 = SymbolTable::new();
        t2.intern("b").unwrap();
        let r = merge_symtabs(&Shared::new(t1), &Shared::new(t2));
        assert_eq!(r, Err(FstError::SymbolTableMismatch));
    }
}
