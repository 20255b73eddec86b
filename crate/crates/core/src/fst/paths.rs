//! Bounded path enumeration and input-driven traversal.

use std::collections::{BTreeSet, HashSet};

use crate::symbol::{SymbolId, EPSILON};

use super::{Fst, FstError, StateId};

/// Default cap on the per-side length accepted by [`paths`].
pub const DEFAULT_PATH_CAP: usize = 12;

pub type PathPair = (String, String);

/// An `(input, output)` pair of symbol-id strings.
pub type IdPath = (Vec<SymbolId>, Vec<SymbolId>);

/// All `(input, output)` pairs of accepting paths with at most `max_len`
/// non-epsilon symbols per side, ordered lexicographically by symbol ids.
pub fn paths_ids(f: &Fst, max_len: usize) -> Result<Vec<IdPath>, FstError> {
    paths_ids_with_cap(f, max_len, DEFAULT_PATH_CAP)
}

fn paths_ids_with_cap(f: &Fst, max_len: usize, cap: usize) -> Result<Vec<IdPath>, FstError> {
    if max_len > cap {
        return Err(FstError::PathCapExceeded {
            requested: max_len,
            cap,
        });
    }
    type Config = (StateId, Vec<SymbolId>, Vec<SymbolId>);
    let mut found: BTreeSet<IdPath> = BTreeSet::new();
    let mut seen: HashSet<Config> = HashSet::new();
    let start: Config = (f.start(), Vec::new(), Vec::new());
    let mut stack = vec![start.clone()];
    seen.insert(start);
    while let Some((s, input, output)) = stack.pop() {
        if f.is_final(s) {
            found.insert((input.clone(), output.clone()));
        }
        for a in f.arcs_from(s) {
            let mut i2 = input.clone();
            let mut o2 = output.clone();
            if a.input != EPSILON {
                i2.push(a.input);
            }
            if a.output != EPSILON {
                o2.push(a.output);
            }
            if i2.len() > max_len || o2.len() > max_len {
                continue;
            }
            let next = (a.target, i2, o2);
            if seen.insert(next.clone()) {
                stack.push(next);
            }
        }
    }
    Ok(found.into_iter().collect())
}

/// [`paths_ids`] rendered as strings.
pub fn paths(f: &Fst, max_len: usize) -> Result<Vec<PathPair>, FstError> {
    paths_with_cap(f, max_len, DEFAULT_PATH_CAP)
}

/// [`paths`] with an explicit enumeration cap.
pub fn paths_with_cap(f: &Fst, max_len: usize, cap: usize) -> Result<Vec<PathPair>, FstError> {
    let t = f.symtab();
    let mut out: Vec<PathPair> = Vec::new();
    let mut seen = HashSet::new();
    for (i, o) in paths_ids_with_cap(f, max_len, cap)? {
        let pair = (t.render(&i), t.render(&o));
        if seen.insert(pair.clone()) {
            out.push(pair);
        }
    }
    Ok(out)
}

/// Every output sequence the machine pairs with `input`. Epsilon-input arcs
/// are followed freely; a visited set guards against epsilon cycles, and any
/// output longer than `max_output` is reported as an error.
pub fn transduce(f: &Fst, input: &[SymbolId], max_output: usize) -> Result<BTreeSet<Vec<SymbolId>>, FstError> {
    type Config = (StateId, usize, Vec<SymbolId>);
    let mut results = BTreeSet::new();
    let mut seen: HashSet<Config> = HashSet::new();
    let start: Config = (f.start(), 0, Vec::new());
    let mut stack = vec![start.clone()];
    seen.insert(start);
    while let Some((s, pos, out)) = stack.pop() {
        if pos == input.len() && f.is_final(s) {
            results.insert(out.clone());
        }
        let mut step = |arcs: &[super::Arc], next_pos: usize| -> Result<(), FstError> {
            for a in arcs {
                let mut o2 = out.clone();
                if a.output != EPSILON {
                    o2.push(a.output);
                    if o2.len() > max_output {
                        return Err(FstError::OutputCapExceeded { cap: max_output });
                    }
                }
                let next = (a.target, next_pos, o2);
                if seen.insert(next.clone()) {
                    stack.push(next);
                }
            }
            Ok(())
        };
        step(f.arcs_matching(s, EPSILON), pos)?;
        if let Some(&x) = input.get(pos) {
            step(f.arcs_matching(s, x), pos + 1)?;
        }
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fst::{atom, invert, star, Fst};
    use crate::symbol::SymbolTable;

    #[test]
    fn single_atom_and_empty() {
        let mut t = SymbolTable::new();
        let f = atom(&mut t, "a", "b").unwrap();
        assert_eq!(paths(&f, 1).unwrap(), vec![("a".to_string(), "b".to_string())]);
        let e = Fst::empty(f.shared_symtab());
        assert!(paths(&e, 5).unwrap().is_empty());
    }

    #[test]
    fn cap_is_enforced() {
        let mut t = SymbolTable::new();
        let f = atom(&mut t, "a", "b").unwrap();
        assert_eq!(
            paths(&f, 13),
            Err(FstError::PathCapExceeded {
                requested: 13,
                cap: DEFAULT_PATH_CAP
            })
        );
        assert!(paths_with_cap(&f, 13, 20).is_ok());
    }

    #[test]
    fn epsilon_output_cycle_hits_the_cap() {
        let mut t = SymbolTable::new();
        let f = star(&atom(&mut t, "0", "x").unwrap());
        let err = transduce(&f, &[], 8).unwrap_err();
        assert_eq!(err, FstError::OutputCapExceeded { cap: 8 });
        // The other direction is finite: x* read on input.
        let inv = invert(&f);
        let x = t.id("x").unwrap();
        let outs = transduce(&inv, &[x, x], 8).unwrap();
        assert_eq!(outs.into_iter().collect::<Vec<_>>(), vec![Vec::<SymbolId>::new()]);
    }
}
