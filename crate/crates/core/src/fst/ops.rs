//! Rational operations: union, concatenation, closure, inversion,
//! projection and trimming.

use crate::symbol::EPSILON;

use super::{merge_symtabs, Fst, FstBuilder, FstError, StateId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Lexical (input) side.
    Upper,
    /// Surface (output) side.
    Lower,
}

fn copy_into(b: &mut FstBuilder, src: &Fst) -> StateId {
    let offset = b.num_states() as StateId;
    for s in 0..src.num_states() as StateId {
        let n = b.add_state();
        b.set_final(n, src.is_final(s));
    }
    for a in src.arcs() {
        b.add_arc(a.source + offset, a.input, a.output, a.target + offset);
    }
    offset
}

pub fn union(a: &Fst, b: &Fst) -> Result<Fst, FstError> {
    let symtab = merge_symtabs(&a.symtab, &b.symtab)?;
    let mut out = FstBuilder::new(symtab);
    let start = out.add_state();
    let oa = copy_into(&mut out, a);
    let ob = copy_into(&mut out, b);
    out.add_arc(start, EPSILON, EPSILON, a.start + oa);
    out.add_arc(start, EPSILON, EPSILON, b.start + ob);
    out.set_start(start);
    Ok(out.build())
}

pub fn concat(a: &Fst, b: &Fst) -> Result<Fst, FstError> {
    let symtab = merge_symtabs(&a.symtab, &b.symtab)?;
    let mut out = FstBuilder::new(symtab);
    let oa = copy_into(&mut out, a);
    let ob = copy_into(&mut out, b);
    for f in a.finals() {
        out.set_final(f + oa, false);
        out.add_arc(f + oa, EPSILON, EPSILON, b.start + ob);
    }
    out.set_start(a.start + oa);
    Ok(out.build())
}

/// Kleene closure.
pub fn star(a: &Fst) -> Fst {
    let mut out = FstBuilder::new(a.shared_symtab());
    let hub = out.add_state();
    out.set_final(hub, true);
    let oa = copy_into(&mut out, a);
    out.add_arc(hub, EPSILON, EPSILON, a.start + oa);
    for f in a.finals() {
        out.add_arc(f + oa, EPSILON, EPSILON, hub);
    }
    out.set_start(hub);
    out.build()
}

/// `a` or the empty pair.
pub fn optional(a: &Fst) -> Fst {
    union(a, &Fst::epsilon(a.shared_symtab())).expect("same symbol table")
}

/// Swaps the two sides of every arc.
pub fn invert(a: &Fst) -> Fst {
    let mut out = a.clone();
    for arc in &mut out.arcs {
        std::mem::swap(&mut arc.input, &mut arc.output);
    }
    resort(out)
}

/// Identity acceptor over one side of `a`.
pub fn project(a: &Fst, side: Side) -> Fst {
    let mut out = a.clone();
    for arc in &mut out.arcs {
        match side {
            Side::Upper => arc.output = arc.input,
            Side::Lower => arc.input = arc.output,
        }
    }
    resort(out)
}

fn resort(mut f: Fst) -> Fst {
    // Sources are unchanged, so per-state offsets stay valid after
    // re-sorting; only duplicates created by projection need care.
    f.arcs.sort_unstable();
    f.arcs.dedup();
    let n = f.num_states();
    let mut offsets = vec![0usize; n + 1];
    for a in &f.arcs {
        offsets[a.source as usize + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    f.offsets = offsets;
    f
}

/// Drops every state that is not on some start-to-final path. State order is
/// otherwise preserved.
pub fn trim(a: &Fst) -> Fst {
    let acc = a.accessible();
    let coacc = a.coaccessible();
    let keep: Vec<bool> = acc.iter().zip(&coacc).map(|(x, y)| *x && *y).collect();
    if !keep[a.start as usize] {
        return Fst::empty(a.shared_symtab());
    }
    let mut remap = vec![StateId::MAX; a.num_states()];
    let mut out = FstBuilder::new(a.shared_symtab());
    for (s, &k) in keep.iter().enumerate() {
        if k {
            let n = out.add_state();
            out.set_final(n, a.is_final(s as StateId));
            remap[s] = n;
        }
    }
    for arc in a.arcs() {
        let (s, t) = (remap[arc.source as usize], remap[arc.target as usize]);
        if s != StateId::MAX && t != StateId::MAX {
            out.add_arc(s, arc.input, arc.output, t);
        }
    }
    out.set_start(remap[a.start as usize]);
    out.build()
}
