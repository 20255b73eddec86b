//! Composition with an epsilon-coordination filter.
//!
//! Between two matched symbols, the left machine may take `m` arcs with an
//! epsilon output and the right machine `n` arcs with an epsilon input. The
//! filter admits exactly one interleaving of those moves: `min(m, n)`
//! simultaneous moves first, then the leftover moves of one side only.
//!
//! Filter states: `0` any move allowed, `1` right-only epsilon moves seen,
//! `2` left-only epsilon moves seen.

use std::collections::HashMap;
use std::collections::VecDeque;

use crate::symbol::EPSILON;

use super::{merge_symtabs, Fst, FstBuilder, FstError, StateId};

type Triple = (StateId, StateId, u8);

pub fn compose(a: &Fst, b: &Fst) -> Result<Fst, FstError> {
    let symtab = merge_symtabs(&a.symtab, &b.symtab)?;
    let mut out = FstBuilder::new(symtab);
    let mut ids: HashMap<Triple, StateId> = HashMap::new();
    let mut queue: VecDeque<Triple> = VecDeque::new();

    let mut intern = |t: Triple, out: &mut FstBuilder, queue: &mut VecDeque<Triple>| -> StateId {
        *ids.entry(t).or_insert_with(|| {
            let id = out.add_state();
            out.set_final(id, a.is_final(t.0) && b.is_final(t.1));
            queue.push_back(t);
            id
        })
    };

    let start = intern((a.start(), b.start(), 0), &mut out, &mut queue);
    out.set_start(start);

    while let Some(t @ (qa, qb, filter)) = queue.pop_front() {
        let src = intern(t, &mut out, &mut queue);
        for arc_a in a.arcs_from(qa) {
            if arc_a.output == EPSILON {
                if filter != 1 {
                    let dst = intern((arc_a.target, qb, 2), &mut out, &mut queue);
                    out.add_arc(src, arc_a.input, EPSILON, dst);
                }
                if filter == 0 {
                    for arc_b in b.arcs_matching(qb, EPSILON) {
                        let dst = intern((arc_a.target, arc_b.target, 0), &mut out, &mut queue);
                        out.add_arc(src, arc_a.input, arc_b.output, dst);
                    }
                }
            } else {
                for arc_b in b.arcs_matching(qb, arc_a.output) {
                    let dst = intern((arc_a.target, arc_b.target, 0), &mut out, &mut queue);
                    out.add_arc(src, arc_a.input, arc_b.output, dst);
                }
            }
        }
        if filter != 2 {
            for arc_b in b.arcs_matching(qb, EPSILON) {
                let dst = intern((qa, arc_b.target, 1), &mut out, &mut queue);
                out.add_arc(src, EPSILON, arc_b.output, dst);
            }
        }
    }
    Ok(out.build())
}
