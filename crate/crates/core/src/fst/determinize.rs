//! Determinization and minimization of a transducer viewed as an acceptor
//! over [`PairSymbol`] labels.
//!
//! Only the pair `ε:ε` is a true epsilon here; `x:ε` and `ε:y` are ordinary
//! pair symbols. The relation is therefore preserved exactly.

use std::collections::{BTreeMap, HashMap, VecDeque};

use super::{trim, Fst, FstBuilder, PairSymbol, StateId};

fn eps_closure(f: &Fst, set: &mut Vec<StateId>) {
    let mut seen: Vec<bool> = vec![false; f.num_states()];
    for &s in set.iter() {
        seen[s as usize] = true;
    }
    let mut stack = set.clone();
    while let Some(s) = stack.pop() {
        for a in f.arcs_matching(s, 0) {
            if a.output == 0 && !seen[a.target as usize] {
                seen[a.target as usize] = true;
                set.push(a.target);
                stack.push(a.target);
            }
        }
    }
    set.sort_unstable();
    set.dedup();
}

/// Subset construction over pair labels. States are numbered in
/// breadth-first discovery order with labels visited in sorted order.
fn determinize(f: &Fst) -> Fst {
    let mut out = FstBuilder::new(f.shared_symtab());
    let mut ids: HashMap<Vec<StateId>, StateId> = HashMap::new();
    let mut queue: VecDeque<Vec<StateId>> = VecDeque::new();

    let mut init = vec![f.start()];
    eps_closure(f, &mut init);
    let s0 = out.add_state();
    out.set_final(s0, init.iter().any(|&s| f.is_final(s)));
    ids.insert(init.clone(), s0);
    queue.push_back(init);

    while let Some(set) = queue.pop_front() {
        let src = ids[&set];
        let mut moves: BTreeMap<PairSymbol, Vec<StateId>> = BTreeMap::new();
        for &s in &set {
            for a in f.arcs_from(s) {
                let label = PairSymbol::fuse(a);
                if !label.is_epsilon() {
                    moves.entry(label).or_default().push(a.target);
                }
            }
        }
        for (label, mut targets) in moves {
            targets.sort_unstable();
            targets.dedup();
            eps_closure(f, &mut targets);
            let dst = match ids.get(&targets) {
                Some(&d) => d,
                None => {
                    let d = out.add_state();
                    out.set_final(d, targets.iter().any(|&s| f.is_final(s)));
                    ids.insert(targets.clone(), d);
                    queue.push_back(targets);
                    d
                }
            };
            let arc = label.unfuse(src, dst);
            out.add_arc(arc.source, arc.input, arc.output, arc.target);
        }
    }
    out.build()
}

/// Moore-style partition refinement of a deterministic, trimmed machine.
fn minimize(d: &Fst) -> Fst {
    let n = d.num_states();
    let any_final = (0..n).any(|s| d.is_final(s as StateId));
    let any_nonfinal = (0..n).any(|s| !d.is_final(s as StateId));
    // Count occupied blocks only: refinement stops when the count is stable.
    let mut class: Vec<usize> = (0..n).map(|s| usize::from(d.is_final(s as StateId))).collect();
    let mut num_classes = usize::from(any_final) + usize::from(any_nonfinal);
    loop {
        let mut sigs: HashMap<(usize, Vec<(PairSymbol, usize)>), usize> = HashMap::new();
        let mut next = vec![0usize; n];
        for s in 0..n {
            let sig: Vec<(PairSymbol, usize)> = d
                .arcs_from(s as StateId)
                .iter()
                .map(|a| (PairSymbol::fuse(a), class[a.target as usize]))
                .collect();
            let len = sigs.len();
            next[s] = *sigs.entry((class[s], sig)).or_insert(len);
        }
        let count = sigs.len();
        class = next;
        if count == num_classes {
            break;
        }
        num_classes = count;
    }

    // Renumber classes in breadth-first order from the start class.
    let mut order: Vec<Option<StateId>> = vec![None; num_classes];
    let mut rep: Vec<usize> = vec![usize::MAX; num_classes];
    for s in 0..n {
        if rep[class[s]] == usize::MAX {
            rep[class[s]] = s;
        }
    }
    let mut out = FstBuilder::new(d.shared_symtab());
    let mut queue = VecDeque::new();
    let start_class = class[d.start() as usize];
    order[start_class] = Some(out.add_state());
    queue.push_back(start_class);
    while let Some(c) = queue.pop_front() {
        let s = rep[c];
        let src = order[c].expect("numbered");
        out.set_final(src, d.is_final(s as StateId));
        for a in d.arcs_from(s as StateId) {
            let tc = class[a.target as usize];
            let dst = match order[tc] {
                Some(id) => id,
                None => {
                    let id = out.add_state();
                    order[tc] = Some(id);
                    queue.push_back(tc);
                    id
                }
            };
            out.add_arc(src, a.input, a.output, dst);
        }
    }
    out.build()
}

/// Deterministic, minimal machine over the fused pair alphabet with the same
/// relation as `a`.
pub fn determinize_min(a: &Fst) -> Fst {
    let d = trim(&determinize(&trim(a)));
    if d.finals().next().is_none() {
        return d;
    }
    minimize(&d)
}
