#![allow(dead_code)]

//! Random machines, random rules and brute-force oracles shared by the
//! integration tests.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::Arc as Shared;

use bpy_morph::fst::{paths_ids, Fst, FstBuilder, PairSymbol, StateId};
use bpy_morph::rules::{ContextItem, ReplaceRule};
use bpy_morph::symbol::{SymbolId, SymbolTable, EPSILON};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Rel = BTreeSet<(Vec<SymbolId>, Vec<SymbolId>)>;

pub fn table(alphabet: &str) -> SymbolTable {
    let mut t = SymbolTable::new();
    for c in alphabet.chars() {
        t.intern(&c.to_string()).unwrap();
    }
    t
}

#[derive(Clone, Copy)]
pub enum EpsPolicy {
    Any,
    NoEpsInput,
    NoEpsOutput,
}

/// A random machine with up to `max_states` states over `symtab`'s alphabet.
pub fn random_fst(rng: &mut ChaCha8Rng, symtab: &Shared<SymbolTable>, max_states: usize, eps: EpsPolicy) -> Fst {
    let alphabet = symtab.alphabet();
    let n = rng.gen_range(1..=max_states);
    let mut b = FstBuilder::new(Shared::clone(symtab));
    for _ in 0..n {
        let s = b.add_state();
        b.set_final(s, rng.gen_bool(0.4));
    }
    let label = |rng: &mut ChaCha8Rng, allow_eps: bool| -> SymbolId {
        if allow_eps && rng.gen_bool(0.25) {
            EPSILON
        } else {
            alphabet[rng.gen_range(0..alphabet.len())]
        }
    };
    for _ in 0..rng.gen_range(0..=2 * n) {
        let s = rng.gen_range(0..n) as StateId;
        let t = rng.gen_range(0..n) as StateId;
        let x = label(rng, !matches!(eps, EpsPolicy::NoEpsInput));
        let y = label(rng, !matches!(eps, EpsPolicy::NoEpsOutput));
        b.add_arc(s, x, y, t);
    }
    b.build()
}

pub fn rel(f: &Fst, max_len: usize) -> Rel {
    paths_ids(f, max_len).unwrap().into_iter().collect()
}

/// Relational join, keeping pairs whose outer sides fit `max_len`.
pub fn join(a: &Rel, b: &Rel, max_len: usize) -> Rel {
    let mut out = Rel::new();
    for (x, y) in a {
        for (y2, z) in b {
            if y == y2 && x.len() <= max_len && z.len() <= max_len {
                out.insert((x.clone(), z.clone()));
            }
        }
    }
    out
}

pub fn rel_concat(a: &Rel, b: &Rel, max_len: usize) -> Rel {
    let mut out = Rel::new();
    for (x1, y1) in a {
        for (x2, y2) in b {
            if x1.len() + x2.len() <= max_len && y1.len() + y2.len() <= max_len {
                out.insert(([x1.clone(), x2.clone()].concat(), [y1.clone(), y2.clone()].concat()));
            }
        }
    }
    out
}

pub fn rel_star(a: &Rel, max_len: usize) -> Rel {
    let mut out = Rel::new();
    out.insert((Vec::new(), Vec::new()));
    loop {
        let next = rel_concat(&out, a, max_len);
        let before = out.len();
        out.extend(next);
        if out.len() == before {
            return out;
        }
    }
}

/// Fused-label strings (ε:ε skipped) of accepting paths, up to `max_len` labels.
pub fn pair_language(f: &Fst, max_len: usize) -> BTreeSet<Vec<PairSymbol>> {
    let mut found = BTreeSet::new();
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    queue.push_back((f.start(), Vec::<PairSymbol>::new()));
    seen.insert((f.start(), Vec::new()));
    while let Some((s, w)) = queue.pop_front() {
        if f.is_final(s) {
            found.insert(w.clone());
        }
        for a in f.arcs_from(s) {
            let p = PairSymbol::fuse(a);
            let mut w2 = w.clone();
            if !p.is_epsilon() {
                w2.push(p);
            }
            if w2.len() <= max_len && seen.insert((a.target, w2.clone())) {
                queue.push_back((a.target, w2));
            }
        }
    }
    found
}

/// Language equivalence of two states of a deterministic machine, by
/// exploring the product of the two runs.
pub fn dfa_states_equivalent(f: &Fst, p: StateId, q: StateId) -> bool {
    let mut seen = HashSet::new();
    let mut stack = vec![(p, q)];
    seen.insert((p, q));
    while let Some((a, b)) = stack.pop() {
        if f.is_final(a) != f.is_final(b) {
            return false;
        }
        let la: Vec<PairSymbol> = f.arcs_from(a).iter().map(PairSymbol::fuse).collect();
        let lb: Vec<PairSymbol> = f.arcs_from(b).iter().map(PairSymbol::fuse).collect();
        if la != lb {
            return false;
        }
        for (x, y) in f.arcs_from(a).iter().zip(f.arcs_from(b)) {
            if seen.insert((x.target, y.target)) {
                stack.push((x.target, y.target));
            }
        }
    }
    true
}

/// A random rule over single-character symbols of `alphabet`, with classes
/// drawn as random subsets.
pub fn random_rule(rng: &mut ChaCha8Rng, alphabet: &[&str]) -> ReplaceRule {
    let mut pool: Vec<&str> = alphabet.to_vec();
    let n_lhs = rng.gen_range(1..=2);
    let mut lhs = Vec::new();
    for _ in 0..n_lhs {
        let k = rng.gen_range(0..pool.len());
        lhs.push(pool.remove(k).to_string());
    }
    let pick = |rng: &mut ChaCha8Rng| -> Option<String> {
        if rng.gen_bool(0.2) {
            None
        } else {
            Some(alphabet[rng.gen_range(0..alphabet.len())].to_string())
        }
    };
    let rhs = if rng.gen_bool(0.5) {
        vec![pick(rng)]
    } else {
        (0..lhs.len()).map(|_| pick(rng)).collect()
    };
    let ctx = |rng: &mut ChaCha8Rng| -> Vec<ContextItem> {
        (0..rng.gen_range(0..=2))
            .map(|_| {
                if rng.gen_bool(0.3) {
                    let members: Vec<String> = alphabet
                        .iter()
                        .filter(|_| rng.gen_bool(0.5))
                        .map(|s| s.to_string())
                        .collect();
                    let members = if members.is_empty() {
                        vec![alphabet[0].to_string()]
                    } else {
                        members
                    };
                    ContextItem::Class {
                        name: "K".into(),
                        members,
                    }
                } else {
                    ContextItem::Symbol(alphabet[rng.gen_range(0..alphabet.len())].to_string())
                }
            })
            .collect()
    };
    ReplaceRule {
        lhs,
        rhs,
        left_ctx: ctx(rng),
        right_ctx: ctx(rng),
    }
}

pub fn random_string(rng: &mut ChaCha8Rng, alphabet: &[&str], max_len: usize) -> Vec<String> {
    (0..rng.gen_range(0..=max_len))
        .map(|_| alphabet[rng.gen_range(0..alphabet.len())].to_string())
        .collect()
}
