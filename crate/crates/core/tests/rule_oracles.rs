//! Compiled rewrite rules checked against direct string rewriting.

mod common;

use bpy_morph::fst::transduce;
use bpy_morph::rules::{compile_rule, compile_ruleset, parse_rules, rewrite_symbols, RuleSet};
use bpy_morph::symbol::SymbolTable;
use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ALPHABET: [&str; 5] = ["a", "b", "c", "d", "e"];

fn ids(t: &SymbolTable, s: &[String]) -> Vec<u32> {
    s.iter().map(|x| t.id(x).unwrap()).collect()
}

#[test]
fn single_rules_agree_with_direct_rewriting() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut checked = 0;
    for case in 0..250 {
        let rule = random_rule(&mut rng, &ALPHABET);
        let mut t = table("abcde");
        let f = compile_rule(&rule, &mut t).unwrap();
        f.validate().unwrap();
        for _ in 0..4 {
            let s = random_string(&mut rng, &ALPHABET, 8);
            let got = transduce(&f, &ids(f.symtab(), &s), 32).unwrap();
            let want = rewrite_symbols(&rule, &s);
            assert_eq!(got.len(), 1, "case {case}: {rule:?} on {s:?} is not functional");
            let got = f.symtab().render(got.iter().next().unwrap());
            assert_eq!(got, want.concat(), "case {case}: {rule:?} on {s:?}");
            checked += 1;
        }
    }
    assert!(checked >= 1000);
}

#[test]
fn rule_sets_apply_in_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for case in 0..150 {
        let rs = RuleSet {
            rules: vec![random_rule(&mut rng, &ALPHABET), random_rule(&mut rng, &ALPHABET)],
            ..RuleSet::default()
        };
        let mut t = table("abcde");
        let f = compile_ruleset(&rs, &mut t).unwrap();
        for _ in 0..4 {
            let s = random_string(&mut rng, &ALPHABET, 8);
            let mid = rewrite_symbols(&rs.rules[0], &s);
            let want = rewrite_symbols(&rs.rules[1], &mid).concat();
            let got: Vec<String> = transduce(&f, &ids(f.symtab(), &s), 32)
                .unwrap()
                .iter()
                .map(|o| f.symtab().render(o))
                .collect();
            assert_eq!(got, [want], "case {case}: {rs:?} on {s:?}");
        }
    }
}

#[test]
fn every_string_has_exactly_one_output() {
    // Exhaustive over short strings for a rule with both contexts and a
    // class item.
    let rs = parse_rules("define K [ a | b ] ;\n[ a | c -> d | 0 || K _ b ]\n").unwrap();
    let mut t = table("abcd");
    let f = compile_ruleset(&rs, &mut t).unwrap();
    let alpha = ["a", "b", "c", "d"];
    let mut strings: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..5 {
        let longer: Vec<Vec<String>> = strings
            .iter()
            .filter(|s| s.len() == strings.last().unwrap().len())
            .flat_map(|s| {
                alpha.iter().map(move |c| {
                    let mut v = s.clone();
                    v.push(c.to_string());
                    v
                })
            })
            .collect();
        strings.extend(longer);
    }
    for s in &strings {
        let got = transduce(&f, &ids(f.symtab(), s), 32).unwrap();
        assert_eq!(got.len(), 1, "{s:?}");
        assert_eq!(
            f.symtab().render(got.iter().next().unwrap()),
            rewrite_symbols(&rs.rules[0], s).concat(),
            "{s:?}"
        );
    }
}
