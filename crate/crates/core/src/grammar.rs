//! The bundled Bishnupriya Manipuri grammar: lexicon, orthographic rules and
//! gold fixtures, compiled into the crate.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::eval::{parse_gold, EvalError};
use crate::fst::FstError;
use crate::lexc::{parse_lexc, LexiconAst};
use crate::runtime::{compile_grammar, Grammar, RuntimeError};
use crate::symbol::{SymbolId, EPSILON};

pub const LEXICON: &str = include_str!("../data/bpy.lexc");
pub const RULES: &str = include_str!("../data/bpy.regex");
pub const GOLD: &str = include_str!("../data/gold.tsv");

/// Every tag the bundled grammar may produce.
pub const TAGSET: [&str; 18] = [
    "+Noun", "+Verb", "+Sg", "+Pl", "+CM", "+LCM", "+EM", "+PDM", "+SDM", "+Pres", "+Past", "+Fut", "+1P", "+2P",
    "+3P", "+PsPSg", "+PsPPl", "+Inf",
];

/// Lexicon holding verb roots that take suffixes only through a linker.
pub const MEITEI_LEXICON: &str = "MeiteiVerbs";
/// Lexicon holding the linker root(s).
pub const LINKER_LEXICON: &str = "Linker";

#[derive(Debug, Error)]
pub enum GrammarError {
    #[error(transparent)]
    Runtime(#[from] RuntimeError),
    #[error(transparent)]
    Fst(#[from] FstError),
    #[error("gold fixtures: {0}")]
    Gold(#[from] EvalError),
    #[error("unknown {pos} root {root}")]
    UnknownRoot { root: String, pos: Pos },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pos {
    Noun,
    Verb,
}

impl Pos {
    pub fn tag(self) -> &'static str {
        match self {
            Pos::Noun => "+Noun",
            Pos::Verb => "+Verb",
        }
    }
}

impl std::fmt::Display for Pos {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Pos::Noun => "noun",
            Pos::Verb => "verb",
        })
    }
}

impl std::str::FromStr for Pos {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "noun" | "Noun" | "+Noun" => Ok(Pos::Noun),
            "verb" | "Verb" | "+Verb" => Ok(Pos::Verb),
            _ => Err(format!("unknown part of speech {s:?}")),
        }
    }
}

/// Compiles the bundled lexicon and rules.
pub fn load_bundled() -> Result<Grammar, RuntimeError> {
    compile_grammar(LEXICON, RULES)
}

/// The bundled lexicon's syntax tree.
pub fn bundled_lexicon() -> LexiconAst {
    parse_lexc(LEXICON).expect("bundled lexicon parses")
}

/// A gold word with the analyses it must receive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldFixture {
    pub surface: String,
    pub analyses: BTreeSet<String>,
    pub source: String,
}

pub fn parse_fixtures(text: &str) -> Result<Vec<GoldFixture>, GrammarError> {
    Ok(parse_gold(text)?
        .into_iter()
        .map(|e| GoldFixture {
            surface: e.surface,
            analyses: e.analyses,
            source: e.source.unwrap_or_default(),
        })
        .collect())
}

pub fn gold_fixtures() -> Vec<GoldFixture> {
    parse_fixtures(GOLD).expect("bundled gold file parses")
}

/// Upper sides of the non-empty entries of lexicon `name`, i.e. the roots it
/// lists.
pub fn roots_of(ast: &LexiconAst, name: &str) -> Vec<String> {
    ast.block(name)
        .map(|b| {
            b.entries
                .iter()
                .filter(|e| !e.upper.is_empty())
                .map(|e| e.upper.clone())
                .collect()
        })
        .unwrap_or_default()
}

/// One paradigm cell: a tag sequence (starting with the part-of-speech tag)
/// and its surface forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParadigmRow {
    pub tags: String,
    pub surfaces: Vec<String>,
}

/// Generates every licensed form of `root`: all tag sequences the net allows
/// after the root, starting with the tag of `pos`, each passed through
/// apply-down. Rows come in symbol-id order of their tags.
pub fn paradigm(g: &Grammar, root: &str, pos: Pos) -> Result<Vec<ParadigmRow>, GrammarError> {
    let t = g.symtab();
    let unknown = || GrammarError::UnknownRoot {
        root: root.to_string(),
        pos,
    };
    let root_ids = t.tokenize(root).ok_or_else(unknown)?;
    let pos_id = t.id(pos.tag()).ok_or_else(unknown)?;
    let tags: HashSet<SymbolId> = g.tags().iter().filter_map(|s| t.id(s)).collect();
    let net = g.net();

    // Walk the upper side: the root's symbols, then tags only.
    let mut found: BTreeSet<Vec<SymbolId>> = BTreeSet::new();
    let mut seen = HashSet::new();
    let mut stack = vec![(net.start(), 0usize, Vec::<SymbolId>::new())];
    while let Some((s, pos_in_root, seq)) = stack.pop() {
        if !seen.insert((s, pos_in_root, seq.clone())) {
            continue;
        }
        if net.is_final(s) && pos_in_root == root_ids.len() && seq.first() == Some(&pos_id) {
            found.insert(seq.clone());
        }
        for a in net.arcs_from(s) {
            if a.input == EPSILON {
                stack.push((a.target, pos_in_root, seq.clone()));
            } else if pos_in_root < root_ids.len() {
                if a.input == root_ids[pos_in_root] && seq.is_empty() {
                    stack.push((a.target, pos_in_root + 1, seq.clone()));
                }
            } else if tags.contains(&a.input) && seq.len() < g.max_output() {
                let mut next = seq.clone();
                next.push(a.input);
                stack.push((a.target, pos_in_root, next));
            }
        }
    }
    if found.is_empty() {
        return Err(unknown());
    }
    let mut rows = Vec::new();
    for seq in found {
        let ids: Vec<SymbolId> = root_ids.iter().chain(&seq).copied().collect();
        rows.push(ParadigmRow {
            tags: t.render(&seq),
            surfaces: g.apply_down_ids(&ids)?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn analyses(g: &Grammar, s: &str) -> Vec<String> {
        g.apply_up(s).unwrap().iter().map(ToString::to_string).collect()
    }

    #[test]
    fn bundled_grammar_compiles_with_its_tagset() {
        let g = load_bundled().unwrap();
        let mut tags = g.tags().to_vec();
        tags.sort();
        let mut want: Vec<String> = TAGSET.iter().map(|s| s.to_string()).collect();
        want.sort();
        assert_eq!(tags, want);
    }

    #[test]
    fn lexicon_size() {
        let ast = bundled_lexicon();
        let nouns = roots_of(&ast, "Nouns").len();
        let verbs: BTreeSet<String> = roots_of(&ast, "Verbs")
            .into_iter()
            .chain(roots_of(&ast, MEITEI_LEXICON))
            .collect();
        assert_eq!(nouns, 150);
        assert_eq!(verbs.len(), 50);
    }

    #[test]
    fn table_one_nouns() {
        let g = load_bundled().unwrap();
        assert_eq!(analyses(&g, "দাদাগাছি"), ["দাদা+Noun+Pl"]);
        assert_eq!(analyses(&g, "মাছগি"), ["মাছ+Noun+PDM"]);
        assert_eq!(analyses(&g, "ঘরে"), ["ঘর+Noun+Sg+LCM"]);
    }

    #[test]
    fn verb_paradigm() {
        let g = load_bundled().unwrap();
        let rows = paradigm(&g, "কর", Pos::Verb).unwrap();
        let cell = |tags: &str| rows.iter().find(|r| r.tags == tags).unwrap().surfaces.clone();
        assert_eq!(cell("+Verb+Past+1P"), ["করলু"]);
        assert_eq!(cell("+Verb+Past+2P"), ["করলে"]);
        assert_eq!(cell("+Verb+Past+3P"), ["করল"]);
        assert_eq!(cell("+Verb+Fut+1P"), ["করতৌ"]);
        assert_eq!(rows.len(), 12);
        assert!(matches!(
            paradigm(&g, "অজানা", Pos::Noun),
            Err(GrammarError::UnknownRoot { .. })
        ));
        // কর is not a noun
        assert!(paradigm(&g, "কর", Pos::Noun).is_err());
    }

    #[test]
    fn noun_paradigm_is_in_slot_order() {
        let g = load_bundled().unwrap();
        let rows = paradigm(&g, "মানু", Pos::Noun).unwrap();
        let rank = |t: &str| match t {
            "Pl" | "PDM" | "Sg" => 0,
            "SDM" => 1,
            "CM" | "LCM" => 2,
            "EM" => 3,
            _ => 9,
        };
        for r in &rows {
            let ranks: Vec<i32> = r.tags.split('+').skip(2).map(rank).collect();
            assert!(ranks.windows(2).all(|w| w[0] < w[1]), "{}", r.tags);
            assert!(!r.surfaces.is_empty());
        }
        assert!(rows.iter().any(|r| r.tags == "+Noun+Sg+SDM+CM+EM"));
    }

    #[test]
    fn fixtures_parse_and_use_the_tagset() {
        let fx = gold_fixtures();
        assert!(fx.len() >= 20);
        for f in &fx {
            assert!(!f.analyses.is_empty());
            assert!(!f.source.is_empty());
            for a in &f.analyses {
                for tag in a.split('+').skip(1) {
                    assert!(TAGSET.contains(&format!("+{tag}").as_str()), "{a}");
                }
            }
        }
    }
}
