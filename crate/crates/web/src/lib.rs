//! Browser demo: analysis and generation with the bundled grammar, paradigm
//! tables, and a playground that applies user-written rewrite rules.
//!
//! The plain functions below hold the logic and report errors as strings;
//! the `#[wasm_bindgen]` exports only convert those errors for JavaScript.

use bpy_morph::fst::transduce;
use bpy_morph::grammar::{self, Pos};
use bpy_morph::rules::{compile_ruleset, parse_rules};
use bpy_morph::runtime::{Grammar, DEFAULT_MAX_OUTPUT};
use bpy_morph::SymbolTable;
use wasm_bindgen::prelude::*;

/// The bundled grammar, compiled once per page.
#[wasm_bindgen]
pub struct Analyzer {
    grammar: Grammar,
}

impl Analyzer {
    pub fn load() -> Result<Analyzer, String> {
        grammar::load_bundled()
            .map(|grammar| Analyzer { grammar })
            .map_err(|e| e.to_string())
    }

    pub fn analyses(&self, word: &str) -> Result<Vec<String>, String> {
        let out = self.grammar.apply_up(word.trim()).map_err(|e| e.to_string())?;
        Ok(out.iter().map(ToString::to_string).collect())
    }

    pub fn surfaces(&self, lexical: &str) -> Result<Vec<String>, String> {
        let lexical = lexical.trim();
        match self.grammar.parse_lexical(lexical).map_err(|e| e.to_string())? {
            None => Ok(Vec::new()),
            Some(ids) => self.grammar.apply_down_ids(&ids).map_err(|e| e.to_string()),
        }
    }

    /// Paradigm rows as `tags<TAB>form,form…`.
    pub fn paradigm_rows(&self, root: &str, pos: &str) -> Result<Vec<String>, String> {
        let pos: Pos = pos.parse()?;
        let rows = grammar::paradigm(&self.grammar, root.trim(), pos).map_err(|e| e.to_string())?;
        Ok(rows
            .into_iter()
            .map(|r| format!("{}\t{}", r.tags, r.surfaces.join(",")))
            .collect())
    }
}

/// Applies the rules in `rules` (rule-file syntax) to `input`, returning
/// every output in order.
pub fn rewrite_text(rules: &str, input: &str) -> Result<Vec<String>, String> {
    let rs = parse_rules(rules).map_err(|e| e.to_string())?;
    let mut symtab = SymbolTable::new();
    // The input's symbols must be in the alphabet the rules are compiled over.
    let ids = symtab.tokenize_interning(input.trim()).map_err(|e| e.to_string())?;
    let net = compile_ruleset(&rs, &mut symtab).map_err(|e| e.to_string())?;
    let outs = transduce(&net, &ids, DEFAULT_MAX_OUTPUT.max(4 * ids.len())).map_err(|e| e.to_string())?;
    Ok(outs.iter().map(|o| net.symtab().render(o)).collect())
}

#[wasm_bindgen]
impl Analyzer {
    #[wasm_bindgen(constructor)]
    pub fn new() -> Result<Analyzer, JsError> {
        Analyzer::load().map_err(|e| JsError::new(&e))
    }

    pub fn analyze(&self, word: &str) -> Result<Vec<String>, JsError> {
        self.analyses(word).map_err(|e| JsError::new(&e))
    }

    pub fn generate(&self, lexical: &str) -> Result<Vec<String>, JsError> {
        self.surfaces(lexical).map_err(|e| JsError::new(&e))
    }

    pub fn paradigm(&self, root: &str, pos: &str) -> Result<Vec<String>, JsError> {
        self.paradigm_rows(root, pos).map_err(|e| JsError::new(&e))
    }
}

#[wasm_bindgen]
pub fn rewrite(rules: &str, input: &str) -> Result<Vec<String>, JsError> {
    rewrite_text(rules, input).map_err(|e| JsError::new(&e))
}
