//! Precision, recall and F-score of an analyzer against a gold list.
//!
//! * recall = words analyzed / words in the gold list
//! * precision = words analyzed correctly / words analyzed
//! * F = 2PR / (P + R)
//!
//! A word is analyzed correctly when the analyzer's output set shares at
//! least one analysis with the gold set. Percentages are reported rounded
//! half-up to two decimals; raw counts are kept so other readings can be
//! recomputed.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::fst::FstError;
use crate::runtime::Grammar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("the gold list is empty")]
    EmptyGold,
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Fst(#[from] FstError),
}

/// One gold word. An empty analysis set means the word should not be
/// analyzed at all.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldEntry {
    pub surface: String,
    pub analyses: BTreeSet<String>,
    /// Optional third column naming where the entry comes from.
    pub source: Option<String>,
    pub line: usize,
}

/// Parses `surface<TAB>analysis[,analysis…][<TAB>source]` lines. Blank lines
/// and lines starting with `#` are skipped.
pub fn parse_gold(text: &str) -> Result<Vec<GoldEntry>, EvalError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let bad = |message: &str| EvalError::Malformed {
            line,
            message: message.to_string(),
        };
        let l = raw.strip_suffix('\r').unwrap_or(raw);
        if l.trim().is_empty() || l.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = l.split('\t').collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(bad("expected surface<TAB>analyses[<TAB>source]"));
        }
        let surface = fields[0].trim();
        if surface.is_empty() {
            return Err(bad("empty surface form"));
        }
        let mut analyses = BTreeSet::new();
        if !fields[1].trim().is_empty() {
            for a in fields[1].split(',') {
                let a = a.trim();
                if a.is_empty() {
                    return Err(bad("empty analysis in list"));
                }
                analyses.insert(a.to_string());
            }
        }
        let source = fields.get(2).map(|s| s.trim().to_string()).filter(|s| !s.is_empty());
        out.push(GoldEntry {
            surface: surface.to_string(),
            analyses,
            source,
            line,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub total: usize,
    /// Words with at least one analysis.
    pub produced: usize,
    /// Produced words whose output meets the gold set.
    pub correct: usize,
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
}

/// Rounds half-up to two decimals. The small bias absorbs binary
/// representation error in values such as 1.005.
pub fn round2(x: f64) -> f64 {
    (x * 100.0 + 1e-9).round() / 100.0
}

/// Harmonic mean of two percentages, rounded half-up to two decimals; 0 when
/// both are 0.
pub fn f_score(precision: f64, recall: f64) -> f64 {
    if precision + recall <= 0.0 {
        return 0.0;
    }
    round2(2.0 * precision * recall / (precision + recall))
}

impl EvalReport {
    /// Derives the percentages from raw counts.
    pub fn from_counts(total: usize, produced: usize, correct: usize) -> EvalReport {
        let pct = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 * 100.0 / den as f64 };
        let p = pct(correct, produced);
        let r = pct(produced, total);
        EvalReport {
            total,
            produced,
            correct,
            precision: round2(p),
            recall: round2(r),
            f_score: f_score(p, r),
        }
    }

    /// Aligned table with the data size and the three scores.
    pub fn table(&self) -> String {
        let head = ["Test data size", "Precision", "Recall", "F-Score"];
        let row = [
            self.total.to_string(),
            format!("{:.2}", self.precision),
            format!("{:.2}", self.recall),
            format!("{:.2}", self.f_score),
        ];
        let mut out = String::new();
        for cells in [head.map(String::from), row] {
            let line: Vec<String> = cells
                .iter()
                .zip(head)
                .map(|(c, h)| format!("{c:>w$}", w = h.len()))
                .collect();
            let _ = writeln!(out, "{}", line.join("  "));
        }
        out
    }

    /// `key: value` lines, one per field.
    pub fn key_values(&self) -> String {
        format!(
            "total: {}\nproduced: {}\ncorrect: {}\nprecision: {:.2}\nrecall: {:.2}\nf_score: {:.2}\n",
            self.total, self.produced, self.correct, self.precision, self.recall, self.f_score
        )
    }
}

/// Scores an arbitrary analyzer returning rendered analyses.
pub fn evaluate_with<F>(gold: &[GoldEntry], mut analyze: F) -> Result<EvalReport, EvalError>
where
    F: FnMut(&str) -> Result<Vec<String>, EvalError>,
{
    if gold.is_empty() {
        return Err(EvalError::EmptyGold);
    }
    let mut produced = 0;
    let mut correct = 0;
    for g in gold {
        let out = analyze(&g.surface)?;
        if out.is_empty() {
            continue;
        }
        produced += 1;
        if out.iter().any(|a| g.analyses.contains(a)) {
            correct += 1;
        }
    }
    Ok(EvalReport::from_counts(gold.len(), produced, correct))
}

pub fn evaluate(g: &Grammar, gold: &[GoldEntry]) -> Result<EvalReport, EvalError> {
    evaluate_with(gold, |s| Ok(g.apply_up(s)?.iter().map(ToString::to_string).collect()))
}
