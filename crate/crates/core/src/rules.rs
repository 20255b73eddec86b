//! Context-dependent replacement rules.
//!
//! ```text
//! define Cons [ক | খ | গ] ;
//! [আ | া -> এ | ে || _ ই]       ! parallel alternation: আ→এ, া→ে
//! [ই -> 0 || Cons _ ল]          ! deletion after any member of Cons
//! ```
//!
//! Replacement is obligatory. Every occurrence of a left-hand symbol whose
//! left context ends just before it and whose right context starts just
//! after it is rewritten. Contexts are matched against the rule's input, so
//! one rule never sees its own output.
//!
//! Rules compile by the marker construction: a transducer proposes a marker
//! in front of candidate symbols, a context acceptor keeps exactly the
//! markers whose contexts hold (and rejects unmarked symbols whose contexts
//! hold), and a final transducer rewrites marked symbols and erases the
//! markers. The three are composed into one machine.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::sync::Arc as Shared;

use thiserror::Error;

use crate::fst::{compose, determinize_min, Fst, FstBuilder, FstError, StateId};
use crate::symbol::{is_reserved_name, SymbolError, SymbolId, SymbolTable, EPSILON};

/// Marker inserted in front of rewrite sites during compilation.
const MARKER: &str = "@<@";

/// Contexts are tracked in 64-bit sets.
const MAX_CONTEXT: usize = 63;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: replacement has {rhs} alternatives for {lhs} targets")]
    Arity { line: usize, lhs: usize, rhs: usize },
    #[error("line {line}: empty left-hand side")]
    EmptyLhs { line: usize },
    #[error("line {line}: malformed brackets")]
    Brackets { line: usize },
    #[error("rule references epsilon on its left-hand side")]
    EpsilonLhs,
    #[error("context longer than {MAX_CONTEXT} symbols")]
    ContextTooLong,
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Fst(#[from] FstError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContextItem {
    Symbol(String),
    Class { name: String, members: Vec<String> },
}

impl ContextItem {
    pub fn matches(&self, s: &str) -> bool {
        match self {
            ContextItem::Symbol(x) => x == s,
            ContextItem::Class { members, .. } => members.iter().any(|m| m == s),
        }
    }

    fn symbols(&self) -> Vec<&str> {
        match self {
            ContextItem::Symbol(x) => vec![x.as_str()],
            ContextItem::Class { members, .. } => members.iter().map(String::as_str).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplaceRule {
    /// Alternatives, each a single symbol.
    pub lhs: Vec<String>,
    /// Parallel to `lhs`, or a single uniform replacement. `None` deletes.
    pub rhs: Vec<Option<String>>,
    pub left_ctx: Vec<ContextItem>,
    pub right_ctx: Vec<ContextItem>,
}

impl ReplaceRule {
    /// Unconditional rule.
    pub fn simple(lhs: &[&str], rhs: &[Option<&str>]) -> Self {
        ReplaceRule {
            lhs: lhs.iter().map(|s| s.to_string()).collect(),
            rhs: rhs.iter().map(|s| s.map(str::to_string)).collect(),
            left_ctx: Vec::new(),
            right_ctx: Vec::new(),
        }
    }

    pub fn with_context(mut self, left: &[&str], right: &[&str]) -> Self {
        self.left_ctx = left.iter().map(|s| ContextItem::Symbol(s.to_string())).collect();
        self.right_ctx = right.iter().map(|s| ContextItem::Symbol(s.to_string())).collect();
        self
    }

    /// Replacement for `lhs[i]`.
    pub fn replacement(&self, i: usize) -> Option<&str> {
        let r = if self.rhs.len() == 1 {
            &self.rhs[0]
        } else {
            &self.rhs[i]
        };
        r.as_deref()
    }

    fn check(&self) -> Result<(), RuleError> {
        if self.lhs.is_empty() {
            return Err(RuleError::EmptyLhs { line: 0 });
        }
        if self.lhs.iter().any(|s| s.is_empty() || s == "0" || is_reserved_name(s)) {
            return Err(RuleError::EpsilonLhs);
        }
        if self.rhs.len() != 1 && self.rhs.len() != self.lhs.len() {
            return Err(RuleError::Arity {
                line: 0,
                lhs: self.lhs.len(),
                rhs: self.rhs.len(),
            });
        }
        if self.left_ctx.len() > MAX_CONTEXT || self.right_ctx.len() > MAX_CONTEXT {
            return Err(RuleError::ContextTooLong);
        }
        Ok(())
    }

    fn all_symbols(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.lhs.iter().map(String::as_str).collect();
        v.extend(self.rhs.iter().flatten().map(String::as_str));
        for c in self.left_ctx.iter().chain(&self.right_ctx) {
            v.extend(c.symbols());
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RuleSet {
    /// Application order: the first rule applies first.
    pub rules: Vec<ReplaceRule>,
    pub classes: BTreeMap<String, Vec<String>>,
}

type Chars = Vec<(char, bool)>;

fn unescape_line(line: &str, n: usize) -> Result<Chars, RuleError> {
    let mut out = Vec::new();
    let mut it = line.chars();
    while let Some(c) = it.next() {
        match c {
            '%' => match it.next() {
                Some(e) => out.push((e, true)),
                None => {
                    return Err(RuleError::Syntax {
                        line: n,
                        message: "dangling '%' escape".into(),
                    })
                }
            },
            '!' => break,
            c => out.push((c, false)),
        }
    }
    Ok(out)
}

fn text(chars: &[(char, bool)]) -> String {
    chars.iter().map(|&(c, _)| c).collect()
}

fn trim_chars(mut s: &[(char, bool)]) -> &[(char, bool)] {
    while let Some(((c, false), rest)) = s.split_first() {
        if !c.is_whitespace() {
            break;
        }
        s = rest;
    }
    while let Some(((c, false), rest)) = s.split_last() {
        if !c.is_whitespace() {
            break;
        }
        s = rest;
    }
    s
}

/// Positions of unescaped occurrences of `pat`.
fn find_all(s: &[(char, bool)], pat: &str) -> Vec<usize> {
    let pat: Vec<char> = pat.chars().collect();
    let mut hits = Vec::new();
    let mut i = 0;
    while i + pat.len() <= s.len() {
        if s[i..i + pat.len()]
            .iter()
            .zip(&pat)
            .all(|(&(c, esc), &p)| c == p && !esc)
        {
            hits.push(i);
            i += pat.len();
        } else {
            i += 1;
        }
    }
    hits
}

fn split_on<'a>(s: &'a [(char, bool)], pat: &str) -> Vec<&'a [(char, bool)]> {
    let plen = pat.chars().count();
    let mut parts = Vec::new();
    let mut last = 0;
    for i in find_all(s, pat) {
        parts.push(&s[last..i]);
        last = i + plen;
    }
    parts.push(&s[last..]);
    parts
}

fn words(s: &[(char, bool)]) -> Vec<&[(char, bool)]> {
    s.split(|&(c, esc)| c.is_whitespace() && !esc)
        .filter(|w| !w.is_empty())
        .collect()
}

fn is_unescaped(w: &[(char, bool)], s: &str) -> bool {
    w.iter().all(|&(_, e)| !e) && text(w) == s
}

/// A single-symbol token: one scalar, or a multicharacter tag starting with `+`.
fn single_symbol(w: &[(char, bool)], n: usize) -> Result<String, RuleError> {
    let t = text(w);
    if w.len() == 1 || t.starts_with('+') {
        Ok(t)
    } else {
        Err(RuleError::Syntax {
            line: n,
            message: format!("{t:?} is not a single symbol"),
        })
    }
}

fn parse_context(s: &[(char, bool)], classes: &BTreeMap<String, Vec<String>>) -> Vec<ContextItem> {
    let mut out = Vec::new();
    for w in words(s) {
        let t = text(w);
        if is_unescaped(w, "0") {
            continue;
        }
        if let (true, Some(members)) = (w.iter().all(|&(_, e)| !e), classes.get(&t)) {
            out.push(ContextItem::Class {
                name: t,
                members: members.clone(),
            });
        } else if t.starts_with('+') && w.len() > 1 {
            out.push(ContextItem::Symbol(t));
        } else {
            out.extend(w.iter().map(|&(c, _)| ContextItem::Symbol(c.to_string())));
        }
    }
    out
}

fn parse_define(body: &[(char, bool)], classes: &mut BTreeMap<String, Vec<String>>, n: usize) -> Result<(), RuleError> {
    let mut body = trim_chars(body);
    if let Some(((';', false), rest)) = body.split_last() {
        body = trim_chars(rest);
    }
    let ws = words(body);
    let Some((name, rest)) = ws.split_first() else {
        return Err(RuleError::Syntax {
            line: n,
            message: "define without a name".into(),
        });
    };
    let name = text(name);
    let flat: Chars = rest.join(&(' ', false));
    let mut inner = trim_chars(&flat);
    match (inner.first(), inner.last()) {
        (Some(('[', false)), Some((']', false))) => inner = &inner[1..inner.len() - 1],
        (Some(('[', false)), _) | (_, Some((']', false))) => return Err(RuleError::Brackets { line: n }),
        _ => {}
    }
    let mut members = Vec::new();
    for alt in split_on(inner, "|") {
        for w in words(alt) {
            let t = text(w);
            match classes.get(&t) {
                Some(m) if w.iter().all(|&(_, e)| !e) => members.extend(m.iter().cloned()),
                _ => members.push(single_symbol(w, n)?),
            }
        }
    }
    if members.is_empty() {
        return Err(RuleError::Syntax {
            line: n,
            message: format!("class {name:?} has no members"),
        });
    }
    members.dedup();
    classes.insert(name, members);
    Ok(())
}

fn parse_rule_line(
    chars: &[(char, bool)],
    classes: &BTreeMap<String, Vec<String>>,
    n: usize,
) -> Result<ReplaceRule, RuleError> {
    let mut s = trim_chars(chars);
    if let Some(((';', false), rest)) = s.split_last() {
        s = trim_chars(rest);
    }
    match (s.first(), s.last()) {
        (Some(('[', false)), Some((']', false))) if s.len() >= 2 => s = &s[1..s.len() - 1],
        _ => return Err(RuleError::Brackets { line: n }),
    }
    if !find_all(s, "[").is_empty() || !find_all(s, "]").is_empty() {
        return Err(RuleError::Brackets { line: n });
    }
    let halves = split_on(s, "||");
    if halves.len() > 2 {
        return Err(RuleError::Syntax {
            line: n,
            message: "more than one '||'".into(),
        });
    }
    let main = halves[0];
    let (lhs_s, rhs_s) = {
        let ascii = split_on(main, "->");
        let arrow = split_on(main, "→");
        match (ascii.len(), arrow.len()) {
            (2, 1) => (ascii[0], ascii[1]),
            (1, 2) => (arrow[0], arrow[1]),
            _ => {
                return Err(RuleError::Syntax {
                    line: n,
                    message: "expected exactly one '->'".into(),
                })
            }
        }
    };

    let mut lhs = Vec::new();
    for alt in split_on(lhs_s, "|") {
        let w = trim_chars(alt);
        if w.is_empty() || is_unescaped(w, "0") {
            return Err(RuleError::EmptyLhs { line: n });
        }
        let t = text(w);
        match classes.get(&t) {
            Some(m) if w.iter().all(|&(_, e)| !e) => lhs.extend(m.iter().cloned()),
            _ => lhs.push(single_symbol(w, n)?),
        }
    }
    let mut seen = HashSet::new();
    if let Some(dup) = lhs.iter().find(|s| !seen.insert(s.as_str())) {
        return Err(RuleError::Syntax {
            line: n,
            message: format!("duplicate left-hand symbol {dup:?}"),
        });
    }

    let mut rhs = Vec::new();
    for alt in split_on(rhs_s, "|") {
        let w = trim_chars(alt);
        if w.is_empty() {
            return Err(RuleError::Syntax {
                line: n,
                message: "empty replacement (write 0 to delete)".into(),
            });
        }
        if is_unescaped(w, "0") {
            rhs.push(None);
        } else {
            rhs.push(Some(single_symbol(w, n)?));
        }
    }
    if rhs.len() != 1 && rhs.len() != lhs.len() {
        return Err(RuleError::Arity {
            line: n,
            lhs: lhs.len(),
            rhs: rhs.len(),
        });
    }

    let (left_ctx, right_ctx) = match halves.get(1) {
        None => (Vec::new(), Vec::new()),
        Some(ctx) => {
            let parts = split_on(ctx, "_");
            if parts.len() != 2 {
                return Err(RuleError::Syntax {
                    line: n,
                    message: "context needs exactly one '_'".into(),
                });
            }
            (parse_context(parts[0], classes), parse_context(parts[1], classes))
        }
    };
    let rule = ReplaceRule {
        lhs,
        rhs,
        left_ctx,
        right_ctx,
    };
    rule.check().map_err(|e| match e {
        RuleError::EmptyLhs { .. } => RuleError::EmptyLhs { line: n },
        other => other,
    })?;
    Ok(rule)
}

/// Parses a rule file: one rule per line, `define` lines for symbol classes,
/// `!` comments.
pub fn parse_rules(source: &str) -> Result<RuleSet, RuleError> {
    let mut rs = RuleSet::default();
    for (i, raw) in source.lines().enumerate() {
        let n = i + 1;
        let chars = unescape_line(raw, n)?;
        let line = trim_chars(&chars);
        if line.is_empty() {
            continue;
        }
        let ws = words(line);
        if is_unescaped(ws[0], "define") {
            parse_define(&line[6..], &mut rs.classes, n)?;
        } else {
            rs.rules.push(parse_rule_line(line, &rs.classes, n)?);
        }
    }
    Ok(rs)
}

/// Reference implementation by direct string scanning. At each position, if
/// the left context ends here, a left-hand symbol is here and the right
/// context follows, emit the replacement and move past it; otherwise copy the
/// symbol.
pub fn rewrite_symbols<S: AsRef<str>>(rule: &ReplaceRule, input: &[S]) -> Vec<String> {
    let input: Vec<&str> = input.iter().map(AsRef::as_ref).collect();
    let left = &rule.left_ctx;
    let right = &rule.right_ctx;
    let mut out = Vec::new();
    let mut i = 0;
    while i < input.len() {
        let left_ok = i >= left.len() && left.iter().zip(&input[i - left.len()..i]).all(|(c, s)| c.matches(s));
        let right_ok =
            i + 1 + right.len() <= input.len() && right.iter().zip(&input[i + 1..]).all(|(c, s)| c.matches(s));
        let hit = rule.lhs.iter().position(|x| x == input[i]);
        match hit {
            Some(k) if left_ok && right_ok => {
                if let Some(r) = rule.replacement(k) {
                    out.push(r.to_string());
                }
            }
            _ => out.push(input[i].to_string()),
        }
        i += 1;
    }
    out
}

/// [`rewrite_symbols`] over the Unicode scalars of `s`.
pub fn apply_rule_oracle(rule: &ReplaceRule, s: &str) -> String {
    let syms: Vec<String> = s.chars().map(|c| c.to_string()).collect();
    rewrite_symbols(rule, &syms).concat()
}

/// Key of a context-acceptor state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct CtxState {
    /// Bit j set: the last j symbols match the first j left-context items.
    left: u64,
    /// Pending "right context must follow" obligations, by progress.
    must: u64,
    /// Pending "right context must not follow" obligations, by progress.
    must_not: u64,
    /// A marker was just read.
    marked: bool,
}

struct Compiled {
    lhs: Vec<SymbolId>,
    rhs: Vec<SymbolId>,
    left: Vec<Vec<bool>>,
    right: Vec<Vec<bool>>,
}

impl Compiled {
    fn new(rule: &ReplaceRule, symtab: &mut SymbolTable) -> Result<Self, RuleError> {
        let mut lhs = Vec::new();
        let mut rhs = Vec::new();
        for (i, x) in rule.lhs.iter().enumerate() {
            lhs.push(symtab.intern(x)?);
            rhs.push(match rule.replacement(i) {
                Some(r) => symtab.intern(r)?,
                None => EPSILON,
            });
        }
        let items = |ctx: &[ContextItem]| -> Vec<Vec<String>> {
            ctx.iter()
                .map(|c| c.symbols().into_iter().map(str::to_string).collect())
                .collect()
        };
        let left_s = items(&rule.left_ctx);
        let right_s = items(&rule.right_ctx);
        for s in left_s.iter().chain(&right_s).flatten() {
            symtab.intern(s)?;
        }
        let table = |sets: Vec<Vec<String>>, symtab: &SymbolTable| -> Vec<Vec<bool>> {
            sets.into_iter()
                .map(|members| {
                    let mut v = vec![false; symtab.len() + 1];
                    for m in members {
                        if let Some(id) = symtab.id(&m) {
                            v[id as usize] = true;
                        }
                    }
                    v
                })
                .collect()
        };
        Ok(Compiled {
            lhs,
            rhs,
            left: table(left_s, symtab),
            right: table(right_s, symtab),
        })
    }

    fn in_item(item: &[bool], y: SymbolId) -> bool {
        item.get(y as usize).copied().unwrap_or(false)
    }

    fn left_matched(&self, st: &CtxState) -> bool {
        st.left & (1u64 << self.left.len()) != 0
    }

    /// Successor on a non-marker symbol, or `None` if an obligation fails.
    fn step(&self, st: &CtxState, y: SymbolId) -> Option<CtxState> {
        let is_lhs = self.lhs.contains(&y);
        if st.marked && !is_lhs {
            return None;
        }
        let mut left = 1u64;
        for j in 0..self.left.len() {
            if st.left & (1 << j) != 0 && Self::in_item(&self.left[j], y) {
                left |= 1 << (j + 1);
            }
        }
        let r = self.right.len();
        let mut must = 0u64;
        let mut must_not = 0u64;
        for k in 0..r {
            if st.must & (1 << k) != 0 {
                if !Self::in_item(&self.right[k], y) {
                    return None;
                }
                if k + 1 < r {
                    must |= 1 << (k + 1);
                }
            }
            if st.must_not & (1 << k) != 0 && Self::in_item(&self.right[k], y) {
                if k + 1 == r {
                    return None;
                }
                must_not |= 1 << (k + 1);
            }
        }
        if st.marked {
            if r > 0 {
                must |= 1;
            }
        } else if is_lhs && self.left_matched(st) {
            if r == 0 {
                return None;
            }
            must_not |= 1;
        }
        Some(CtxState {
            left,
            must,
            must_not,
            marked: false,
        })
    }
}

/// Compiles one rule over the alphabet of `symtab` (after registering the
/// rule's own symbols). The result maps every string over that alphabet to
/// exactly one output.
pub fn compile_rule(rule: &ReplaceRule, symtab: &mut SymbolTable) -> Result<Fst, RuleError> {
    rule.check()?;
    let c = Compiled::new(rule, symtab)?;
    let marker = symtab.intern(MARKER)?;
    let sigma = symtab.alphabet();
    let shared = Shared::new(symtab.clone());

    // Propose markers in front of left-hand symbols.
    let mut m = FstBuilder::new(Shared::clone(&shared));
    let (m0, m1) = (m.add_state(), m.add_state());
    m.set_final(m0, true);
    for &y in &sigma {
        m.add_arc(m0, y, y, m0);
    }
    m.add_arc(m0, EPSILON, marker, m1);
    for &x in &c.lhs {
        m.add_arc(m1, x, x, m0);
    }
    let propose = m.build();

    // Keep exactly the markers whose contexts hold.
    let mut a = FstBuilder::new(Shared::clone(&shared));
    let mut ids: HashMap<CtxState, StateId> = HashMap::new();
    let mut queue = VecDeque::new();
    let init = CtxState {
        left: 1,
        must: 0,
        must_not: 0,
        marked: false,
    };
    let s0 = a.add_state();
    ids.insert(init, s0);
    queue.push_back(init);
    while let Some(st) = queue.pop_front() {
        let src = ids[&st];
        a.set_final(src, !st.marked && st.must == 0);
        let mut moves: Vec<(SymbolId, CtxState)> = Vec::new();
        if !st.marked && c.left_matched(&st) {
            moves.push((marker, CtxState { marked: true, ..st }));
        }
        for &y in &sigma {
            if let Some(next) = c.step(&st, y) {
                moves.push((y, next));
            }
        }
        for (y, next) in moves {
            let dst = *ids.entry(next).or_insert_with(|| {
                queue.push_back(next);
                a.add_state()
            });
            a.add_arc(src, y, y, dst);
        }
    }
    let constrain = a.build();

    // Rewrite marked symbols and erase markers.
    let mut r = FstBuilder::new(Shared::clone(&shared));
    let (r0, r1) = (r.add_state(), r.add_state());
    r.set_final(r0, true);
    for &y in &sigma {
        r.add_arc(r0, y, y, r0);
    }
    r.add_arc(r0, marker, EPSILON, r1);
    for (&x, &y) in c.lhs.iter().zip(&c.rhs) {
        r.add_arc(r1, x, y, r0);
    }
    let rewrite = r.build();

    let net = compose(&compose(&propose, &constrain)?, &rewrite)?;
    Ok(determinize_min(&net))
}

/// Composes the rules in order (the first rule applies first). An empty set
/// yields the identity over the alphabet.
pub fn compile_ruleset(rs: &RuleSet, symtab: &mut SymbolTable) -> Result<Fst, RuleError> {
    // Register every symbol up front so all rules share one alphabet.
    for rule in &rs.rules {
        rule.check()?;
        for s in rule.all_symbols() {
            symtab.intern(s)?;
        }
    }
    symtab.intern(MARKER)?;
    let mut net: Option<Fst> = None;
    for rule in &rs.rules {
        let f = compile_rule(rule, symtab)?;
        net = Some(match net {
            None => f,
            Some(prev) => determinize_min(&compose(&prev, &f)?),
        });
    }
    let alphabet = symtab.alphabet();
    let shared = Shared::new(symtab.clone());
    Ok(match net {
        Some(f) => f.with_symtab(shared)?,
        None => Fst::identity(shared, &alphabet),
    })
}
