//! Finite-state morphology toolkit.
//!
//! * [`fst`]: transducers and their algebra (union, concatenation, closure,
//!   composition, inversion, projection, trimming, determinization and
//!   minimization over pair symbols).
//! * [`lexc`]: continuation-class lexicon parser and compiler.
//! * [`rules`]: context-dependent replacement rules and their compiler.
//! * [`runtime`]: lexical transducers, analysis (apply-up) and generation
//!   (apply-down).
//! * [`grammar`]: the bundled Bishnupriya Manipuri lexicon, rules and gold
//!   fixtures.
//! * [`encoding`]: table-driven legacy 8-bit font to Unicode conversion.
//! * [`eval`]: precision / recall / F-score harness.

pub mod encoding;
pub mod eval;
pub mod fst;
pub mod grammar;
pub mod lexc;
pub mod rules;
pub mod runtime;
pub mod symbol;

pub use fst::{Fst, FstError};
pub use symbol::{SymbolId, SymbolTable, EPSILON};
