//! First-order language of quasi-set theory: tokens, syntax trees, a parser
//! and printer, an evaluator over finite universes and the axiom corpus.

pub mod ast;
pub mod corpus;
pub mod eval;
pub mod lexer;
pub mod parser;

pub use ast::{EntityPred, Formula, NumTerm};
pub use corpus::{check_all, check_axiom, Axiom, AxiomReport, CorpusOptions, SeparationInstance};
pub use eval::{check_sorts, evaluate, separation, separation_with, Valuation, VarSort};
pub use lexer::{tokenize, Func, Pred, Quantifier, Rel, Token, TokenKind};
pub use parser::{parse, parse_tokens};
