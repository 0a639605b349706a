//! A small proof-checking kernel.
//!
//! Formulas are trees of a free cartesian syntax signature ([`syntax`]).
//! Inference rules carry spans of syntax maps, and derivations over them
//! ([`proof`]) compile to open hypergraphs of constructor, matcher and spider
//! operations ([`hypergraph`]). Evaluating that graph on generic
//! metavariables decides whether a theorem is valid. [`oracle`] is an
//! independent direct evaluator used to cross-check the compiler, [`surface`]
//! reads and prints the `.mcat` text format, and [`dot`] draws the graphs.

pub mod corpus;
pub mod dot;
pub mod hypergraph;
pub mod laws;
pub mod oracle;
pub mod par;
pub mod proof;
pub mod surface;
pub mod syntax;

pub use hypergraph::{Edge, EdgeLabel, EvalError, EvalFailure, OpenHypergraph, Trace};
pub use proof::{
    check_all, check_theorem, compile_derivation, derivation_arity, registered_env, CheckReport,
    CheckStatus, Derivation, Env, ProofError, ProofGenerator, Refutation, StatusKind, TheoremStmt,
};
pub use syntax::{FreshCounter, OpSymbol, Signature, SyntaxMap, Tree};
