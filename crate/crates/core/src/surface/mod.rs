//! The `.mcat` surface format.
//!
//! ```text
//! file   := item*
//! item   := "syntax" IDENT ":" NAT
//!         | "rule"  IDENT "(" IDENT* ")" ":" ctx "=>" ctx
//!         | "thm"   IDENT "(" IDENT* ")" ":" ctx "=>" ctx "{" dexpr "}"
//! ctx    := "[" (term ("," term)*)? "]"
//! term   := IDENT | IDENT "(" (term ("," term)*)? ")"
//! dexpr  := dseq ;  dseq := dpar (";" dpar)* ;  dpar := datom ("*" datom)*
//! datom  := IDENT | "id" NAT | "sym" NAT NAT | "dup" | "drop" | "(" dexpr ")"
//! ```
//!
//! `//` starts a line comment. Parameters are the rule's metavariables, in
//! order; any other bare identifier in a term is an error, and constants are
//! written `name()`.

use std::fmt;

use thiserror::Error;

mod elaborate;
mod lexer;
mod parser;
mod print;

pub use elaborate::{elaborate, ElabError, ElabErrorKind, Elaborated};
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::parse;
pub use print::dump;

use crate::proof::Env;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Span {
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub expected: Vec<String>,
    pub found: String,
}

impl ParseError {
    pub(crate) fn new(span: Span, expected: Vec<String>, found: impl Into<String>) -> Self {
        ParseError {
            line: span.line,
            column: span.column,
            expected,
            found: found.into(),
        }
    }

    pub fn span(&self) -> Span {
        Span {
            line: self.line,
            column: self.column,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub head: Ident,
    /// `None` for a bare identifier, `Some(args)` for an application.
    pub args: Option<Vec<Term>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DExpr {
    Name(Ident),
    Id(usize, Span),
    Sym(usize, usize, Span),
    Dup(Span),
    Drop(Span),
    Seq(Box<DExpr>, Box<DExpr>),
    Par(Box<DExpr>, Box<DExpr>),
}

impl DExpr {
    pub fn span(&self) -> Span {
        match self {
            DExpr::Name(id) => id.span,
            DExpr::Id(_, s) | DExpr::Sym(_, _, s) | DExpr::Dup(s) | DExpr::Drop(s) => *s,
            DExpr::Seq(a, _) | DExpr::Par(a, _) => a.span(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleDecl {
    pub name: Ident,
    pub params: Vec<Ident>,
    pub hyps: Vec<Term>,
    pub concs: Vec<Term>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Syntax {
        name: Ident,
        arity: usize,
        span: Span,
    },
    Rule(RuleDecl),
    Thm {
        decl: RuleDecl,
        body: DExpr,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceFile {
    pub items: Vec<Item>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Elab(#[from] ElabError),
}

impl LoadError {
    pub fn span(&self) -> Span {
        match self {
            LoadError::Parse(e) => e.span(),
            LoadError::Elab(e) => e.span,
        }
    }
}

/// Parses and elaborates a whole file.
pub fn load(text: &str) -> Result<Elaborated, LoadError> {
    Ok(elaborate(&parse(text)?)?)
}

/// Parses and elaborates, keeping only the environment.
pub fn load_env(text: &str) -> Result<Env, LoadError> {
    load(text).map(|e| e.env)
}
