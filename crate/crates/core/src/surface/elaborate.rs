use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::{DExpr, Ident, Item, RuleDecl, SourceFile, Span, Term};
use crate::proof::{Derivation, Env, ProofGenerator, TheoremStmt};
use crate::syntax::{Signature, SyntaxMap, Tree};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElabErrorKind {
    UnknownSymbol(String),
    WrongArgCount {
        op: String,
        expected: usize,
        found: usize,
    },
    DuplicateName(String),
    UnboundMetavariable(String),
}

impl fmt::Display for ElabErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElabErrorKind::UnknownSymbol(s) => write!(f, "unknown symbol `{s}`"),
            ElabErrorKind::WrongArgCount {
                op,
                expected,
                found,
            } => {
                write!(f, "`{op}` takes {expected} arguments, found {found}")
            }
            ElabErrorKind::DuplicateName(s) => write!(f, "duplicate name `{s}`"),
            ElabErrorKind::UnboundMetavariable(s) => {
                write!(f, "`{s}` is not a parameter (write `{s}()` for a constant)")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {kind}")]
pub struct ElabError {
    pub kind: ElabErrorKind,
    pub span: Span,
}

fn err<T>(kind: ElabErrorKind, span: Span) -> Result<T, ElabError> {
    Err(ElabError { kind, span })
}

/// An elaborated file: the environment plus where each theorem was declared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Elaborated {
    pub env: Env,
    pub theorem_spans: HashMap<Arc<str>, Span>,
}

/// Resolves names and builds syntax maps and derivations.
///
/// Syntax declarations are collected first, then rules, then theorems, so
/// rules may use symbols declared anywhere in the file and theorem bodies may
/// use any rule. A theorem may only refer to theorems declared before it. Derivation arities are left to the checker,
/// which reports them per theorem.
pub fn elaborate(file: &SourceFile) -> Result<Elaborated, ElabError> {
    let mut signature = Signature::new();
    for item in &file.items {
        if let Item::Syntax { name, arity, .. } = item {
            if signature.add(name.name.as_str(), *arity).is_err() {
                return err(ElabErrorKind::DuplicateName(name.name.clone()), name.span);
            }
        }
    }

    let mut env = Env::new(signature);
    for item in &file.items {
        if let Item::Rule(decl) = item {
            let (params, hyps, concs) = elaborate_decl(decl, &env.signature)?;
            let rule = ProofGenerator::new(decl.name.name.as_str(), params, hyps, concs)
                .expect("contexts built from the parameter list");
            if env.add_rule(rule).is_err() {
                return err(
                    ElabErrorKind::DuplicateName(decl.name.name.clone()),
                    decl.name.span,
                );
            }
        }
    }

    let mut theorem_spans = HashMap::new();
    for item in &file.items {
        if let Item::Thm { decl, body } = item {
            let (params, hyps, concs) = elaborate_decl(decl, &env.signature)?;
            if env.generator(&decl.name.name).is_some() || env.theorem(&decl.name.name).is_some() {
                return err(
                    ElabErrorKind::DuplicateName(decl.name.name.clone()),
                    decl.name.span,
                );
            }
            let body = elaborate_dexpr(body, &env, &decl.name.name)?;
            let name: Arc<str> = decl.name.name.as_str().into();
            theorem_spans.insert(name.clone(), decl.span);
            env.add_theorem(TheoremStmt {
                name,
                params,
                hyps,
                concs,
                body,
            })
            .expect("name checked above");
        }
    }
    Ok(Elaborated { env, theorem_spans })
}

fn elaborate_decl(
    decl: &RuleDecl,
    signature: &Signature,
) -> Result<(Vec<Arc<str>>, SyntaxMap, SyntaxMap), ElabError> {
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, p) in decl.params.iter().enumerate() {
        if index.insert(p.name.as_str(), i).is_some() {
            return err(ElabErrorKind::DuplicateName(p.name.clone()), p.span);
        }
    }
    let m = decl.params.len();
    let build = |terms: &[Term]| -> Result<SyntaxMap, ElabError> {
        let trees = terms
            .iter()
            .map(|t| elaborate_term(t, &index, signature))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SyntaxMap::new(m, trees).expect("leaves come from the parameter list"))
    };
    let params = decl
        .params
        .iter()
        .map(|p| Arc::from(p.name.as_str()))
        .collect();
    Ok((params, build(&decl.hyps)?, build(&decl.concs)?))
}

fn elaborate_term(
    term: &Term,
    params: &HashMap<&str, usize>,
    signature: &Signature,
) -> Result<Tree, ElabError> {
    let head = &term.head;
    match &term.args {
        None => match params.get(head.name.as_str()) {
            Some(&i) => Ok(Tree::Leaf(i)),
            None if signature.get(&head.name).is_some() => err(
                ElabErrorKind::UnboundMetavariable(head.name.clone()),
                head.span,
            ),
            None => err(ElabErrorKind::UnknownSymbol(head.name.clone()), head.span),
        },
        Some(args) => {
            let Some(op) = signature.get(&head.name) else {
                return err(ElabErrorKind::UnknownSymbol(head.name.clone()), head.span);
            };
            if op.arity() != args.len() {
                return err(
                    ElabErrorKind::WrongArgCount {
                        op: head.name.clone(),
                        expected: op.arity(),
                        found: args.len(),
                    },
                    head.span,
                );
            }
            let children = args
                .iter()
                .map(|a| elaborate_term(a, params, signature))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Tree::node(op, children).expect("arity checked"))
        }
    }
}

fn elaborate_dexpr(d: &DExpr, env: &Env, owner: &str) -> Result<Derivation, ElabError> {
    Ok(match d {
        DExpr::Name(Ident { name, span }) => {
            let known = env.generator(name).is_some() || env.theorem(name).is_some();
            if !known || name == owner {
                return err(ElabErrorKind::UnknownSymbol(name.clone()), *span);
            }
            Derivation::gen(name.as_str())
        }
        DExpr::Id(n, _) => Derivation::Id(*n),
        DExpr::Sym(a, b, _) => Derivation::Sym(*a, *b),
        DExpr::Dup(_) => Derivation::Dup,
        DExpr::Drop(_) => Derivation::Drop,
        DExpr::Seq(a, b) => Derivation::seq(
            elaborate_dexpr(a, env, owner)?,
            elaborate_dexpr(b, env, owner)?,
        ),
        DExpr::Par(a, b) => Derivation::par(
            elaborate_dexpr(a, env, owner)?,
            elaborate_dexpr(b, env, owner)?,
        ),
    })
}
