//! Proof generators, derivations and the validity check.
//!
//! A generator `f : a -> b` carries a span `a <- m -> b` of syntax maps.
//! Derivations are symmetric monoidal terms over generators, plus `dup` and
//! `drop`. A theorem pairs a derivation with a claimed type `(s, t)`; it is
//! valid when running `s+ ; d` on the generic metavariables is defined and
//! produces `t`, up to instantiating the fresh leaves the run created.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;
use thiserror::Error;

use crate::hypergraph::{EvalError, EvalFailure, OpenHypergraph};
use crate::syntax::{FreshCounter, Signature, SyntaxError, SyntaxMap, Tree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("arity mismatch in {context}: expected {expected}, found {found}")]
    ArityMismatch {
        context: String,
        expected: usize,
        found: usize,
    },
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("theorem `{name}` does not check: {status}")]
    InvalidTheorem { name: String, status: CheckStatus },
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

/// An inference rule `a -> b` with hypotheses `src : m -> a` and conclusions
/// `tgt : m -> b` over a shared metavariable context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofGenerator {
    name: Arc<str>,
    params: Vec<Arc<str>>,
    src: SyntaxMap,
    tgt: SyntaxMap,
    derived: bool,
}

impl ProofGenerator {
    /// `params` names the metavariables for printing; its length is `m`.
    pub fn new(
        name: impl Into<Arc<str>>,
        params: Vec<Arc<str>>,
        src: SyntaxMap,
        tgt: SyntaxMap,
    ) -> Result<Self, ProofError> {
        let name = name.into();
        for (map, which) in [(&src, "source"), (&tgt, "target")] {
            if map.context() != params.len() {
                return Err(ProofError::ArityMismatch {
                    context: format!("{which} of `{name}`"),
                    expected: params.len(),
                    found: map.context(),
                });
            }
        }
        Ok(ProofGenerator {
            name,
            params,
            src,
            tgt,
            derived: false,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[Arc<str>] {
        &self.params
    }

    pub fn src(&self) -> &SyntaxMap {
        &self.src
    }

    pub fn tgt(&self) -> &SyntaxMap {
        &self.tgt
    }

    pub fn metavariables(&self) -> usize {
        self.params.len()
    }

    pub fn arity(&self) -> (usize, usize) {
        (self.src.len(), self.tgt.len())
    }

    /// True for registered theorems.
    pub fn is_derived(&self) -> bool {
        self.derived
    }

    /// `src- ; tgt+`, tagged with the generator's name.
    pub fn compile(&self) -> OpenHypergraph {
        OpenHypergraph::compile_minus(&self.src)
            .then(&OpenHypergraph::compile_plus(&self.tgt))
            .expect("span legs share a context")
            .with_instance(self.name.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Derivation {
    Gen(Arc<str>),
    Id(usize),
    /// `(a + b) -> (b + a)`.
    Sym(usize, usize),
    Seq(Box<Derivation>, Box<Derivation>),
    Par(Box<Derivation>, Box<Derivation>),
    Dup,
    Drop,
}

impl Derivation {
    pub fn gen(name: impl Into<Arc<str>>) -> Self {
        Derivation::Gen(name.into())
    }

    pub fn seq(first: Derivation, second: Derivation) -> Self {
        Derivation::Seq(Box::new(first), Box::new(second))
    }

    pub fn par(left: Derivation, right: Derivation) -> Self {
        Derivation::Par(Box::new(left), Box::new(right))
    }

    /// Left-nested sequential chain; `None` when empty.
    pub fn seq_all(parts: impl IntoIterator<Item = Derivation>) -> Option<Self> {
        parts.into_iter().reduce(Derivation::seq)
    }

    /// Left-nested parallel product; `None` when empty.
    pub fn par_all(parts: impl IntoIterator<Item = Derivation>) -> Option<Self> {
        parts.into_iter().reduce(Derivation::par)
    }

    /// Names of all generators referenced, in first-use order.
    pub fn generator_names(&self) -> Vec<Arc<str>> {
        let mut out = Vec::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut Vec<Arc<str>>) {
        match self {
            Derivation::Gen(name) => {
                if !out.contains(name) {
                    out.push(name.clone());
                }
            }
            Derivation::Seq(a, b) | Derivation::Par(a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
            _ => {}
        }
    }

    /// Replaces references to theorems of `env` by their bodies, recursively.
    pub fn inline_theorems(&self, env: &Env) -> Derivation {
        match self {
            Derivation::Gen(name) => match env.theorem(name) {
                Some(thm) => thm.body.inline_theorems(env),
                None => self.clone(),
            },
            Derivation::Seq(a, b) => {
                Derivation::seq(a.inline_theorems(env), b.inline_theorems(env))
            }
            Derivation::Par(a, b) => {
                Derivation::par(a.inline_theorems(env), b.inline_theorems(env))
            }
            other => other.clone(),
        }
    }
}

/// Surface-syntax rendering, parenthesised only where needed.
impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(d: &Derivation, level: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            // 0: sequential, 1: parallel, 2: atom
            let own = match d {
                Derivation::Seq(..) => 0,
                Derivation::Par(..) => 1,
                _ => 2,
            };
            let wrap = own < level;
            if wrap {
                f.write_str("(")?;
            }
            match d {
                Derivation::Gen(name) => f.write_str(name)?,
                Derivation::Id(n) => write!(f, "id {n}")?,
                Derivation::Sym(a, b) => write!(f, "sym {a} {b}")?,
                Derivation::Dup => f.write_str("dup")?,
                Derivation::Drop => f.write_str("drop")?,
                Derivation::Seq(a, b) => {
                    go(a, 0, f)?;
                    f.write_str(" ; ")?;
                    go(b, 1, f)?;
                }
                Derivation::Par(a, b) => {
                    go(a, 1, f)?;
                    f.write_str(" * ")?;
                    go(b, 2, f)?;
                }
            }
            if wrap {
                f.write_str(")")?;
            }
            Ok(())
        }
        go(self, 0, f)
    }
}

/// A claimed proof: `body : a -> b` with type `hyps : m -> a`, `concs : m -> b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremStmt {
    pub name: Arc<str>,
    pub params: Vec<Arc<str>>,
    pub hyps: SyntaxMap,
    pub concs: SyntaxMap,
    pub body: Derivation,
}

impl TheoremStmt {
    pub fn metavariables(&self) -> usize {
        self.params.len()
    }

    /// The theorem as a derived rule with span `(hyps, concs)`.
    pub fn as_generator(&self) -> Result<ProofGenerator, ProofError> {
        let mut g = ProofGenerator::new(
            self.name.clone(),
            self.params.clone(),
            self.hyps.clone(),
            self.concs.clone(),
        )?;
        g.derived = true;
        Ok(g)
    }
}

/// A formal system: syntax, rules, and theorem statements in file order.
///
/// `generators` holds the primitive rules plus every theorem registered so
/// far; `theorems` lists statements whether or not they have been checked.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Env {
    pub signature: Signature,
    pub generators: IndexMap<Arc<str>, ProofGenerator>,
    pub theorems: Vec<TheoremStmt>,
}

impl Env {
    pub fn new(signature: Signature) -> Self {
        Env {
            signature,
            ..Env::default()
        }
    }

    pub fn add_rule(&mut self, rule: ProofGenerator) -> Result<(), ProofError> {
        if self.generators.contains_key(&rule.name) || self.theorem(&rule.name).is_some() {
            return Err(ProofError::DuplicateName(rule.name.to_string()));
        }
        self.generators.insert(rule.name.clone(), rule);
        Ok(())
    }

    pub fn add_theorem(&mut self, thm: TheoremStmt) -> Result<(), ProofError> {
        if self.generators.contains_key(&thm.name) || self.theorem(&thm.name).is_some() {
            return Err(ProofError::DuplicateName(thm.name.to_string()));
        }
        self.theorems.push(thm);
        Ok(())
    }

    pub fn generator(&self, name: &str) -> Option<&ProofGenerator> {
        self.generators.get(name)
    }

    pub fn theorem(&self, name: &str) -> Option<&TheoremStmt> {
        self.theorems.iter().find(|t| &*t.name == name)
    }

    /// Primitive rules only, in declaration order.
    pub fn rules(&self) -> impl Iterator<Item = &ProofGenerator> {
        self.generators.values().filter(|g| !g.derived)
    }

    /// A copy with no theorem registered as a generator.
    pub fn unregistered(&self) -> Env {
        Env {
            signature: self.signature.clone(),
            generators: self.rules().map(|g| (g.name.clone(), g.clone())).collect(),
            theorems: self.theorems.clone(),
        }
    }

    /// Checks `thm` and, if valid, makes it usable as a generator.
    pub fn register_theorem(&mut self, thm: &TheoremStmt) -> Result<CheckReport, ProofError> {
        if self.generators.contains_key(&thm.name) {
            return Err(ProofError::DuplicateName(thm.name.to_string()));
        }
        let report = check_theorem(thm, self);
        if !report.status.is_valid() {
            return Err(ProofError::InvalidTheorem {
                name: thm.name.to_string(),
                status: report.status,
            });
        }
        self.generators
            .insert(thm.name.clone(), thm.as_generator()?);
        Ok(report)
    }
}

/// Returns the derivation's `(inputs, outputs)` arity.
pub fn derivation_arity(d: &Derivation, env: &Env) -> Result<(usize, usize), ProofError> {
    Ok(match d {
        Derivation::Gen(name) => env
            .generator(name)
            .ok_or_else(|| ProofError::UnknownGenerator(name.to_string()))?
            .arity(),
        Derivation::Id(n) => (*n, *n),
        Derivation::Sym(a, b) => (a + b, a + b),
        Derivation::Dup => (1, 2),
        Derivation::Drop => (1, 0),
        Derivation::Seq(first, second) => {
            let (a, b) = derivation_arity(first, env)?;
            let (c, d2) = derivation_arity(second, env)?;
            if b != c {
                return Err(ProofError::ArityMismatch {
                    context: format!("`{first} ; {second}`"),
                    expected: c,
                    found: b,
                });
            }
            (a, d2)
        }
        Derivation::Par(left, right) => {
            let (a, b) = derivation_arity(left, env)?;
            let (c, d2) = derivation_arity(right, env)?;
            (a + c, b + d2)
        }
    })
}

pub fn compile_generator(f: &ProofGenerator) -> OpenHypergraph {
    f.compile()
}

/// Compiles a derivation to a single open hypergraph. Registered theorems
/// compile through their span, like any other generator.
pub fn compile_derivation(d: &Derivation, env: &Env) -> Result<OpenHypergraph, ProofError> {
    Ok(match d {
        Derivation::Gen(name) => env
            .generator(name)
            .ok_or_else(|| ProofError::UnknownGenerator(name.to_string()))?
            .compile(),
        Derivation::Id(n) => OpenHypergraph::identity(*n),
        Derivation::Sym(a, b) => OpenHypergraph::symmetry(*a, *b),
        Derivation::Dup => OpenHypergraph::spider(1, 2),
        Derivation::Drop => OpenHypergraph::spider(1, 0),
        Derivation::Seq(first, second) => {
            let h1 = compile_derivation(first, env)?;
            let h2 = compile_derivation(second, env)?;
            h1.then(&h2).map_err(|_| ProofError::ArityMismatch {
                context: format!("`{first} ; {second}`"),
                expected: h2.arity().0,
                found: h1.arity().1,
            })?
        }
        Derivation::Par(left, right) => {
            compile_derivation(left, env)?.tensor(&compile_derivation(right, env)?)
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Refutation {
    /// The hypergraph run was undefined at a specific edge.
    Eval(EvalFailure),
    /// Undefined, without location (reported by the direct evaluator).
    Undefined,
    ConclusionMismatch {
        index: usize,
        expected: Tree,
        actual: Tree,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckStatus {
    Valid,
    Invalid(Refutation),
    StaticError(String),
}

/// Coarse status class, comparable across the two checking engines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StatusKind {
    Valid,
    Undefined,
    ConclusionMismatch,
    StaticError,
}

impl CheckStatus {
    pub fn is_valid(&self) -> bool {
        matches!(self, CheckStatus::Valid)
    }

    pub fn kind(&self) -> StatusKind {
        match self {
            CheckStatus::Valid => StatusKind::Valid,
            CheckStatus::Invalid(Refutation::ConclusionMismatch { .. }) => {
                StatusKind::ConclusionMismatch
            }
            CheckStatus::Invalid(_) => StatusKind::Undefined,
            CheckStatus::StaticError(_) => StatusKind::StaticError,
        }
    }
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckStatus::Valid => f.write_str("valid"),
            CheckStatus::Invalid(Refutation::Eval(failure)) => write!(f, "invalid: {failure}"),
            CheckStatus::Invalid(Refutation::Undefined) => f.write_str("invalid: undefined"),
            CheckStatus::Invalid(Refutation::ConclusionMismatch {
                index,
                expected,
                actual,
            }) => write!(
                f,
                "invalid: conclusion {index} mismatch: expected {expected}, actual {actual}"
            ),
            CheckStatus::StaticError(msg) => write!(f, "error: {msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub status: CheckStatus,
    /// The conclusions computed from the generic hypotheses, when defined.
    /// Leaves at or above the theorem's metavariable count are fresh.
    pub conclusion: Option<Vec<Tree>>,
}

impl CheckReport {
    pub fn static_error(err: impl fmt::Display) -> Self {
        CheckReport {
            status: CheckStatus::StaticError(err.to_string()),
            conclusion: None,
        }
    }
}

/// Arity checks shared by both checking engines.
pub(crate) fn check_statement_shape(thm: &TheoremStmt, env: &Env) -> Result<(), ProofError> {
    let m = thm.metavariables();
    for (map, which) in [(&thm.hyps, "hypotheses"), (&thm.concs, "conclusions")] {
        if map.context() != m {
            return Err(ProofError::ArityMismatch {
                context: format!("{which} of `{}`", thm.name),
                expected: m,
                found: map.context(),
            });
        }
    }
    let (a, b) = derivation_arity(&thm.body, env)?;
    if a != thm.hyps.len() {
        return Err(ProofError::ArityMismatch {
            context: format!("inputs of `{}`", thm.name),
            expected: thm.hyps.len(),
            found: a,
        });
    }
    if b != thm.concs.len() {
        return Err(ProofError::ArityMismatch {
            context: format!("outputs of `{}`", thm.name),
            expected: thm.concs.len(),
            found: b,
        });
    }
    Ok(())
}

/// Compares computed conclusions against the claimed ones. Leaves below
/// `boundary` are rigid; leaves at or above it are fresh values and may be
/// instantiated, consistently across the whole tuple. Returns the first
/// index at which no such instantiation exists.
pub fn conclusion_mismatch(actual: &[Tree], expected: &[Tree], boundary: usize) -> Option<usize> {
    let mut bindings: HashMap<usize, Tree> = HashMap::new();
    actual
        .iter()
        .zip(expected)
        .position(|(a, e)| !instantiates(a, e, boundary, &mut bindings))
}

fn instantiates(
    actual: &Tree,
    expected: &Tree,
    boundary: usize,
    bindings: &mut HashMap<usize, Tree>,
) -> bool {
    match actual {
        Tree::Leaf(i) if *i < boundary => matches!(expected, Tree::Leaf(j) if j == i),
        Tree::Leaf(i) => match bindings.get(i) {
            Some(bound) => bound == expected,
            None => {
                bindings.insert(*i, expected.clone());
                true
            }
        },
        Tree::Node(a) => match expected {
            Tree::Node(e) if a.op == e.op => a
                .children
                .iter()
                .zip(&e.children)
                .all(|(ac, ec)| instantiates(ac, ec, boundary, bindings)),
            _ => false,
        },
    }
}

/// Turns a computed conclusion tuple into a report.
pub(crate) fn judge(actual: Vec<Tree>, expected: &[Tree], boundary: usize) -> CheckReport {
    let status = match conclusion_mismatch(&actual, expected, boundary) {
        None => CheckStatus::Valid,
        Some(index) => CheckStatus::Invalid(Refutation::ConclusionMismatch {
            index,
            expected: expected[index].clone(),
            actual: actual[index].clone(),
        }),
    };
    CheckReport {
        status,
        conclusion: Some(actual),
    }
}

/// The graph a theorem is checked with: `hyps+ ; body`.
pub fn theorem_graph(thm: &TheoremStmt, env: &Env) -> Result<OpenHypergraph, ProofError> {
    check_statement_shape(thm, env)?;
    let body = compile_derivation(&thm.body, env)?;
    Ok(OpenHypergraph::compile_plus(&thm.hyps)
        .with_instance("hyps")
        .then(&body)
        .expect("arities checked"))
}

/// Checks a theorem on the generic metavariables `x0 .. x(m-1)`.
pub fn check_theorem(thm: &TheoremStmt, env: &Env) -> CheckReport {
    let graph = match theorem_graph(thm, env) {
        Ok(g) => g,
        Err(e) => return CheckReport::static_error(e),
    };
    let m = thm.metavariables();
    let leaves = Tree::leaves(m);
    let mut fresh = FreshCounter::new(m);
    match graph.evaluate(&leaves, &mut fresh) {
        Ok(actual) => {
            let expected = thm.concs.instantiate(&leaves).expect("context checked");
            judge(actual, &expected, m)
        }
        Err(EvalError::Undefined(failure)) => CheckReport {
            status: CheckStatus::Invalid(Refutation::Eval(failure)),
            conclusion: None,
        },
        Err(e) => CheckReport::static_error(e),
    }
}

/// Checks every theorem of `env` in file order, registering the valid ones
/// so later theorems may use them. Theorems that do not depend on each other
/// are checked in parallel when the `parallel` feature is on.
pub fn check_all(env: &Env) -> Vec<(Arc<str>, CheckReport)> {
    let mut working = env.unregistered();
    let mut reports: Vec<Option<CheckReport>> = vec![None; env.theorems.len()];
    for wave in dependency_waves(env) {
        let results = crate::par::map(&wave, |&i| check_theorem(&env.theorems[i], &working));
        for (i, report) in wave.into_iter().zip(results) {
            if report.status.is_valid() {
                let g = env.theorems[i].as_generator();
                match g {
                    Ok(g) => {
                        working.generators.insert(g.name.clone(), g);
                    }
                    Err(e) => {
                        reports[i] = Some(CheckReport::static_error(e));
                        continue;
                    }
                }
            }
            reports[i] = Some(report);
        }
    }
    env.theorems
        .iter()
        .zip(reports)
        .map(|(t, r)| (t.name.clone(), r.expect("every theorem scheduled")))
        .collect()
}

/// `env` with every theorem that `reports` marks valid registered.
pub fn registered_env(env: &Env, reports: &[(Arc<str>, CheckReport)]) -> Env {
    let mut working = env.unregistered();
    for (thm, (_, report)) in env.theorems.iter().zip(reports) {
        if report.status.is_valid() {
            if let Ok(g) = thm.as_generator() {
                working.generators.insert(g.name.clone(), g);
            }
        }
    }
    working
}

/// Groups theorem indices so that each theorem comes after the theorems it
/// references. Waves are in ascending index order.
fn dependency_waves(env: &Env) -> Vec<Vec<usize>> {
    let index: HashMap<&str, usize> = env
        .theorems
        .iter()
        .enumerate()
        .map(|(i, t)| (&*t.name, i))
        .collect();
    let mut level = vec![0usize; env.theorems.len()];
    for (i, thm) in env.theorems.iter().enumerate() {
        level[i] = thm
            .body
            .generator_names()
            .iter()
            .filter_map(|n| index.get(&**n).copied().filter(|&j| j < i))
            .map(|j| level[j] + 1)
            .max()
            .unwrap_or(0);
    }
    let depth = level.iter().copied().max().map_or(0, |d| d + 1);
    let mut waves = vec![Vec::new(); depth];
    for (i, l) in level.into_iter().enumerate() {
        waves[l].push(i);
    }
    waves
}
