//! Signatures, syntax trees and syntax maps.
//!
//! A syntax map `m -> n` is an `n`-tuple of trees over the metavariables
//! `0..m`. Read covariantly it builds terms ([`SyntaxMap::instantiate`]);
//! read contravariantly it is a pattern ([`SyntaxMap::match_against`]).
//! Composition is substitution.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use indexmap::IndexMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("duplicate syntax symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("leaf x{leaf} out of range for a context of {context} metavariables")]
    LeafOutOfRange { leaf: usize, context: usize },
    #[error("`{op}` takes {expected} arguments, found {found}")]
    WrongChildCount {
        op: String,
        expected: usize,
        found: usize,
    },
}

/// A term former `arity -> 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpSymbol {
    name: Arc<str>,
    arity: usize,
}

impl OpSymbol {
    pub fn new(name: impl Into<Arc<str>>, arity: usize) -> Self {
        OpSymbol {
            name: name.into(),
            arity,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn name_arc(&self) -> &Arc<str> {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    ops: IndexMap<Arc<str>, OpSymbol>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a signature from `(name, arity)` pairs, preserving order.
    pub fn declare<I, S>(decls: I) -> Result<Self, SyntaxError>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<Arc<str>>,
    {
        let mut sig = Signature::new();
        for (name, arity) in decls {
            sig.add(name, arity)?;
        }
        Ok(sig)
    }

    pub fn add(
        &mut self,
        name: impl Into<Arc<str>>,
        arity: usize,
    ) -> Result<&OpSymbol, SyntaxError> {
        let name = name.into();
        if self.ops.contains_key(&name) {
            return Err(SyntaxError::DuplicateSymbol(name.to_string()));
        }
        let op = OpSymbol::new(name.clone(), arity);
        Ok(self.ops.entry(name).or_insert(op))
    }

    pub fn get(&self, name: &str) -> Option<&OpSymbol> {
        self.ops.get(name)
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &OpSymbol> {
        self.ops.values()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Node {
    pub op: OpSymbol,
    pub children: Vec<Tree>,
}

/// A rooted syntax tree. Leaves are numbered metavariable (or fresh) slots.
///
/// Interior nodes are reference counted, so cloning is cheap and spiders can
/// fan a value out without copying it.
#[derive(Debug, Clone, Eq)]
pub enum Tree {
    Leaf(usize),
    Node(Arc<Node>),
}

impl Tree {
    pub fn leaf(id: usize) -> Tree {
        Tree::Leaf(id)
    }

    pub fn node(op: &OpSymbol, children: Vec<Tree>) -> Result<Tree, SyntaxError> {
        if children.len() != op.arity {
            return Err(SyntaxError::WrongChildCount {
                op: op.name.to_string(),
                expected: op.arity,
                found: children.len(),
            });
        }
        Ok(Tree::node_unchecked(op.clone(), children))
    }

    /// Caller guarantees `children.len() == op.arity()`.
    pub(crate) fn node_unchecked(op: OpSymbol, children: Vec<Tree>) -> Tree {
        debug_assert_eq!(op.arity, children.len());
        Tree::Node(Arc::new(Node { op, children }))
    }

    /// The leaves `x0 .. x(n-1)`.
    pub fn leaves(n: usize) -> Vec<Tree> {
        (0..n).map(Tree::Leaf).collect()
    }

    pub fn as_node(&self) -> Option<&Node> {
        match self {
            Tree::Node(node) => Some(node),
            Tree::Leaf(_) => None,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Tree::Leaf(_) => 1,
            Tree::Node(node) => 1 + node.children.iter().map(Tree::size).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Tree::Leaf(_) => 0,
            Tree::Node(node) => 1 + node.children.iter().map(Tree::depth).max().unwrap_or(0),
        }
    }

    /// Largest leaf id, if any leaf occurs.
    pub fn max_leaf(&self) -> Option<usize> {
        match self {
            Tree::Leaf(i) => Some(*i),
            Tree::Node(node) => node.children.iter().filter_map(Tree::max_leaf).max(),
        }
    }

    /// Visits leaves in left-to-right preorder.
    pub fn for_each_leaf(&self, f: &mut impl FnMut(usize)) {
        match self {
            Tree::Leaf(i) => f(*i),
            Tree::Node(node) => node.children.iter().for_each(|c| c.for_each_leaf(f)),
        }
    }

    /// Replaces every leaf `i` by `args[i]`. Leaves outside `args` are kept.
    pub fn substitute(&self, args: &[Tree]) -> Tree {
        match self {
            Tree::Leaf(i) => args.get(*i).cloned().unwrap_or(Tree::Leaf(*i)),
            Tree::Node(node) => Tree::node_unchecked(
                node.op.clone(),
                node.children.iter().map(|c| c.substitute(args)).collect(),
            ),
        }
    }

    /// Renames leaves through `f`.
    pub fn map_leaves(&self, f: &mut impl FnMut(usize) -> Tree) -> Tree {
        match self {
            Tree::Leaf(i) => f(*i),
            Tree::Node(node) => Tree::node_unchecked(
                node.op.clone(),
                node.children.iter().map(|c| c.map_leaves(f)).collect(),
            ),
        }
    }
}

impl PartialEq for Tree {
    fn eq(&self, other: &Tree) -> bool {
        match (self, other) {
            (Tree::Leaf(a), Tree::Leaf(b)) => a == b,
            (Tree::Node(a), Tree::Node(b)) => {
                Arc::ptr_eq(a, b)
                    || (a.op == b.op && a.children.iter().zip(&b.children).all(|(x, y)| x == y))
            }
            _ => false,
        }
    }
}

impl Hash for Tree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Tree::Leaf(i) => {
                0u8.hash(state);
                i.hash(state);
            }
            Tree::Node(node) => {
                1u8.hash(state);
                node.hash(state);
            }
        }
    }
}

/// Structural equality of trees.
pub fn tree_equal(a: &Tree, b: &Tree) -> bool {
    a == b
}

/// Leaves print as `x<i>`, nodes as `name(child,...)`, constants as `name()`.
impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Leaf(i) => write!(f, "x{i}"),
            Tree::Node(node) => {
                write!(f, "{}(", node.op.name)?;
                for (k, child) in node.children.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{child}")?;
                }
                f.write_str(")")
            }
        }
    }
}

pub fn render_tree(t: &Tree) -> String {
    t.to_string()
}

/// Renders a tuple of trees as `(t0, t1, ...)`.
pub fn render_tuple(ts: &[Tree]) -> String {
    let parts: Vec<String> = ts.iter().map(Tree::to_string).collect();
    format!("({})", parts.join(", "))
}

/// Source of fresh leaves. Confined to a single checking run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreshCounter {
    next: usize,
}

impl FreshCounter {
    pub fn new(start: usize) -> Self {
        FreshCounter { next: start }
    }

    pub fn fresh(&mut self) -> Tree {
        let id = self.next;
        self.next += 1;
        Tree::Leaf(id)
    }

    pub fn peek(&self) -> usize {
        self.next
    }
}

/// An arrow `m -> n` of the syntax category.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SyntaxMap {
    context: usize,
    outputs: Vec<Tree>,
}

impl SyntaxMap {
    pub fn new(context: usize, outputs: Vec<Tree>) -> Result<Self, SyntaxError> {
        for t in &outputs {
            if let Some(leaf) = t.max_leaf().filter(|&l| l >= context) {
                return Err(SyntaxError::LeafOutOfRange { leaf, context });
            }
        }
        Ok(SyntaxMap { context, outputs })
    }

    pub fn identity(n: usize) -> Self {
        SyntaxMap {
            context: n,
            outputs: Tree::leaves(n),
        }
    }

    /// Number of metavariables `m`.
    pub fn context(&self) -> usize {
        self.context
    }

    /// Number of output trees `n`.
    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn outputs(&self) -> &[Tree] {
        &self.outputs
    }

    /// How many times each metavariable occurs, indexed by metavariable.
    pub fn occurrences(&self) -> Vec<usize> {
        let mut counts = vec![0; self.context];
        for t in &self.outputs {
            t.for_each_leaf(&mut |i| counts[i] += 1);
        }
        counts
    }

    /// `self ; then`: substitutes our outputs for the metavariables of `then`.
    pub fn compose(&self, then: &SyntaxMap) -> Result<SyntaxMap, SyntaxError> {
        if self.len() != then.context {
            return Err(SyntaxError::ArityMismatch {
                expected: then.context,
                found: self.len(),
            });
        }
        Ok(SyntaxMap {
            context: self.context,
            outputs: then
                .outputs
                .iter()
                .map(|t| t.substitute(&self.outputs))
                .collect(),
        })
    }

    /// Monoidal product; `other`'s metavariables are shifted past ours.
    pub fn tensor(&self, other: &SyntaxMap) -> SyntaxMap {
        let shift = self.context;
        let shifted = other
            .outputs
            .iter()
            .map(|t| t.map_leaves(&mut |i| Tree::Leaf(i + shift)));
        SyntaxMap {
            context: self.context + other.context,
            outputs: self.outputs.iter().cloned().chain(shifted).collect(),
        }
    }

    pub fn instantiate(&self, args: &[Tree]) -> Result<Vec<Tree>, SyntaxError> {
        if args.len() != self.context {
            return Err(SyntaxError::ArityMismatch {
                expected: self.context,
                found: args.len(),
            });
        }
        Ok(self.outputs.iter().map(|t| t.substitute(args)).collect())
    }

    /// Recovers metavariable bindings from `subjects`, or `None` when some
    /// pattern does not match. Metavariables that do not occur in the map are
    /// bound to fresh leaves, allocated in increasing index order.
    pub fn match_against(
        &self,
        subjects: &[Tree],
        fresh: &mut FreshCounter,
    ) -> Result<Option<Vec<Tree>>, SyntaxError> {
        if subjects.len() != self.len() {
            return Err(SyntaxError::ArityMismatch {
                expected: self.len(),
                found: subjects.len(),
            });
        }
        let mut bindings = vec![None; self.context];
        for (pattern, subject) in self.outputs.iter().zip(subjects) {
            if !match_tree(pattern, subject, &mut bindings) {
                return Ok(None);
            }
        }
        Ok(Some(
            bindings
                .into_iter()
                .map(|b| b.unwrap_or_else(|| fresh.fresh()))
                .collect(),
        ))
    }
}

fn match_tree(pattern: &Tree, subject: &Tree, bindings: &mut [Option<Tree>]) -> bool {
    match pattern {
        Tree::Leaf(i) => match &bindings[*i] {
            Some(bound) => bound == subject,
            None => {
                bindings[*i] = Some(subject.clone());
                true
            }
        },
        Tree::Node(p) => match subject {
            Tree::Node(s) if s.op == p.op => p
                .children
                .iter()
                .zip(&s.children)
                .all(|(pc, sc)| match_tree(pc, sc, bindings)),
            _ => false,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fol() -> Signature {
        Signature::declare([("wff", 1), ("proves", 1), ("not", 1), ("imp", 2)]).unwrap()
    }

    fn ap(sig: &Signature, name: &str, children: Vec<Tree>) -> Tree {
        Tree::node(sig.get(name).unwrap(), children).unwrap()
    }

    fn x(i: usize) -> Tree {
        Tree::Leaf(i)
    }

    #[test]
    fn declare_signature() {
        let sig = fol();
        assert_eq!(sig.len(), 4);
        let names: Vec<_> = sig.iter().map(|o| o.name().to_string()).collect();
        assert_eq!(names, ["wff", "proves", "not", "imp"]);
        assert!(Signature::declare(Vec::<(&str, usize)>::new())
            .unwrap()
            .is_empty());
        let c = Signature::declare([("c", 0)]).unwrap();
        assert_eq!(c.get("c").unwrap().arity(), 0);
        assert_eq!(
            Signature::declare([("a", 1), ("a", 2)]),
            Err(SyntaxError::DuplicateSymbol("a".into()))
        );
    }

    #[test]
    fn identity_maps() {
        assert_eq!(SyntaxMap::identity(0).outputs(), &[] as &[Tree]);
        assert_eq!(SyntaxMap::identity(1).outputs(), &[x(0)]);
        assert_eq!(SyntaxMap::identity(3).outputs(), &[x(0), x(1), x(2)]);
    }

    #[test]
    fn compose_substitutes() {
        let sig = fol();
        let u = SyntaxMap::new(2, vec![ap(&sig, "imp", vec![x(0), x(1)])]).unwrap();
        let v = SyntaxMap::new(1, vec![ap(&sig, "not", vec![x(0)])]).unwrap();
        let uv = u.compose(&v).unwrap();
        assert_eq!(uv.context(), 2);
        assert_eq!(uv.outputs()[0].to_string(), "not(imp(x0,x1))");

        assert_eq!(SyntaxMap::identity(2).compose(&u).unwrap(), u);

        let copy = SyntaxMap::new(1, vec![x(0), x(0)]).unwrap();
        let imp = SyntaxMap::new(2, vec![ap(&sig, "imp", vec![x(0), x(1)])]).unwrap();
        assert_eq!(
            copy.compose(&imp).unwrap().outputs()[0].to_string(),
            "imp(x0,x0)"
        );

        assert_eq!(
            v.compose(&u),
            Err(SyntaxError::ArityMismatch {
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn tensor_shifts() {
        let sig = fol();
        assert_eq!(
            SyntaxMap::identity(1).tensor(&SyntaxMap::identity(1)),
            SyntaxMap::identity(2)
        );
        let w = SyntaxMap::new(1, vec![ap(&sig, "wff", vec![x(0)])]).unwrap();
        let ww = w.tensor(&w);
        assert_eq!(render_tuple(ww.outputs()), "(wff(x0), wff(x1))");
        assert_eq!(w.tensor(&SyntaxMap::identity(0)), w);
    }

    #[test]
    fn instantiate_builds() {
        let sig = fol();
        let p = ap(&sig, "not", vec![x(5)]);
        let ax1 = SyntaxMap::new(
            2,
            vec![ap(
                &sig,
                "proves",
                vec![ap(
                    &sig,
                    "imp",
                    vec![x(0), ap(&sig, "imp", vec![x(1), x(0)])],
                )],
            )],
        )
        .unwrap();
        let out = ax1.instantiate(&[p.clone(), p.clone()]).unwrap();
        assert_eq!(
            out[0].to_string(),
            "proves(imp(not(x5),imp(not(x5),not(x5))))"
        );
        assert_eq!(
            SyntaxMap::identity(2)
                .instantiate(&[p.clone(), x(1)])
                .unwrap(),
            vec![p.clone(), x(1)]
        );
        let copy = SyntaxMap::new(1, vec![x(0), x(0)]).unwrap();
        assert_eq!(
            copy.instantiate(std::slice::from_ref(&p)).unwrap(),
            vec![p.clone(), p]
        );
        assert!(matches!(
            copy.instantiate(&[]),
            Err(SyntaxError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn match_modus_ponens_source() {
        let sig = fol();
        let src = SyntaxMap::new(
            2,
            vec![
                ap(&sig, "proves", vec![x(0)]),
                ap(&sig, "proves", vec![ap(&sig, "imp", vec![x(0), x(1)])]),
            ],
        )
        .unwrap();
        let t = ap(&sig, "not", vec![x(3)]);
        let s = ap(&sig, "imp", vec![x(4), x(4)]);
        let subjects = vec![
            ap(&sig, "proves", vec![t.clone()]),
            ap(
                &sig,
                "proves",
                vec![ap(&sig, "imp", vec![t.clone(), s.clone()])],
            ),
        ];
        let mut fresh = FreshCounter::new(10);
        assert_eq!(
            src.match_against(&subjects, &mut fresh).unwrap(),
            Some(vec![t.clone(), s])
        );
        assert_eq!(fresh.peek(), 10);

        let bad = vec![
            ap(&sig, "proves", vec![t.clone()]),
            ap(&sig, "proves", vec![ap(&sig, "not", vec![t])]),
        ];
        assert_eq!(src.match_against(&bad, &mut fresh).unwrap(), None);
        assert!(src.match_against(&bad[..1], &mut fresh).is_err());
    }

    #[test]
    fn match_allocates_fresh_for_discarded() {
        let sig = fol();
        // (x, p) |-> proves(p)
        let src = SyntaxMap::new(2, vec![ap(&sig, "proves", vec![x(1)])]).unwrap();
        let t = ap(&sig, "not", vec![x(0)]);
        let mut fresh = FreshCounter::new(2);
        let got = src
            .match_against(&[ap(&sig, "proves", vec![t.clone()])], &mut fresh)
            .unwrap();
        assert_eq!(got, Some(vec![x(2), t]));
        assert_eq!(fresh.peek(), 3);
    }

    #[test]
    fn empty_map_matches_vacuously() {
        let map = SyntaxMap::new(3, vec![]).unwrap();
        let mut fresh = FreshCounter::new(7);
        assert_eq!(
            map.match_against(&[], &mut fresh).unwrap(),
            Some(vec![x(7), x(8), x(9)])
        );
    }

    #[test]
    fn equality_and_rendering() {
        let sig = fol();
        assert!(tree_equal(&x(0), &x(0)));
        let a = ap(&sig, "imp", vec![x(0), x(1)]);
        assert!(tree_equal(&a, &ap(&sig, "imp", vec![x(0), x(1)])));
        assert!(!tree_equal(&ap(&sig, "imp", vec![x(0), x(0)]), &a));
        assert_eq!(render_tree(&x(0)), "x0");
        assert_eq!(render_tree(&a), "imp(x0,x1)");
        let c = Signature::declare([("c", 0)]).unwrap();
        assert_eq!(
            render_tree(&Tree::node(c.get("c").unwrap(), vec![]).unwrap()),
            "c()"
        );
        assert!(Tree::node(sig.get("imp").unwrap(), vec![x(0)]).is_err());
    }

    #[test]
    fn new_rejects_out_of_range_leaves() {
        assert_eq!(
            SyntaxMap::new(1, vec![x(1)]),
            Err(SyntaxError::LeafOutOfRange {
                leaf: 1,
                context: 1
            })
        );
    }
}
