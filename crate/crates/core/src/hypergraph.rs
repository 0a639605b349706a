//! Open hypergraphs over spider, constructor and matcher operations.
//!
//! Every wire has exactly one producer (an edge output or an input boundary
//! position) and exactly one consumer (an edge input or an output boundary
//! position), and the edge dependency relation is acyclic. The public
//! constructors preserve this; [`OpenHypergraph::from_parts`] checks it.
//!
//! Evaluation interprets the graph as a partial function on tuples of trees
//! by visiting edges in topological order.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::syntax::{FreshCounter, OpSymbol, SyntaxMap, Tree};

pub type WireId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EdgeLabel {
    /// Frobenius spider `inputs -> outputs`: equality check then copy.
    Spider { inputs: usize, outputs: usize },
    /// Builds a node: `op.arity() -> 1`.
    Ctor(OpSymbol),
    /// Takes a node apart: `1 -> op.arity()`.
    Match(OpSymbol),
}

impl EdgeLabel {
    pub fn arity(&self) -> (usize, usize) {
        match self {
            EdgeLabel::Spider { inputs, outputs } => (*inputs, *outputs),
            EdgeLabel::Ctor(op) => (op.arity(), 1),
            EdgeLabel::Match(op) => (1, op.arity()),
        }
    }
}

/// `g+`, `g-` or `spider m,n`.
impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeLabel::Spider { inputs, outputs } => write!(f, "spider {inputs},{outputs}"),
            EdgeLabel::Ctor(op) => write!(f, "{}+", op.name()),
            EdgeLabel::Match(op) => write!(f, "{}-", op.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub label: EdgeLabel,
    pub inputs: Vec<WireId>,
    pub outputs: Vec<WireId>,
    /// Index into [`OpenHypergraph::instances`]: which generator application
    /// this edge was compiled from, if any.
    pub instance: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IrError {
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("edge {edge} has the wrong number of ports for `{label}`")]
    BadPorts { edge: usize, label: String },
    #[error("wire {0} out of range")]
    WireOutOfRange(WireId),
    #[error("wire {wire} has {producers} producers and {consumers} consumers")]
    NotMonogamous {
        wire: WireId,
        producers: usize,
        consumers: usize,
    },
    #[error("edge instance {0} out of range")]
    InstanceOutOfRange(usize),
    #[error("graph contains a cycle")]
    CyclicGraph,
}

/// Where evaluation became undefined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalFailure {
    MatchFailure {
        edge: usize,
        expected: Arc<str>,
        actual: Tree,
    },
    EqualityFailure {
        edge: usize,
        left: Tree,
        right: Tree,
    },
}

impl EvalFailure {
    pub fn edge(&self) -> usize {
        match self {
            EvalFailure::MatchFailure { edge, .. } | EvalFailure::EqualityFailure { edge, .. } => {
                *edge
            }
        }
    }
}

impl fmt::Display for EvalFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalFailure::MatchFailure {
                edge,
                expected,
                actual,
            } => {
                write!(
                    f,
                    "match failure at edge {edge}: expected `{expected}`, got {actual}"
                )
            }
            EvalFailure::EqualityFailure { edge, left, right } => {
                write!(f, "equality failure at edge {edge}: {left} != {right}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("{0}")]
    Undefined(EvalFailure),
    #[error("expected {expected} inputs, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("graph contains a cycle")]
    CyclicGraph,
}

/// Wire values after a (possibly failed) evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    /// Value of every wire that was computed before evaluation stopped.
    pub values: Vec<Option<Tree>>,
    /// Edges in the order they were executed.
    pub order: Vec<usize>,
    pub result: Result<Vec<Tree>, EvalFailure>,
}

#[derive(Debug, Clone, Default)]
pub struct OpenHypergraph {
    wire_count: usize,
    edges: Vec<Edge>,
    sources: Vec<WireId>,
    targets: Vec<WireId>,
    instances: Vec<Arc<str>>,
    schedule: OnceLock<Result<Vec<usize>, IrError>>,
}

impl PartialEq for OpenHypergraph {
    fn eq(&self, other: &Self) -> bool {
        self.wire_count == other.wire_count
            && self.edges == other.edges
            && self.sources == other.sources
            && self.targets == other.targets
            && self.instances == other.instances
    }
}

impl Eq for OpenHypergraph {}

impl OpenHypergraph {
    /// Builds a graph from raw parts, checking every structural invariant.
    pub fn from_parts(
        wire_count: usize,
        edges: Vec<Edge>,
        sources: Vec<WireId>,
        targets: Vec<WireId>,
        instances: Vec<Arc<str>>,
    ) -> Result<Self, IrError> {
        let graph = OpenHypergraph::raw(wire_count, edges, sources, targets, instances);
        graph.validate()?;
        Ok(graph)
    }

    fn raw(
        wire_count: usize,
        edges: Vec<Edge>,
        sources: Vec<WireId>,
        targets: Vec<WireId>,
        instances: Vec<Arc<str>>,
    ) -> Self {
        OpenHypergraph {
            wire_count,
            edges,
            sources,
            targets,
            instances,
            schedule: OnceLock::new(),
        }
    }

    pub fn wire_count(&self) -> usize {
        self.wire_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn sources(&self) -> &[WireId] {
        &self.sources
    }

    pub fn targets(&self) -> &[WireId] {
        &self.targets
    }

    pub fn instances(&self) -> &[Arc<str>] {
        &self.instances
    }

    /// `(inputs, outputs)` boundary sizes.
    pub fn arity(&self) -> (usize, usize) {
        (self.sources.len(), self.targets.len())
    }

    pub fn identity(n: usize) -> Self {
        OpenHypergraph::raw(n, vec![], (0..n).collect(), (0..n).collect(), vec![])
    }

    /// `(a + b) -> (b + a)`: the first `a` inputs move after the last `b`.
    pub fn symmetry(a: usize, b: usize) -> Self {
        let targets = (a..a + b).chain(0..a).collect();
        OpenHypergraph::raw(a + b, vec![], (0..a + b).collect(), targets, vec![])
    }

    pub fn spider(inputs: usize, outputs: usize) -> Self {
        let edge = Edge {
            label: EdgeLabel::Spider { inputs, outputs },
            inputs: (0..inputs).collect(),
            outputs: (inputs..inputs + outputs).collect(),
            instance: None,
        };
        OpenHypergraph::raw(
            inputs + outputs,
            vec![edge],
            (0..inputs).collect(),
            (inputs..inputs + outputs).collect(),
            vec![],
        )
    }

    /// Tags every edge as belonging to a single generator application.
    pub fn with_instance(mut self, name: impl Into<Arc<str>>) -> Self {
        self.instances = vec![name.into()];
        for edge in &mut self.edges {
            edge.instance = Some(0);
        }
        self.schedule = OnceLock::new();
        self
    }

    /// Sequential composition: our outputs are glued to `next`'s inputs.
    pub fn then(&self, next: &OpenHypergraph) -> Result<OpenHypergraph, IrError> {
        if self.targets.len() != next.sources.len() {
            return Err(IrError::ArityMismatch {
                expected: next.sources.len(),
                found: self.targets.len(),
            });
        }
        // Wires of `next` either become our output wires (its inputs) or get
        // fresh ids after ours.
        let mut remap: Vec<Option<WireId>> = vec![None; next.wire_count];
        for (&theirs, &ours) in next.sources.iter().zip(&self.targets) {
            remap[theirs] = Some(ours);
        }
        let mut wire_count = self.wire_count;
        for slot in remap.iter_mut().filter(|s| s.is_none()) {
            *slot = Some(wire_count);
            wire_count += 1;
        }
        let map = |w: &WireId| remap[*w].expect("every wire remapped");
        let offset = self.instances.len();
        let edges = self
            .edges
            .iter()
            .cloned()
            .chain(next.edges.iter().map(|e| Edge {
                label: e.label.clone(),
                inputs: e.inputs.iter().map(map).collect(),
                outputs: e.outputs.iter().map(map).collect(),
                instance: e.instance.map(|i| i + offset),
            }))
            .collect();
        Ok(OpenHypergraph::raw(
            wire_count,
            edges,
            self.sources.clone(),
            next.targets.iter().map(map).collect(),
            self.instances
                .iter()
                .chain(&next.instances)
                .cloned()
                .collect(),
        ))
    }

    /// Monoidal product: disjoint union with boundaries concatenated.
    pub fn tensor(&self, other: &OpenHypergraph) -> OpenHypergraph {
        let shift = self.wire_count;
        let offset = self.instances.len();
        let edges = self
            .edges
            .iter()
            .cloned()
            .chain(other.edges.iter().map(|e| Edge {
                label: e.label.clone(),
                inputs: e.inputs.iter().map(|w| w + shift).collect(),
                outputs: e.outputs.iter().map(|w| w + shift).collect(),
                instance: e.instance.map(|i| i + offset),
            }))
            .collect();
        OpenHypergraph::raw(
            self.wire_count + other.wire_count,
            edges,
            self.sources
                .iter()
                .copied()
                .chain(other.sources.iter().map(|w| w + shift))
                .collect(),
            self.targets
                .iter()
                .copied()
                .chain(other.targets.iter().map(|w| w + shift))
                .collect(),
            self.instances
                .iter()
                .chain(&other.instances)
                .cloned()
                .collect(),
        )
    }

    /// The constructor reading `u+ : m -> n` of a syntax map.
    pub fn compile_plus(u: &SyntaxMap) -> OpenHypergraph {
        let mut b = Builder::default();
        let inputs: Vec<WireId> = (0..u.context()).map(|_| b.wire()).collect();
        // Each metavariable fans out through a spider, one copy per occurrence.
        let mut copies: Vec<std::vec::IntoIter<WireId>> = Vec::with_capacity(u.context());
        for (i, &uses) in u.occurrences().iter().enumerate() {
            let outs: Vec<WireId> = (0..uses).map(|_| b.wire()).collect();
            b.edge(
                EdgeLabel::Spider {
                    inputs: 1,
                    outputs: uses,
                },
                vec![inputs[i]],
                outs.clone(),
            );
            copies.push(outs.into_iter());
        }
        let targets = u
            .outputs()
            .iter()
            .map(|t| b.construct(t, &mut copies))
            .collect();
        b.finish(inputs, targets)
    }

    /// The matcher reading `u- : n -> m` of a syntax map.
    pub fn compile_minus(u: &SyntaxMap) -> OpenHypergraph {
        let mut b = Builder::default();
        let inputs: Vec<WireId> = (0..u.len()).map(|_| b.wire()).collect();
        let mut occurrences: Vec<Vec<WireId>> = vec![Vec::new(); u.context()];
        for (t, &w) in u.outputs().iter().zip(&inputs) {
            b.destruct(t, w, &mut occurrences);
        }
        // Occurrences of a metavariable are joined by an equality spider; an
        // unused one gets the fresh-leaf spider `0 -> 1`.
        let targets = occurrences
            .into_iter()
            .map(|occ| {
                let out = b.wire();
                b.edge(
                    EdgeLabel::Spider {
                        inputs: occ.len(),
                        outputs: 1,
                    },
                    occ,
                    vec![out],
                );
                out
            })
            .collect();
        b.finish(inputs, targets)
    }

    /// Checks monogamy, port counts, ranges and acyclicity.
    pub fn validate(&self) -> Result<(), IrError> {
        let mut producers = vec![0usize; self.wire_count];
        let mut consumers = vec![0usize; self.wire_count];
        let bump = |counts: &mut Vec<usize>, w: WireId| -> Result<(), IrError> {
            *counts.get_mut(w).ok_or(IrError::WireOutOfRange(w))? += 1;
            Ok(())
        };
        for &w in &self.sources {
            bump(&mut producers, w)?;
        }
        for &w in &self.targets {
            bump(&mut consumers, w)?;
        }
        for (k, edge) in self.edges.iter().enumerate() {
            if (edge.inputs.len(), edge.outputs.len()) != edge.label.arity() {
                return Err(IrError::BadPorts {
                    edge: k,
                    label: edge.label.to_string(),
                });
            }
            if let Some(i) = edge.instance.filter(|&i| i >= self.instances.len()) {
                return Err(IrError::InstanceOutOfRange(i));
            }
            for &w in &edge.inputs {
                bump(&mut consumers, w)?;
            }
            for &w in &edge.outputs {
                bump(&mut producers, w)?;
            }
        }
        for wire in 0..self.wire_count {
            if producers[wire] != 1 || consumers[wire] != 1 {
                return Err(IrError::NotMonogamous {
                    wire,
                    producers: producers[wire],
                    consumers: consumers[wire],
                });
            }
        }
        self.schedule().map(|_| ())
    }

    /// Deterministic topological order of the edges: Kahn's algorithm with
    /// ties broken by ascending edge index.
    pub fn schedule(&self) -> Result<&[usize], IrError> {
        self.schedule
            .get_or_init(|| self.compute_schedule())
            .as_deref()
            .map_err(Clone::clone)
    }

    fn compute_schedule(&self) -> Result<Vec<usize>, IrError> {
        let consumer = self.consumers();
        let producer_is_edge = self.producer_is_edge();
        let mut pending: Vec<usize> = self
            .edges
            .iter()
            .map(|e| e.inputs.iter().filter(|&&w| producer_is_edge[w]).count())
            .collect();
        let mut ready: BinaryHeap<Reverse<usize>> = (0..self.edges.len())
            .filter(|&k| pending[k] == 0)
            .map(Reverse)
            .collect();
        let mut order = Vec::with_capacity(self.edges.len());
        while let Some(Reverse(k)) = ready.pop() {
            order.push(k);
            for &w in &self.edges[k].outputs {
                if let Some(next) = consumer[w] {
                    pending[next] -= 1;
                    if pending[next] == 0 {
                        ready.push(Reverse(next));
                    }
                }
            }
        }
        if order.len() == self.edges.len() {
            Ok(order)
        } else {
            Err(IrError::CyclicGraph)
        }
    }

    fn consumers(&self) -> Vec<Option<usize>> {
        let mut consumer = vec![None; self.wire_count];
        for (k, edge) in self.edges.iter().enumerate() {
            for &w in &edge.inputs {
                consumer[w] = Some(k);
            }
        }
        consumer
    }

    fn producer_is_edge(&self) -> Vec<bool> {
        let mut produced = vec![false; self.wire_count];
        for edge in &self.edges {
            for &w in &edge.outputs {
                produced[w] = true;
            }
        }
        produced
    }

    /// For each wire, the edge producing it (or `None` for boundary inputs).
    pub fn producers(&self) -> Vec<Option<(usize, usize)>> {
        let mut producer = vec![None; self.wire_count];
        for (k, edge) in self.edges.iter().enumerate() {
            for (port, &w) in edge.outputs.iter().enumerate() {
                producer[w] = Some((k, port));
            }
        }
        producer
    }

    /// Runs the graph on `inputs`.
    pub fn evaluate(
        &self,
        inputs: &[Tree],
        fresh: &mut FreshCounter,
    ) -> Result<Vec<Tree>, EvalError> {
        self.trace(inputs, fresh)?
            .result
            .map_err(EvalError::Undefined)
    }

    /// Like [`evaluate`](Self::evaluate), but keeps every wire value computed
    /// before the first failure.
    pub fn trace(&self, inputs: &[Tree], fresh: &mut FreshCounter) -> Result<Trace, EvalError> {
        if inputs.len() != self.sources.len() {
            return Err(EvalError::ArityMismatch {
                expected: self.sources.len(),
                found: inputs.len(),
            });
        }
        let schedule = self.schedule().map_err(|_| EvalError::CyclicGraph)?;
        let mut values: Vec<Option<Tree>> = vec![None; self.wire_count];
        for (&w, t) in self.sources.iter().zip(inputs) {
            values[w] = Some(t.clone());
        }
        let mut order = Vec::with_capacity(schedule.len());
        for &k in schedule {
            order.push(k);
            let edge = &self.edges[k];
            let args: Vec<Tree> = edge
                .inputs
                .iter()
                .map(|&w| values[w].clone().expect("scheduled edge has its inputs"))
                .collect();
            match fire(k, &edge.label, args, fresh) {
                Ok(outs) => {
                    for (&w, t) in edge.outputs.iter().zip(outs) {
                        values[w] = Some(t);
                    }
                }
                Err(failure) => {
                    return Ok(Trace {
                        values,
                        order,
                        result: Err(failure),
                    })
                }
            }
        }
        let result = self
            .targets
            .iter()
            .map(|&w| values[w].clone().expect("output wire computed"))
            .collect();
        Ok(Trace {
            values,
            order,
            result: Ok(result),
        })
    }
}

fn fire(
    edge: usize,
    label: &EdgeLabel,
    args: Vec<Tree>,
    fresh: &mut FreshCounter,
) -> Result<Vec<Tree>, EvalFailure> {
    match label {
        EdgeLabel::Spider { outputs, .. } => {
            let value = match args.split_first() {
                None => fresh.fresh(),
                Some((first, rest)) => {
                    if let Some(other) = rest.iter().find(|t| *t != first) {
                        return Err(EvalFailure::EqualityFailure {
                            edge,
                            left: first.clone(),
                            right: other.clone(),
                        });
                    }
                    first.clone()
                }
            };
            Ok(vec![value; *outputs])
        }
        EdgeLabel::Ctor(op) => Ok(vec![Tree::node_unchecked(op.clone(), args)]),
        EdgeLabel::Match(op) => {
            let subject = args.into_iter().next().expect("matcher has one input");
            match &subject {
                Tree::Node(node) if node.op == *op => Ok(node.children.clone()),
                _ => Err(EvalFailure::MatchFailure {
                    edge,
                    expected: op.name_arc().clone(),
                    actual: subject,
                }),
            }
        }
    }
}

/// Incremental construction for the two compilers. Not exposed: the
/// compilers are its only clients and always produce valid graphs.
#[derive(Default)]
struct Builder {
    wire_count: usize,
    edges: Vec<Edge>,
}

impl Builder {
    fn wire(&mut self) -> WireId {
        self.wire_count += 1;
        self.wire_count - 1
    }

    fn edge(&mut self, label: EdgeLabel, inputs: Vec<WireId>, outputs: Vec<WireId>) {
        self.edges.push(Edge {
            label,
            inputs,
            outputs,
            instance: None,
        });
    }

    fn construct(&mut self, t: &Tree, copies: &mut [std::vec::IntoIter<WireId>]) -> WireId {
        match t {
            Tree::Leaf(i) => copies[*i].next().expect("one copy per occurrence"),
            Tree::Node(node) => {
                let ins = node
                    .children
                    .iter()
                    .map(|c| self.construct(c, copies))
                    .collect();
                let out = self.wire();
                self.edge(EdgeLabel::Ctor(node.op.clone()), ins, vec![out]);
                out
            }
        }
    }

    fn destruct(&mut self, t: &Tree, wire: WireId, occurrences: &mut [Vec<WireId>]) {
        match t {
            Tree::Leaf(i) => occurrences[*i].push(wire),
            Tree::Node(node) => {
                let outs: Vec<WireId> = node.children.iter().map(|_| self.wire()).collect();
                self.edge(EdgeLabel::Match(node.op.clone()), vec![wire], outs.clone());
                for (child, w) in node.children.iter().zip(outs) {
                    self.destruct(child, w, occurrences);
                }
            }
        }
    }

    fn finish(self, sources: Vec<WireId>, targets: Vec<WireId>) -> OpenHypergraph {
        OpenHypergraph::raw(self.wire_count, self.edges, sources, targets, vec![])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Signature;

    fn sig() -> Signature {
        Signature::declare([
            ("wff", 1),
            ("proves", 1),
            ("not", 1),
            ("imp", 2),
            ("forall", 2),
        ])
        .unwrap()
    }

    fn ap(sig: &Signature, name: &str, children: Vec<Tree>) -> Tree {
        Tree::node(sig.get(name).unwrap(), children).unwrap()
    }

    fn x(i: usize) -> Tree {
        Tree::Leaf(i)
    }

    fn eval(h: &OpenHypergraph, inputs: &[Tree]) -> Result<Vec<Tree>, EvalError> {
        h.evaluate(inputs, &mut FreshCounter::new(100))
    }

    fn labels(h: &OpenHypergraph) -> Vec<String> {
        h.edges().iter().map(|e| e.label.to_string()).collect()
    }

    #[test]
    fn structural_generators() {
        let id = OpenHypergraph::identity(2);
        assert_eq!(id.arity(), (2, 2));
        assert!(id.edges().is_empty());
        assert_eq!(id.sources(), id.targets());
        id.validate().unwrap();

        let sym = OpenHypergraph::symmetry(1, 1);
        sym.validate().unwrap();
        assert_eq!(eval(&sym, &[x(0), x(1)]).unwrap(), vec![x(1), x(0)]);
        let sym = OpenHypergraph::symmetry(2, 1);
        assert_eq!(
            eval(&sym, &[x(0), x(1), x(2)]).unwrap(),
            vec![x(2), x(0), x(1)]
        );

        let eta = OpenHypergraph::spider(0, 1);
        eta.validate().unwrap();
        assert_eq!(eval(&eta, &[]).unwrap(), vec![x(100)]);
        assert_eq!(
            eval(&OpenHypergraph::spider(0, 2), &[]).unwrap(),
            vec![x(100), x(100)]
        );
    }

    #[test]
    fn spider_requires_equal_inputs() {
        let s = sig();
        let t = ap(&s, "not", vec![x(0)]);
        let mu = OpenHypergraph::spider(2, 1);
        assert_eq!(eval(&mu, &[t.clone(), t.clone()]).unwrap(), vec![t.clone()]);
        assert_eq!(
            eval(&mu, &[t.clone(), x(0)]),
            Err(EvalError::Undefined(EvalFailure::EqualityFailure {
                edge: 0,
                left: t.clone(),
                right: x(0)
            }))
        );
        // m > 0, n = 0: defined exactly when the inputs agree.
        let check = OpenHypergraph::spider(2, 0);
        assert_eq!(eval(&check, &[x(1), x(1)]).unwrap(), vec![]);
        assert!(eval(&check, &[x(1), x(2)]).is_err());
    }

    #[test]
    fn sequential_composition() {
        let s = sig();
        let imp = SyntaxMap::new(2, vec![ap(&s, "imp", vec![x(0), x(1)])]).unwrap();
        let ctor = OpenHypergraph::compile_plus(&imp);
        let h = OpenHypergraph::identity(2).then(&ctor).unwrap();
        h.validate().unwrap();
        let args = [ap(&s, "not", vec![x(3)]), x(4)];
        assert_eq!(eval(&h, &args).unwrap(), eval(&ctor, &args).unwrap());

        // constructor then matcher is the identity on pairs
        let round = ctor.then(&OpenHypergraph::compile_minus(&imp)).unwrap();
        round.validate().unwrap();
        assert_eq!(eval(&round, &args).unwrap(), args.to_vec());

        assert_eq!(
            ctor.then(&OpenHypergraph::identity(2)),
            Err(IrError::ArityMismatch {
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn parallel_composition() {
        let s = sig();
        let id2 = OpenHypergraph::identity(1).tensor(&OpenHypergraph::identity(1));
        assert_eq!(eval(&id2, &[x(0), x(1)]).unwrap(), vec![x(0), x(1)]);
        assert_eq!(id2.arity(), (2, 2));

        let wff = OpenHypergraph::compile_plus(
            &SyntaxMap::new(1, vec![ap(&s, "wff", vec![x(0)])]).unwrap(),
        );
        let both = wff.tensor(&wff);
        both.validate().unwrap();
        assert_eq!(both.arity(), (2, 2));
        assert_eq!(
            eval(&both, &[x(0), x(1)]).unwrap(),
            vec![ap(&s, "wff", vec![x(0)]), ap(&s, "wff", vec![x(1)])]
        );
        let with_unit = wff.tensor(&OpenHypergraph::default());
        assert_eq!(
            eval(&with_unit, &[x(3)]).unwrap(),
            eval(&wff, &[x(3)]).unwrap()
        );
    }

    #[test]
    fn compile_plus_shapes() {
        let s = sig();
        let id = OpenHypergraph::compile_plus(&SyntaxMap::identity(1));
        assert_eq!(labels(&id), ["spider 1,1"]);
        assert_eq!(eval(&id, &[x(7)]).unwrap(), vec![x(7)]);

        let copy = OpenHypergraph::compile_plus(
            &SyntaxMap::new(1, vec![ap(&s, "imp", vec![x(0), x(0)])]).unwrap(),
        );
        assert_eq!(labels(&copy), ["spider 1,2", "imp+"]);

        let discard = OpenHypergraph::compile_plus(
            &SyntaxMap::new(2, vec![ap(&s, "proves", vec![x(1)])]).unwrap(),
        );
        assert_eq!(labels(&discard), ["spider 1,0", "spider 1,1", "proves+"]);
        discard.validate().unwrap();
    }

    #[test]
    fn compile_minus_shapes() {
        let s = sig();
        let id = OpenHypergraph::compile_minus(&SyntaxMap::identity(1));
        assert_eq!(eval(&id, &[x(7)]).unwrap(), vec![x(7)]);

        let mp_src = SyntaxMap::new(
            2,
            vec![
                ap(&s, "proves", vec![x(0)]),
                ap(&s, "proves", vec![ap(&s, "imp", vec![x(0), x(1)])]),
            ],
        )
        .unwrap();
        let h = OpenHypergraph::compile_minus(&mp_src);
        h.validate().unwrap();
        assert_eq!(
            labels(&h),
            ["proves-", "proves-", "imp-", "spider 2,1", "spider 1,1"]
        );
        assert_eq!(h.arity(), (2, 2));

        let discard = OpenHypergraph::compile_minus(
            &SyntaxMap::new(2, vec![ap(&s, "proves", vec![x(1)])]).unwrap(),
        );
        assert!(labels(&discard).contains(&"spider 0,1".to_string()));
        let out = eval(&discard, &[ap(&s, "proves", vec![x(1)])]).unwrap();
        assert_eq!(out, vec![x(100), x(1)]);
    }

    #[test]
    fn modus_ponens_span() {
        let s = sig();
        let src = SyntaxMap::new(
            2,
            vec![
                ap(&s, "proves", vec![x(0)]),
                ap(&s, "proves", vec![ap(&s, "imp", vec![x(0), x(1)])]),
            ],
        )
        .unwrap();
        let tgt = SyntaxMap::new(2, vec![ap(&s, "proves", vec![x(1)])]).unwrap();
        let h = OpenHypergraph::compile_minus(&src)
            .then(&OpenHypergraph::compile_plus(&tgt))
            .unwrap();
        let t = ap(&s, "not", vec![x(0)]);
        let u = ap(&s, "wff", vec![x(1)]);
        let out = eval(
            &h,
            &[
                ap(&s, "proves", vec![t.clone()]),
                ap(
                    &s,
                    "proves",
                    vec![ap(&s, "imp", vec![t.clone(), u.clone()])],
                ),
            ],
        );
        assert_eq!(out.unwrap(), vec![ap(&s, "proves", vec![u.clone()])]);

        let wrong = eval(
            &h,
            &[
                ap(&s, "proves", vec![t.clone()]),
                ap(&s, "proves", vec![t.clone()]),
            ],
        );
        assert_eq!(
            wrong,
            Err(EvalError::Undefined(EvalFailure::MatchFailure {
                edge: 2,
                expected: "imp".into(),
                actual: t
            }))
        );
    }

    #[test]
    fn evaluation_errors() {
        let h = OpenHypergraph::identity(2);
        assert_eq!(
            eval(&h, &[x(0)]),
            Err(EvalError::ArityMismatch {
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn from_parts_rejects_bad_graphs() {
        let spider = |i: Vec<WireId>, o: Vec<WireId>| Edge {
            label: EdgeLabel::Spider {
                inputs: i.len(),
                outputs: o.len(),
            },
            inputs: i,
            outputs: o,
            instance: None,
        };
        // a two-edge cycle
        let cyclic = OpenHypergraph::from_parts(
            2,
            vec![spider(vec![0], vec![1]), spider(vec![1], vec![0])],
            vec![],
            vec![],
            vec![],
        );
        assert_eq!(cyclic, Err(IrError::CyclicGraph));
        // wire used twice
        let shared = OpenHypergraph::from_parts(1, vec![], vec![0], vec![0, 0], vec![]);
        assert!(matches!(
            shared,
            Err(IrError::NotMonogamous { wire: 0, .. })
        ));
        let out_of_range = OpenHypergraph::from_parts(1, vec![], vec![0], vec![1], vec![]);
        assert_eq!(out_of_range, Err(IrError::WireOutOfRange(1)));
        let ok =
            OpenHypergraph::from_parts(2, vec![spider(vec![0], vec![1])], vec![0], vec![1], vec![])
                .unwrap();
        assert_eq!(ok.arity(), (1, 1));
    }

    #[test]
    fn schedule_prefers_lower_indices() {
        let a = OpenHypergraph::spider(0, 1).tensor(&OpenHypergraph::spider(0, 1));
        assert_eq!(a.schedule().unwrap(), &[0, 1]);
        assert_eq!(eval(&a, &[]).unwrap(), vec![x(100), x(101)]);
    }
}
