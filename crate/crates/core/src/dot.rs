//! Graphviz export of compiled theorems.
//!
//! At IR level every edge is a box labeled `g+`, `g-` or `spider m,n`; every
//! wire is a point; arcs carry the port index on the box side; the boundary
//! appears as `in<i>` and `out<j>` nodes. At proof level the edges compiled
//! from one generator application collapse into a single box named after
//! the generator. With values, each wire carries the tree computed for it
//! when checking the theorem, and a failing edge is highlighted.
//!
//! Output depends only on the graph and the values, so it is byte-for-byte
//! reproducible.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::hypergraph::{EvalError, OpenHypergraph, Trace};
use crate::proof::{theorem_graph, Env, ProofError, TheoremStmt};
use crate::syntax::{FreshCounter, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Level {
    #[default]
    Ir,
    Proof,
}

impl std::str::FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ir" => Ok(Level::Ir),
            "proof" => Ok(Level::Proof),
            other => Err(format!(
                "unknown level `{other}` (expected `ir` or `proof`)"
            )),
        }
    }
}

/// The DOT text for `thm` checked in `env`.
pub fn theorem_dot(
    thm: &TheoremStmt,
    env: &Env,
    level: Level,
    values: bool,
) -> Result<String, ProofError> {
    let graph = theorem_graph(thm, env)?;
    let trace = if values {
        let m = thm.metavariables();
        match graph.trace(&Tree::leaves(m), &mut FreshCounter::new(m)) {
            Ok(trace) => Some(trace),
            Err(EvalError::ArityMismatch { expected, found }) => {
                return Err(ProofError::ArityMismatch {
                    context: "theorem inputs".into(),
                    expected,
                    found,
                })
            }
            Err(EvalError::CyclicGraph) | Err(EvalError::Undefined(_)) => None,
        }
    } else {
        None
    };
    Ok(render(&graph, &thm.name, level, trace.as_ref()))
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out
}

/// A box in the drawing: one IR edge, or one generator application.
struct Block {
    label: String,
    edges: Vec<usize>,
}

pub fn render(graph: &OpenHypergraph, name: &str, level: Level, trace: Option<&Trace>) -> String {
    let value = |w: usize| trace.and_then(|t| t.values.get(w).cloned().flatten());
    let failed = trace.and_then(|t| t.result.as_ref().err());

    // Blocks in order of their first edge.
    let mut blocks: Vec<Block> = Vec::new();
    let mut block_of_edge = vec![0usize; graph.edges().len()];
    let mut block_of_instance: BTreeMap<usize, usize> = BTreeMap::new();
    for (k, edge) in graph.edges().iter().enumerate() {
        let grouped = match (level, edge.instance) {
            (Level::Proof, Some(i)) => Some(i),
            _ => None,
        };
        let b = match grouped.and_then(|i| block_of_instance.get(&i).copied()) {
            Some(b) => b,
            None => {
                let label = match grouped {
                    Some(i) => graph.instances()[i].to_string(),
                    None => edge.label.to_string(),
                };
                blocks.push(Block {
                    label,
                    edges: Vec::new(),
                });
                if let Some(i) = grouped {
                    block_of_instance.insert(i, blocks.len() - 1);
                }
                blocks.len() - 1
            }
        };
        blocks[b].edges.push(k);
        block_of_edge[k] = b;
    }

    // Where each wire comes from and goes to, as (block, port).
    #[derive(Clone, Copy, PartialEq, Eq)]
    enum End {
        Boundary(usize),
        Block(usize, usize),
    }
    let mut producer = vec![None; graph.wire_count()];
    let mut consumer = vec![None; graph.wire_count()];
    for (i, &w) in graph.sources().iter().enumerate() {
        producer[w] = Some(End::Boundary(i));
    }
    for (j, &w) in graph.targets().iter().enumerate() {
        consumer[w] = Some(End::Boundary(j));
    }
    let mut in_ports = vec![0usize; blocks.len()];
    let mut out_ports = vec![0usize; blocks.len()];
    // Block ports are numbered in edge order, skipping wires internal to
    // the block.
    for (k, edge) in graph.edges().iter().enumerate() {
        let b = block_of_edge[k];
        for &w in &edge.outputs {
            producer[w] = Some(End::Block(b, usize::MAX));
        }
        for &w in &edge.inputs {
            consumer[w] = Some(End::Block(b, usize::MAX));
        }
    }
    let hidden: Vec<bool> = (0..graph.wire_count())
        .map(|w| {
            level == Level::Proof
                && matches!((producer[w], consumer[w]), (Some(End::Block(a, _)), Some(End::Block(b, _))) if a == b)
        })
        .collect();
    let internal = |w: usize| hidden[w];
    for (k, edge) in graph.edges().iter().enumerate() {
        let b = block_of_edge[k];
        for &w in &edge.inputs {
            if !internal(w) {
                consumer[w] = Some(End::Block(b, in_ports[b]));
                in_ports[b] += 1;
            }
        }
        for &w in &edge.outputs {
            if !internal(w) {
                producer[w] = Some(End::Block(b, out_ports[b]));
                out_ports[b] += 1;
            }
        }
    }

    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", escape(name));
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [fontname=\"monospace\"];\n");
    out.push_str("  edge [fontname=\"monospace\", fontsize=10, arrowsize=0.5];\n");

    for (i, &w) in graph.sources().iter().enumerate() {
        let label = match value(w) {
            Some(t) => format!("in{i} = {t}"),
            None => format!("in{i}"),
        };
        let _ = writeln!(
            out,
            "  in{i} [shape=plaintext, label=\"{}\"];",
            escape(&label)
        );
    }
    for (b, block) in blocks.iter().enumerate() {
        let failing = failed.filter(|f| block.edges.contains(&f.edge()));
        match failing {
            Some(f) => {
                let _ = writeln!(
                    out,
                    "  b{b} [shape=box, label=\"{}\", color=red, style=filled, fillcolor=\"#f4cccc\", tooltip=\"{}\"];",
                    escape(&block.label),
                    escape(&f.to_string())
                );
            }
            None => {
                let _ = writeln!(
                    out,
                    "  b{b} [shape=box, label=\"{}\"];",
                    escape(&block.label)
                );
            }
        }
    }
    for w in 0..graph.wire_count() {
        if internal(w) {
            continue;
        }
        match value(w) {
            Some(t) => {
                let _ = writeln!(
                    out,
                    "  w{w} [shape=point, xlabel=\"{}\"];",
                    escape(&t.to_string())
                );
            }
            None => {
                let _ = writeln!(out, "  w{w} [shape=point];");
            }
        }
    }
    for (j, &w) in graph.targets().iter().enumerate() {
        let label = match value(w) {
            Some(t) => format!("out{j} = {t}"),
            None => format!("out{j}"),
        };
        let _ = writeln!(
            out,
            "  out{j} [shape=plaintext, label=\"{}\"];",
            escape(&label)
        );
    }

    for w in 0..graph.wire_count() {
        if internal(w) {
            continue;
        }
        match producer[w] {
            Some(End::Boundary(i)) => {
                let _ = writeln!(out, "  in{i} -> w{w} [arrowhead=none];");
            }
            Some(End::Block(b, p)) => {
                let _ = writeln!(out, "  b{b} -> w{w} [arrowhead=none, taillabel=\"{p}\"];");
            }
            None => {}
        }
        match consumer[w] {
            Some(End::Boundary(j)) => {
                let _ = writeln!(out, "  w{w} -> out{j};");
            }
            Some(End::Block(b, p)) => {
                let _ = writeln!(out, "  w{w} -> b{b} [headlabel=\"{p}\"];");
            }
            None => {}
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::build_fol_env;
    use crate::proof::Derivation;
    use crate::syntax::SyntaxMap;

    fn registered() -> Env {
        let env = build_fol_env();
        let mut working = env.unregistered();
        for thm in &env.theorems {
            working.register_theorem(thm).unwrap();
        }
        working
    }

    #[test]
    fn identity_has_one_wire() {
        let env = build_fol_env();
        let thm = TheoremStmt {
            name: "trivial".into(),
            params: vec![],
            hyps: SyntaxMap::new(0, vec![]).unwrap(),
            concs: SyntaxMap::new(0, vec![]).unwrap(),
            body: Derivation::Id(0),
        };
        let text = theorem_dot(&thm, &env, Level::Ir, false).unwrap();
        assert!(!text.contains("b0"));
        let g = OpenHypergraph::identity(1);
        let text = render(&g, "id", Level::Ir, None);
        assert!(text.contains("in0 -> w0") && text.contains("w0 -> out0"));
        assert_eq!(text.matches("shape=point").count(), 1);
        assert_eq!(text.matches("shape=plaintext").count(), 2);
    }

    #[test]
    fn values_label_the_conclusion() {
        let env = registered();
        let thm = env.theorem("id").unwrap();
        let text = theorem_dot(thm, &env, Level::Ir, true).unwrap();
        assert!(
            text.contains("label=\"out0 = proves(imp(x0,x0))\""),
            "{text}"
        );
        assert!(text.contains("xlabel=\"proves(imp(x0,x0))\""));
        assert!(text.contains("label=\"ax-mp-\"") || text.contains("label=\"proves-\""));
        assert_eq!(text, theorem_dot(thm, &env, Level::Ir, true).unwrap());
    }

    #[test]
    fn proof_level_groups_generators() {
        let env = registered();
        let thm = env.theorem("wnwi").unwrap();
        let text = theorem_dot(thm, &env, Level::Proof, false).unwrap();
        for name in ["hyps", "wi", "wn"] {
            assert!(
                text.contains(&format!("label=\"{name}\"")),
                "{name}: {text}"
            );
        }
        assert!(!text.contains("wff+"));
    }

    #[test]
    fn failures_are_highlighted() {
        let env = registered();
        let mut thm = env.theorem("wnwi").unwrap().clone();
        thm.body = Derivation::seq(Derivation::gen("wi"), Derivation::gen("ax-gen"));
        thm.concs = SyntaxMap::new(2, vec![Tree::Leaf(0)]).unwrap();
        let text = theorem_dot(&thm, &env, Level::Ir, true).unwrap();
        assert_eq!(text.matches("color=red").count(), 1, "{text}");
        assert!(text.contains("label=\"proves-\", color=red"));
    }

    #[test]
    fn labels_are_escaped() {
        assert_eq!(escape("a\"b\\c"), "a\\\"b\\\\c");
    }
}
