//! A second, independent checker that evaluates derivations by structural
//! recursion (matching and instantiation, no hypergraph), and a randomized
//! differential harness comparing it with the hypergraph engine.
//!
//! # Random instances
//!
//! [`random_instance`] draws a theorem candidate as follows.
//!
//! * `m` metavariables, uniform in `1..=3`.
//! * `1..=3` hypotheses. Each is, with probability 3/4, some generator's
//!   source instantiated at random trees over the metavariables (so chains
//!   tend to be defined); otherwise a random tree.
//! * `size` layers (at least one). Each layer is one operation placed in a
//!   window of the current wires, padded with identities on both sides:
//!   - a generator applied where its source matches the current values, with
//!     probability 0.85 when such a window exists; otherwise any generator
//!     that fits,
//!   - `dup`, `drop` (only when more than one wire remains), or `sym a b`,
//!   - with probability 1/10 the padding keeps `id 0` units.
//!
//!   The layers are then composed with a random association.
//! * Conclusions: when the body is defined on the hypotheses, with
//!   probability 0.6 the actual result with its fresh leaves replaced by
//!   random trees (a valid candidate), with probability 0.2 that result with
//!   one subtree replaced, and otherwise random trees.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hypergraph::EvalError;
use crate::par::{self, Execution};
use crate::proof::{
    check_statement_shape, check_theorem, compile_derivation, derivation_arity, judge, CheckReport,
    CheckStatus, Derivation, Env, ProofError, ProofGenerator, Refutation, StatusKind, TheoremStmt,
};
use crate::syntax::{FreshCounter, OpSymbol, SyntaxMap, Tree};

/// Evaluates `d` on `inputs` directly. `Ok(None)` means undefined.
///
/// Registered theorems are applied through their span, exactly like rules.
pub fn eval_direct(
    d: &Derivation,
    inputs: &[Tree],
    env: &Env,
    fresh: &mut FreshCounter,
) -> Result<Option<Vec<Tree>>, ProofError> {
    let (a, _) = derivation_arity(d, env)?;
    if a != inputs.len() {
        return Err(ProofError::ArityMismatch {
            context: format!("inputs of `{d}`"),
            expected: a,
            found: inputs.len(),
        });
    }
    Ok(go(d, inputs.to_vec(), env, fresh))
}

/// Assumes `d` is well formed and `inputs` has its input arity.
fn go(
    d: &Derivation,
    mut inputs: Vec<Tree>,
    env: &Env,
    fresh: &mut FreshCounter,
) -> Option<Vec<Tree>> {
    match d {
        Derivation::Gen(name) => apply(env.generator(name).expect("arity checked"), &inputs, fresh),
        Derivation::Id(_) => Some(inputs),
        Derivation::Sym(a, _) => {
            inputs.rotate_left(*a);
            Some(inputs)
        }
        Derivation::Dup => Some(vec![inputs[0].clone(), inputs[0].clone()]),
        Derivation::Drop => Some(Vec::new()),
        Derivation::Seq(first, second) => {
            let mid = go(first, inputs, env, fresh)?;
            go(second, mid, env, fresh)
        }
        Derivation::Par(left, right) => {
            let (a, _) = derivation_arity(left, env).expect("arity checked");
            let rest = inputs.split_off(a);
            let mut out = go(left, inputs, env, fresh)?;
            out.extend(go(right, rest, env, fresh)?);
            Some(out)
        }
    }
}

fn apply(g: &ProofGenerator, inputs: &[Tree], fresh: &mut FreshCounter) -> Option<Vec<Tree>> {
    let bindings = g
        .src()
        .match_against(inputs, fresh)
        .expect("arity checked")?;
    Some(g.tgt().instantiate(&bindings).expect("context matches"))
}

/// Same criterion as [`check_theorem`], computed by [`eval_direct`].
pub fn check_direct(thm: &TheoremStmt, env: &Env) -> CheckReport {
    if let Err(e) = check_statement_shape(thm, env) {
        return CheckReport::static_error(e);
    }
    let m = thm.metavariables();
    let leaves = Tree::leaves(m);
    let inputs = thm.hyps.instantiate(&leaves).expect("context checked");
    let expected = thm.concs.instantiate(&leaves).expect("context checked");
    match eval_direct(&thm.body, &inputs, env, &mut FreshCounter::new(m)) {
        Ok(Some(actual)) => judge(actual, &expected, m),
        Ok(None) => CheckReport {
            status: CheckStatus::Invalid(Refutation::Undefined),
            conclusion: None,
        },
        Err(e) => CheckReport::static_error(e),
    }
}

/// Checks every theorem in file order with [`check_direct`], registering the
/// valid ones.
pub fn check_all_direct(env: &Env) -> Vec<(Arc<str>, CheckReport)> {
    let mut working = env.unregistered();
    env.theorems
        .iter()
        .map(|thm| {
            let report = check_direct(thm, &working);
            if report.status.is_valid() {
                if let Ok(g) = thm.as_generator() {
                    working.generators.insert(thm.name.clone(), g);
                }
            }
            (thm.name.clone(), report)
        })
        .collect()
}

/// A tuple of trees with fresh leaves renumbered from `boundary_m` in order
/// of first occurrence, left to right, in preorder.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalOutputs {
    pub trees: Vec<Tree>,
    pub boundary_m: usize,
}

pub fn canonicalize(outputs: &[Tree], boundary_m: usize) -> CanonicalOutputs {
    let mut renaming: HashMap<usize, usize> = HashMap::new();
    let trees = outputs
        .iter()
        .map(|t| {
            t.map_leaves(&mut |i| {
                if i < boundary_m {
                    return Tree::Leaf(i);
                }
                let next = boundary_m + renaming.len();
                Tree::Leaf(*renaming.entry(i).or_insert(next))
            })
        })
        .collect();
    CanonicalOutputs { trees, boundary_m }
}

fn random_tree(rng: &mut impl Rng, ops: &[OpSymbol], m: usize, depth: usize) -> Tree {
    let leaf_ok = m > 0;
    if ops.is_empty() || (leaf_ok && (depth == 0 || rng.random_bool(0.35))) {
        return Tree::Leaf(rng.random_range(0..m.max(1)));
    }
    let candidates: Vec<&OpSymbol> = if depth == 0 {
        ops.iter().filter(|o| o.arity() == 0).collect()
    } else {
        ops.iter().collect()
    };
    let Some(op) = candidates.choose(rng) else {
        return Tree::Leaf(0);
    };
    let children = (0..op.arity())
        .map(|_| random_tree(rng, ops, m, depth.saturating_sub(1)))
        .collect();
    Tree::node(op, children).expect("arity respected")
}

fn random_trees(
    rng: &mut impl Rng,
    ops: &[OpSymbol],
    m: usize,
    n: usize,
    depth: usize,
) -> Vec<Tree> {
    (0..n).map(|_| random_tree(rng, ops, m, depth)).collect()
}

/// `id left * op * id right`, optionally keeping `id 0` units and with a
/// random association.
fn pad(rng: &mut impl Rng, left: usize, op: Derivation, right: usize) -> Derivation {
    let keep_units = rng.random_bool(0.1);
    let mut parts = Vec::new();
    if left > 0 || keep_units {
        parts.push(Derivation::Id(left));
    }
    parts.push(op);
    if right > 0 || keep_units {
        parts.push(Derivation::Id(right));
    }
    associate(rng, parts, Derivation::par)
}

/// Folds `parts` into a random binary tree, preserving order.
fn associate(
    rng: &mut impl Rng,
    mut parts: Vec<Derivation>,
    join: fn(Derivation, Derivation) -> Derivation,
) -> Derivation {
    while parts.len() > 1 {
        let k = rng.random_range(0..parts.len() - 1);
        let b = parts.remove(k + 1);
        let a = parts.remove(k);
        parts.insert(k, join(a, b));
    }
    parts.pop().expect("at least one part")
}

/// One layer over `n` wires; `values` are the current wire values if known.
fn random_layer(rng: &mut impl Rng, env: &Env, n: usize, values: Option<&[Tree]>) -> Derivation {
    let gens: Vec<&ProofGenerator> = env.generators.values().collect();
    let roll = rng.random_range(0..100);
    if roll < 70 {
        if let Some(values) = values {
            let mut matches = Vec::new();
            for g in &gens {
                let a = g.arity().0;
                for i in 0..=n.saturating_sub(a) {
                    if i + a <= n
                        && matches!(
                            g.src().match_against(
                                &values[i..i + a],
                                &mut FreshCounter::new(usize::MAX / 2)
                            ),
                            Ok(Some(_))
                        )
                    {
                        matches.push((g.name(), i, a));
                    }
                }
            }
            if !matches.is_empty() && rng.random_bool(0.85) {
                let &(name, i, a) = matches.choose(rng).expect("non-empty");
                return pad(rng, i, Derivation::gen(name), n - i - a);
            }
        }
        let fitting: Vec<&&ProofGenerator> = gens.iter().filter(|g| g.arity().0 <= n).collect();
        if let Some(g) = fitting.choose(rng) {
            let a = g.arity().0;
            let i = rng.random_range(0..=n - a);
            return pad(rng, i, Derivation::gen(g.name()), n - i - a);
        }
    }
    match rng.random_range(0..3) {
        0 if n >= 1 => {
            let i = rng.random_range(0..n);
            pad(rng, i, Derivation::Dup, n - i - 1)
        }
        1 if n >= 2 => {
            let i = rng.random_range(0..n);
            pad(rng, i, Derivation::Drop, n - i - 1)
        }
        _ if n >= 2 => {
            let a = rng.random_range(1..n);
            let b = rng.random_range(1..=n - a);
            let i = rng.random_range(0..=n - a - b);
            pad(rng, i, Derivation::Sym(a, b), n - i - a - b)
        }
        _ => pad(
            rng,
            0,
            if n == 0 {
                Derivation::Id(0)
            } else {
                Derivation::Dup
            },
            n.saturating_sub(1),
        ),
    }
}

/// Replaces one random subtree of one component.
fn mutate(rng: &mut impl Rng, ops: &[OpSymbol], m: usize, trees: &mut [Tree]) {
    if trees.is_empty() {
        return;
    }
    let k = rng.random_range(0..trees.len());
    let size = trees[k].size();
    let target = rng.random_range(0..size);
    let replacement = random_tree(rng, ops, m, 2);
    trees[k] = replace_nth(&trees[k], target, &replacement, &mut 0);
}

fn replace_nth(t: &Tree, target: usize, with: &Tree, seen: &mut usize) -> Tree {
    if *seen == target {
        *seen += t.size();
        return with.clone();
    }
    *seen += 1;
    match t {
        Tree::Leaf(_) => t.clone(),
        Tree::Node(node) => {
            let children = node
                .children
                .iter()
                .map(|c| replace_nth(c, target, with, seen))
                .collect();
            Tree::node(&node.op, children).expect("same op")
        }
    }
}

/// A reproducible random theorem candidate; see the module docs for the
/// distribution.
pub fn random_instance(env: &Env, seed: u64, size: usize) -> (Derivation, TheoremStmt) {
    random_instance_with(env, &mut ChaCha8Rng::seed_from_u64(seed), size)
}

/// Random hypotheses over `m` metavariables: mostly instances of generator
/// sources, so that generator chains tend to be defined.
pub fn random_hypotheses(rng: &mut impl Rng, env: &Env, m: usize, k: usize) -> Vec<Tree> {
    let ops: Vec<OpSymbol> = env.signature.iter().cloned().collect();
    let gens: Vec<&ProofGenerator> = env.generators.values().collect();
    let mut hyps = Vec::new();
    while hyps.len() < k {
        match gens.choose(rng) {
            Some(g) if rng.random_bool(0.75) => {
                let args = random_trees(rng, &ops, m, g.metavariables(), 2);
                hyps.extend(g.src().instantiate(&args).expect("context matches"));
            }
            _ => hyps.push(random_tree(rng, &ops, m, 3)),
        }
    }
    hyps.truncate(k);
    hyps
}

/// `layers` random layers starting from `n` wires, composed with a random
/// association. `values` are the wire values when known; the returned values
/// are the direct evaluation of the chain on them, using `fresh`.
pub fn random_chain(
    rng: &mut impl Rng,
    env: &Env,
    n: usize,
    values: Option<Vec<Tree>>,
    layers: usize,
    fresh: &mut FreshCounter,
) -> (Derivation, usize, Option<Vec<Tree>>) {
    let mut n = n;
    let mut values = values;
    let mut parts = Vec::new();
    for _ in 0..layers.max(1) {
        let layer = random_layer(rng, env, n, values.as_deref());
        n = derivation_arity(&layer, env)
            .expect("well formed by construction")
            .1;
        values = values.and_then(|vs| go(&layer, vs, env, fresh));
        parts.push(layer);
    }
    (associate(rng, parts, Derivation::seq), n, values)
}

pub fn random_instance_with(
    env: &Env,
    rng: &mut impl Rng,
    size: usize,
) -> (Derivation, TheoremStmt) {
    let ops: Vec<OpSymbol> = env.signature.iter().cloned().collect();
    let m = rng.random_range(1..=3);
    let k = rng.random_range(1..=3);
    let hyps = random_hypotheses(rng, env, m, k);
    let mut fresh = FreshCounter::new(m);
    let (body, n, values) =
        random_chain(rng, env, hyps.len(), Some(hyps.clone()), size, &mut fresh);

    let roll: f64 = rng.random();
    let concs = match values {
        Some(actual) if roll < 0.8 => {
            let mut bind: HashMap<usize, Tree> = HashMap::new();
            let mut concs: Vec<Tree> = actual
                .iter()
                .map(|t| {
                    t.map_leaves(&mut |i| {
                        if i < m {
                            Tree::Leaf(i)
                        } else {
                            bind.entry(i)
                                .or_insert_with(|| random_tree(rng, &ops, m, 1))
                                .clone()
                        }
                    })
                })
                .collect();
            if roll >= 0.6 {
                mutate(rng, &ops, m, &mut concs);
            }
            concs
        }
        _ => random_trees(rng, &ops, m, n, 3),
    };

    let thm = TheoremStmt {
        name: "random".into(),
        params: (0..m).map(|i| Arc::from(format!("x{i}"))).collect(),
        hyps: SyntaxMap::new(m, hyps).expect("leaves below m"),
        concs: SyntaxMap::new(m, concs).expect("leaves below m"),
        body: body.clone(),
    };
    (body, thm)
}

/// The first disagreement found by [`differential_run`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    pub trial: usize,
    pub theorem: String,
    pub hypergraph: String,
    pub direct: String,
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "trial {}: {}\n  hypergraph: {}\n  direct:     {}",
            self.trial, self.theorem, self.hypergraph, self.direct
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Summary {
    pub trials: usize,
    pub valid: usize,
    pub invalid: usize,
    pub errors: usize,
    pub divergences: usize,
    pub first_divergence: Option<Divergence>,
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} trials: {} valid, {} invalid, {} errors, {} divergences",
            self.trials, self.valid, self.invalid, self.errors, self.divergences
        )
    }
}

fn describe_values(r: &Result<Option<CanonicalOutputs>, String>) -> String {
    match r {
        Ok(Some(c)) => crate::syntax::render_tuple(&c.trees),
        Ok(None) => "undefined".into(),
        Err(e) => format!("error: {e}"),
    }
}

/// Compares both engines on one candidate. Returns the hypergraph status and
/// a divergence description, if any.
fn compare(env: &Env, thm: &TheoremStmt) -> (CheckStatus, Option<(String, String)>) {
    let ir = check_theorem(thm, env);
    let direct = check_direct(thm, env);
    if ir.status.kind() != direct.status.kind() {
        return (
            ir.status.clone(),
            Some((ir.status.to_string(), direct.status.to_string())),
        );
    }

    let m = thm.metavariables();
    let Ok(inputs) = thm.hyps.instantiate(&Tree::leaves(m)) else {
        return (ir.status, None);
    };
    let by_graph = compile_derivation(&thm.body, env)
        .map_err(|e| e.to_string())
        .and_then(|g| match g.evaluate(&inputs, &mut FreshCounter::new(m)) {
            Ok(v) => Ok(Some(canonicalize(&v, m))),
            Err(EvalError::Undefined(_)) => Ok(None),
            Err(e) => Err(e.to_string()),
        });
    let by_direct = eval_direct(&thm.body, &inputs, env, &mut FreshCounter::new(m))
        .map(|v| v.map(|v| canonicalize(&v, m)))
        .map_err(|e| e.to_string());
    let agree = match (&by_graph, &by_direct) {
        (Ok(a), Ok(b)) => a == b,
        (Err(_), Err(_)) => true,
        _ => false,
    };
    if agree {
        (ir.status, None)
    } else {
        (
            ir.status,
            Some((describe_values(&by_graph), describe_values(&by_direct))),
        )
    }
}

/// Runs `trials` random instances through both engines, in parallel when the
/// `parallel` feature is on. Trial `i` draws from stream `i` of a ChaCha
/// generator seeded with `seed`, so results do not depend on scheduling.
pub fn differential_run(env: &Env, trials: usize, seed: u64) -> Summary {
    differential_run_with(Execution::default(), env, trials, seed)
}

pub fn differential_run_with(exec: Execution, env: &Env, trials: usize, seed: u64) -> Summary {
    let indices: Vec<usize> = (0..trials).collect();
    let outcomes = par::map_with(exec, &indices, |&i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let (_, thm) = random_instance_with(env, &mut rng, 1 + i % 8);
        let (status, divergence) = compare(env, &thm);
        let divergence = divergence.map(|(hypergraph, direct)| Divergence {
            trial: i,
            theorem: format!(
                "{} => {} {{ {} }}",
                crate::syntax::render_tuple(thm.hyps.outputs()),
                crate::syntax::render_tuple(thm.concs.outputs()),
                thm.body
            ),
            hypergraph,
            direct,
        });
        (status.kind(), divergence)
    });

    let mut summary = Summary {
        trials,
        ..Summary::default()
    };
    for (kind, divergence) in outcomes {
        match kind {
            StatusKind::Valid => summary.valid += 1,
            StatusKind::StaticError => summary.errors += 1,
            _ => summary.invalid += 1,
        }
        if let Some(d) = divergence {
            summary.divergences += 1;
            summary.first_divergence.get_or_insert(d);
        }
    }
    summary
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::build_fol_env;

    fn registered() -> Env {
        let env = build_fol_env();
        let mut working = env.unregistered();
        for thm in &env.theorems {
            working.register_theorem(thm).unwrap();
        }
        working
    }

    #[test]
    fn modus_ponens_directly() {
        let env = build_fol_env();
        let sig = &env.signature;
        let ap = |n: &str, c: Vec<Tree>| Tree::node(sig.get(n).unwrap(), c).unwrap();
        let (t, s, u) = (ap("not", vec![Tree::Leaf(0)]), Tree::Leaf(1), Tree::Leaf(2));
        let mp = Derivation::gen("ax-mp");
        let mut fresh = FreshCounter::new(3);
        let ok = [
            ap("proves", vec![t.clone()]),
            ap("proves", vec![ap("imp", vec![t.clone(), s.clone()])]),
        ];
        assert_eq!(
            eval_direct(&mp, &ok, &env, &mut fresh).unwrap(),
            Some(vec![ap("proves", vec![s.clone()])])
        );
        let bad = [
            ap("proves", vec![t]),
            ap("proves", vec![ap("imp", vec![u, s])]),
        ];
        assert_eq!(eval_direct(&mp, &bad, &env, &mut fresh).unwrap(), None);
        let ids = [Tree::Leaf(0), Tree::Leaf(1)];
        assert_eq!(
            eval_direct(&Derivation::Id(2), &ids, &env, &mut fresh).unwrap(),
            Some(ids.to_vec())
        );
        assert!(eval_direct(&mp, &ids[..1], &env, &mut fresh).is_err());
    }

    #[test]
    fn structural_primitives() {
        let env = build_fol_env();
        let xs: Vec<Tree> = Tree::leaves(3);
        let mut fresh = FreshCounter::new(3);
        let sym = eval_direct(&Derivation::Sym(1, 2), &xs, &env, &mut fresh)
            .unwrap()
            .unwrap();
        assert_eq!(sym, vec![Tree::Leaf(1), Tree::Leaf(2), Tree::Leaf(0)]);
        let dup = eval_direct(&Derivation::Dup, &xs[..1], &env, &mut fresh)
            .unwrap()
            .unwrap();
        assert_eq!(dup, vec![Tree::Leaf(0), Tree::Leaf(0)]);
        assert_eq!(
            eval_direct(&Derivation::Drop, &xs[..1], &env, &mut fresh).unwrap(),
            Some(vec![])
        );
    }

    #[test]
    fn canonical_renumbering() {
        let env = build_fol_env();
        let sig = &env.signature;
        let ap = |n: &str, c: Vec<Tree>| Tree::node(sig.get(n).unwrap(), c).unwrap();
        let t = ap(
            "proves",
            vec![ap("forall", vec![Tree::Leaf(7), Tree::Leaf(1)])],
        );
        let c = canonicalize(&[t], 2);
        assert_eq!(c.trees[0].to_string(), "proves(forall(x2,x1))");
        let plain = vec![ap("wff", vec![Tree::Leaf(0)])];
        assert_eq!(canonicalize(&plain, 2).trees, plain);
        let twice = canonicalize(&[Tree::Leaf(9), Tree::Leaf(4), Tree::Leaf(9)], 1);
        assert_eq!(
            twice.trees,
            vec![Tree::Leaf(1), Tree::Leaf(2), Tree::Leaf(1)]
        );
        assert_eq!(canonicalize(&twice.trees, 1), twice);
    }

    #[test]
    fn corpus_agrees() {
        let env = build_fol_env();
        let ir = crate::proof::check_all(&env);
        let direct = check_all_direct(&env);
        for ((name, a), (_, b)) in ir.iter().zip(&direct) {
            assert_eq!(a.status.kind(), b.status.kind(), "{name}");
            assert!(b.status.is_valid(), "{name}: {}", b.status);
        }
    }

    #[test]
    fn random_instances_are_reproducible_and_well_formed() {
        let env = registered();
        assert_eq!(random_instance(&env, 1, 3), random_instance(&env, 1, 3));
        for seed in 0..200 {
            let (d, thm) = random_instance(&env, seed, 1 + (seed as usize % 6));
            let (a, b) = derivation_arity(&d, &env).unwrap();
            assert_eq!((a, b), (thm.hyps.len(), thm.concs.len()));
        }
    }

    #[test]
    fn empty_and_repeatable_runs() {
        let env = registered();
        assert_eq!(differential_run(&env, 0, 3), Summary::default());
        let a = differential_run(&env, 100, 11);
        assert_eq!(a.divergences, 0, "{:?}", a.first_divergence);
        assert_eq!(
            a,
            differential_run_with(Execution::Sequential, &env, 100, 11)
        );
    }
}
