//! The shipped first-order logic corpus.
//!
//! [`build_fol_env`] constructs in code the same environment that
//! `corpus/fol.mcat` elaborates to; the tests keep the two in step.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::hypergraph::EvalFailure;
use crate::proof::{CheckStatus, Derivation, Env, ProofGenerator, Refutation, TheoremStmt};
use crate::syntax::{Signature, SyntaxMap, Tree};

pub const FOL_SOURCE: &str = include_str!("../../../corpus/fol.mcat");
pub const NEGATIVE_SOURCE: &str = include_str!("../../../corpus/negative.mcat");
pub const MANIFEST_JSON: &str = include_str!("../../../corpus/manifest.json");

/// Expected outcome class of a corpus theorem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Valid,
    MatchFailure,
    EqualityFailure,
    Undefined,
    ConclusionMismatch,
    Error,
}

impl Outcome {
    pub fn of(status: &CheckStatus) -> Outcome {
        match status {
            CheckStatus::Valid => Outcome::Valid,
            CheckStatus::Invalid(Refutation::Eval(EvalFailure::MatchFailure { .. })) => {
                Outcome::MatchFailure
            }
            CheckStatus::Invalid(Refutation::Eval(EvalFailure::EqualityFailure { .. })) => {
                Outcome::EqualityFailure
            }
            CheckStatus::Invalid(Refutation::Undefined) => Outcome::Undefined,
            CheckStatus::Invalid(Refutation::ConclusionMismatch { .. }) => {
                Outcome::ConclusionMismatch
            }
            CheckStatus::StaticError(_) => Outcome::Error,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Valid => "valid",
            Outcome::MatchFailure => "match-failure",
            Outcome::EqualityFailure => "equality-failure",
            Outcome::Undefined => "undefined",
            Outcome::ConclusionMismatch => "conclusion-mismatch",
            Outcome::Error => "error",
        }
    }

    pub fn parse(s: &str) -> Option<Outcome> {
        [
            Outcome::Valid,
            Outcome::MatchFailure,
            Outcome::EqualityFailure,
            Outcome::Undefined,
            Outcome::ConclusionMismatch,
            Outcome::Error,
        ]
        .into_iter()
        .find(|o| o.as_str() == s)
    }
}

/// File name -> theorem name -> expected outcome.
pub type Manifest = BTreeMap<String, BTreeMap<String, Outcome>>;

pub fn manifest() -> Manifest {
    let raw: BTreeMap<String, BTreeMap<String, String>> =
        serde_json::from_str(MANIFEST_JSON).expect("manifest.json is well formed");
    raw.into_iter()
        .map(|(file, theorems)| {
            let theorems = theorems
                .into_iter()
                .map(|(name, status)| {
                    let outcome =
                        Outcome::parse(&status).unwrap_or_else(|| panic!("bad status `{status}`"));
                    (name, outcome)
                })
                .collect();
            (file, theorems)
        })
        .collect()
}

/// Source text of a corpus file by name.
pub fn source(file: &str) -> Option<&'static str> {
    match file {
        "fol.mcat" => Some(FOL_SOURCE),
        "negative.mcat" => Some(NEGATIVE_SOURCE),
        _ => None,
    }
}

struct Fol {
    sig: Signature,
}

impl Fol {
    fn ap(&self, name: &str, children: Vec<Tree>) -> Tree {
        Tree::node(self.sig.get(name).expect("declared"), children).expect("arity")
    }

    fn wff(&self, t: Tree) -> Tree {
        self.ap("wff", vec![t])
    }

    fn proves(&self, t: Tree) -> Tree {
        self.ap("proves", vec![t])
    }

    fn not(&self, t: Tree) -> Tree {
        self.ap("not", vec![t])
    }

    fn imp(&self, a: Tree, b: Tree) -> Tree {
        self.ap("imp", vec![a, b])
    }

    fn forall(&self, x: Tree, body: Tree) -> Tree {
        self.ap("forall", vec![x, body])
    }
}

fn params(names: &[&str]) -> Vec<Arc<str>> {
    names.iter().map(|&n| Arc::from(n)).collect()
}

fn map(m: usize, outputs: Vec<Tree>) -> SyntaxMap {
    SyntaxMap::new(m, outputs).expect("leaves in range")
}

fn gen(name: &str) -> Derivation {
    Derivation::gen(name)
}

fn seq(parts: Vec<Derivation>) -> Derivation {
    Derivation::seq_all(parts).expect("non-empty")
}

fn par(parts: Vec<Derivation>) -> Derivation {
    Derivation::par_all(parts).expect("non-empty")
}

/// The proof of `|- p -> p` from a single `wff(p)`, without the initial
/// fan-out. Expects nine copies of `wff(p)`.
pub fn id_core() -> Vec<Derivation> {
    use Derivation::{Id, Sym};
    vec![
        par(vec![gen("wi"), gen("wi"), Id(5)]),
        par(vec![Sym(2, 1), Id(4)]),
        par(vec![Id(2), Sym(1, 1), Id(3)]),
        par(vec![gen("ax-1"), gen("ax-2"), Id(2)]),
        par(vec![gen("ax-mp"), Id(2)]),
        Sym(1, 2),
        par(vec![gen("ax-1"), Id(1)]),
        gen("ax-mp"),
    ]
}

/// `dup ; dup * id 1 ; ... ; dup * id (n-2)`: one wire to `n`.
pub fn fan_out(n: usize) -> Vec<Derivation> {
    (0..n.saturating_sub(1))
        .map(|k| {
            if k == 0 {
                Derivation::Dup
            } else {
                Derivation::par(Derivation::Dup, Derivation::Id(k))
            }
        })
        .collect()
}

pub fn id_body() -> Derivation {
    seq(fan_out(9).into_iter().chain(id_core()).collect())
}

/// Name, parameters, hypotheses, conclusions.
type RuleDef = (&'static str, Vec<Arc<str>>, Vec<Tree>, Vec<Tree>);

pub fn build_fol_env() -> Env {
    let fol = Fol {
        sig: Signature::declare([
            ("wff", 1),
            ("proves", 1),
            ("not", 1),
            ("imp", 2),
            ("forall", 2),
        ])
        .expect("distinct symbols"),
    };
    let f = &fol;
    let (p, q, r) = (Tree::Leaf(0), Tree::Leaf(1), Tree::Leaf(2));
    let mut env = Env::new(fol.sig.clone());

    let ax2_conc = f.proves(f.imp(
        f.imp(p.clone(), f.imp(q.clone(), r.clone())),
        f.imp(f.imp(p.clone(), q.clone()), f.imp(p.clone(), r.clone())),
    ));
    // (name, params, hypotheses, conclusions)
    let rules: Vec<RuleDef> = vec![
        (
            "wn",
            params(&["p"]),
            vec![f.wff(p.clone())],
            vec![f.wff(f.not(p.clone()))],
        ),
        (
            "wi",
            params(&["p", "q"]),
            vec![f.wff(p.clone()), f.wff(q.clone())],
            vec![f.wff(f.imp(p.clone(), q.clone()))],
        ),
        (
            "ax-mp",
            params(&["p", "q"]),
            vec![f.proves(p.clone()), f.proves(f.imp(p.clone(), q.clone()))],
            vec![f.proves(q.clone())],
        ),
        (
            "ax-1",
            params(&["p", "q"]),
            vec![f.wff(p.clone()), f.wff(q.clone())],
            vec![f.proves(f.imp(p.clone(), f.imp(q.clone(), p.clone())))],
        ),
        (
            "ax-2",
            params(&["p", "q", "r"]),
            vec![f.wff(p.clone()), f.wff(q.clone()), f.wff(r.clone())],
            vec![ax2_conc],
        ),
        (
            "ax-gen",
            params(&["x", "p"]),
            vec![f.proves(q.clone())],
            vec![f.proves(f.forall(p.clone(), q.clone()))],
        ),
    ];
    for (name, ps, hyps, concs) in rules {
        let m = ps.len();
        let rule = ProofGenerator::new(name, ps, map(m, hyps), map(m, concs)).expect("well formed");
        env.add_rule(rule).expect("distinct names");
    }

    let self_checks: Vec<ProofGenerator> = env.rules().cloned().collect();
    let mut theorem =
        |name: &str, ps: Vec<Arc<str>>, hyps: Vec<Tree>, concs: Vec<Tree>, body: Derivation| {
            let m = ps.len();
            env.add_theorem(TheoremStmt {
                name: name.into(),
                params: ps,
                hyps: map(m, hyps),
                concs: map(m, concs),
                body,
            })
            .expect("distinct names");
        };
    for g in self_checks {
        theorem(
            &format!("{}-self", g.name()),
            g.params().to_vec(),
            g.src().outputs().to_vec(),
            g.tgt().outputs().to_vec(),
            gen(g.name()),
        );
    }
    theorem(
        "wn-retyped",
        params(&["p"]),
        vec![f.wff(f.not(p.clone()))],
        vec![f.wff(f.not(f.not(p.clone())))],
        gen("wn"),
    );
    theorem(
        "wnwi",
        params(&["p", "q"]),
        vec![f.wff(p.clone()), f.wff(q.clone())],
        vec![f.wff(f.not(f.imp(p.clone(), q.clone())))],
        seq(vec![gen("wi"), gen("wn")]),
    );
    let p_imp_p = f.proves(f.imp(p.clone(), p.clone()));
    theorem(
        "id",
        params(&["p"]),
        vec![f.wff(p.clone())],
        vec![p_imp_p.clone()],
        id_body(),
    );
    theorem(
        "id-sfan",
        params(&["p"]),
        vec![f.wff(p.clone()); 9],
        vec![p_imp_p.clone()],
        seq(id_core()),
    );
    theorem(
        "id-twice",
        params(&["p"]),
        vec![f.wff(p.clone())],
        vec![p_imp_p.clone(), p_imp_p],
        seq(vec![Derivation::Dup, Derivation::par(gen("id"), gen("id"))]),
    );
    theorem(
        "wnwi-neg",
        params(&["p", "q"]),
        vec![f.wff(p.clone()), f.wff(q.clone())],
        vec![f.wff(f.not(f.not(f.imp(p.clone(), q.clone()))))],
        seq(vec![gen("wnwi"), gen("wn")]),
    );
    env
}
