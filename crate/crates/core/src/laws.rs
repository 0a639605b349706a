//! Seeded sweeps of the algebraic laws the kernel relies on.
//!
//! Each sweep draws its cases from per-case ChaCha streams, so the outcome
//! does not depend on how cases are scheduled, and reports one
//! [`LawReport`] per law.

use std::fmt;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hypergraph::{EvalError, OpenHypergraph};
use crate::oracle::{canonicalize, random_chain, random_hypotheses, CanonicalOutputs};
use crate::par::{self, Execution};
use crate::proof::{check_theorem, compile_derivation, CheckStatus, Derivation, Env};
use crate::syntax::{FreshCounter, OpSymbol, Signature, SyntaxMap, Tree};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawReport {
    pub law: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}/{} hold",
            self.law,
            self.cases - self.failures,
            self.cases
        )?;
        if let Some(first) = &self.first_failure {
            write!(f, " (first failure: {first})")?;
        }
        Ok(())
    }
}

/// One case's verdict on each law, in law order: `None` if it holds.
type Verdicts = Vec<Option<String>>;

fn collect(laws: &[&'static str], cases: Vec<Verdicts>) -> Vec<LawReport> {
    laws.iter()
        .enumerate()
        .map(|(k, &law)| {
            let mut report = LawReport {
                law,
                cases: cases.len(),
                failures: 0,
                first_failure: None,
            };
            for (i, verdicts) in cases.iter().enumerate() {
                if let Some(msg) = &verdicts[k] {
                    report.failures += 1;
                    report
                        .first_failure
                        .get_or_insert_with(|| format!("case {i}: {msg}"));
                }
            }
            report
        })
        .collect()
}

fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    rng
}

pub fn random_tree(rng: &mut impl Rng, ops: &[OpSymbol], m: usize, depth: usize) -> Tree {
    if m > 0 && (depth == 0 || ops.is_empty() || rng.random_bool(0.3)) {
        return Tree::Leaf(rng.random_range(0..m));
    }
    let pool: Vec<&OpSymbol> = if depth == 0 {
        ops.iter().filter(|o| o.arity() == 0).collect()
    } else {
        ops.iter().collect()
    };
    let op = match pool.choose(rng) {
        Some(op) => *op,
        None => return Tree::Leaf(0),
    };
    let children = (0..op.arity())
        .map(|_| random_tree(rng, ops, m, depth.saturating_sub(1)))
        .collect();
    Tree::node(op, children).expect("arity respected")
}

/// A random map `m -> n`. With `cover`, every metavariable occurs.
pub fn random_syntax_map(
    rng: &mut impl Rng,
    ops: &[OpSymbol],
    m: usize,
    n: usize,
    cover: bool,
) -> SyntaxMap {
    let mut outputs: Vec<Tree> = (0..n).map(|_| random_tree(rng, ops, m, 3)).collect();
    if cover && n > 0 {
        let binary: Vec<&OpSymbol> = ops.iter().filter(|o| o.arity() >= 2).collect();
        let occurs = SyntaxMap::new(m, outputs.clone())
            .expect("leaves below m")
            .occurrences();
        for (i, _) in occurs.iter().enumerate().filter(|(_, &c)| c == 0) {
            let k = rng.random_range(0..n);
            outputs[k] = match binary.choose(rng) {
                Some(op) => {
                    let mut children = vec![outputs[k].clone(), Tree::Leaf(i)];
                    children.resize_with(op.arity(), || Tree::Leaf(i));
                    Tree::node(op, children).expect("arity respected")
                }
                None => Tree::Leaf(i),
            };
        }
    }
    SyntaxMap::new(m, outputs).expect("leaves below m")
}

fn eval(
    g: &OpenHypergraph,
    inputs: &[Tree],
    boundary: usize,
) -> Result<Option<Vec<Tree>>, EvalError> {
    match g.evaluate(inputs, &mut FreshCounter::new(boundary)) {
        Ok(v) => Ok(Some(v)),
        Err(EvalError::Undefined(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Option<String> {
    (!cond).then(msg)
}

pub const SYNTAX_LAWS: [&str; 6] = [
    "instantiate functoriality",
    "tensor functoriality",
    "constructor graph = instantiate",
    "retraction u+;u-;u+ = u+",
    "exact round trip",
    "matcher graph = match_against",
];

fn syntax_case(sig: &Signature, seed: u64, case: usize) -> Verdicts {
    let mut rng = case_rng(seed, case);
    let ops: Vec<OpSymbol> = sig.iter().cloned().collect();
    // Without constants there are no trees over zero metavariables.
    let lo = usize::from(!ops.iter().any(|o| o.arity() == 0));
    let (m, n, k, p) = (
        rng.random_range(lo..=3),
        rng.random_range(lo..=3),
        rng.random_range(0..=3),
        rng.random_range(1..=3),
    );
    let cover = rng.random_bool(0.5);
    let u = random_syntax_map(&mut rng, &ops, m, n, cover);
    let v = random_syntax_map(&mut rng, &ops, n, k, false);
    let w = random_syntax_map(&mut rng, &ops, p, 2, false);
    let args: Vec<Tree> = (0..m).map(|_| random_tree(&mut rng, &ops, p, 2)).collect();
    let more: Vec<Tree> = (0..p).map(|_| random_tree(&mut rng, &ops, p, 2)).collect();
    let boundary = p;

    let functor = {
        let left = u.compose(&v).and_then(|uv| uv.instantiate(&args));
        let right = u.instantiate(&args).and_then(|ua| v.instantiate(&ua));
        check(left.is_ok() && left == right, || {
            format!("{left:?} vs {right:?}")
        })
    };
    let tensor = {
        let joined: Vec<Tree> = args.iter().chain(&more).cloned().collect();
        let left = u.tensor(&w).instantiate(&joined).expect("context");
        let mut right = u.instantiate(&args).expect("context");
        right.extend(w.instantiate(&more).expect("context"));
        check(left == right, || format!("{left:?} vs {right:?}"))
    };

    let plus = OpenHypergraph::compile_plus(&u);
    let minus = OpenHypergraph::compile_minus(&u);
    let built = eval(&plus, &args, boundary);
    let expected = u.instantiate(&args).expect("context");
    let constructor = check(matches!(&built, Ok(Some(v)) if *v == expected), || {
        format!("{built:?} vs {expected:?}")
    });

    let retraction = match &built {
        Ok(Some(outs)) => {
            let back = eval(&minus, outs, boundary);
            let again = match &back {
                Ok(Some(bs)) => eval(&plus, bs, boundary).ok().flatten(),
                _ => None,
            };
            check(again.as_ref() == Some(outs), || {
                format!("u- gave {back:?}, then u+ gave {again:?}")
            })
        }
        other => Some(format!("u+ undefined: {other:?}")),
    };
    let round_trip = if u.occurrences().iter().all(|&c| c > 0) {
        let back = built
            .as_ref()
            .ok()
            .and_then(|b| b.as_ref())
            .map(|outs| eval(&minus, outs, boundary));
        check(matches!(&back, Some(Ok(Some(bs))) if *bs == args), || {
            format!("{back:?} vs {args:?}")
        })
    } else {
        None
    };

    // Subjects: an exact instance, a perturbed instance, or noise.
    let subjects: Vec<Tree> = match rng.random_range(0..3) {
        0 => expected.clone(),
        1 if n > 0 => {
            let mut s = expected.clone();
            let i = rng.random_range(0..n);
            s[i] = random_tree(&mut rng, &ops, p, 2);
            s
        }
        _ => (0..n).map(|_| random_tree(&mut rng, &ops, p, 3)).collect(),
    };
    let by_graph = eval(&minus, &subjects, boundary).map(|r| r.map(|v| canonicalize(&v, boundary)));
    let by_match = u
        .match_against(&subjects, &mut FreshCounter::new(boundary))
        .map(|r| r.map(|v| canonicalize(&v, boundary)));
    let matcher = check(
        matches!((&by_graph, &by_match), (Ok(a), Ok(b)) if a == b),
        || format!("graph {by_graph:?} vs match {by_match:?}"),
    );

    vec![
        functor,
        tensor,
        constructor,
        retraction,
        round_trip,
        matcher,
    ]
}

/// Laws of syntax maps and their two compilations, on `cases` random maps.
pub fn syntax_laws(sig: &Signature, cases: usize, seed: u64, exec: Execution) -> Vec<LawReport> {
    let indices: Vec<usize> = (0..cases).collect();
    let verdicts = par::map_with(exec, &indices, |&i| syntax_case(sig, seed, i));
    collect(&SYNTAX_LAWS, verdicts)
}

pub const MONOIDAL_LAWS: [&str; 5] = [
    "sequential associativity",
    "identity units",
    "interchange",
    "symmetry naturality",
    "compile functoriality",
];

/// Runs `d` through the hypergraph engine on `inputs`.
fn run(
    env: &Env,
    d: &Derivation,
    inputs: &[Tree],
    boundary: usize,
) -> Result<Option<CanonicalOutputs>, String> {
    let g = compile_derivation(d, env).map_err(|e| e.to_string())?;
    eval(&g, inputs, boundary)
        .map(|r| r.map(|v| canonicalize(&v, boundary)))
        .map_err(|e| e.to_string())
}

fn same(
    env: &Env,
    a: &Derivation,
    b: &Derivation,
    inputs: &[Tree],
    boundary: usize,
) -> Option<String> {
    let (ra, rb) = (run(env, a, inputs, boundary), run(env, b, inputs, boundary));
    check(ra.is_ok() && ra == rb, || {
        format!("`{a}` gives {ra:?}, `{b}` gives {rb:?}")
    })
}

fn monoidal_case(env: &Env, seed: u64, case: usize) -> Verdicts {
    let mut rng = case_rng(seed, case);
    let m = rng.random_range(1..=3);
    let mut fresh = FreshCounter::new(m);
    let mut chain = |rng: &mut ChaCha8Rng, n: usize, values: Option<Vec<Tree>>| {
        let layers = rng.random_range(1..=3);
        random_chain(rng, env, n, values, layers, &mut fresh)
    };

    let k1 = rng.random_range(1..=3);
    let k2 = rng.random_range(1..=3);
    let x1 = random_hypotheses(&mut rng, env, m, k1);
    let x2 = random_hypotheses(&mut rng, env, m, k2);
    let (f, a, y) = chain(&mut rng, k1, Some(x1.clone()));
    let (g, b, z) = chain(&mut rng, a, y);
    let (h, _, _) = chain(&mut rng, b, z);
    let (f2, a2, y2) = chain(&mut rng, k2, Some(x2.clone()));
    let (g2, _, _) = chain(&mut rng, a2, y2);

    use Derivation as D;
    let seq = D::seq;
    let par = D::par;
    let both: Vec<Tree> = x1.iter().chain(&x2).cloned().collect();

    let assoc = same(
        env,
        &seq(seq(f.clone(), g.clone()), h.clone()),
        &seq(f.clone(), seq(g.clone(), h)),
        &x1,
        m,
    );
    let units = same(env, &seq(D::Id(k1), f.clone()), &f, &x1, m)
        .or_else(|| same(env, &seq(f.clone(), D::Id(a)), &f, &x1, m))
        .or_else(|| same(env, &par(f.clone(), D::Id(0)), &f, &x1, m))
        .or_else(|| same(env, &par(D::Id(0), f.clone()), &f, &x1, m));
    let interchange = same(
        env,
        &seq(par(f.clone(), f2.clone()), par(g.clone(), g2.clone())),
        &par(seq(f.clone(), g.clone()), seq(f2.clone(), g2)),
        &both,
        m,
    );
    let naturality = same(
        env,
        &seq(par(f.clone(), f2.clone()), D::Sym(a, a2)),
        &seq(D::Sym(k1, k2), par(f2.clone(), f.clone())),
        &both,
        m,
    );
    // compile(f ; g) agrees with running compile(f) and then compile(g).
    let functoriality = {
        let whole = run(env, &seq(f.clone(), g.clone()), &x1, m);
        let staged =
            compile_derivation(&f, env).and_then(|cf| Ok((cf, compile_derivation(&g, env)?)));
        let staged = match staged {
            Ok((cf, cg)) => {
                let mut fresh = FreshCounter::new(m);
                match cf.evaluate(&x1, &mut fresh) {
                    Ok(mid) => match cg.evaluate(&mid, &mut fresh) {
                        Ok(out) => Ok(Some(canonicalize(&out, m))),
                        Err(EvalError::Undefined(_)) => Ok(None),
                        Err(e) => Err(e.to_string()),
                    },
                    Err(EvalError::Undefined(_)) => Ok(None),
                    Err(e) => Err(e.to_string()),
                }
            }
            Err(e) => Err(e.to_string()),
        };
        check(whole.is_ok() && whole == staged, || {
            format!("{whole:?} vs {staged:?}")
        })
    };
    vec![assoc, units, interchange, naturality, functoriality]
}

/// Symmetric monoidal laws on `cases` random derivation families, compared
/// by definedness and canonical values.
pub fn monoidal_laws(env: &Env, cases: usize, seed: u64, exec: Execution) -> Vec<LawReport> {
    let indices: Vec<usize> = (0..cases).collect();
    let verdicts = par::map_with(exec, &indices, |&i| monoidal_case(env, seed, i));
    collect(&MONOIDAL_LAWS, verdicts)
}

/// Flattens the top-level `;` and `*` structure and rebuilds it with a
/// random association, sometimes inserting identity units.
pub fn reassociate(rng: &mut impl Rng, d: &Derivation, env: &Env) -> Derivation {
    fn flatten<'a>(d: &'a Derivation, seq: bool, out: &mut Vec<&'a Derivation>) {
        match (d, seq) {
            (Derivation::Seq(a, b), true) | (Derivation::Par(a, b), false) => {
                flatten(a, seq, out);
                flatten(b, seq, out);
            }
            _ => out.push(d),
        }
    }
    fn rebuild(rng: &mut impl Rng, mut parts: Vec<Derivation>, seq: bool) -> Derivation {
        let join = if seq {
            Derivation::seq
        } else {
            Derivation::par
        };
        while parts.len() > 1 {
            let k = rng.random_range(0..parts.len() - 1);
            let b = parts.remove(k + 1);
            let a = parts.remove(k);
            parts.insert(k, join(a, b));
        }
        parts.pop().expect("non-empty")
    }
    if !matches!(d, Derivation::Seq(..) | Derivation::Par(..)) {
        return d.clone();
    }
    let seq = matches!(d, Derivation::Seq(..));
    let mut flat = Vec::new();
    flatten(d, seq, &mut flat);
    let mut parts: Vec<Derivation> = flat.into_iter().map(|p| reassociate(rng, p, env)).collect();
    if rng.random_bool(0.3) {
        let front = rng.random_bool(0.5);
        let unit = if !seq {
            Some(Derivation::Id(0))
        } else if front {
            crate::proof::derivation_arity(&parts[0], env)
                .map(|(a, _)| Derivation::Id(a))
                .ok()
        } else {
            crate::proof::derivation_arity(&parts[parts.len() - 1], env)
                .map(|(_, b)| Derivation::Id(b))
                .ok()
        };
        if let Some(unit) = unit {
            let at = if front { 0 } else { parts.len() };
            parts.insert(at, unit);
        }
    }
    rebuild(rng, parts, seq)
}

/// Checks every theorem of `env` with `variants` re-associated bodies each;
/// fails on any status change.
pub fn reassociation_invariance(env: &Env, variants: usize, seed: u64) -> LawReport {
    let reports = crate::proof::check_all(env);
    let mut working = env.unregistered();
    let mut cases = Vec::new();
    for (thm, (_, report)) in env.theorems.iter().zip(&reports) {
        for v in 0..variants {
            let mut rng = case_rng(seed, cases.len());
            let mut variant = thm.clone();
            variant.body = reassociate(&mut rng, &thm.body, &working);
            let status = check_theorem(&variant, &working).status;
            // Static errors quote the offending subterm, which re-association
            // changes; only their class is compared.
            let agree = match (&status, &report.status) {
                (CheckStatus::StaticError(_), CheckStatus::StaticError(_)) => true,
                (a, b) => a == b,
            };
            cases.push(vec![check(agree, || {
                format!(
                    "{} variant {v} `{}`: {} vs {}",
                    thm.name, variant.body, status, report.status
                )
            })]);
        }
        if report.status.is_valid() {
            if let Ok(g) = thm.as_generator() {
                working.generators.insert(thm.name.clone(), g);
            }
        }
    }
    collect(&["re-association invariance"], cases)
        .pop()
        .expect("one law")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::build_fol_env;

    #[test]
    fn covering_maps_use_every_metavariable() {
        let env = build_fol_env();
        let ops: Vec<OpSymbol> = env.signature.iter().cloned().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let u = random_syntax_map(&mut rng, &ops, 3, 2, true);
            assert!(u.occurrences().iter().all(|&c| c > 0), "{u:?}");
        }
    }

    #[test]
    fn small_sweeps_pass() {
        let env = build_fol_env();
        for r in syntax_laws(&env.signature, 100, 1, Execution::Sequential) {
            assert!(r.passed(), "{r}");
        }
        for r in monoidal_laws(&env, 50, 1, Execution::Sequential) {
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn reassociation_keeps_arity() {
        let env = build_fol_env();
        let body = &env.theorem("id").unwrap().body;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let d = reassociate(&mut rng, body, &env);
            assert_eq!(
                crate::proof::derivation_arity(&d, &env).unwrap(),
                crate::proof::derivation_arity(body, &env).unwrap()
            );
        }
    }
}
