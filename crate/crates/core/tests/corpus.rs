use metacat_core::corpus::{self, build_fol_env, manifest, Outcome};
use metacat_core::oracle::check_all_direct;
use metacat_core::surface::{dump, load, load_env};
use metacat_core::{check_all, CheckStatus, Derivation, EvalFailure, Refutation, Tree};

#[test]
fn parsed_corpus_equals_constructed_env() {
    assert_eq!(load_env(corpus::FOL_SOURCE).unwrap(), build_fol_env());
}

#[test]
fn dump_is_identity_on_corpus_files() {
    for src in [corpus::FOL_SOURCE, corpus::NEGATIVE_SOURCE] {
        let env = load_env(src).unwrap();
        assert_eq!(dump(&env), src);
        assert_eq!(load_env(&dump(&env)).unwrap(), env);
    }
}

#[test]
fn outcomes_match_manifest() {
    for (file, expected) in manifest() {
        let env = load_env(corpus::source(&file).unwrap()).unwrap();
        let reports = check_all(&env);
        assert_eq!(reports.len(), expected.len(), "{file}");
        for (name, report) in reports {
            assert_eq!(
                Some(&Outcome::of(&report.status)),
                expected.get(&*name),
                "{file}: {name}: {}",
                report.status
            );
        }
    }
}

#[test]
fn oracle_agrees_on_corpus_files() {
    for src in [corpus::FOL_SOURCE, corpus::NEGATIVE_SOURCE] {
        let env = load_env(src).unwrap();
        let ir = check_all(&env);
        let direct = check_all_direct(&env);
        for ((name, a), (_, b)) in ir.iter().zip(&direct) {
            assert_eq!(
                a.status.kind(),
                b.status.kind(),
                "{name}: {} vs {}",
                a.status,
                b.status
            );
        }
    }
}

fn status_of(src: &str, name: &str) -> CheckStatus {
    let env = load_env(src).unwrap();
    check_all(&env)
        .into_iter()
        .find(|(n, _)| &**n == name)
        .unwrap()
        .1
        .status
}

#[test]
fn uncrossed_modus_ponens_fails_at_a_matcher() {
    match status_of(corpus::NEGATIVE_SOURCE, "id-uncrossed") {
        CheckStatus::Invalid(Refutation::Eval(EvalFailure::MatchFailure {
            edge,
            expected,
            actual,
        })) => {
            assert_eq!(&*expected, "wff");
            assert!(actual.to_string().starts_with("proves("), "{actual}");
            assert!(edge > 0);
        }
        other => panic!("{other}"),
    }
}

#[test]
fn swapped_premises_fail_an_equality() {
    assert!(matches!(
        status_of(corpus::NEGATIVE_SOURCE, "id-mp-swapped"),
        CheckStatus::Invalid(Refutation::Eval(EvalFailure::EqualityFailure { .. }))
    ));
}

#[test]
fn specialisation_is_a_conclusion_mismatch() {
    match status_of(corpus::NEGATIVE_SOURCE, "id-specialised") {
        CheckStatus::Invalid(Refutation::ConclusionMismatch {
            index: 0,
            expected,
            actual,
        }) => {
            assert_eq!(expected.to_string(), "proves(x0)");
            assert_eq!(actual.to_string(), "proves(imp(x0,x0))");
        }
        other => panic!("{other}"),
    }
}

#[test]
fn broken_arity_is_static() {
    assert!(matches!(
        status_of(corpus::NEGATIVE_SOURCE, "id-arity"),
        CheckStatus::StaticError(_)
    ));
}

#[test]
fn generalisation_reconstructs_a_fresh_binder() {
    let env = build_fol_env();
    let report = check_all(&env)
        .into_iter()
        .find(|(n, _)| &**n == "ax-gen-self")
        .unwrap()
        .1;
    assert!(report.status.is_valid());
    let out = report.conclusion.unwrap();
    // the discarded `x` comes back as a fresh leaf past the boundary
    let Tree::Node(proves) = &out[0] else {
        panic!()
    };
    let Tree::Node(forall) = &proves.children[0] else {
        panic!()
    };
    assert_eq!(forall.op.name(), "forall");
    assert_eq!(forall.children[1], Tree::Leaf(1));
    match forall.children[0] {
        Tree::Leaf(i) => assert!(i >= 2, "fresh leaf {i} collides with the boundary"),
        ref t => panic!("{t}"),
    }
    assert_eq!(
        metacat_core::oracle::canonicalize(&out, 2).trees[0].to_string(),
        "proves(forall(x2,x1))"
    );
}

#[test]
fn references_agree_with_inlining() {
    let env = build_fol_env();
    let mut working = env.unregistered();
    for thm in &env.theorems {
        working.register_theorem(thm).unwrap();
    }
    for thm in &env.theorems {
        let mut inlined = thm.clone();
        inlined.body = thm.body.inline_theorems(&working);
        assert!(!inlined
            .body
            .generator_names()
            .iter()
            .any(|n| env.theorem(n).is_some()));
        let a = metacat_core::check_theorem(thm, &working).status;
        let b = metacat_core::check_theorem(&inlined, &working).status;
        assert_eq!(a, b, "{}", thm.name);
    }
}

#[test]
fn theorem_spans_are_recorded() {
    let e = load(corpus::FOL_SOURCE).unwrap();
    assert_eq!(e.theorem_spans.len(), e.env.theorems.len());
    assert_eq!(e.theorem_spans["wn-self"].line, 14);
}

#[test]
fn retyping_reuses_a_rule() {
    let env = build_fol_env();
    let thm = env.theorem("wn-retyped").unwrap();
    assert_eq!(thm.body, Derivation::gen("wn"));
    assert!(metacat_core::check_theorem(thm, &env).status.is_valid());
}
