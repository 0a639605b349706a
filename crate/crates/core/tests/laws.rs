use metacat_core::corpus::build_fol_env;
use metacat_core::laws::{monoidal_laws, reassociation_invariance, syntax_laws};
use metacat_core::par::Execution;
use metacat_core::Signature;

fn with_constant(sig: &Signature) -> Signature {
    let mut sig = sig.clone();
    sig.add("bot", 0).unwrap();
    sig
}

#[test]
fn syntax_laws_hold() {
    let env = build_fol_env();
    for sig in [env.signature.clone(), with_constant(&env.signature)] {
        for report in syntax_laws(&sig, 1000, 4, Execution::Parallel) {
            assert!(report.passed(), "{report}");
            assert_eq!(report.cases, 1000);
        }
    }
}

#[test]
fn monoidal_laws_hold() {
    let env = build_fol_env();
    let mut registered = env.unregistered();
    for thm in &env.theorems {
        registered.register_theorem(thm).unwrap();
    }
    for report in monoidal_laws(&registered, 500, 5, Execution::Parallel) {
        assert!(report.passed(), "{report}");
    }
}

#[test]
fn reassociation_never_changes_status() {
    for src in [
        metacat_core::corpus::FOL_SOURCE,
        metacat_core::corpus::NEGATIVE_SOURCE,
    ] {
        let env = metacat_core::surface::load_env(src).unwrap();
        let report = reassociation_invariance(&env, 20, 6);
        assert!(report.passed(), "{report}");
    }
}

#[test]
fn sweeps_do_not_depend_on_scheduling() {
    let env = build_fol_env();
    assert_eq!(
        syntax_laws(&env.signature, 200, 9, Execution::Sequential),
        syntax_laws(&env.signature, 200, 9, Execution::Parallel)
    );
    assert_eq!(
        monoidal_laws(&env, 100, 9, Execution::Sequential),
        monoidal_laws(&env, 100, 9, Execution::Parallel)
    );
}
