use std::fmt::Write;
use std::sync::Arc;

use crate::proof::Env;
use crate::syntax::{SyntaxMap, Tree};

/// Canonical text of an environment: syntax declarations, then rules, then
/// theorems, one per line, with a blank line between groups. Registered
/// theorems are printed once, as theorems.
pub fn dump(env: &Env) -> String {
    let mut sections: Vec<String> = Vec::new();

    let syntax: Vec<String> = env
        .signature
        .iter()
        .map(|op| format!("syntax {} : {}", op.name(), op.arity()))
        .collect();
    let rules: Vec<String> = env
        .rules()
        .map(|g| format!("rule {}", decl(g.name(), g.params(), g.src(), g.tgt())))
        .collect();
    let theorems: Vec<String> = env
        .theorems
        .iter()
        .map(|t| {
            format!(
                "thm {} {{ {} }}",
                decl(&t.name, &t.params, &t.hyps, &t.concs),
                t.body
            )
        })
        .collect();

    for group in [syntax, rules, theorems] {
        if !group.is_empty() {
            sections.push(group.join("\n"));
        }
    }
    let mut out = sections.join("\n\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

fn decl(name: &str, params: &[Arc<str>], hyps: &SyntaxMap, concs: &SyntaxMap) -> String {
    let params: Vec<&str> = params.iter().map(|p| &**p).collect();
    format!(
        "{name} ({}) : {} => {}",
        params.join(" "),
        context(hyps, &params),
        context(concs, &params)
    )
}

fn context(map: &SyntaxMap, params: &[&str]) -> String {
    let terms: Vec<String> = map
        .outputs()
        .iter()
        .map(|t| {
            let mut s = String::new();
            term(t, params, &mut s);
            s
        })
        .collect();
    format!("[{}]", terms.join(", "))
}

fn term(t: &Tree, params: &[&str], out: &mut String) {
    match t {
        Tree::Leaf(i) => out.push_str(params[*i]),
        Tree::Node(node) => {
            let _ = write!(out, "{}(", node.op.name());
            for (k, child) in node.children.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                term(child, params, out);
            }
            out.push(')');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::load_env;

    #[test]
    fn empty_env_dumps_to_nothing() {
        assert_eq!(dump(&Env::default()), "");
    }

    #[test]
    fn dump_is_canonical() {
        let src = "// comment\nsyntax wff:1 syntax imp :2 syntax c: 0\n\
                   thm t (p) : [wff(p)] => [wff(p)] { (id1) ; r * id 0 ; (sym 1 0) }\n\
                   rule r (p q) : [wff( p )] => [wff(imp(p,c()))]";
        let env = load_env(src).unwrap();
        let text = dump(&env);
        assert_eq!(
            text,
            "syntax wff : 1\nsyntax imp : 2\nsyntax c : 0\n\n\
             rule r (p q) : [wff(p)] => [wff(imp(p, c()))]\n\n\
             thm t (p) : [wff(p)] => [wff(p)] { id 1 ; r * id 0 ; sym 1 0 }\n"
        );
        let again = load_env(&text).unwrap();
        assert_eq!(again, env);
        assert_eq!(dump(&again), text);
    }
}
