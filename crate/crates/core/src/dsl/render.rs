use std::fmt::Write;

use crate::model::Architecture;

/// Canonical text: declarations, primitives, dependences, rules and
/// functionality, one item per line.
pub fn render(arch: &Architecture) -> String {
    let mut out = String::new();
    for c in &arch.components {
        let _ = writeln!(out, "component {c};");
    }
    for (v, r) in &arch.variables {
        let _ = writeln!(out, "var {v} range {r};");
    }
    for c in &arch.constants {
        let _ = writeln!(out, "const {c};");
    }
    for (f, k) in &arch.functions {
        let _ = writeln!(out, "fun {f}/{k};");
    }
    for p in &arch.primitives {
        let _ = writeln!(out, "{p};");
    }
    for d in &arch.deps {
        let _ = writeln!(out, "{d};");
    }
    for r in &arch.rules {
        let _ = writeln!(out, "{r};");
    }
    for (x, t) in &arch.functionality {
        let _ = writeln!(out, "functionality {x} = {t};");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_architecture;

    #[test]
    fn minimal_render() {
        let a = parse_architecture("component U; var x range 1; has^1 U(x);").unwrap();
        assert_eq!(render(&a), "component U;\nvar x range 1;\nhas^1 U(x);\n");
    }

    #[test]
    fn statements_round_trip() {
        let src = "component T, M; var a; var b range 3; const c; fun F/2;
            verify T proof M {a = F(b[2], c), attest M {a in b}};
            receive^4 T <- M attest M {a = F(b^2, c)} items {a, c};
            has T(c);";
        let a = parse_architecture(src).unwrap();
        assert_eq!(parse_architecture(&render(&a)).unwrap(), a);
        assert!(render(&a).contains("proof M {a = F(b[2], c), attest M {a in b}}"));
    }
}
