//! MiniLang front end and the generic syntax-tree substrate.
//!
//! Everything here is pure: tokenization, parsing, static checking, tree
//! diffing, and deletion detection are functions of their inputs and are
//! safe to run concurrently.

pub mod ast;
pub mod builtins;
pub mod check;
pub mod diff;
pub mod parse;
pub mod token;
pub mod tree;

pub use ast::{BinaryOp, Expr, ExprId, ExprKind, Program, Span, Stmt, StmtKind, UnaryOp};
pub use check::{check_project, check_source, FileDiagnostic, ProjectCheck, Ty};
pub use diff::{is_deletion, new_node_kinds, tree_diff, EditAction, EditScript};
pub use parse::{parse_program, ParseError};
pub use token::{lex, normalize_tokens, render, tokenize, LexError, Token, TokenKind};
pub use tree::{lower_program, parse_mini, NodeId, NodeKind, SyntaxTree, TreeNode};

/// The bundled MiniLang grammar, bit-exact.
pub const GRAMMAR: &str = include_str!("grammar.txt");

#[cfg(test)]
mod prop_tests {
    use super::*;
    use proptest::prelude::*;

    fn ident() -> impl Strategy<Value = String> {
        "[a-z][a-z0-9_]{0,5}".prop_filter("not a keyword", |s| {
            !["fn", "let", "if", "else", "while", "return", "true", "false"].contains(&s.as_str())
        })
    }

    fn token() -> impl Strategy<Value = String> {
        prop_oneof![
            ident(),
            (0u32..1000).prop_map(|n| n.to_string()),
            Just("true".to_string()),
            Just("false".to_string()),
            prop_oneof![
                Just("+"), Just("-"), Just("*"), Just("/"), Just("%"),
                Just("<"), Just("<="), Just(">"), Just(">="), Just("=="),
                Just("!="), Just("&&"), Just("||"), Just("="), Just("!"),
            ]
            .prop_map(str::to_string),
            prop_oneof![
                Just("("), Just(")"), Just("{"), Just("}"), Just(","), Just(";"), Just("."),
            ]
            .prop_map(str::to_string),
            "\"[ -!#-\\[\\]-~]{0,8}\"".prop_map(|s| s),
        ]
    }

    proptest! {
        /// Rendering a token list and re-lexing yields the same list.
        #[test]
        fn tokenize_render_round_trip(texts in proptest::collection::vec(token(), 0..40)) {
            let source = texts.join(" ");
            let tokens = tokenize(&source).unwrap();
            prop_assert_eq!(tokenize(&render(&tokens)).unwrap(), tokens);
        }
    }

    // A tiny grammar-directed program generator: every output must parse
    // and lower without error.
    fn gen_expr(depth: u32) -> BoxedStrategy<String> {
        let leaf = prop_oneof![
            (0u32..100).prop_map(|n| n.to_string()),
            Just("a".to_string()),
            Just("b".to_string()),
        ];
        if depth == 0 {
            return leaf.boxed();
        }
        let inner = gen_expr(depth - 1);
        let inner2 = gen_expr(depth - 1);
        prop_oneof![
            leaf,
            (inner, prop_oneof![Just("+"), Just("-"), Just("*")], inner2)
                .prop_map(|(l, op, r)| format!("({l} {op} {r})")),
        ]
        .boxed()
    }

    fn gen_stmt(depth: u32) -> BoxedStrategy<String> {
        let simple = prop_oneof![
            gen_expr(2).prop_map(|e| format!("a = {e};")),
            gen_expr(2).prop_map(|e| format!("b = {e};")),
            Just(";".to_string()),
        ];
        if depth == 0 {
            return simple.boxed();
        }
        let body = proptest::collection::vec(gen_stmt(depth - 1), 0..3);
        prop_oneof![
            simple,
            (gen_expr(1), gen_expr(1), body.clone())
                .prop_map(|(l, r, b)| format!("if ({l} < {r}) {{ {} }}", b.join(" "))),
            (gen_expr(1), gen_expr(1), body)
                .prop_map(|(l, r, b)| format!("while ({l} != {r}) {{ b = b + 1; {} }}",
                    b.join(" "))),
        ]
        .boxed()
    }

    proptest! {
        /// Grammar-generated programs always parse, lower, and check clean.
        #[test]
        fn generated_programs_parse_and_check(stmts in proptest::collection::vec(gen_stmt(2), 0..6)) {
            let src = format!("fn f(a, b){{ {} return a; }}", stmts.join(" "));
            let tree = parse_mini(&src).unwrap();
            prop_assert!(tree.len() >= 4);
            let pc = check_source("gen.mini", &src);
            prop_assert!(pc.ok(), "diags: {:?}", pc.diagnostics);
        }

        /// Random single-literal label edits always have tree distance 1.
        #[test]
        fn single_literal_edit_has_distance_one(v in 0u32..500, w in 501u32..1000) {
            let a = parse_mini(&format!("fn f(){{ return {v}; }}")).unwrap();
            let b = parse_mini(&format!("fn f(){{ return {w}; }}")).unwrap();
            prop_assert_eq!(tree_diff(&a, &b).distance(), 1);
            prop_assert_eq!(tree_diff(&a, &a).distance(), 0);
        }
    }
}
