//! Rule-based baseline mutation generator in the Major/PIT style.
//!
//! Enumeration is a pure function of (source, operators, span): pre-order
//! node traversal, then operator name, then replacement-table order, so a
//! given input always yields the same mutant list in the same order.

use crate::model::{MutationRecord, Origin, SourceLocation};
use crate::syntax::ast::{Block, Expr, ExprKind, Span, Stmt, StmtKind, UnaryOp};
use crate::syntax::check::{check_source, Ty};
use crate::syntax::{BinaryOp, ExprId};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum RuleOperator {
    /// Arithmetic operator replacement: `+ - * / %` swap.
    Aor,
    /// Logical operator replacement: `&&` ↔ `||`.
    Lor,
    /// Literal value replacement: int n → 0, 1, n+1, n−1; bool → negation.
    Lvr,
    /// Relational operator replacement.
    Ror,
    /// Statement deletion: simple statement → `;` (line numbers stay put).
    Sdl,
    /// Unary operator insertion: `x` → `(-x)` or `(!x)` by type.
    Uoi,
}

impl RuleOperator {
    pub const ALL: [RuleOperator; 6] = [
        RuleOperator::Aor,
        RuleOperator::Lor,
        RuleOperator::Lvr,
        RuleOperator::Ror,
        RuleOperator::Sdl,
        RuleOperator::Uoi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleOperator::Aor => "AOR",
            RuleOperator::Lor => "LOR",
            RuleOperator::Lvr => "LVR",
            RuleOperator::Ror => "ROR",
            RuleOperator::Sdl => "SDL",
            RuleOperator::Uoi => "UOI",
        }
    }
}

impl fmt::Display for RuleOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleOperator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "AOR" => Ok(RuleOperator::Aor),
            "LOR" => Ok(RuleOperator::Lor),
            "LVR" => Ok(RuleOperator::Lvr),
            "ROR" => Ok(RuleOperator::Ror),
            "SDL" => Ok(RuleOperator::Sdl),
            "UOI" => Ok(RuleOperator::Uoi),
            other => Err(format!("unknown rule operator `{other}`")),
        }
    }
}

const ARITHMETIC: [BinaryOp; 5] =
    [BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div, BinaryOp::Rem];
const RELATIONAL: [BinaryOp; 6] = [
    BinaryOp::Lt,
    BinaryOp::Le,
    BinaryOp::Gt,
    BinaryOp::Ge,
    BinaryOp::Eq,
    BinaryOp::Ne,
];

/// Enumerate rule mutants for one file, restricted to `span` (inclusive
/// line range). Every record's mutated text differs from the original and
/// touches exactly one node.
pub fn enumerate_rule_mutants(
    source: &str,
    file: &str,
    operators: &[RuleOperator],
    span: (u32, u32),
) -> Vec<MutationRecord> {
    let check = check_source(file, source);
    let Some(program) = check.programs.get(file) else {
        return Vec::new(); // unparseable source yields nothing
    };
    let types = check.types.get(file).cloned().unwrap_or_default();
    let lines: Vec<&str> = source.lines().collect();

    let mut ops: Vec<RuleOperator> = operators.to_vec();
    ops.sort();
    ops.dedup();

    let mut emitter = Emitter { file, lines: &lines, span, types, ops, out: Vec::new(), seq: 0 };
    for f in &program.functions {
        emitter.visit_block(&f.body);
    }
    emitter.out
}

struct Emitter<'a> {
    file: &'a str,
    lines: &'a [&'a str],
    span: (u32, u32),
    types: HashMap<ExprId, Ty>,
    ops: Vec<RuleOperator>,
    out: Vec<MutationRecord>,
    seq: usize,
}

impl<'a> Emitter<'a> {
    fn in_span(&self, s: &Span) -> bool {
        self.span.0 <= s.start_line && s.end_line <= self.span.1
    }

    fn line_text(&self, line: u32) -> &str {
        self.lines.get(line as usize - 1).copied().unwrap_or("")
    }

    /// Replace columns [col, end_col) on a single line.
    fn splice(&self, span: &Span, replacement: &str) -> Option<(String, String)> {
        if span.start_line != span.end_line {
            return None;
        }
        let line = self.line_text(span.start_line);
        let chars: Vec<char> = line.chars().collect();
        let start = span.start_col as usize - 1;
        let end = span.end_col as usize - 1;
        if start > chars.len() || end > chars.len() || start > end {
            return None;
        }
        let mut mutated: String = chars[..start].iter().collect();
        mutated.push_str(replacement);
        mutated.extend(&chars[end..]);
        Some((line.to_string(), mutated))
    }

    fn emit(&mut self, op: RuleOperator, location_span: &Span, original: String, mutated: String) {
        if original == mutated {
            return;
        }
        self.seq += 1;
        self.out.push(MutationRecord {
            id: format!("r{:04}-{}", self.seq, op.name()),
            origin: Origin::Rule { operator: op.name().to_string() },
            location: SourceLocation {
                file: self.file.to_string(),
                line_start: location_span.start_line,
                line_end: location_span.end_line,
            },
            original_text: original,
            mutated_text: mutated,
            status: None,
            gen_wall_time: 0.0,
            token_usage: None,
        });
    }

    fn emit_single_line(&mut self, op: RuleOperator, edit_span: &Span, replacement: &str) {
        if let Some((original, mutated)) = self.splice(edit_span, replacement) {
            let line_span = Span {
                start_line: edit_span.start_line,
                start_col: 1,
                end_line: edit_span.start_line,
                end_col: 1,
            };
            self.emit(op, &line_span, original, mutated);
        }
    }

    fn visit_block(&mut self, block: &Block) {
        for stmt in &block.stmts {
            self.visit_stmt(stmt);
        }
    }

    fn visit_stmt(&mut self, stmt: &Stmt) {
        // Statement-level operators first (the statement node precedes its
        // children in pre-order).
        if self.in_span(&stmt.span) && self.ops.contains(&RuleOperator::Sdl) {
            if let StmtKind::Assign { .. } | StmtKind::Expr { .. } | StmtKind::Return { .. } =
                stmt.kind
            {
                let original: String = (stmt.span.start_line..=stmt.span.end_line)
                    .map(|l| self.line_text(l))
                    .collect::<Vec<_>>()
                    .join("\n");
                self.emit(RuleOperator::Sdl, &stmt.span, original, ";".to_string());
            }
        }
        match &stmt.kind {
            StmtKind::Let { value, .. }
            | StmtKind::Assign { value, .. }
            | StmtKind::Expr { value } => self.visit_expr(value),
            StmtKind::Return { value } => {
                if let Some(v) = value {
                    self.visit_expr(v);
                }
            }
            StmtKind::If { cond, then_block, else_block } => {
                self.visit_expr(cond);
                self.visit_block(then_block);
                if let Some(e) = else_block {
                    self.visit_block(e);
                }
            }
            StmtKind::While { cond, body } => {
                self.visit_expr(cond);
                self.visit_block(body);
            }
            StmtKind::Empty => {}
        }
    }

    fn visit_expr(&mut self, expr: &Expr) {
        if self.in_span(&expr.span) {
            for op in self.ops.clone() {
                self.apply_operator(op, expr);
            }
        }
        match &expr.kind {
            ExprKind::Unary { operand, .. } => self.visit_expr(operand),
            ExprKind::Binary { lhs, rhs, .. } => {
                self.visit_expr(lhs);
                self.visit_expr(rhs);
            }
            ExprKind::Call { args, .. } | ExprKind::MethodCall { args, .. } => {
                for a in args {
                    self.visit_expr(a);
                }
            }
            _ => {}
        }
    }

    fn apply_operator(&mut self, op: RuleOperator, expr: &Expr) {
        match (op, &expr.kind) {
            (RuleOperator::Aor, ExprKind::Binary { op: bop, op_span, .. })
                if bop.is_arithmetic() =>
            {
                for repl in ARITHMETIC {
                    if repl != *bop {
                        self.emit_single_line(op, op_span, repl.text());
                    }
                }
            }
            (RuleOperator::Ror, ExprKind::Binary { op: bop, op_span, .. })
                if bop.is_relational() =>
            {
                // `==`/`!=` accept any operand type, so the type-safe swap
                // set for them is just each other.
                let table: &[BinaryOp] = if matches!(bop, BinaryOp::Eq | BinaryOp::Ne) {
                    &[BinaryOp::Eq, BinaryOp::Ne]
                } else {
                    &RELATIONAL
                };
                for repl in table {
                    if repl != bop {
                        self.emit_single_line(op, op_span, repl.text());
                    }
                }
            }
            (RuleOperator::Lor, ExprKind::Binary { op: bop, op_span, .. }) if bop.is_logical() => {
                let repl = if *bop == BinaryOp::And { BinaryOp::Or } else { BinaryOp::And };
                self.emit_single_line(op, op_span, repl.text());
            }
            (RuleOperator::Lvr, ExprKind::Int(n)) => {
                let mut seen = Vec::new();
                for candidate in [0, 1, n.wrapping_add(1), n.wrapping_sub(1)] {
                    if candidate != *n && !seen.contains(&candidate) {
                        seen.push(candidate);
                        self.emit_single_line(op, &expr.span, &candidate.to_string());
                    }
                }
            }
            (RuleOperator::Lvr, ExprKind::Bool(b)) => {
                self.emit_single_line(op, &expr.span, if *b { "false" } else { "true" });
            }
            (RuleOperator::Uoi, ExprKind::Ident(name)) => {
                match self.types.get(&expr.id) {
                    Some(Ty::Int) => {
                        self.emit_single_line(op, &expr.span, &format!("(-{name})"))
                    }
                    Some(Ty::Bool) => {
                        self.emit_single_line(op, &expr.span, &format!("(!{name})"))
                    }
                    _ => {}
                }
            }
            (RuleOperator::Uoi, ExprKind::Member { ns, name }) => {
                // Builtin members are all Int.
                self.emit_single_line(op, &expr.span, &format!("(-{ns}.{name})"));
            }
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mutants(src: &str, ops: &[RuleOperator]) -> Vec<MutationRecord> {
        let last = src.lines().count() as u32;
        enumerate_rule_mutants(src, "t.mini", ops, (1, last))
    }

    #[test]
    fn aor_produces_the_four_replacements() {
        let out = mutants("fn f(a,b,c){ a = b + c; }", &[RuleOperator::Aor]);
        let texts: Vec<&str> = out.iter().map(|m| m.mutated_text.as_str()).collect();
        assert_eq!(
            texts,
            vec![
                "fn f(a,b,c){ a = b - c; }",
                "fn f(a,b,c){ a = b * c; }",
                "fn f(a,b,c){ a = b / c; }",
                "fn f(a,b,c){ a = b % c; }",
            ]
        );
    }

    #[test]
    fn lvr_negates_booleans() {
        let out = mutants("fn f(){ return true; }", &[RuleOperator::Lvr]);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].mutated_text, "fn f(){ return false; }");
    }

    #[test]
    fn sdl_replaces_statement_with_empty() {
        let out = mutants("fn f(x){ x = 1; }", &[RuleOperator::Sdl]);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].mutated_text, ";");
        assert_eq!(out[0].original_text, "fn f(x){ x = 1; }");
    }

    #[test]
    fn lvr_int_replacement_table() {
        let out = mutants("fn f(x){ x = 5; }", &[RuleOperator::Lvr]);
        let texts: Vec<&str> = out.iter().map(|m| m.mutated_text.as_str()).collect();
        assert_eq!(
            texts,
            vec!["fn f(x){ x = 0; }", "fn f(x){ x = 1; }", "fn f(x){ x = 6; }", "fn f(x){ x = 4; }"]
        );
        // n = 1 collapses duplicates.
        let out = mutants("fn f(x){ x = 1; }", &[RuleOperator::Lvr]);
        let texts: Vec<&str> = out.iter().map(|m| m.mutated_text.as_str()).collect();
        assert_eq!(texts, vec!["fn f(x){ x = 0; }", "fn f(x){ x = 2; }"]);
    }

    #[test]
    fn ror_keeps_eq_ne_type_safe() {
        let out = mutants("fn f(a,b){ return a == b; }", &[RuleOperator::Ror]);
        assert_eq!(out.len(), 1);
        assert!(out[0].mutated_text.contains("a != b"));
        let out = mutants("fn f(a,b){ return a < b; }", &[RuleOperator::Ror]);
        assert_eq!(out.len(), 5);
    }

    #[test]
    fn uoi_follows_types() {
        let out = mutants("fn f(a){ if (a < 1) { } return a; }", &[RuleOperator::Uoi]);
        // `a` is Int everywhere: condition use and return use.
        assert!(out.iter().all(|m| m.mutated_text.contains("(-a)")));
        assert_eq!(out.len(), 2);
        let out = mutants("fn f(p){ if (p) { } }", &[RuleOperator::Uoi]);
        assert_eq!(out.len(), 1);
        assert!(out[0].mutated_text.contains("(!p)"));
    }

    #[test]
    fn enumeration_order_is_node_then_operator() {
        let src = "fn f(a,b){ a = a + 1; }";
        let out = mutants(src, &[RuleOperator::Lvr, RuleOperator::Sdl, RuleOperator::Aor]);
        let ops: Vec<&str> = out
            .iter()
            .map(|m| match &m.origin {
                Origin::Rule { operator } => operator.as_str(),
                _ => unreachable!(),
            })
            .collect();
        // Statement node first (SDL), then the `+` node (AOR), then `a`
        // (none: UOI not requested), then literal (LVR).
        assert_eq!(ops, vec!["SDL", "AOR", "AOR", "AOR", "AOR", "LVR", "LVR"]);
    }

    #[test]
    fn respects_span_restriction() {
        let src = "fn f(x){\n  x = 1;\n  x = 2;\n}";
        let out = enumerate_rule_mutants(src, "t.mini", &[RuleOperator::Lvr], (2, 2));
        assert!(!out.is_empty());
        assert!(out.iter().all(|m| m.location.line_start == 2));
        let empty = enumerate_rule_mutants(src, "t.mini", &[RuleOperator::Lvr], (4, 4));
        assert!(empty.is_empty());
    }

    #[test]
    fn no_duplicates_within_one_enumeration() {
        let src = "fn f(a,b){\n  let c = a + b;\n  if (c <= 10) { c = c * 2; }\n  return c - 1;\n}";
        let out = mutants(src, &RuleOperator::ALL);
        let mut keys: Vec<(String, u32, String)> = out
            .iter()
            .map(|m| (m.location.file.clone(), m.location.line_start, m.mutated_text.clone()))
            .collect();
        let before = keys.len();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), before);
    }

    #[test]
    fn mutated_always_differs_from_original() {
        let src = "fn f(a){ let b = a % 2; return b == 0; }";
        for m in mutants(src, &RuleOperator::ALL) {
            assert_ne!(m.original_text, m.mutated_text);
        }
    }
}
