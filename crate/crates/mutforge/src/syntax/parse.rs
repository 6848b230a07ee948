//! Recursive-descent parser for MiniLang.
//!
//! The accepted grammar is pinned in `grammar.txt`, bundled with the crate.

use super::ast::*;
use super::token::{lex, SpannedToken, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at {line}:{col}: {message}")]
pub struct ParseError {
    pub message: String,
    pub line: u32,
    pub col: u32,
}

pub fn parse_program(source: &str) -> Result<Program, ParseError> {
    let tokens = lex(source).map_err(|e| ParseError {
        message: e.message,
        line: e.line,
        col: e.col,
    })?;
    let mut p = Parser { tokens, pos: 0, next_expr_id: 0 };
    p.program()
}

struct Parser {
    tokens: Vec<SpannedToken>,
    pos: usize,
    next_expr_id: ExprId,
}

impl Parser {
    fn peek(&self) -> Option<&SpannedToken> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, offset: usize) -> Option<&SpannedToken> {
        self.tokens.get(self.pos + offset)
    }

    fn bump(&mut self) -> Option<SpannedToken> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self
            .peek()
            .map(|t| (t.line, t.col))
            .or_else(|| self.tokens.last().map(|t| (t.line, t.end_col)))
            .unwrap_or((1, 1));
        ParseError { message: message.into(), line, col }
    }

    fn span_of(t: &SpannedToken) -> Span {
        Span { start_line: t.line, start_col: t.col, end_line: t.line, end_col: t.end_col }
    }

    fn expect_text(&mut self, text: &str) -> Result<SpannedToken, ParseError> {
        match self.peek() {
            Some(t) if t.token.text == text => Ok(self.bump().unwrap()),
            Some(t) => Err(self.err_here(format!("expected `{text}`, found `{}`", t.token.text))),
            None => Err(self.err_here(format!("expected `{text}`, found end of input"))),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<SpannedToken, ParseError> {
        match self.peek() {
            Some(t) if t.token.kind == TokenKind::Identifier => Ok(self.bump().unwrap()),
            Some(t) => {
                Err(self.err_here(format!("expected {what}, found `{}`", t.token.text)))
            }
            None => Err(self.err_here(format!("expected {what}, found end of input"))),
        }
    }

    fn at_text(&self, text: &str) -> bool {
        self.peek().is_some_and(|t| t.token.text == text)
    }

    fn new_expr(&mut self, kind: ExprKind, span: Span) -> Expr {
        let id = self.next_expr_id;
        self.next_expr_id += 1;
        Expr { kind, span, id }
    }

    fn program(&mut self) -> Result<Program, ParseError> {
        let mut functions = Vec::new();
        while self.peek().is_some() {
            functions.push(self.function_decl()?);
        }
        Ok(Program { functions })
    }

    fn function_decl(&mut self) -> Result<FunctionDecl, ParseError> {
        let kw = self.expect_text("fn")?;
        let name = self.expect_ident("function name")?;
        self.expect_text("(")?;
        let mut params = Vec::new();
        if !self.at_text(")") {
            loop {
                params.push(self.expect_ident("parameter name")?.token.text);
                if self.at_text(",") {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect_text(")")?;
        let open_line = match self.peek() {
            Some(t) if t.token.text == "{" => t.line,
            _ => return Err(self.err_here("expected `{` to open function body")),
        };
        let body = self.block()?;
        let close_line = body.span.end_line;
        let span = Self::span_of(&kw).merge(body.span);
        // Interior lines: everything after the opening brace line up to the
        // closing brace line. Single-line bodies keep that one line.
        let body_lines = if close_line > open_line + 1 {
            (open_line + 1, close_line - 1)
        } else {
            (open_line, close_line)
        };
        Ok(FunctionDecl { name: name.token.text, params, body, span, body_lines })
    }

    fn block(&mut self) -> Result<Block, ParseError> {
        let open = self.expect_text("{")?;
        let mut stmts = Vec::new();
        while !self.at_text("}") {
            if self.peek().is_none() {
                return Err(self.err_here("expected `}` to close block"));
            }
            stmts.push(self.statement()?);
        }
        let close = self.expect_text("}")?;
        Ok(Block { stmts, span: Self::span_of(&open).merge(Self::span_of(&close)) })
    }

    fn statement(&mut self) -> Result<Stmt, ParseError> {
        let t = match self.peek() {
            Some(t) => t.clone(),
            None => return Err(self.err_here("expected statement")),
        };
        match t.token.text.as_str() {
            ";" => {
                self.bump();
                Ok(Stmt { kind: StmtKind::Empty, span: Self::span_of(&t) })
            }
            "let" => {
                self.bump();
                let name = self.expect_ident("variable name")?;
                self.expect_text("=")?;
                let value = self.expr()?;
                let semi = self.expect_text(";")?;
                Ok(Stmt {
                    kind: StmtKind::Let { name: name.token.text, value },
                    span: Self::span_of(&t).merge(Self::span_of(&semi)),
                })
            }
            "if" => self.if_statement(),
            "while" => {
                self.bump();
                self.expect_text("(")?;
                let cond = self.expr()?;
                self.expect_text(")")?;
                let body = self.block()?;
                let span = Self::span_of(&t).merge(body.span);
                Ok(Stmt { kind: StmtKind::While { cond, body }, span })
            }
            "return" => {
                self.bump();
                let value = if self.at_text(";") { None } else { Some(self.expr()?) };
                let semi = self.expect_text(";")?;
                Ok(Stmt {
                    kind: StmtKind::Return { value },
                    span: Self::span_of(&t).merge(Self::span_of(&semi)),
                })
            }
            _ => {
                // `name = expr ;` is an assignment; anything else is an
                // expression statement.
                if t.token.kind == TokenKind::Identifier
                    && self.peek_at(1).is_some_and(|n| n.token.text == "=")
                {
                    self.bump();
                    self.bump();
                    let value = self.expr()?;
                    let semi = self.expect_text(";")?;
                    return Ok(Stmt {
                        kind: StmtKind::Assign { name: t.token.text.clone(), value },
                        span: Self::span_of(&t).merge(Self::span_of(&semi)),
                    });
                }
                let value = self.expr()?;
                let semi = self.expect_text(";")?;
                let span = value.span.merge(Self::span_of(&semi));
                Ok(Stmt { kind: StmtKind::Expr { value }, span })
            }
        }
    }

    fn if_statement(&mut self) -> Result<Stmt, ParseError> {
        let kw = self.expect_text("if")?;
        self.expect_text("(")?;
        let cond = self.expr()?;
        self.expect_text(")")?;
        let then_block = self.block()?;
        let mut span = Self::span_of(&kw).merge(then_block.span);
        let else_block = if self.at_text("else") {
            self.bump();
            if self.at_text("if") {
                // `else if` sugar: wrap the nested if in a synthetic block.
                let nested = self.if_statement()?;
                let nested_span = nested.span;
                span = span.merge(nested_span);
                Some(Block { stmts: vec![nested], span: nested_span })
            } else {
                let b = self.block()?;
                span = span.merge(b.span);
                Some(b)
            }
        } else {
            None
        };
        Ok(Stmt { kind: StmtKind::If { cond, then_block, else_block }, span })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.binary_expr(0)
    }

    /// Precedence climbing; level 0 is `||`, tighter levels bind harder.
    fn binary_expr(&mut self, level: usize) -> Result<Expr, ParseError> {
        const LEVELS: &[&[&str]] = &[
            &["||"],
            &["&&"],
            &["==", "!="],
            &["<", "<=", ">", ">="],
            &["+", "-"],
            &["*", "/", "%"],
        ];
        if level >= LEVELS.len() {
            return self.unary_expr();
        }
        let mut lhs = self.binary_expr(level + 1)?;
        while let Some(t) = self.peek() {
            if t.token.kind != TokenKind::Operator || !LEVELS[level].contains(&t.token.text.as_str())
            {
                break;
            }
            let op_tok = self.bump().unwrap();
            let op = BinaryOp::from_text(&op_tok.token.text).unwrap();
            let op_span = Self::span_of(&op_tok);
            let rhs = self.binary_expr(level + 1)?;
            let span = lhs.span.merge(rhs.span);
            lhs = self.new_expr(
                ExprKind::Binary { op, op_span, lhs: Box::new(lhs), rhs: Box::new(rhs) },
                span,
            );
        }
        Ok(lhs)
    }

    fn unary_expr(&mut self) -> Result<Expr, ParseError> {
        if let Some(t) = self.peek() {
            if t.token.kind == TokenKind::Operator && (t.token.text == "-" || t.token.text == "!") {
                let op_tok = self.bump().unwrap();
                let op = if op_tok.token.text == "-" { UnaryOp::Neg } else { UnaryOp::Not };
                let operand = self.unary_expr()?;
                let span = Self::span_of(&op_tok).merge(operand.span);
                return Ok(self.new_expr(ExprKind::Unary { op, operand: Box::new(operand) }, span));
            }
        }
        self.postfix_expr()
    }

    fn postfix_expr(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary_expr()?;
        if !self.at_text(".") {
            return Ok(base);
        }
        let ns = match &base.kind {
            ExprKind::Ident(name) => name.clone(),
            _ => return Err(self.err_here("member access is only valid on a plain name")),
        };
        self.bump();
        let member = self.expect_ident("member name")?;
        let member_span = base.span.merge(Self::span_of(&member));
        if self.at_text("(") {
            let (args, close) = self.arg_list()?;
            let span = member_span.merge(close);
            return Ok(self.new_expr(
                ExprKind::MethodCall { ns, name: member.token.text, args },
                span,
            ));
        }
        Ok(self.new_expr(ExprKind::Member { ns, name: member.token.text }, member_span))
    }

    fn primary_expr(&mut self) -> Result<Expr, ParseError> {
        let t = match self.peek() {
            Some(t) => t.clone(),
            None => return Err(self.err_here("expected expression")),
        };
        match t.token.kind {
            TokenKind::IntLiteral => {
                self.bump();
                let value: i64 = t.token.text.parse().map_err(|_| ParseError {
                    message: format!("integer literal `{}` out of range", t.token.text),
                    line: t.line,
                    col: t.col,
                })?;
                Ok(self.new_expr(ExprKind::Int(value), Self::span_of(&t)))
            }
            TokenKind::BoolLiteral => {
                self.bump();
                Ok(self.new_expr(ExprKind::Bool(t.token.text == "true"), Self::span_of(&t)))
            }
            TokenKind::StringLiteral => {
                self.bump();
                let value = decode_string(&t.token.text);
                Ok(self.new_expr(
                    ExprKind::Str { raw: t.token.text.clone(), value },
                    Self::span_of(&t),
                ))
            }
            TokenKind::Identifier => {
                self.bump();
                if self.at_text("(") {
                    let (args, close) = self.arg_list()?;
                    let span = Self::span_of(&t).merge(close);
                    return Ok(self.new_expr(
                        ExprKind::Call { name: t.token.text.clone(), args },
                        span,
                    ));
                }
                Ok(self.new_expr(ExprKind::Ident(t.token.text.clone()), Self::span_of(&t)))
            }
            TokenKind::Punct if t.token.text == "(" => {
                self.bump();
                let inner = self.expr()?;
                self.expect_text(")")?;
                Ok(inner)
            }
            _ => Err(self.err_here(format!("expected expression, found `{}`", t.token.text))),
        }
    }

    fn arg_list(&mut self) -> Result<(Vec<Expr>, Span), ParseError> {
        self.expect_text("(")?;
        let mut args = Vec::new();
        if !self.at_text(")") {
            loop {
                args.push(self.expr()?);
                if self.at_text(",") {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        let close = self.expect_text(")")?;
        Ok((args, Self::span_of(&close)))
    }
}

fn decode_string(raw: &str) -> String {
    let inner = &raw[1..raw.len() - 1];
    let mut out = String::new();
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some('n') => out.push('\n'),
                Some('t') => out.push('\t'),
                Some(other) => out.push(other),
                None => {}
            }
        } else {
            out.push(c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_simple_function() {
        let p = parse_program("fn f(){ return 1; }").unwrap();
        assert_eq!(p.functions.len(), 1);
        let f = &p.functions[0];
        assert_eq!(f.name, "f");
        assert!(f.params.is_empty());
        assert!(matches!(f.body.stmts[0].kind, StmtKind::Return { value: Some(_) }));
    }

    #[test]
    fn parses_call_with_arguments() {
        let p = parse_program("fn f(){ x = g(1,2); }").unwrap();
        let StmtKind::Assign { value, .. } = &p.functions[0].body.stmts[0].kind else {
            panic!("expected assignment");
        };
        let ExprKind::Call { name, args } = &value.kind else {
            panic!("expected call");
        };
        assert_eq!(name, "g");
        assert_eq!(args.len(), 2);
    }

    #[test]
    fn parses_if_with_comparison() {
        let p = parse_program("fn f(a,b){ if (a < b) { } }").unwrap();
        let StmtKind::If { cond, .. } = &p.functions[0].body.stmts[0].kind else {
            panic!("expected if");
        };
        assert!(matches!(cond.kind, ExprKind::Binary { op: BinaryOp::Lt, .. }));
    }

    #[test]
    fn else_if_desugars_to_nested_if() {
        let p = parse_program("fn f(a){ if (a < 1) { } else if (a < 2) { } else { } }").unwrap();
        let StmtKind::If { else_block: Some(b), .. } = &p.functions[0].body.stmts[0].kind else {
            panic!("expected if/else");
        };
        assert!(matches!(b.stmts[0].kind, StmtKind::If { .. }));
    }

    #[test]
    fn precedence_binds_mul_before_add() {
        let p = parse_program("fn f(a,b,c){ return a + b * c; }").unwrap();
        let StmtKind::Return { value: Some(e) } = &p.functions[0].body.stmts[0].kind else {
            panic!();
        };
        let ExprKind::Binary { op, rhs, .. } = &e.kind else { panic!() };
        assert_eq!(*op, BinaryOp::Add);
        assert!(matches!(rhs.kind, ExprKind::Binary { op: BinaryOp::Mul, .. }));
    }

    #[test]
    fn unbalanced_brace_is_a_parse_error() {
        let err = parse_program("fn f(){ x = 1; ").unwrap_err();
        assert!(err.message.contains("`}`"), "{}", err.message);
    }

    #[test]
    fn member_and_method_calls() {
        let p = parse_program("fn f(){ let a = math.one; let b = math.max(a, 2); }").unwrap();
        let StmtKind::Let { value, .. } = &p.functions[0].body.stmts[0].kind else { panic!() };
        assert!(matches!(&value.kind, ExprKind::Member { ns, name } if ns == "math" && name == "one"));
        let StmtKind::Let { value, .. } = &p.functions[0].body.stmts[1].kind else { panic!() };
        assert!(
            matches!(&value.kind, ExprKind::MethodCall { ns, name, args } if ns == "math" && name == "max" && args.len() == 2)
        );
    }

    #[test]
    fn body_lines_cover_interior() {
        let src = "fn f(a){\n  let x = a;\n  return x;\n}";
        let p = parse_program(src).unwrap();
        assert_eq!(p.functions[0].body_lines, (2, 3));
        assert_eq!(p.functions[0].span.start_line, 1);
        assert_eq!(p.functions[0].span.end_line, 4);
    }
}
