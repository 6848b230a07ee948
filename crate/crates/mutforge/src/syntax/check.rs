//! MiniLang static checks: declared-before-use variables, known function
//! names, call arity, and int/bool type discipline via unification.
//!
//! Diagnostic `kind` strings are stable; the compile-error taxonomy keys
//! off them.

use super::ast::*;
use super::builtins;
use super::parse::parse_program;
use std::collections::{BTreeMap, HashMap};

pub const KIND_LEX: &str = "lex-error";
pub const KIND_PARSE: &str = "parse-error";
pub const KIND_UNKNOWN_FUNCTION: &str = "unknown-function";
pub const KIND_UNKNOWN_MEMBER: &str = "unknown-member";
pub const KIND_ARITY: &str = "arity-mismatch";
pub const KIND_UNKNOWN_VARIABLE: &str = "unknown-variable";
pub const KIND_TYPE: &str = "type-error";
pub const KIND_DUPLICATE: &str = "duplicate-definition";
pub const KIND_MISSING_RETURN: &str = "missing-return";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileDiagnostic {
    pub file: String,
    pub kind: String,
    pub message: String,
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ty {
    Int,
    Bool,
    Str,
    Unit,
}

impl Ty {
    fn name(self) -> &'static str {
        match self {
            Ty::Int => "Int",
            Ty::Bool => "Bool",
            Ty::Str => "Str",
            Ty::Unit => "Unit",
        }
    }
}

#[derive(Debug)]
pub struct ProjectCheck {
    pub diagnostics: Vec<FileDiagnostic>,
    /// Parsed programs, present for every file that lexed and parsed.
    pub programs: BTreeMap<String, Program>,
    /// Resolved concrete type per expression id, per file. Expressions whose
    /// type stayed unconstrained are absent.
    pub types: BTreeMap<String, HashMap<ExprId, Ty>>,
}

impl ProjectCheck {
    pub fn ok(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

/// Parse and check a set of source files as one program. Functions are
/// visible across files. If any file fails to lex or parse, only those
/// diagnostics are reported (semantic checks would cascade).
pub fn check_project(files: &[(String, String)]) -> ProjectCheck {
    let mut diagnostics = Vec::new();
    let mut programs = BTreeMap::new();
    for (name, source) in files {
        match parse_program(source) {
            Ok(p) => {
                programs.insert(name.clone(), p);
            }
            Err(e) => {
                let kind =
                    if e.message.contains("unterminated") || e.message.contains("unexpected character")
                    {
                        KIND_LEX
                    } else {
                        KIND_PARSE
                    };
                diagnostics.push(FileDiagnostic {
                    file: name.clone(),
                    kind: kind.into(),
                    message: e.message,
                    line: e.line,
                    col: e.col,
                });
            }
        }
    }
    if !diagnostics.is_empty() {
        return ProjectCheck { diagnostics, programs, types: BTreeMap::new() };
    }
    let ordered: Vec<(&String, &Program)> =
        files.iter().map(|(n, _)| (n, &programs[n])).collect();
    let mut checker = Checker::new();
    checker.run(&ordered);
    ProjectCheck { diagnostics: checker.diags, programs, types: checker.resolved_types }
}

/// Convenience wrapper for a single source file.
pub fn check_source(name: &str, source: &str) -> ProjectCheck {
    check_project(&[(name.to_string(), source.to_string())])
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Term {
    Known(Ty),
    Var(u32),
}

struct FnSig {
    params: Vec<u32>,
    ret: u32,
    has_valued_return: bool,
}

struct Checker {
    diags: Vec<FileDiagnostic>,
    parent: Vec<u32>,
    binding: Vec<Option<Ty>>,
    fns: HashMap<String, FnSig>,
    resolved_types: BTreeMap<String, HashMap<ExprId, Ty>>,
}

impl Checker {
    fn new() -> Self {
        Checker {
            diags: Vec::new(),
            parent: Vec::new(),
            binding: Vec::new(),
            fns: HashMap::new(),
            resolved_types: BTreeMap::new(),
        }
    }

    fn fresh(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        self.binding.push(None);
        id
    }

    fn find(&mut self, v: u32) -> u32 {
        let p = self.parent[v as usize];
        if p == v {
            return v;
        }
        let root = self.find(p);
        self.parent[v as usize] = root;
        root
    }

    fn resolve(&mut self, t: Term) -> Option<Ty> {
        match t {
            Term::Known(ty) => Some(ty),
            Term::Var(v) => {
                let r = self.find(v);
                self.binding[r as usize]
            }
        }
    }

    fn unify(&mut self, a: Term, b: Term, file: &str, span: Span, context: &str) {
        let ra = self.resolve(a);
        let rb = self.resolve(b);
        match (ra, rb) {
            (Some(x), Some(y)) => {
                if x != y {
                    self.diag(
                        file,
                        KIND_TYPE,
                        format!("type mismatch in {context}: {} vs {}", x.name(), y.name()),
                        span,
                    );
                }
            }
            (Some(x), None) => self.bind(b, x),
            (None, Some(y)) => self.bind(a, y),
            (None, None) => {
                if let (Term::Var(va), Term::Var(vb)) = (a, b) {
                    let (ra, rb) = (self.find(va), self.find(vb));
                    if ra != rb {
                        self.parent[rb as usize] = ra;
                    }
                }
            }
        }
    }

    fn bind(&mut self, t: Term, ty: Ty) {
        if let Term::Var(v) = t {
            let r = self.find(v);
            self.binding[r as usize] = Some(ty);
        }
    }

    fn diag(&mut self, file: &str, kind: &str, message: String, span: Span) {
        self.diags.push(FileDiagnostic {
            file: file.to_string(),
            kind: kind.to_string(),
            message,
            line: span.start_line,
            col: span.start_col,
        });
    }

    fn run(&mut self, files: &[(&String, &Program)]) {
        // Pass 1: the global function table.
        for (file, program) in files {
            for f in &program.functions {
                if self.fns.contains_key(&f.name) {
                    self.diag(
                        file,
                        KIND_DUPLICATE,
                        format!("function `{}` is defined more than once", f.name),
                        f.span,
                    );
                    continue;
                }
                let params = (0..f.params.len()).map(|_| self.fresh()).collect();
                let ret = self.fresh();
                let has_valued_return = function_has_valued_return(&f.body);
                if !has_valued_return {
                    self.bind(Term::Var(ret), Ty::Unit);
                }
                self.fns.insert(f.name.clone(), FnSig { params, ret, has_valued_return });
            }
        }
        // Pass 2: bodies.
        let mut expr_terms: Vec<(String, ExprId, Term)> = Vec::new();
        for (file, program) in files {
            for f in &program.functions {
                self.check_function(file, f, &mut expr_terms);
            }
        }
        // Resolve recorded expression terms into the public type map.
        for (file, id, term) in expr_terms {
            if let Some(ty) = self.resolve(term) {
                self.resolved_types.entry(file).or_default().insert(id, ty);
            }
        }
    }

    fn check_function(
        &mut self,
        file: &str,
        f: &FunctionDecl,
        expr_terms: &mut Vec<(String, ExprId, Term)>,
    ) {
        let sig_params: Vec<u32> = match self.fns.get(&f.name) {
            Some(sig) => sig.params.clone(),
            None => return, // duplicate definition; first one owns the signature
        };
        if sig_params.len() != f.params.len() {
            return; // signature belongs to the first definition
        }
        let mut scopes: Vec<HashMap<String, Term>> = vec![HashMap::new()];
        let mut duplicate_param = false;
        for (name, var) in f.params.iter().zip(&sig_params) {
            if scopes[0].insert(name.clone(), Term::Var(*var)).is_some() {
                duplicate_param = true;
                self.diag(
                    file,
                    KIND_DUPLICATE,
                    format!("parameter `{name}` is declared more than once"),
                    f.span,
                );
            }
        }
        if duplicate_param {
            return;
        }
        let ret = self.fns[&f.name].ret;
        self.check_block(file, &f.body, &mut scopes, ret, expr_terms);
        let sig = &self.fns[&f.name];
        if sig.has_valued_return && !block_guarantees_return(&f.body) {
            self.diag(
                file,
                KIND_MISSING_RETURN,
                format!("function `{}` does not return on every path", f.name),
                f.span,
            );
        }
    }

    fn check_block(
        &mut self,
        file: &str,
        block: &Block,
        scopes: &mut Vec<HashMap<String, Term>>,
        ret: u32,
        expr_terms: &mut Vec<(String, ExprId, Term)>,
    ) {
        scopes.push(HashMap::new());
        for stmt in &block.stmts {
            self.check_stmt(file, stmt, scopes, ret, expr_terms);
        }
        scopes.pop();
    }

    fn check_stmt(
        &mut self,
        file: &str,
        stmt: &Stmt,
        scopes: &mut Vec<HashMap<String, Term>>,
        ret: u32,
        expr_terms: &mut Vec<(String, ExprId, Term)>,
    ) {
        match &stmt.kind {
            StmtKind::Empty => {}
            StmtKind::Let { name, value } => {
                let t = self.check_expr(file, value, scopes, expr_terms);
                let current = scopes.last_mut().unwrap();
                if current.contains_key(name) {
                    self.diag(
                        file,
                        KIND_DUPLICATE,
                        format!("variable `{name}` is declared more than once in this scope"),
                        stmt.span,
                    );
                } else {
                    current.insert(name.clone(), t);
                }
            }
            StmtKind::Assign { name, value } => {
                let t = self.check_expr(file, value, scopes, expr_terms);
                match lookup(scopes, name) {
                    Some(var_t) => {
                        self.unify(var_t, t, file, stmt.span, &format!("assignment to `{name}`"))
                    }
                    None => self.diag(
                        file,
                        KIND_UNKNOWN_VARIABLE,
                        format!("assignment to undeclared variable `{name}`"),
                        stmt.span,
                    ),
                }
            }
            StmtKind::If { cond, then_block, else_block } => {
                let t = self.check_expr(file, cond, scopes, expr_terms);
                self.unify(t, Term::Known(Ty::Bool), file, cond.span, "if condition");
                self.check_block(file, then_block, scopes, ret, expr_terms);
                if let Some(e) = else_block {
                    self.check_block(file, e, scopes, ret, expr_terms);
                }
            }
            StmtKind::While { cond, body } => {
                let t = self.check_expr(file, cond, scopes, expr_terms);
                self.unify(t, Term::Known(Ty::Bool), file, cond.span, "while condition");
                self.check_block(file, body, scopes, ret, expr_terms);
            }
            StmtKind::Return { value } => match value {
                Some(e) => {
                    let t = self.check_expr(file, e, scopes, expr_terms);
                    self.unify(Term::Var(ret), t, file, e.span, "return value");
                }
                None => self.unify(Term::Var(ret), Term::Known(Ty::Unit), file, stmt.span, "return"),
            },
            StmtKind::Expr { value } => {
                self.check_expr(file, value, scopes, expr_terms);
            }
        }
    }

    fn check_expr(
        &mut self,
        file: &str,
        expr: &Expr,
        scopes: &mut Vec<HashMap<String, Term>>,
        expr_terms: &mut Vec<(String, ExprId, Term)>,
    ) -> Term {
        let term = match &expr.kind {
            ExprKind::Int(_) => Term::Known(Ty::Int),
            ExprKind::Bool(_) => Term::Known(Ty::Bool),
            ExprKind::Str { .. } => Term::Known(Ty::Str),
            ExprKind::Ident(name) => match lookup(scopes, name) {
                Some(t) => t,
                None => {
                    self.diag(
                        file,
                        KIND_UNKNOWN_VARIABLE,
                        format!("use of undeclared variable `{name}`"),
                        expr.span,
                    );
                    Term::Var(self.fresh())
                }
            },
            ExprKind::Member { ns, name } => self.check_member(file, expr, ns, name, scopes),
            ExprKind::Call { name, args } => {
                let arg_terms: Vec<Term> =
                    args.iter().map(|a| self.check_expr(file, a, scopes, expr_terms)).collect();
                match self.fns.get(name) {
                    Some(sig) => {
                        let params = sig.params.clone();
                        let ret = sig.ret;
                        if params.len() != args.len() {
                            self.diag(
                                file,
                                KIND_ARITY,
                                format!(
                                    "`{name}` expects {} argument(s), got {}",
                                    params.len(),
                                    args.len()
                                ),
                                expr.span,
                            );
                        } else {
                            for (arg, (param, term)) in
                                args.iter().zip(params.iter().zip(&arg_terms))
                            {
                                self.unify(
                                    Term::Var(*param),
                                    *term,
                                    file,
                                    arg.span,
                                    &format!("argument to `{name}`"),
                                );
                            }
                        }
                        Term::Var(ret)
                    }
                    None => {
                        self.diag(
                            file,
                            KIND_UNKNOWN_FUNCTION,
                            format!("call to unknown function `{name}`"),
                            expr.span,
                        );
                        Term::Var(self.fresh())
                    }
                }
            }
            ExprKind::MethodCall { ns, name, args } => {
                let arg_terms: Vec<Term> =
                    args.iter().map(|a| self.check_expr(file, a, scopes, expr_terms)).collect();
                if lookup(scopes, ns).is_some() {
                    self.diag(
                        file,
                        KIND_TYPE,
                        format!("`{ns}` is a value; values have no methods"),
                        expr.span,
                    );
                    Term::Var(self.fresh())
                } else if ns != builtins::NAMESPACE {
                    self.diag(
                        file,
                        KIND_UNKNOWN_VARIABLE,
                        format!("unknown namespace `{ns}`"),
                        expr.span,
                    );
                    Term::Var(self.fresh())
                } else {
                    match builtins::method_arity(name) {
                        Some(arity) => {
                            if arity != args.len() {
                                self.diag(
                                    file,
                                    KIND_ARITY,
                                    format!(
                                        "`{ns}.{name}` expects {arity} argument(s), got {}",
                                        args.len()
                                    ),
                                    expr.span,
                                );
                            } else {
                                for (arg, term) in args.iter().zip(&arg_terms) {
                                    self.unify(
                                        *term,
                                        Term::Known(Ty::Int),
                                        file,
                                        arg.span,
                                        &format!("argument to `{ns}.{name}`"),
                                    );
                                }
                            }
                            Term::Known(Ty::Int)
                        }
                        None => {
                            self.diag(
                                file,
                                KIND_UNKNOWN_MEMBER,
                                format!("unknown method `{name}` in namespace `{ns}`"),
                                expr.span,
                            );
                            Term::Var(self.fresh())
                        }
                    }
                }
            }
            ExprKind::Unary { op, operand } => {
                let t = self.check_expr(file, operand, scopes, expr_terms);
                let expected = match op {
                    UnaryOp::Neg => Ty::Int,
                    UnaryOp::Not => Ty::Bool,
                };
                self.unify(
                    t,
                    Term::Known(expected),
                    file,
                    operand.span,
                    &format!("operand of `{}`", op.text()),
                );
                Term::Known(expected)
            }
            ExprKind::Binary { op, lhs, rhs, .. } => {
                let lt = self.check_expr(file, lhs, scopes, expr_terms);
                let rt = self.check_expr(file, rhs, scopes, expr_terms);
                let ctx = format!("operands of `{}`", op.text());
                match op {
                    BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem => {
                        self.unify(lt, Term::Known(Ty::Int), file, lhs.span, &ctx);
                        self.unify(rt, Term::Known(Ty::Int), file, rhs.span, &ctx);
                        Term::Known(Ty::Int)
                    }
                    BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => {
                        self.unify(lt, Term::Known(Ty::Int), file, lhs.span, &ctx);
                        self.unify(rt, Term::Known(Ty::Int), file, rhs.span, &ctx);
                        Term::Known(Ty::Bool)
                    }
                    BinaryOp::Eq | BinaryOp::Ne => {
                        self.unify(lt, rt, file, expr.span, &ctx);
                        Term::Known(Ty::Bool)
                    }
                    BinaryOp::And | BinaryOp::Or => {
                        self.unify(lt, Term::Known(Ty::Bool), file, lhs.span, &ctx);
                        self.unify(rt, Term::Known(Ty::Bool), file, rhs.span, &ctx);
                        Term::Known(Ty::Bool)
                    }
                }
            }
        };
        expr_terms.push((file.to_string(), expr.id, term));
        term
    }

    fn check_member(
        &mut self,
        file: &str,
        expr: &Expr,
        ns: &str,
        name: &str,
        scopes: &mut Vec<HashMap<String, Term>>,
    ) -> Term {
        if lookup(scopes, ns).is_some() {
            self.diag(
                file,
                KIND_TYPE,
                format!("`{ns}` is a value; values have no members"),
                expr.span,
            );
            return Term::Var(self.fresh());
        }
        if ns != builtins::NAMESPACE {
            self.diag(
                file,
                KIND_UNKNOWN_VARIABLE,
                format!("unknown namespace `{ns}`"),
                expr.span,
            );
            return Term::Var(self.fresh());
        }
        if builtins::member_value(name).is_some() {
            Term::Known(Ty::Int)
        } else {
            self.diag(
                file,
                KIND_UNKNOWN_MEMBER,
                format!("unknown member `{name}` in namespace `{ns}`"),
                expr.span,
            );
            Term::Var(self.fresh())
        }
    }
}

fn lookup(scopes: &[HashMap<String, Term>], name: &str) -> Option<Term> {
    scopes.iter().rev().find_map(|s| s.get(name).copied())
}

fn function_has_valued_return(block: &Block) -> bool {
    block.stmts.iter().any(|s| stmt_has_valued_return(s))
}

fn stmt_has_valued_return(stmt: &Stmt) -> bool {
    match &stmt.kind {
        StmtKind::Return { value } => value.is_some(),
        StmtKind::If { then_block, else_block, .. } => {
            function_has_valued_return(then_block)
                || else_block.as_ref().is_some_and(function_has_valued_return)
        }
        StmtKind::While { body, .. } => function_has_valued_return(body),
        _ => false,
    }
}

/// Conservative all-paths-return analysis: a block guarantees a return if
/// some statement does; `while` never counts (it may not run).
fn block_guarantees_return(block: &Block) -> bool {
    block.stmts.iter().any(stmt_guarantees_return)
}

fn stmt_guarantees_return(stmt: &Stmt) -> bool {
    match &stmt.kind {
        StmtKind::Return { .. } => true,
        StmtKind::If { then_block, else_block, .. } => match else_block {
            Some(e) => block_guarantees_return(then_block) && block_guarantees_return(e),
            None => false,
        },
        _ => false,
    }
}
