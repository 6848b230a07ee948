//! Generic labeled ordered tree with a closed node-kind taxonomy.
//!
//! Reports key off the kind names, so the enumeration and its `Display`
//! strings are stable.

use super::ast::*;
use super::parse::{parse_program, ParseError};
use serde::{Deserialize, Serialize};
use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum NodeKind {
    Program,
    FunctionDecl,
    Block,
    IfStmt,
    WhileStmt,
    ReturnStmt,
    Assignment,
    VarDecl,
    ExprStmt,
    MethodInvocation,
    MemberReference,
    BinaryOperation,
    UnaryOperation,
    Literal,
    Identifier,
    ArgumentList,
    EmptyStmt,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub kind: NodeKind,
    pub label: Option<String>,
    pub children: Vec<NodeId>,
    pub span: Span,
}

/// Ordered rooted tree stored as an arena; node 0 is the root.
#[derive(Debug, Clone)]
pub struct SyntaxTree {
    nodes: Vec<TreeNode>,
}

impl SyntaxTree {
    pub fn new(root_kind: NodeKind, label: Option<String>, span: Span) -> Self {
        SyntaxTree { nodes: vec![TreeNode { kind: root_kind, label, children: Vec::new(), span }] }
    }

    /// Build a tree from nested parts; test and oracle helper.
    pub fn build(kind: NodeKind, label: Option<&str>, children: Vec<SyntaxTree>) -> Self {
        let mut tree = SyntaxTree::new(kind, label.map(str::to_string), Span::point(1, 1));
        for child in children {
            tree.graft(0, &child, child.root());
        }
        tree
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn add_node(
        &mut self,
        parent: NodeId,
        kind: NodeKind,
        label: Option<String>,
        span: Span,
    ) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(TreeNode { kind, label, children: Vec::new(), span });
        self.nodes[parent].children.push(id);
        id
    }

    /// Copy of the subtree rooted at `id` as a standalone tree.
    pub fn subtree(&self, id: NodeId) -> SyntaxTree {
        let n = self.node(id);
        let mut out = SyntaxTree::new(n.kind, n.label.clone(), n.span);
        for &c in &n.children {
            out.graft(0, self, c);
        }
        out
    }

    /// Copy `other`'s subtree rooted at `src` under `parent`.
    pub fn graft(&mut self, parent: NodeId, other: &SyntaxTree, src: NodeId) -> NodeId {
        let n = other.node(src);
        let id = self.add_node(parent, n.kind, n.label.clone(), n.span);
        for &c in &n.children {
            self.graft(id, other, c);
        }
        id
    }

    pub fn preorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root()];
        while let Some(id) = stack.pop() {
            out.push(id);
            for &c in self.nodes[id].children.iter().rev() {
                stack.push(c);
            }
        }
        out
    }

    /// Size of the subtree rooted at `id`.
    pub fn subtree_size(&self, id: NodeId) -> usize {
        1 + self.nodes[id].children.iter().map(|&c| self.subtree_size(c)).sum::<usize>()
    }

    /// Structural equality: kinds, labels, and child order; spans ignored.
    pub fn structural_eq(&self, other: &SyntaxTree) -> bool {
        fn eq(a: &SyntaxTree, ai: NodeId, b: &SyntaxTree, bi: NodeId) -> bool {
            let (na, nb) = (a.node(ai), b.node(bi));
            na.kind == nb.kind
                && na.label == nb.label
                && na.children.len() == nb.children.len()
                && na.children.iter().zip(&nb.children).all(|(&x, &y)| eq(a, x, b, y))
        }
        eq(self, self.root(), other, other.root())
    }

    /// Order-sensitive hash over (kind, label, children) of a subtree.
    pub fn subtree_hash(&self, id: NodeId) -> u64 {
        let mut h = DefaultHasher::new();
        self.hash_into(id, &mut h);
        h.finish()
    }

    fn hash_into(&self, id: NodeId, h: &mut DefaultHasher) {
        let n = &self.nodes[id];
        n.kind.hash(h);
        n.label.hash(h);
        n.children.len().hash(h);
        for &c in &n.children {
            self.hash_into(c, h);
        }
    }

    /// Innermost node whose span contains the given (line, col) range.
    /// On span ties the shallower node wins (an argument list shares its
    /// call's span; the call is the meaningful origin).
    pub fn innermost_covering(&self, span: &Span) -> Option<NodeId> {
        let mut best: Option<NodeId> = None;
        for id in self.preorder() {
            if self.nodes[id].span.contains(span) {
                let better = match best {
                    None => true,
                    Some(b) => self.span_cells(id) < self.span_cells(b),
                };
                if better {
                    best = Some(id);
                }
            }
        }
        best
    }

    fn span_cells(&self, id: NodeId) -> u64 {
        let s = &self.nodes[id].span;
        // Coarse "area" of a span; enough to order nested spans.
        (u64::from(s.end_line - s.start_line)) << 32
            | u64::from(s.end_col.saturating_sub(s.start_col))
    }

    /// Kind sequence on the path from the root to `id`'s parent.
    pub fn parent_path(&self, id: NodeId) -> Vec<NodeKind> {
        let mut parents = vec![usize::MAX; self.nodes.len()];
        for (pid, n) in self.nodes.iter().enumerate() {
            for &c in &n.children {
                parents[c] = pid;
            }
        }
        let mut path = Vec::new();
        let mut cur = id;
        while parents[cur] != usize::MAX {
            cur = parents[cur];
            path.push(self.nodes[cur].kind);
        }
        path.reverse();
        path
    }
}

/// Parse MiniLang source into the generic tree.
pub fn parse_mini(source: &str) -> Result<SyntaxTree, ParseError> {
    Ok(lower_program(&parse_program(source)?))
}

pub fn lower_program(program: &Program) -> SyntaxTree {
    let span = program
        .functions
        .iter()
        .map(|f| f.span)
        .reduce(Span::merge)
        .unwrap_or(Span::point(1, 1));
    let mut tree = SyntaxTree::new(NodeKind::Program, None, span);
    for f in &program.functions {
        lower_function(&mut tree, 0, f);
    }
    tree
}

fn lower_function(tree: &mut SyntaxTree, parent: NodeId, f: &FunctionDecl) {
    let fid = tree.add_node(parent, NodeKind::FunctionDecl, Some(f.name.clone()), f.span);
    for p in &f.params {
        tree.add_node(fid, NodeKind::Identifier, Some(p.clone()), f.span);
    }
    lower_block(tree, fid, &f.body);
}

fn lower_block(tree: &mut SyntaxTree, parent: NodeId, block: &Block) {
    let bid = tree.add_node(parent, NodeKind::Block, None, block.span);
    for stmt in &block.stmts {
        lower_stmt(tree, bid, stmt);
    }
}

fn lower_stmt(tree: &mut SyntaxTree, parent: NodeId, stmt: &Stmt) {
    match &stmt.kind {
        StmtKind::Empty => {
            tree.add_node(parent, NodeKind::EmptyStmt, None, stmt.span);
        }
        StmtKind::Let { name, value } => {
            let id = tree.add_node(parent, NodeKind::VarDecl, Some(name.clone()), stmt.span);
            lower_expr(tree, id, value);
        }
        StmtKind::Assign { name, value } => {
            let id = tree.add_node(parent, NodeKind::Assignment, Some(name.clone()), stmt.span);
            lower_expr(tree, id, value);
        }
        StmtKind::If { cond, then_block, else_block } => {
            let id = tree.add_node(parent, NodeKind::IfStmt, None, stmt.span);
            lower_expr(tree, id, cond);
            lower_block(tree, id, then_block);
            if let Some(e) = else_block {
                lower_block(tree, id, e);
            }
        }
        StmtKind::While { cond, body } => {
            let id = tree.add_node(parent, NodeKind::WhileStmt, None, stmt.span);
            lower_expr(tree, id, cond);
            lower_block(tree, id, body);
        }
        StmtKind::Return { value } => {
            let id = tree.add_node(parent, NodeKind::ReturnStmt, None, stmt.span);
            if let Some(v) = value {
                lower_expr(tree, id, v);
            }
        }
        StmtKind::Expr { value } => {
            let id = tree.add_node(parent, NodeKind::ExprStmt, None, stmt.span);
            lower_expr(tree, id, value);
        }
    }
}

fn lower_expr(tree: &mut SyntaxTree, parent: NodeId, expr: &Expr) {
    match &expr.kind {
        ExprKind::Int(v) => {
            tree.add_node(parent, NodeKind::Literal, Some(v.to_string()), expr.span);
        }
        ExprKind::Bool(v) => {
            tree.add_node(parent, NodeKind::Literal, Some(v.to_string()), expr.span);
        }
        ExprKind::Str { raw, .. } => {
            tree.add_node(parent, NodeKind::Literal, Some(raw.clone()), expr.span);
        }
        ExprKind::Ident(name) => {
            tree.add_node(parent, NodeKind::Identifier, Some(name.clone()), expr.span);
        }
        ExprKind::Member { ns, name } => {
            tree.add_node(parent, NodeKind::MemberReference, Some(format!("{ns}.{name}")), expr.span);
        }
        ExprKind::Call { name, args } => {
            let id =
                tree.add_node(parent, NodeKind::MethodInvocation, Some(name.clone()), expr.span);
            let arg_id = tree.add_node(id, NodeKind::ArgumentList, None, expr.span);
            for a in args {
                lower_expr(tree, arg_id, a);
            }
        }
        ExprKind::MethodCall { ns, name, args } => {
            let id = tree.add_node(
                parent,
                NodeKind::MethodInvocation,
                Some(format!("{ns}.{name}")),
                expr.span,
            );
            let arg_id = tree.add_node(id, NodeKind::ArgumentList, None, expr.span);
            for a in args {
                lower_expr(tree, arg_id, a);
            }
        }
        ExprKind::Unary { op, operand } => {
            let id = tree.add_node(
                parent,
                NodeKind::UnaryOperation,
                Some(op.text().to_string()),
                expr.span,
            );
            lower_expr(tree, id, operand);
        }
        ExprKind::Binary { op, lhs, rhs, .. } => {
            let id = tree.add_node(
                parent,
                NodeKind::BinaryOperation,
                Some(op.text().to_string()),
                expr.span,
            );
            lower_expr(tree, id, lhs);
            lower_expr(tree, id, rhs);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds_preorder(tree: &SyntaxTree) -> Vec<NodeKind> {
        tree.preorder().into_iter().map(|id| tree.node(id).kind).collect()
    }

    #[test]
    fn lowers_return_literal() {
        let t = parse_mini("fn f(){ return 1; }").unwrap();
        assert_eq!(
            kinds_preorder(&t),
            vec![
                NodeKind::Program,
                NodeKind::FunctionDecl,
                NodeKind::Block,
                NodeKind::ReturnStmt,
                NodeKind::Literal,
            ]
        );
    }

    #[test]
    fn call_gets_argument_list() {
        let t = parse_mini("fn f(){ x = g(1,2); }").unwrap();
        let kinds = kinds_preorder(&t);
        let args_at = kinds.iter().position(|k| *k == NodeKind::ArgumentList).unwrap();
        assert_eq!(kinds[args_at - 1], NodeKind::MethodInvocation);
        assert_eq!(&kinds[args_at + 1..args_at + 3], &[NodeKind::Literal, NodeKind::Literal]);
    }

    #[test]
    fn if_condition_is_binary_operation() {
        let t = parse_mini("fn f(a,b){ if (a < b) { } }").unwrap();
        let kinds = kinds_preorder(&t);
        let if_at = kinds.iter().position(|k| *k == NodeKind::IfStmt).unwrap();
        assert_eq!(kinds[if_at + 1], NodeKind::BinaryOperation);
    }

    #[test]
    fn structural_eq_ignores_spans() {
        let a = parse_mini("fn f(){ return 1; }").unwrap();
        let b = parse_mini("fn f(){\n  return 1;\n}").unwrap();
        assert!(a.structural_eq(&b));
        assert_eq!(a.subtree_hash(0), b.subtree_hash(0));
        let c = parse_mini("fn f(){ return 2; }").unwrap();
        assert!(!a.structural_eq(&c));
    }

    #[test]
    fn innermost_node_for_a_call_site() {
        let src = "fn f(a){\n  let x = g(a);\n}\nfn g(v){ return v; }";
        let t = parse_mini(src).unwrap();
        // Columns of `g(a)` on line 2.
        let span = Span { start_line: 2, start_col: 11, end_line: 2, end_col: 12 };
        let id = t.innermost_covering(&span).unwrap();
        assert_eq!(t.node(id).kind, NodeKind::MethodInvocation);
    }

    #[test]
    fn parent_path_tracks_kinds() {
        let t = parse_mini("fn f(){ return 1; }").unwrap();
        let lit = t.preorder().into_iter().find(|&id| t.node(id).kind == NodeKind::Literal).unwrap();
        assert_eq!(
            t.parent_path(lit),
            vec![NodeKind::Program, NodeKind::FunctionDecl, NodeKind::Block, NodeKind::ReturnStmt]
        );
    }
}
