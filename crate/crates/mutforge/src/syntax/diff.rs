//! Tree differencing for the syntactic metrics.
//!
//! `tree_diff` computes an exact minimum edit script between two ordered
//! labeled trees under unit-cost insert/delete/update, via a memoized
//! rightmost-root forest decomposition. Node identity is (kind, label).
//! Deleting a node splices its children into its place; insertion is the
//! inverse. `Move` exists in the action vocabulary but the built-in diff
//! never emits it, so reported distances are insert/delete/update counts.

use super::token::Token;
use super::tree::{NodeId, NodeKind, SyntaxTree};
use std::collections::{BTreeMap, HashMap, HashSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EditAction {
    Insert { kind: NodeKind, label: Option<String> },
    Delete { kind: NodeKind, label: Option<String> },
    Update { kind: NodeKind, label: Option<String>, new_kind: NodeKind, new_label: Option<String> },
    Move { kind: NodeKind, label: Option<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EditScript {
    pub actions: Vec<EditAction>,
}

impl EditScript {
    pub fn distance(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

pub fn tree_diff(before: &SyntaxTree, after: &SyntaxTree) -> EditScript {
    if before.structural_eq(after) {
        return EditScript::default();
    }
    let mut solver = Solver::new(before, after);
    let roots1 = vec![before.root()];
    let roots2 = vec![after.root()];
    let distance = solver.solve(&roots1, &roots2);
    let mut mapping = Vec::new();
    solver.replay(&roots1, &roots2, &mut mapping);

    let mapped1: HashSet<NodeId> = mapping.iter().map(|&(a, _)| a).collect();
    let mapped2: HashSet<NodeId> = mapping.iter().map(|&(_, b)| b).collect();
    let mut actions = Vec::new();
    for id in before.preorder() {
        if !mapped1.contains(&id) {
            let n = before.node(id);
            actions.push(EditAction::Delete { kind: n.kind, label: n.label.clone() });
        }
    }
    for id in after.preorder() {
        if !mapped2.contains(&id) {
            let n = after.node(id);
            actions.push(EditAction::Insert { kind: n.kind, label: n.label.clone() });
        }
    }
    for &(a, b) in &mapping {
        let (na, nb) = (before.node(a), after.node(b));
        if na.kind != nb.kind || na.label != nb.label {
            actions.push(EditAction::Update {
                kind: na.kind,
                label: na.label.clone(),
                new_kind: nb.kind,
                new_label: nb.label.clone(),
            });
        }
    }
    debug_assert_eq!(actions.len() as u32, distance);
    EditScript { actions }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Choice {
    Done,
    Delete,
    Insert,
    Match,
}

struct Solver<'a> {
    before: &'a SyntaxTree,
    after: &'a SyntaxTree,
    hashes1: Vec<u64>,
    hashes2: Vec<u64>,
    memo: HashMap<(Vec<NodeId>, Vec<NodeId>), (u32, Choice)>,
}

impl<'a> Solver<'a> {
    fn new(before: &'a SyntaxTree, after: &'a SyntaxTree) -> Self {
        let hashes1 = (0..before.len()).map(|i| before.subtree_hash(i)).collect();
        let hashes2 = (0..after.len()).map(|i| after.subtree_hash(i)).collect();
        Solver { before, after, hashes1, hashes2, memo: HashMap::new() }
    }

    /// Subtrees already known equal contribute zero cost; skips the
    /// quadratic recursion on the unchanged bulk of near-identical trees.
    fn subtrees_equal(&self, a: NodeId, b: NodeId) -> bool {
        self.hashes1[a] == self.hashes2[b]
            && self.before.subtree(a).structural_eq(&self.after.subtree(b))
    }

    fn rename_cost(&self, a: NodeId, b: NodeId) -> u32 {
        let (na, nb) = (self.before.node(a), self.after.node(b));
        u32::from(na.kind != nb.kind || na.label != nb.label)
    }

    /// Forest with the rightmost root removed and its children spliced in.
    fn pop_splice(tree: &SyntaxTree, forest: &[NodeId]) -> Vec<NodeId> {
        let v = *forest.last().unwrap();
        let mut out = forest[..forest.len() - 1].to_vec();
        out.extend_from_slice(&tree.node(v).children);
        out
    }

    fn solve(&mut self, f1: &[NodeId], f2: &[NodeId]) -> u32 {
        if f1.is_empty() && f2.is_empty() {
            return 0;
        }
        let key = (f1.to_vec(), f2.to_vec());
        if let Some(&(d, _)) = self.memo.get(&key) {
            return d;
        }
        let mut best = u32::MAX;
        let mut choice = Choice::Done;
        if !f1.is_empty() && !f2.is_empty() {
            let v = *f1.last().unwrap();
            let w = *f2.last().unwrap();
            let sub = if self.subtrees_equal(v, w) {
                0
            } else {
                self.solve(&self.before.node(v).children.clone(), &self.after.node(w).children.clone())
            };
            let rest = self.solve(&f1[..f1.len() - 1], &f2[..f2.len() - 1]);
            let d = sub + rest + self.rename_cost(v, w);
            if d < best {
                best = d;
                choice = Choice::Match;
            }
        }
        if !f1.is_empty() {
            let d = 1 + self.solve(&Self::pop_splice(self.before, f1), f2);
            if d < best {
                best = d;
                choice = Choice::Delete;
            }
        }
        if !f2.is_empty() {
            let d = 1 + self.solve(f1, &Self::pop_splice(self.after, f2));
            if d < best {
                best = d;
                choice = Choice::Insert;
            }
        }
        self.memo.insert(key, (best, choice));
        best
    }

    fn replay(&mut self, f1: &[NodeId], f2: &[NodeId], mapping: &mut Vec<(NodeId, NodeId)>) {
        if f1.is_empty() && f2.is_empty() {
            return;
        }
        let key = (f1.to_vec(), f2.to_vec());
        let (_, choice) = self.memo[&key];
        match choice {
            Choice::Done => {}
            Choice::Match => {
                let v = *f1.last().unwrap();
                let w = *f2.last().unwrap();
                mapping.push((v, w));
                if self.subtrees_equal(v, w) {
                    // Equal subtrees were matched wholesale; pair their
                    // nodes positionally.
                    let pre1 = subtree_preorder(self.before, v);
                    let pre2 = subtree_preorder(self.after, w);
                    mapping.extend(pre1.into_iter().skip(1).zip(pre2.into_iter().skip(1)));
                } else {
                    let (c1, c2) =
                        (self.before.node(v).children.clone(), self.after.node(w).children.clone());
                    self.replay(&c1, &c2, mapping);
                }
                self.replay(&f1[..f1.len() - 1], &f2[..f2.len() - 1], mapping);
            }
            Choice::Delete => {
                self.replay(&Self::pop_splice(self.before, f1), f2, mapping);
            }
            Choice::Insert => {
                self.replay(f1, &Self::pop_splice(self.after, f2), mapping);
            }
        }
    }
}

fn subtree_preorder(tree: &SyntaxTree, root: NodeId) -> Vec<NodeId> {
    let mut out = Vec::new();
    let mut stack = vec![root];
    while let Some(id) = stack.pop() {
        out.push(id);
        for &c in tree.node(id).children.iter().rev() {
            stack.push(c);
        }
    }
    out
}

/// Kinds of nodes in `after` whose (kind, label, parent kind path) triple
/// does not occur anywhere in `before`. Counts node types, not positions,
/// so moved copies of existing shapes are not reported.
pub fn new_node_kinds(before: &SyntaxTree, after: &SyntaxTree) -> BTreeMap<NodeKind, usize> {
    let mut seen: HashSet<(NodeKind, Option<String>, Vec<NodeKind>)> = HashSet::new();
    for id in before.preorder() {
        let n = before.node(id);
        seen.insert((n.kind, n.label.clone(), before.parent_path(id)));
    }
    let mut out: BTreeMap<NodeKind, usize> = BTreeMap::new();
    for id in after.preorder() {
        let n = after.node(id);
        let triple = (n.kind, n.label.clone(), after.parent_path(id));
        if !seen.contains(&triple) {
            *out.entry(n.kind).or_insert(0) += 1;
        }
    }
    out
}

/// True iff `mutated` is a strict subsequence of `original`: the mutation
/// only removed tokens (possibly all of them). Any added or changed token
/// makes this false.
pub fn is_deletion(original: &[Token], mutated: &[Token]) -> bool {
    if mutated.len() >= original.len() {
        return false;
    }
    let mut it = original.iter();
    mutated.iter().all(|m| it.any(|o| o == m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::token::tokenize;
    use crate::syntax::tree::parse_mini;

    fn leaf(kind: NodeKind, label: &str) -> SyntaxTree {
        SyntaxTree::build(kind, Some(label), vec![])
    }

    #[test]
    fn identical_trees_have_distance_zero() {
        let a = parse_mini("fn f(){ return 1; }").unwrap();
        let b = parse_mini("fn f(){ return 1; }").unwrap();
        assert_eq!(tree_diff(&a, &b).distance(), 0);
    }

    #[test]
    fn single_literal_update_is_distance_one() {
        let a = leaf(NodeKind::Literal, "1");
        let b = leaf(NodeKind::Literal, "2");
        let script = tree_diff(&a, &b);
        assert_eq!(script.distance(), 1);
        assert!(matches!(script.actions[0], EditAction::Update { .. }));
    }

    #[test]
    fn single_label_edit_in_a_real_program() {
        let a = parse_mini("fn f(a,b){ return a + b; }").unwrap();
        let b = parse_mini("fn f(a,b){ return a - b; }").unwrap();
        assert_eq!(tree_diff(&a, &b).distance(), 1);
    }

    #[test]
    fn insert_and_delete_are_symmetric() {
        let small = SyntaxTree::build(NodeKind::Block, None, vec![leaf(NodeKind::Literal, "1")]);
        let big = SyntaxTree::build(
            NodeKind::Block,
            None,
            vec![leaf(NodeKind::Literal, "1"), leaf(NodeKind::Literal, "2")],
        );
        assert_eq!(tree_diff(&small, &big).distance(), tree_diff(&big, &small).distance());
        assert_eq!(tree_diff(&small, &big).distance(), 1);
    }

    #[test]
    fn distance_bounded_by_total_size() {
        let a = parse_mini("fn f(){ return 1; }").unwrap();
        let b = parse_mini("fn g(x,y){ while (x < y) { x = x + 1; } return x; }").unwrap();
        let d = tree_diff(&a, &b).distance();
        assert!(d <= a.len() + b.len());
        assert!(d > 0);
    }

    #[test]
    fn splice_semantics_reuse_children_of_deleted_node() {
        // Block(Unary(Lit)) vs Block(Lit): delete the unary wrapper only.
        let a = SyntaxTree::build(
            NodeKind::Block,
            None,
            vec![SyntaxTree::build(NodeKind::UnaryOperation, Some("-"), vec![leaf(NodeKind::Literal, "7")])],
        );
        let b = SyntaxTree::build(NodeKind::Block, None, vec![leaf(NodeKind::Literal, "7")]);
        let script = tree_diff(&a, &b);
        assert_eq!(script.distance(), 1);
        assert!(matches!(script.actions[0], EditAction::Delete { kind: NodeKind::UnaryOperation, .. }));
    }

    #[test]
    fn new_kinds_empty_for_identical_trees() {
        let t = parse_mini("fn f(){ return 1; }").unwrap();
        assert!(new_node_kinds(&t, &t).is_empty());
    }

    #[test]
    fn operator_update_introduces_new_binary_operation() {
        let a = parse_mini("fn f(a,b){ let x = a + b; }").unwrap();
        let b = parse_mini("fn f(a,b){ let x = a - b; }").unwrap();
        let kinds = new_node_kinds(&a, &b);
        assert_eq!(kinds.get(&NodeKind::BinaryOperation), Some(&1));
        assert_eq!(kinds.len(), 1);
    }

    #[test]
    fn literal_replacing_identifier_is_a_new_literal() {
        let a = parse_mini("fn f(x){ return x; }").unwrap();
        let b = parse_mini("fn f(x){ return true; }").unwrap();
        let kinds = new_node_kinds(&a, &b);
        assert_eq!(kinds.get(&NodeKind::Literal), Some(&1));
        assert_eq!(kinds.len(), 1);
    }

    #[test]
    fn deletion_detection_on_token_sequences() {
        let orig = tokenize("a = b + c ;").unwrap();
        assert!(is_deletion(&orig, &tokenize("").unwrap()));
        assert!(is_deletion(&orig, &tokenize("a = b ;").unwrap()));
        // Equal sequences are not a strict subsequence.
        assert!(!is_deletion(&orig, &tokenize("a = b + c ;").unwrap()));
        // Substitution is not a deletion.
        assert!(!is_deletion(&tokenize("a = b ;").unwrap(), &tokenize("a = c ;").unwrap()));
        // Additions are never deletions.
        assert!(!is_deletion(&tokenize("a = b ;").unwrap(), &tokenize("a = b + 1 ;").unwrap()));
    }
}
