//! Subtree decomposition of syntax trees.
//!
//! Every node whose subtree is tall enough contributes its canonical,
//! placeholder-abstracted serialization to a multiset. Two routes exist:
//! [`extract_subtrees`] materializes the strings, while [`SubtreeInterner`]
//! hash-conses structurally equal subtrees to integer ids so two trees can
//! be intersected without building strings.

use super::syntax::{NodeKind, SyntaxNode, SyntaxTree};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};

/// Multiset of canonical subtree strings.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SubtreeBag {
    counts: BTreeMap<String, usize>,
    total: usize,
}

impl SubtreeBag {
    pub fn insert(&mut self, canonical: String) {
        *self.counts.entry(canonical).or_default() += 1;
        self.total += 1;
    }

    /// Size counting multiplicity.
    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn count(&self, canonical: &str) -> usize {
        self.counts.get(canonical).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.counts.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Size of the multiset intersection (minimum multiplicities).
    pub fn intersection_size(&self, other: &SubtreeBag) -> usize {
        self.counts
            .iter()
            .map(|(k, &n)| n.min(other.count(k)))
            .sum()
    }
}

/// Canonical strings of every node with height ≥ `min_height`.
pub fn extract_subtrees(tree: &SyntaxTree, min_height: usize) -> SubtreeBag {
    let mut bag = SubtreeBag::default();
    collect(&tree.root, min_height.max(1), &mut bag);
    bag
}

/// Returns (canonical, height) of `node`, adding qualifying subtrees.
fn collect(node: &SyntaxNode, min_height: usize, bag: &mut SubtreeBag) -> (String, usize) {
    let (text, height) = if node.is_leaf() {
        (node.leaf_label().to_string(), 1)
    } else {
        let mut text = String::from("(");
        text.push_str(node.kind.as_str());
        let mut height = 0;
        for child in &node.children {
            let (child_text, child_height) = collect(child, min_height, bag);
            text.push(' ');
            text.push_str(&child_text);
            height = height.max(child_height);
        }
        text.push(')');
        (text, height + 1)
    };
    if height >= min_height {
        bag.insert(text.clone());
    }
    (text, height)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum ShapeKey {
    Leaf(String),
    Branch(NodeKind, Vec<u32>),
}

/// Assigns one id per distinct subtree shape, shared across every tree
/// passed through the same interner.
#[derive(Debug, Default)]
pub struct SubtreeInterner {
    ids: HashMap<ShapeKey, u32>,
}

impl SubtreeInterner {
    pub fn new() -> Self {
        Self::default()
    }

    /// Counts subtree ids of height ≥ `min_height` in `tree`.
    pub fn bag(&mut self, tree: &SyntaxTree, min_height: usize) -> HashMap<u32, usize> {
        let mut counts = HashMap::new();
        self.visit(&tree.root, min_height.max(1), &mut counts);
        counts
    }

    fn visit(
        &mut self,
        node: &SyntaxNode,
        min_height: usize,
        counts: &mut HashMap<u32, usize>,
    ) -> (u32, usize) {
        let (key, height) = if node.is_leaf() {
            (ShapeKey::Leaf(node.leaf_label().to_string()), 1)
        } else {
            let mut ids = Vec::with_capacity(node.children.len());
            let mut height = 0;
            for child in &node.children {
                let (id, h) = self.visit(child, min_height, counts);
                ids.push(id);
                height = height.max(h);
            }
            (ShapeKey::Branch(node.kind, ids), height + 1)
        };
        let next = self.ids.len() as u32;
        let id = *self.ids.entry(key).or_insert(next);
        if height >= min_height {
            *counts.entry(id).or_default() += 1;
        }
        (id, height)
    }
}

/// Size of the multiset intersection of two id bags.
pub fn intersection_size(a: &HashMap<u32, usize>, b: &HashMap<u32, usize>) -> usize {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small
        .iter()
        .map(|(id, &n)| n.min(large.get(id).copied().unwrap_or(0)))
        .sum()
}
