//! Variable-level data-flow graphs.
//!
//! Variables are numbered by first appearance within their scope (each
//! function body is a scope; loose top-level statements share one). For a
//! definition `x = expr` (also `T x = expr`, `x op= expr`, `x++`), every
//! variable read by `expr` contributes an edge `v -> x`, provided some
//! definition of `v` reaches the read.
//!
//! Reaching definitions are tracked coarsely: a variable is readable unless
//! it was declared without an initializer and no definition has reached
//! it since. Parameters and never-declared names (globals) are readable
//! from entry. Branches join by union of reaching definitions; loop bodies
//! are scanned twice. Conditions and `return` values create no edges.

use super::syntax::{NodeKind, Span, SyntaxNode, SyntaxTree};
use serde::Serialize;
use std::collections::{BTreeSet, HashMap};

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct DataFlowGraph {
    pub slot_count: usize,
    /// Multiset of `(src, dst)` slots, sorted.
    pub edges: Vec<(usize, usize)>,
}

impl DataFlowGraph {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Size of the multiset edge intersection.
    pub fn intersection_size(&self, other: &DataFlowGraph) -> usize {
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < self.edges.len() && j < other.edges.len() {
            match self.edges[i].cmp(&other.edges[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }
}

/// Graph together with the variable name behind each slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NamedDataFlowGraph {
    pub graph: DataFlowGraph,
    pub variables: Vec<String>,
}

pub fn extract_dfg(tree: &SyntaxTree) -> DataFlowGraph {
    extract_named_dfg(tree).graph
}

pub fn extract_named_dfg(tree: &SyntaxTree) -> NamedDataFlowGraph {
    let mut builder = Builder::default();
    let loose_scope = 0;
    let mut next_scope = 1;
    // slot numbering first, in source order
    for item in top_level_items(&tree.root) {
        let scope = if item.kind == NodeKind::FunctionDef {
            next_scope += 1;
            next_scope - 1
        } else {
            loose_scope
        };
        builder.number_slots(item, scope);
    }
    let mut loose_state = FlowState::default();
    next_scope = 1;
    for item in top_level_items(&tree.root) {
        match item.kind {
            NodeKind::FunctionDef => {
                builder.scope = next_scope;
                next_scope += 1;
                let mut state = FlowState::default();
                builder.function(item, &mut state);
            }
            NodeKind::FunctionDecl => {}
            _ => {
                builder.scope = loose_scope;
                builder.statement(item, &mut loose_state);
            }
        }
    }
    let mut edges: Vec<(usize, usize)> = builder
        .emitted
        .iter()
        .map(|&(_, src, dst)| (src, dst))
        .collect();
    edges.sort_unstable();
    NamedDataFlowGraph {
        graph: DataFlowGraph {
            slot_count: builder.names.len(),
            edges,
        },
        variables: builder.names,
    }
}

fn top_level_items(root: &SyntaxNode) -> impl Iterator<Item = &SyntaxNode> {
    let items: &[SyntaxNode] = if root.kind == NodeKind::TranslationUnit {
        &root.children
    } else {
        std::slice::from_ref(root)
    };
    items.iter()
}

/// Slots that currently have no reaching definition.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct FlowState {
    undefined: BTreeSet<usize>,
}

impl FlowState {
    fn join(&self, other: &FlowState) -> FlowState {
        FlowState {
            undefined: self.undefined.intersection(&other.undefined).copied().collect(),
        }
    }
}

#[derive(Default)]
struct Builder {
    scope: usize,
    slots: HashMap<(usize, String), usize>,
    names: Vec<String>,
    /// (definition site, src, dst), deduplicated across loop passes.
    emitted: BTreeSet<(Span, usize, usize)>,
}

impl Builder {
    // ---- slot numbering ----

    fn number_slots(&mut self, node: &SyntaxNode, scope: usize) {
        self.scope = scope;
        self.visit_variables(node);
    }

    fn slot_of(&mut self, name: &str) -> usize {
        let key = (self.scope, name.to_string());
        if let Some(&slot) = self.slots.get(&key) {
            return slot;
        }
        let slot = self.names.len();
        self.names.push(name.to_string());
        self.slots.insert(key, slot);
        slot
    }

    /// Visits identifier leaves that name variables, in source order.
    fn visit_variables(&mut self, node: &SyntaxNode) {
        match node.kind {
            NodeKind::Identifier => {
                let name = node.leaf_lexeme.as_deref().unwrap_or_default();
                self.slot_of(name);
            }
            NodeKind::Type | NodeKind::FunctionDecl | NodeKind::Literal => {}
            NodeKind::FunctionDef => {
                // skip the return type and the function's own name
                for child in node.children.iter().skip(2) {
                    self.visit_variables(child);
                }
            }
            NodeKind::CallExpr => {
                let callee = &node.children[0];
                if callee.kind != NodeKind::Identifier {
                    self.visit_variables(callee);
                }
                for arg in &node.children[1..] {
                    self.visit_variables(arg);
                }
            }
            NodeKind::MemberExpr => self.visit_variables(&node.children[0]),
            _ => {
                for child in &node.children {
                    self.visit_variables(child);
                }
            }
        }
    }

    fn variable(&mut self, node: &SyntaxNode) -> usize {
        self.slot_of(node.leaf_lexeme.as_deref().unwrap_or_default())
    }

    // ---- flow ----

    fn function(&mut self, node: &SyntaxNode, state: &mut FlowState) {
        // [type, declarator, params, body]; parameters are defined on entry
        // so their slots only need to exist, which numbering ensured.
        if let Some(body) = node.children.get(3) {
            self.statement(body, state);
        }
    }

    fn emit(&mut self, site: Span, reads: &BTreeSet<usize>, target: usize, state: &FlowState) {
        for &src in reads {
            if !state.undefined.contains(&src) {
                self.emitted.insert((site, src, target));
            }
        }
    }

    fn statement(&mut self, node: &SyntaxNode, state: &mut FlowState) {
        match node.kind {
            NodeKind::Compound => {
                for child in &node.children {
                    self.statement(child, state);
                }
            }
            NodeKind::Declaration => {
                for decl in &node.children[1..] {
                    self.declarator(decl, state);
                }
            }
            NodeKind::ExprStmt | NodeKind::ReturnStmt => {
                for child in &node.children {
                    self.eval(child, state);
                }
            }
            NodeKind::IfStmt => {
                self.eval(&node.children[0], state);
                let mut then_state = state.clone();
                self.statement(&node.children[1], &mut then_state);
                let mut else_state = state.clone();
                if let Some(otherwise) = node.children.get(2) {
                    self.statement(otherwise, &mut else_state);
                }
                *state = then_state.join(&else_state);
            }
            NodeKind::WhileStmt => {
                let (cond, body) = (&node.children[0], &node.children[1]);
                self.looped(state, |b, s| {
                    b.eval(cond, s);
                    b.statement(body, s);
                });
            }
            NodeKind::ForStmt => {
                let [init, cond, step, body] = &node.children[..] else {
                    return;
                };
                if init.kind == NodeKind::Declaration {
                    self.statement(init, state);
                } else {
                    self.eval(init, state);
                }
                self.looped(state, |b, s| {
                    b.eval(cond, s);
                    b.statement(body, s);
                    b.eval(step, s);
                });
            }
            NodeKind::FunctionDef | NodeKind::FunctionDecl => {}
            _ => {}
        }
    }

    /// Two passes over a loop body, each joined with the state before it.
    fn looped(&mut self, state: &mut FlowState, mut pass: impl FnMut(&mut Self, &mut FlowState)) {
        for _ in 0..2 {
            let mut iteration = state.clone();
            pass(self, &mut iteration);
            *state = state.join(&iteration);
        }
    }

    fn declarator(&mut self, decl: &SyntaxNode, state: &mut FlowState) {
        match decl.kind {
            NodeKind::InitDeclarator => {
                let reads = self.eval(&decl.children[1], state);
                self.eval_array_sizes(&decl.children[0], state);
                if let Some(target) = self.declared_name(&decl.children[0]) {
                    self.emit(decl.span, &reads, target, state);
                    state.undefined.remove(&target);
                }
            }
            _ => {
                self.eval_array_sizes(decl, state);
                if let Some(target) = self.declared_name(decl) {
                    state.undefined.insert(target);
                }
            }
        }
    }

    fn declared_name(&mut self, decl: &SyntaxNode) -> Option<usize> {
        match decl.kind {
            NodeKind::Identifier => Some(self.variable(decl)),
            NodeKind::PointerDeclarator => self.declared_name(&decl.children[1]),
            NodeKind::ArrayDeclarator => self.declared_name(&decl.children[0]),
            _ => None,
        }
    }

    fn eval_array_sizes(&mut self, decl: &SyntaxNode, state: &mut FlowState) {
        match decl.kind {
            NodeKind::PointerDeclarator => self.eval_array_sizes(&decl.children[1], state),
            NodeKind::ArrayDeclarator => {
                self.eval_array_sizes(&decl.children[0], state);
                if let Some(size) = decl.children.get(1) {
                    self.eval(size, state);
                }
            }
            _ => {}
        }
    }

    /// Variable whose storage an lvalue writes: `x`, `x[i]`, `x.f`,
    /// `x->f`, `*x`.
    fn lvalue_base(&mut self, node: &SyntaxNode) -> Option<usize> {
        match node.kind {
            NodeKind::Identifier => Some(self.variable(node)),
            NodeKind::IndexExpr | NodeKind::MemberExpr => self.lvalue_base(&node.children[0]),
            NodeKind::UnaryExpr if node.children[0].leaf_lexeme.as_deref() == Some("*") => {
                self.lvalue_base(&node.children[1])
            }
            _ => None,
        }
    }

    /// Evaluates sub-expressions of an lvalue other than its base (index
    /// expressions), for their own definitions.
    fn eval_lvalue_parts(&mut self, node: &SyntaxNode, state: &mut FlowState) {
        match node.kind {
            NodeKind::IndexExpr => {
                self.eval_lvalue_parts(&node.children[0], state);
                self.eval(&node.children[1], state);
            }
            NodeKind::MemberExpr => self.eval_lvalue_parts(&node.children[0], state),
            NodeKind::UnaryExpr => self.eval_lvalue_parts(&node.children[1], state),
            _ => {}
        }
    }

    fn define(
        &mut self,
        site: Span,
        lhs: &SyntaxNode,
        mut reads: BTreeSet<usize>,
        read_target: bool,
        state: &mut FlowState,
    ) -> BTreeSet<usize> {
        self.eval_lvalue_parts(lhs, state);
        match self.lvalue_base(lhs) {
            Some(target) => {
                if read_target {
                    reads.insert(target);
                }
                self.emit(site, &reads, target, state);
                state.undefined.remove(&target);
                BTreeSet::from([target])
            }
            None => {
                reads.extend(self.eval(lhs, state));
                reads
            }
        }
    }

    /// Evaluates an expression and returns the variables whose values flow
    /// into its result.
    fn eval(&mut self, node: &SyntaxNode, state: &mut FlowState) -> BTreeSet<usize> {
        match node.kind {
            NodeKind::Identifier => BTreeSet::from([self.variable(node)]),
            NodeKind::Literal | NodeKind::EmptyClause => BTreeSet::new(),
            NodeKind::AssignExpr => {
                let reads = self.eval(&node.children[1], state);
                self.define(node.span, &node.children[0], reads, false, state)
            }
            NodeKind::CompoundAssignExpr => {
                let reads = self.eval(&node.children[2], state);
                self.define(node.span, &node.children[0], reads, true, state)
            }
            NodeKind::PostfixExpr => {
                self.define(node.span, &node.children[0], BTreeSet::new(), true, state)
            }
            NodeKind::UnaryExpr => {
                let op = node.children[0].leaf_lexeme.as_deref().unwrap_or_default();
                match op {
                    "++" | "--" => {
                        self.define(node.span, &node.children[1], BTreeSet::new(), true, state)
                    }
                    // operand is not evaluated
                    "sizeof" => BTreeSet::new(),
                    _ => self.eval(&node.children[1], state),
                }
            }
            NodeKind::TernaryExpr => {
                self.eval(&node.children[0], state);
                let mut reads = self.eval(&node.children[1], state);
                reads.extend(self.eval(&node.children[2], state));
                reads
            }
            NodeKind::CallExpr => {
                let mut reads = BTreeSet::new();
                let callee = &node.children[0];
                if callee.kind != NodeKind::Identifier {
                    reads.extend(self.eval(callee, state));
                }
                for arg in &node.children[1..] {
                    reads.extend(self.eval(arg, state));
                }
                reads
            }
            NodeKind::MemberExpr => self.eval(&node.children[0], state),
            NodeKind::CastExpr => self.eval(&node.children[1], state),
            NodeKind::Type | NodeKind::Operator | NodeKind::Keyword => BTreeSet::new(),
            _ => {
                let mut reads = BTreeSet::new();
                for child in &node.children {
                    reads.extend(self.eval(child, state));
                }
                reads
            }
        }
    }
}
