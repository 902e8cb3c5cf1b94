//! Shared fixtures for the integration tests: a random program generator
//! that knows its own data flow, and brute-force reference computations
//! written independently of the library internals.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use repairscore::code_model::{NodeKind, SyntaxNode};

pub fn corpus() -> Vec<String> {
    include_str!("../fixtures/corpus.c")
        .split("//--\n")
        .map(str::to_string)
        .collect()
}

// ---------------------------------------------------------------------
// Program generator
// ---------------------------------------------------------------------

#[derive(Debug, Clone)]
pub enum Expr {
    Var(usize),
    Lit(i32),
    Bin(&'static str, Box<Expr>, Box<Expr>),
    Call(&'static str, Vec<Expr>),
}

#[derive(Debug, Clone)]
pub enum Stmt {
    Decl(usize, Option<Expr>),
    Assign(usize, Expr),
    OpAssign(usize, &'static str, Expr),
    Incr(usize),
    If(Expr, Vec<Stmt>, Option<Vec<Stmt>>),
    While(Expr, Vec<Stmt>),
    Return(Expr),
}

/// A generated program over variables `0..vars`, either a loose statement
/// list or a function whose first variable is a parameter.
#[derive(Debug, Clone)]
pub struct Program {
    pub vars: usize,
    pub function: bool,
    pub body: Vec<Stmt>,
}

const BIN_OPS: &[&str] = &["+", "-", "*", "<", "==", "&&"];
const OP_ASSIGN: &[&str] = &["+=", "-=", "*="];
const CALLEES: &[&str] = &["g", "h"];

pub fn default_names(vars: usize) -> Vec<String> {
    (0..vars).map(|i| ["a", "b", "c", "d"][i].to_string()).collect()
}

fn gen_expr(rng: &mut impl Rng, vars: usize, depth: u32) -> Expr {
    match rng.gen_range(0..if depth == 0 { 2 } else { 4 }) {
        0 => Expr::Var(rng.gen_range(0..vars)),
        1 => Expr::Lit(rng.gen_range(0..10)),
        2 => Expr::Bin(
            BIN_OPS.choose(rng).unwrap(),
            Box::new(gen_expr(rng, vars, depth - 1)),
            Box::new(gen_expr(rng, vars, depth - 1)),
        ),
        _ => {
            let n = rng.gen_range(0..3);
            Expr::Call(
                CALLEES.choose(rng).unwrap(),
                (0..n).map(|_| gen_expr(rng, vars, depth - 1)).collect(),
            )
        }
    }
}

fn gen_block(rng: &mut impl Rng, vars: usize, depth: u32, max_len: usize) -> Vec<Stmt> {
    let len = rng.gen_range(1..=max_len);
    (0..len).map(|_| gen_stmt(rng, vars, depth)).collect()
}

fn gen_stmt(rng: &mut impl Rng, vars: usize, depth: u32) -> Stmt {
    let v = rng.gen_range(0..vars);
    match rng.gen_range(0..if depth == 0 { 6 } else { 8 }) {
        0 => Stmt::Decl(v, rng.gen_bool(0.6).then(|| gen_expr(rng, vars, 1))),
        1 | 2 => Stmt::Assign(v, gen_expr(rng, vars, 2)),
        3 => Stmt::OpAssign(v, OP_ASSIGN.choose(rng).unwrap(), gen_expr(rng, vars, 1)),
        4 => Stmt::Incr(v),
        5 => Stmt::Return(gen_expr(rng, vars, 1)),
        6 => {
            let then = gen_block(rng, vars, depth - 1, 2);
            let otherwise = rng.gen_bool(0.5).then(|| gen_block(rng, vars, depth - 1, 2));
            Stmt::If(gen_expr(rng, vars, 1), then, otherwise)
        }
        _ => Stmt::While(gen_expr(rng, vars, 1), gen_block(rng, vars, depth - 1, 2)),
    }
}

impl Program {
    pub fn random(rng: &mut impl Rng) -> Program {
        let vars = rng.gen_range(1..=4);
        Program {
            vars,
            function: rng.gen_bool(0.5),
            body: gen_block(rng, vars, 2, 4),
        }
    }

    /// A random program of at most `max_tokens` tokens.
    pub fn random_bounded(rng: &mut impl Rng, max_tokens: usize) -> Program {
        loop {
            let p = Program::random(rng);
            let n = p.tokens(&default_names(p.vars)).len();
            if n <= max_tokens {
                return p;
            }
        }
    }

    pub fn tokens(&self, names: &[String]) -> Vec<String> {
        let mut out = Vec::new();
        if self.function {
            for t in ["int", "f", "(", "int", names[0].as_str(), ")", "{"] {
                out.push(t.to_string());
            }
        }
        for s in &self.body {
            emit_stmt(s, names, &mut out);
        }
        if self.function {
            out.push("}".into());
        }
        out
    }

    pub fn render(&self, names: &[String]) -> String {
        self.tokens(names).join(" ")
    }

    pub fn source(&self) -> String {
        self.render(&default_names(self.vars))
    }
}

fn emit_expr(e: &Expr, names: &[String], out: &mut Vec<String>) {
    match e {
        Expr::Var(v) => out.push(names[*v].clone()),
        Expr::Lit(n) => out.push(n.to_string()),
        Expr::Bin(op, l, r) => {
            out.push("(".into());
            emit_expr(l, names, out);
            out.push(op.to_string());
            emit_expr(r, names, out);
            out.push(")".into());
        }
        Expr::Call(f, args) => {
            out.push(f.to_string());
            out.push("(".into());
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push(",".into());
                }
                emit_expr(a, names, out);
            }
            out.push(")".into());
        }
    }
}

fn emit_block(b: &[Stmt], names: &[String], out: &mut Vec<String>) {
    out.push("{".into());
    for s in b {
        emit_stmt(s, names, out);
    }
    out.push("}".into());
}

fn emit_stmt(s: &Stmt, names: &[String], out: &mut Vec<String>) {
    let push = |t: &str, out: &mut Vec<String>| out.push(t.to_string());
    match s {
        Stmt::Decl(v, init) => {
            push("int", out);
            push(&names[*v], out);
            if let Some(e) = init {
                push("=", out);
                emit_expr(e, names, out);
            }
            push(";", out);
        }
        Stmt::Assign(v, e) => {
            push(&names[*v], out);
            push("=", out);
            emit_expr(e, names, out);
            push(";", out);
        }
        Stmt::OpAssign(v, op, e) => {
            push(&names[*v], out);
            push(op, out);
            emit_expr(e, names, out);
            push(";", out);
        }
        Stmt::Incr(v) => {
            push(&names[*v], out);
            push("++", out);
            push(";", out);
        }
        Stmt::If(c, then, otherwise) => {
            push("if", out);
            push("(", out);
            emit_expr(c, names, out);
            push(")", out);
            emit_block(then, names, out);
            if let Some(b) = otherwise {
                push("else", out);
                emit_block(b, names, out);
            }
        }
        Stmt::While(c, body) => {
            push("while", out);
            push("(", out);
            emit_expr(c, names, out);
            push(")", out);
            emit_block(body, names, out);
        }
        Stmt::Return(e) => {
            push("return", out);
            emit_expr(e, names, out);
            push(";", out);
        }
    }
}

// ---------------------------------------------------------------------
// Reaching-definitions interpreter
// ---------------------------------------------------------------------

/// Where a definition happened: `None` for the value a variable holds on
/// entry, otherwise the index of the defining statement.
type Def = Option<usize>;
type Reaching = BTreeMap<usize, BTreeSet<Def>>;

struct Interp {
    next_site: usize,
    /// (site, src, dst) with src and dst as variable ids
    edges: BTreeSet<(usize, usize, usize)>,
    /// statement identity -> site index, stable across loop passes
    sites: BTreeMap<*const Stmt, usize>,
}

fn expr_vars(e: &Expr, out: &mut BTreeSet<usize>) {
    match e {
        Expr::Var(v) => {
            out.insert(*v);
        }
        Expr::Lit(_) => {}
        Expr::Bin(_, l, r) => {
            expr_vars(l, out);
            expr_vars(r, out);
        }
        Expr::Call(_, args) => args.iter().for_each(|a| expr_vars(a, out)),
    }
}

fn join(a: &Reaching, b: &Reaching) -> Reaching {
    let mut out = a.clone();
    for (v, defs) in b {
        out.entry(*v).or_default().extend(defs.iter().copied());
    }
    out
}

impl Interp {
    fn site(&mut self, s: &Stmt) -> usize {
        let key = s as *const Stmt;
        if let Some(&site) = self.sites.get(&key) {
            return site;
        }
        let site = self.next_site;
        self.next_site += 1;
        self.sites.insert(key, site);
        site
    }

    /// `dst := f(reads)` at statement `s`: one edge per read variable with
    /// at least one reaching definition, then `dst` is redefined here.
    fn define(&mut self, s: &Stmt, dst: usize, reads: BTreeSet<usize>, state: &mut Reaching) {
        let site = self.site(s);
        for src in reads {
            if state.get(&src).is_some_and(|d| !d.is_empty()) {
                self.edges.insert((site, src, dst));
            }
        }
        state.insert(dst, BTreeSet::from([Some(site)]));
    }

    fn block(&mut self, b: &[Stmt], state: &mut Reaching) {
        for s in b {
            self.stmt(s, state);
        }
    }

    fn stmt(&mut self, s: &Stmt, state: &mut Reaching) {
        match s {
            Stmt::Decl(v, None) => {
                state.insert(*v, BTreeSet::new());
            }
            Stmt::Decl(v, Some(e)) | Stmt::Assign(v, e) => {
                let mut reads = BTreeSet::new();
                expr_vars(e, &mut reads);
                self.define(s, *v, reads, state);
            }
            Stmt::OpAssign(v, _, e) => {
                let mut reads = BTreeSet::from([*v]);
                expr_vars(e, &mut reads);
                self.define(s, *v, reads, state);
            }
            Stmt::Incr(v) => self.define(s, *v, BTreeSet::from([*v]), state),
            Stmt::Return(_) => {}
            Stmt::If(_, then, otherwise) => {
                let mut a = state.clone();
                self.block(then, &mut a);
                let mut b = state.clone();
                if let Some(o) = otherwise {
                    self.block(o, &mut b);
                }
                *state = join(&a, &b);
            }
            Stmt::While(_, body) => {
                for _ in 0..2 {
                    let mut iteration = state.clone();
                    self.block(body, &mut iteration);
                    *state = join(state, &iteration);
                }
            }
        }
    }
}

fn stmt_var_order(s: &Stmt, order: &mut Vec<usize>) {
    let see = |v: usize, order: &mut Vec<usize>| {
        if !order.contains(&v) {
            order.push(v);
        }
    };
    fn expr_order(e: &Expr, order: &mut Vec<usize>) {
        match e {
            Expr::Var(v) => {
                if !order.contains(v) {
                    order.push(*v);
                }
            }
            Expr::Lit(_) => {}
            Expr::Bin(_, l, r) => {
                expr_order(l, order);
                expr_order(r, order);
            }
            Expr::Call(_, args) => args.iter().for_each(|a| expr_order(a, order)),
        }
    }
    match s {
        Stmt::Decl(v, init) => {
            see(*v, order);
            if let Some(e) = init {
                expr_order(e, order);
            }
        }
        Stmt::Assign(v, e) | Stmt::OpAssign(v, _, e) => {
            see(*v, order);
            expr_order(e, order);
        }
        Stmt::Incr(v) => see(*v, order),
        Stmt::Return(e) => expr_order(e, order),
        Stmt::If(c, then, otherwise) => {
            expr_order(c, order);
            then.iter().for_each(|s| stmt_var_order(s, order));
            if let Some(o) = otherwise {
                o.iter().for_each(|s| stmt_var_order(s, order));
            }
        }
        Stmt::While(c, body) => {
            expr_order(c, order);
            body.iter().for_each(|s| stmt_var_order(s, order));
        }
    }
}

/// Expected `(slot_count, sorted edges)` for a generated program: every
/// variable starts with an entry definition, slots follow first textual
/// appearance.
pub fn reference_dfg(p: &Program) -> (usize, Vec<(usize, usize)>) {
    let mut order = Vec::new();
    if p.function {
        order.push(0);
    }
    p.body.iter().for_each(|s| stmt_var_order(s, &mut order));
    let slot: BTreeMap<usize, usize> = order.iter().enumerate().map(|(i, v)| (*v, i)).collect();

    let mut interp = Interp {
        next_site: 0,
        edges: BTreeSet::new(),
        sites: BTreeMap::new(),
    };
    let mut state: Reaching = (0..p.vars).map(|v| (v, BTreeSet::from([None]))).collect();
    interp.block(&p.body, &mut state);
    let mut edges: Vec<(usize, usize)> = interp
        .edges
        .iter()
        .map(|&(_, src, dst)| (slot[&src], slot[&dst]))
        .collect();
    edges.sort_unstable();
    (order.len(), edges)
}

// ---------------------------------------------------------------------
// Brute-force subtree matching
// ---------------------------------------------------------------------

fn label(n: &SyntaxNode) -> &str {
    match n.kind {
        NodeKind::Identifier => "ID",
        NodeKind::Literal => "LIT",
        _ => n.leaf_lexeme.as_deref().unwrap_or(""),
    }
}

/// Structural equality with identifiers and literals abstracted.
pub fn same_shape(a: &SyntaxNode, b: &SyntaxNode) -> bool {
    match (a.children.is_empty(), b.children.is_empty()) {
        (true, true) => label(a) == label(b),
        (false, false) => {
            a.kind == b.kind
                && a.children.len() == b.children.len()
                && a.children.iter().zip(&b.children).all(|(x, y)| same_shape(x, y))
        }
        _ => false,
    }
}

fn depth(n: &SyntaxNode) -> usize {
    1 + n.children.iter().map(depth).max().unwrap_or(0)
}

fn all_nodes<'a>(n: &'a SyntaxNode, out: &mut Vec<&'a SyntaxNode>) {
    out.push(n);
    for c in &n.children {
        all_nodes(c, out);
    }
}

/// Every subtree of height at least `min_height`.
pub fn enumerate_subtrees(root: &SyntaxNode, min_height: usize) -> Vec<&SyntaxNode> {
    let mut nodes = Vec::new();
    all_nodes(root, &mut nodes);
    nodes.retain(|n| depth(n) >= min_height);
    nodes
}

/// Matched oracle subtrees over all oracle subtrees, pairing each oracle
/// subtree with an unused equal candidate subtree.
pub fn brute_force_ast_similarity(cand: &SyntaxNode, oracle: &SyntaxNode, min_height: usize) -> f64 {
    let c = enumerate_subtrees(cand, min_height);
    let o = enumerate_subtrees(oracle, min_height);
    if o.is_empty() {
        return if c.is_empty() { 1.0 } else { 0.0 };
    }
    let mut used = vec![false; c.len()];
    let mut matched = 0usize;
    for s in &o {
        if let Some(i) = (0..c.len()).find(|&i| !used[i] && same_shape(s, c[i])) {
            used[i] = true;
            matched += 1;
        }
    }
    matched as f64 / o.len() as f64
}

// ---------------------------------------------------------------------
// Misc
// ---------------------------------------------------------------------

/// Consistent renaming onto names that never occur in generated programs.
pub fn fresh_names(vars: usize, rng: &mut impl Rng) -> Vec<String> {
    let mut pool: Vec<String> = ["len", "idx", "buf", "ptr", "cnt", "tmp", "val", "off"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    pool.shuffle(rng);
    pool.truncate(vars);
    pool
}

pub fn line_check(name: &str, pass: bool, detail: impl std::fmt::Display) -> bool {
    println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}
