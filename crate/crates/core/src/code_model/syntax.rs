use serde::Serialize;
use std::fmt;

/// Syntactic construct labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    TranslationUnit,
    FunctionDef,
    FunctionDecl,
    ParamList,
    Param,
    Ellipsis,
    Declaration,
    InitDeclarator,
    PointerDeclarator,
    ArrayDeclarator,
    Type,
    RecordBody,
    EnumBody,
    Enumerator,
    InitList,
    Compound,
    IfStmt,
    WhileStmt,
    ForStmt,
    ReturnStmt,
    BreakStmt,
    ContinueStmt,
    ExprStmt,
    EmptyStmt,
    EmptyClause,
    AssignExpr,
    CompoundAssignExpr,
    TernaryExpr,
    BinaryExpr,
    UnaryExpr,
    PostfixExpr,
    CallExpr,
    IndexExpr,
    MemberExpr,
    CastExpr,
    Identifier,
    Literal,
    Keyword,
    Operator,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        use NodeKind::*;
        match self {
            TranslationUnit => "translation-unit",
            FunctionDef => "function-def",
            FunctionDecl => "function-decl",
            ParamList => "param-list",
            Param => "param",
            Ellipsis => "ellipsis",
            Declaration => "declaration",
            InitDeclarator => "init-declarator",
            PointerDeclarator => "pointer-declarator",
            ArrayDeclarator => "array-declarator",
            Type => "type",
            RecordBody => "record-body",
            EnumBody => "enum-body",
            Enumerator => "enumerator",
            InitList => "init-list",
            Compound => "compound",
            IfStmt => "if-stmt",
            WhileStmt => "while-stmt",
            ForStmt => "for-stmt",
            ReturnStmt => "return-stmt",
            BreakStmt => "break-stmt",
            ContinueStmt => "continue-stmt",
            ExprStmt => "expr-stmt",
            EmptyStmt => "empty-stmt",
            EmptyClause => "empty-clause",
            AssignExpr => "assign-expr",
            CompoundAssignExpr => "compound-assign-expr",
            TernaryExpr => "ternary-expr",
            BinaryExpr => "binary-expr",
            UnaryExpr => "unary-expr",
            PostfixExpr => "postfix-expr",
            CallExpr => "call-expr",
            IndexExpr => "index-expr",
            MemberExpr => "member-expr",
            CastExpr => "cast-expr",
            Identifier => "identifier",
            Literal => "literal",
            Keyword => "keyword",
            Operator => "operator",
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Half-open range of token indices `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

/// A node of the syntax tree. Leaves carry a lexeme and no children;
/// interior nodes carry children and no lexeme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SyntaxNode {
    pub kind: NodeKind,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<SyntaxNode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leaf_lexeme: Option<String>,
    pub span: Span,
}

impl SyntaxNode {
    pub fn leaf(kind: NodeKind, lexeme: impl Into<String>, span: Span) -> Self {
        SyntaxNode {
            kind,
            children: Vec::new(),
            leaf_lexeme: Some(lexeme.into()),
            span,
        }
    }

    /// Interior node spanning its children. Callers that need a wider span
    /// (for delimiters) adjust it afterwards.
    pub fn branch(kind: NodeKind, children: Vec<SyntaxNode>) -> Self {
        debug_assert!(!children.is_empty());
        let start = children.iter().map(|c| c.span.start).min().unwrap_or(0);
        let end = children.iter().map(|c| c.span.end).max().unwrap_or(0);
        SyntaxNode {
            kind,
            children,
            leaf_lexeme: None,
            span: Span::new(start, end),
        }
    }

    /// Branch node when `children` is non-empty, otherwise a leaf carrying
    /// `empty_lexeme`.
    pub fn branch_or_leaf(
        kind: NodeKind,
        children: Vec<SyntaxNode>,
        empty_lexeme: &str,
        span: Span,
    ) -> Self {
        let mut node = if children.is_empty() {
            SyntaxNode::leaf(kind, empty_lexeme, span)
        } else {
            SyntaxNode::branch(kind, children)
        };
        node.span = span;
        node
    }

    pub fn with_span(mut self, span: Span) -> Self {
        self.span = span;
        self
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Leaf = 1.
    pub fn height(&self) -> usize {
        1 + self.children.iter().map(SyntaxNode::height).max().unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(SyntaxNode::node_count).sum::<usize>()
    }

    /// Pre-order traversal.
    pub fn walk(&self) -> impl Iterator<Item = &SyntaxNode> {
        let mut stack = vec![self];
        std::iter::from_fn(move || {
            let node = stack.pop()?;
            stack.extend(node.children.iter().rev());
            Some(node)
        })
    }

    pub fn find(&self, kind: NodeKind) -> Option<&SyntaxNode> {
        self.walk().find(|n| n.kind == kind)
    }

    /// Placeholder-abstracted text of a leaf: identifiers become `ID`,
    /// literals `LIT`, everything else keeps its lexeme.
    pub fn leaf_label(&self) -> &str {
        match self.kind {
            NodeKind::Identifier => "ID",
            NodeKind::Literal => "LIT",
            _ => self.leaf_lexeme.as_deref().unwrap_or(""),
        }
    }

    /// Canonical pre-order serialization: `(kind child1 child2 ...)`, with
    /// leaves rendered by [`SyntaxNode::leaf_label`].
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        self.write_canonical(&mut out);
        out
    }

    fn write_canonical(&self, out: &mut String) {
        if self.is_leaf() {
            out.push_str(self.leaf_label());
            return;
        }
        out.push('(');
        out.push_str(self.kind.as_str());
        for child in &self.children {
            out.push(' ');
            child.write_canonical(out);
        }
        out.push(')');
    }

    /// Indented s-expression with original lexemes, for debugging.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        self.write_pretty(0, &mut out);
        out
    }

    fn write_pretty(&self, depth: usize, out: &mut String) {
        for _ in 0..depth {
            out.push_str("  ");
        }
        out.push_str(self.kind.as_str());
        if let Some(lexeme) = &self.leaf_lexeme {
            out.push(' ');
            out.push_str(lexeme);
        }
        out.push('\n');
        for child in &self.children {
            child.write_pretty(depth + 1, out);
        }
    }
}

/// Parsed code fragment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SyntaxTree {
    pub root: SyntaxNode,
    /// Fraction of input tokens not skipped by error recovery.
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParseOutcome {
    pub tree: Option<SyntaxTree>,
    pub diagnostics: Vec<Diagnostic>,
    /// True only when no top-level construct parsed.
    pub failed: bool,
}
