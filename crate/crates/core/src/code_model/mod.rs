//! Tokens, syntax trees and data-flow graphs for a C-like language subset.

mod dfg;
mod parser;
mod subtree;
mod syntax;
mod token;

pub use dfg::{extract_dfg, extract_named_dfg, DataFlowGraph, NamedDataFlowGraph};
pub use parser::{parse, parse_text};
pub use subtree::{extract_subtrees, intersection_size, SubtreeBag, SubtreeInterner};
pub use syntax::{Diagnostic, NodeKind, ParseOutcome, Span, SyntaxNode, SyntaxTree};
pub use token::{detokenize, is_keyword, tokenize, Token, TokenKind, KEYWORDS};
