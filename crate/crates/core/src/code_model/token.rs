//! Lexer for the C-like subset.
//!
//! The lexer is total: comments and whitespace are dropped, every other
//! character ends up in exactly one token, and characters that start no
//! known token become single-character punctuation.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Reserved words. Anything else that looks like a word is an identifier.
pub const KEYWORDS: &[&str] = &[
    "auto", "break", "case", "char", "const", "continue", "default", "do", "double", "else",
    "enum", "extern", "float", "for", "goto", "if", "inline", "int", "long", "register",
    "restrict", "return", "short", "signed", "sizeof", "static", "struct", "switch", "typedef",
    "union", "unsigned", "void", "volatile", "while", "bool", "true", "false", "nullptr",
];

/// Multi-character operators, longest match first.
const MULTI_CHAR_OPERATORS: &[&str] = &[
    "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "+=", "-=", "*=", "/=",
];

const SINGLE_CHAR_OPERATORS: &str = "+-*/%<>=!&|^~?:.";

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TokenKind {
    Keyword,
    Identifier,
    NumberLiteral,
    StringLiteral,
    CharLiteral,
    Operator,
    Punctuation,
}

impl TokenKind {
    pub fn is_literal(self) -> bool {
        matches!(
            self,
            TokenKind::NumberLiteral | TokenKind::StringLiteral | TokenKind::CharLiteral
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    /// 1-based.
    pub line: u32,
    /// 1-based, counted in characters.
    pub column: u32,
}

impl Token {
    pub fn is(&self, kind: TokenKind, lexeme: &str) -> bool {
        self.kind == kind && self.lexeme == lexeme
    }

    pub fn is_op(&self, lexeme: &str) -> bool {
        self.is(TokenKind::Operator, lexeme)
    }

    pub fn is_punct(&self, lexeme: &str) -> bool {
        self.is(TokenKind::Punctuation, lexeme)
    }

    pub fn is_keyword(&self, lexeme: &str) -> bool {
        self.is(TokenKind::Keyword, lexeme)
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.lexeme)
    }
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    column: u32,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn peek_nth(&self, n: usize) -> Option<char> {
        self.rest().chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn bump_while(&mut self, mut pred: impl FnMut(char) -> bool) {
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            self.bump();
        }
    }

    fn bump_n(&mut self, n: usize) {
        for _ in 0..n {
            self.bump();
        }
    }

    /// Skips whitespace and comments. An unterminated block comment runs
    /// to end of input.
    fn skip_trivia(&mut self) {
        loop {
            let rest = self.rest();
            if rest.starts_with("//") {
                self.bump_while(|c| c != '\n');
            } else if rest.starts_with("/*") {
                self.bump_n(2);
                while !self.rest().is_empty() && !self.rest().starts_with("*/") {
                    self.bump();
                }
                if self.rest().starts_with("*/") {
                    self.bump_n(2);
                }
            } else if self.peek().is_some_and(char::is_whitespace) {
                self.bump_while(char::is_whitespace);
            } else {
                return;
            }
        }
    }

    /// Length in bytes of a quoted literal starting at the cursor, or
    /// `None` when the closing quote is missing on this line.
    fn quoted_len(&self, quote: char) -> Option<usize> {
        let mut chars = self.rest().char_indices().skip(1);
        while let Some((i, c)) = chars.next() {
            match c {
                '\\' => {
                    match chars.next() {
                        Some((_, '\n')) | None => return None,
                        Some(_) => {}
                    }
                }
                '\n' => return None,
                c if c == quote => return Some(i + c.len_utf8()),
                _ => {}
            }
        }
        None
    }
}

/// Splits `text` into tokens. Never fails.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut cur = Cursor {
        src: text,
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    loop {
        cur.skip_trivia();
        let Some(c) = cur.peek() else { break };
        let (line, column, start) = (cur.line, cur.column, cur.pos);

        let kind = if c.is_ascii_alphabetic() || c == '_' {
            cur.bump_while(|c| c.is_ascii_alphanumeric() || c == '_');
            if is_keyword(&text[start..cur.pos]) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            }
        } else if c.is_ascii_digit()
            || (c == '.' && cur.peek_nth(1).is_some_and(|d| d.is_ascii_digit()))
        {
            lex_number(&mut cur);
            TokenKind::NumberLiteral
        } else if c == '"' || c == '\'' {
            match cur.quoted_len(c) {
                Some(len) => {
                    let end = cur.pos + len;
                    while cur.pos < end {
                        cur.bump();
                    }
                    if c == '"' {
                        TokenKind::StringLiteral
                    } else {
                        TokenKind::CharLiteral
                    }
                }
                None => {
                    cur.bump();
                    TokenKind::Punctuation
                }
            }
        } else if let Some(op) = MULTI_CHAR_OPERATORS
            .iter()
            .find(|op| cur.rest().starts_with(**op))
        {
            cur.bump_n(op.len());
            TokenKind::Operator
        } else if SINGLE_CHAR_OPERATORS.contains(c) {
            cur.bump();
            TokenKind::Operator
        } else {
            // known punctuation and unknown characters alike
            cur.bump();
            TokenKind::Punctuation
        };
        tokens.push(Token {
            kind,
            lexeme: text[start..cur.pos].to_string(),
            line,
            column,
        });
    }
    tokens
}

/// pp-number style: digits, letters, underscores, dots, and a sign right
/// after an exponent marker.
fn lex_number(cur: &mut Cursor<'_>) {
    let mut prev = '\0';
    while let Some(c) = cur.peek() {
        let sign_after_exponent =
            (c == '+' || c == '-') && matches!(prev, 'e' | 'E' | 'p' | 'P');
        if c.is_ascii_alphanumeric() || c == '_' || c == '.' || sign_after_exponent {
            cur.bump();
            prev = c;
        } else {
            break;
        }
    }
}

/// Joins lexemes with single spaces.
pub fn detokenize(tokens: &[Token]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&t.lexeme);
    }
    out
}
