//! MiniLang lexer.
//!
//! Comments (`// ...`) and whitespace never produce tokens, so token
//! sequences are the normalization currency for identity and duplicate
//! checks across the whole pipeline.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    Identifier,
    Keyword,
    IntLiteral,
    BoolLiteral,
    StringLiteral,
    Operator,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
}

impl Token {
    fn new(kind: TokenKind, text: impl Into<String>) -> Self {
        Token { kind, text: text.into() }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// A token plus its 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpannedToken {
    pub token: Token,
    pub line: u32,
    /// Column of the first character, 1-based.
    pub col: u32,
    /// Column one past the last character.
    pub end_col: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("lex error at {line}:{col}: {message}")]
pub struct LexError {
    pub message: String,
    pub line: u32,
    pub col: u32,
}

const KEYWORDS: &[&str] = &["fn", "let", "if", "else", "while", "return"];

/// Two-character operators, tried before single-character ones.
const OPS2: &[&str] = &["<=", ">=", "==", "!=", "&&", "||"];
const OPS1: &[char] = &['=', '<', '>', '+', '-', '*', '/', '%', '!'];
const PUNCT: &[char] = &['(', ')', '{', '}', ',', ';', '.'];

pub fn lex(source: &str) -> Result<Vec<SpannedToken>, LexError> {
    let mut out = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let chars: Vec<char> = source.chars().collect();
    let mut i = 0usize;

    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start_col = col;
        if c.is_ascii_digit() {
            let mut text = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                text.push(chars[i]);
                i += 1;
                col += 1;
            }
            out.push(SpannedToken {
                token: Token::new(TokenKind::IntLiteral, text),
                line,
                col: start_col,
                end_col: col,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut text = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                text.push(chars[i]);
                i += 1;
                col += 1;
            }
            let kind = if text == "true" || text == "false" {
                TokenKind::BoolLiteral
            } else if KEYWORDS.contains(&text.as_str()) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            };
            out.push(SpannedToken {
                token: Token::new(kind, text),
                line,
                col: start_col,
                end_col: col,
            });
            continue;
        }
        if c == '"' {
            let mut text = String::from('"');
            i += 1;
            col += 1;
            let mut closed = false;
            while i < chars.len() {
                let ch = chars[i];
                if ch == '\n' {
                    break;
                }
                text.push(ch);
                i += 1;
                col += 1;
                if ch == '\\' {
                    if let Some(&esc) = chars.get(i) {
                        if esc != '\n' {
                            text.push(esc);
                            i += 1;
                            col += 1;
                        }
                    }
                    continue;
                }
                if ch == '"' {
                    closed = true;
                    break;
                }
            }
            if !closed {
                return Err(LexError {
                    message: "unterminated string literal".into(),
                    line,
                    col: start_col,
                });
            }
            out.push(SpannedToken {
                token: Token::new(TokenKind::StringLiteral, text),
                line,
                col: start_col,
                end_col: col,
            });
            continue;
        }
        if i + 1 < chars.len() {
            let two: String = [c, chars[i + 1]].iter().collect();
            if OPS2.contains(&two.as_str()) {
                out.push(SpannedToken {
                    token: Token::new(TokenKind::Operator, two),
                    line,
                    col: start_col,
                    end_col: col + 2,
                });
                i += 2;
                col += 2;
                continue;
            }
        }
        if OPS1.contains(&c) {
            out.push(SpannedToken {
                token: Token::new(TokenKind::Operator, c.to_string()),
                line,
                col: start_col,
                end_col: col + 1,
            });
            i += 1;
            col += 1;
            continue;
        }
        if PUNCT.contains(&c) {
            out.push(SpannedToken {
                token: Token::new(TokenKind::Punct, c.to_string()),
                line,
                col: start_col,
                end_col: col + 1,
            });
            i += 1;
            col += 1;
            continue;
        }
        return Err(LexError {
            message: format!("unexpected character `{c}`"),
            line,
            col: start_col,
        });
    }
    Ok(out)
}

pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    Ok(lex(source)?.into_iter().map(|s| s.token).collect())
}

/// Render a token list back to text, one space between lexemes.
/// `tokenize(render(ts)) == ts` for every lexable sequence.
pub fn render(tokens: &[Token]) -> String {
    tokens
        .iter()
        .map(|t| t.text.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Token texts with whitespace and comments stripped, used as the
/// canonical form for identity and duplicate comparisons. Text that does
/// not lex (mutants can be arbitrary garbage) falls back to whitespace
/// splitting so comparisons stay total and deterministic.
pub fn normalize_tokens(text: &str) -> Vec<String> {
    match tokenize(text) {
        Ok(tokens) => tokens.into_iter().map(|t| t.text).collect(),
        Err(_) => text.split_whitespace().map(str::to_string).collect(),
    }
}
