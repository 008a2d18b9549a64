use std::collections::HashSet;

use serde::Deserialize;

/// Lexical description of one language family, loaded from JSON.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LexerProfile {
    pub family: String,
    pub line_comment: String,
    pub quotes: Vec<char>,
    #[serde(default)]
    pub triple_quotes: bool,
    #[serde(default)]
    pub string_prefixes: Vec<String>,
    pub keywords: HashSet<String>,
    pub builtins: HashSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Identifier,
    Number,
    Str,
    Comment,
    Whitespace,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token<'a> {
    pub kind: TokenKind,
    pub text: &'a str,
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c.is_alphabetic()
}

fn is_ident_continue(c: char) -> bool {
    c == '_' || c.is_alphanumeric()
}

/// Splits `src` into tokens whose concatenation is exactly `src`.
pub fn tokenize<'a>(src: &'a str, profile: &LexerProfile) -> Vec<Token<'a>> {
    let mut lexer = Lexer {
        src,
        pos: 0,
        profile,
    };
    let mut tokens = Vec::new();
    while lexer.pos < src.len() {
        let start = lexer.pos;
        let kind = lexer.next_kind();
        debug_assert!(lexer.pos > start);
        tokens.push(Token {
            kind,
            text: &src[start..lexer.pos],
        });
    }
    tokens
}

struct Lexer<'a, 'p> {
    src: &'a str,
    pos: usize,
    profile: &'p LexerProfile,
}

impl Lexer<'_, '_> {
    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.src.get(self.pos + offset..)?.chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn eat_while(&mut self, pred: impl Fn(char) -> bool) {
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn next_kind(&mut self) -> TokenKind {
        let c = self.peek().expect("not at end");
        if c.is_whitespace() {
            self.eat_while(char::is_whitespace);
            return TokenKind::Whitespace;
        }
        if !self.profile.line_comment.is_empty() && self.rest().starts_with(&self.profile.line_comment) {
            self.eat_while(|c| c != '\n');
            return TokenKind::Comment;
        }
        if self.profile.quotes.contains(&c) {
            self.string_body();
            return TokenKind::Str;
        }
        if c.is_ascii_digit() || (c == '.' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit())) {
            self.number();
            return TokenKind::Number;
        }
        if is_ident_start(c) {
            let start = self.pos;
            self.eat_while(is_ident_continue);
            let word = &self.src[start..self.pos];
            let prefixed_string = self.peek().is_some_and(|q| self.profile.quotes.contains(&q))
                && self
                    .profile
                    .string_prefixes
                    .iter()
                    .any(|p| p.eq_ignore_ascii_case(word));
            if prefixed_string {
                self.string_body();
                return TokenKind::Str;
            }
            return TokenKind::Identifier;
        }
        self.bump();
        TokenKind::Punct
    }

    fn number(&mut self) {
        let start = self.pos;
        let mut prev = '\0';
        while let Some(c) = self.peek() {
            let literal = &self.src[start..self.pos];
            let hex = literal.starts_with("0x") || literal.starts_with("0X");
            let exponent_sign = (c == '+' || c == '-') && (prev == 'e' || prev == 'E') && !hex;
            if c.is_alphanumeric() || c == '_' || c == '.' || exponent_sign {
                prev = c;
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    /// Consumes a string literal starting at an opening quote. Single-quoted
    /// strings end at the closing quote or before a newline; triple-quoted
    /// ones may span lines. Unterminated literals run to the end of input.
    fn string_body(&mut self) {
        let quote = self.bump().expect("at quote");
        let triple: String = [quote; 3].iter().collect();
        if self.profile.triple_quotes && self.src[self.pos - quote.len_utf8()..].starts_with(&triple) {
            self.pos += 2 * quote.len_utf8();
            loop {
                if self.rest().starts_with(&triple) {
                    self.pos += triple.len();
                    return;
                }
                match self.bump() {
                    None => return,
                    Some('\\') => {
                        self.bump();
                    }
                    Some(_) => {}
                }
            }
        }
        loop {
            match self.peek() {
                None | Some('\n') => return,
                Some('\\') => {
                    self.bump();
                    self.bump();
                }
                Some(c) if c == quote => {
                    self.bump();
                    return;
                }
                Some(_) => {
                    self.bump();
                }
            }
        }
    }
}
