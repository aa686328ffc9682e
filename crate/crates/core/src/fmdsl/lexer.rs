//! Tokenizer for the `.fm`/`.cfg` DSL. Whitespace-insensitive, `#`
//! comments to end of line, 1-based line/column spans on every token.

use super::{DslError, ParseError, SourceSpan};

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    /// Identifier, keyword, or slash-joined path.
    Word(String),
    Int(i64),
    Float(f64),
    Str(String),
    LBrace,
    RBrace,
    Eq,
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Word(w) => format!("'{w}'"),
            TokenKind::Int(v) => format!("'{v}'"),
            TokenKind::Float(v) => format!("'{v}'"),
            TokenKind::Str(_) => "a quoted string".to_string(),
            TokenKind::LBrace => "'{'".to_string(),
            TokenKind::RBrace => "'}'".to_string(),
            TokenKind::Eq => "'='".to_string(),
            TokenKind::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

pub const KEYWORDS: &[&str] = &[
    "model",
    "config",
    "constraint",
    "requires",
    "excludes",
    "select",
    "set",
    "mandatory",
    "optional",
    "and",
    "or",
    "alt",
    "true",
    "false",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    column: u32,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn span_here(&self, length: u32) -> SourceSpan {
        SourceSpan {
            line: self.line,
            column: self.column,
            length,
        }
    }

    fn error(&self, span: SourceSpan, expected: &str, found: String) -> DslError {
        DslError::Syntax(ParseError {
            span,
            expected: expected.to_string(),
            found,
        })
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.chars.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while let Some(&c) = self.chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    fn next_token(&mut self) -> Result<Token, DslError> {
        self.skip_trivia();
        let start = self.span_here(1);
        let Some(&c) = self.chars.peek() else {
            return Ok(Token {
                kind: TokenKind::Eof,
                span: SourceSpan {
                    length: 0,
                    ..start
                },
            });
        };
        match c {
            '{' => {
                self.bump();
                Ok(Token {
                    kind: TokenKind::LBrace,
                    span: start,
                })
            }
            '}' => {
                self.bump();
                Ok(Token {
                    kind: TokenKind::RBrace,
                    span: start,
                })
            }
            '=' => {
                self.bump();
                Ok(Token {
                    kind: TokenKind::Eq,
                    span: start,
                })
            }
            '"' => self.string(start),
            c if c.is_ascii_digit() || c == '-' => self.number(start),
            c if c.is_ascii_alphabetic() => self.word(start),
            other => Err(self.error(start, "a token", format!("'{other}'"))),
        }
    }

    fn string(&mut self, start: SourceSpan) -> Result<Token, DslError> {
        self.bump(); // opening quote
        let mut value = String::new();
        let mut length: u32 = 2;
        loop {
            match self.bump() {
                None => {
                    return Err(self.error(
                        self.span_here(0),
                        "a closing '\"'",
                        "end of input".into(),
                    ))
                }
                Some('"') => break,
                Some('\\') => {
                    length += 1;
                    match self.bump() {
                        Some('"') => value.push('"'),
                        Some('\\') => value.push('\\'),
                        Some('n') => value.push('\n'),
                        Some('t') => value.push('\t'),
                        Some(other) => {
                            return Err(self.error(
                                self.span_here(1),
                                "an escape (\\\" \\\\ \\n \\t)",
                                format!("'\\{other}'"),
                            ))
                        }
                        None => {
                            return Err(self.error(
                                self.span_here(0),
                                "an escape character",
                                "end of input".into(),
                            ))
                        }
                    }
                    length += 1;
                }
                Some(other) => {
                    value.push(other);
                    length += 1;
                }
            }
        }
        Ok(Token {
            kind: TokenKind::Str(value),
            span: SourceSpan { length, ..start },
        })
    }

    fn number(&mut self, start: SourceSpan) -> Result<Token, DslError> {
        let mut text = String::new();
        if self.chars.peek() == Some(&'-') {
            text.push('-');
            self.bump();
            if !matches!(self.chars.peek(), Some(c) if c.is_ascii_digit()) {
                let found = self.peek_describe();
                return Err(self.error(start, "a digit after '-'", found));
            }
        }
        while matches!(self.chars.peek(), Some(c) if c.is_ascii_digit()) {
            text.push(self.bump().unwrap());
        }
        let mut is_float = false;
        if self.chars.peek() == Some(&'.') {
            is_float = true;
            text.push('.');
            self.bump();
            if !matches!(self.chars.peek(), Some(c) if c.is_ascii_digit()) {
                return Err(self.error(start, "a digit after '.'", self.peek_describe()));
            }
            while matches!(self.chars.peek(), Some(c) if c.is_ascii_digit()) {
                text.push(self.bump().unwrap());
            }
        }
        let span = SourceSpan {
            length: text.chars().count() as u32,
            ..start
        };
        let kind = if is_float {
            match text.parse::<f64>() {
                Ok(v) => TokenKind::Float(v),
                Err(_) => {
                    return Err(self.error(span, "a decimal number", format!("'{text}'")))
                }
            }
        } else {
            match text.parse::<i64>() {
                Ok(v) => TokenKind::Int(v),
                Err(_) => {
                    return Err(self.error(
                        span,
                        "an integer within the 64-bit range",
                        format!("'{text}'"),
                    ))
                }
            }
        };
        Ok(Token { kind, span })
    }

    fn word(&mut self, start: SourceSpan) -> Result<Token, DslError> {
        let mut text = String::new();
        text.push(self.bump().unwrap());
        loop {
            match self.chars.peek() {
                Some(&c) if c.is_ascii_alphanumeric() || c == '_' => {
                    text.push(self.bump().unwrap());
                }
                Some('/') => {
                    // continue the path only when a new segment follows
                    let mut lookahead = self.chars.clone();
                    lookahead.next();
                    if matches!(lookahead.peek(), Some(c) if c.is_ascii_alphabetic()) {
                        self.bump();
                        text.push('/');
                    } else {
                        break;
                    }
                }
                _ => break,
            }
        }
        Ok(Token {
            kind: TokenKind::Word(text.clone()),
            span: SourceSpan {
                length: text.chars().count() as u32,
                ..start
            },
        })
    }

    fn peek_describe(&mut self) -> String {
        match self.chars.peek() {
            Some(c) => format!("'{c}'"),
            None => "end of input".to_string(),
        }
    }
}

/// Tokenizes the whole input up front; the parser reports the first error
/// without recovery, so eager lexing keeps span bookkeeping simple.
pub fn tokenize(text: &str) -> Result<Vec<Token>, DslError> {
    let mut lexer = Lexer::new(text);
    let mut tokens = Vec::new();
    loop {
        let token = lexer.next_token()?;
        let eof = token.kind == TokenKind::Eof;
        tokens.push(token);
        if eof {
            return Ok(tokens);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_capture_paths() {
        let tokens = tokenize("model M M/a/b").unwrap();
        assert_eq!(tokens[2].kind, TokenKind::Word("M/a/b".into()));
        assert_eq!(tokens[2].span.line, 1);
        assert_eq!(tokens[2].span.column, 9);
        assert_eq!(tokens[2].span.length, 5);
    }

    #[test]
    fn comments_and_newlines_track_spans() {
        let tokens = tokenize("# header\n  alt").unwrap();
        assert_eq!(tokens[0].kind, TokenKind::Word("alt".into()));
        assert_eq!((tokens[0].span.line, tokens[0].span.column), (2, 3));
    }

    #[test]
    fn numbers_and_strings() {
        let tokens = tokenize(r#"3 -4 2.5 "a\"b""#).unwrap();
        assert_eq!(tokens[0].kind, TokenKind::Int(3));
        assert_eq!(tokens[1].kind, TokenKind::Int(-4));
        assert_eq!(tokens[2].kind, TokenKind::Float(2.5));
        assert_eq!(tokens[3].kind, TokenKind::Str("a\"b".into()));
    }

    #[test]
    fn stray_characters_error_with_position() {
        let err = tokenize("model M $").unwrap_err();
        match err {
            DslError::Syntax(e) => {
                assert_eq!((e.span.line, e.span.column), (1, 9));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
