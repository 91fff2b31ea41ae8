//! Tokenizer shared by the program and net text formats.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Lower(String),
    Upper(String),
    Num(u32),
    Sym(char),
    Eof,
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (start_line, start_col) = (line, col);
        let tok = if c.is_ascii_alphabetic() {
            let s = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[s..i].iter().collect();
            col += i - s;
            if c.is_ascii_uppercase() {
                Tok::Upper(word)
            } else {
                Tok::Lower(word)
            }
        } else if c.is_ascii_digit() {
            let s = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let word: String = chars[s..i].iter().collect();
            col += i - s;
            let n = word.parse().map_err(|_| Error::Parse {
                line: start_line,
                col: start_col,
                msg: format!("number `{word}` out of range"),
            })?;
            Tok::Num(n)
        } else if "(),.|+<>~=;:".contains(c) {
            i += 1;
            col += 1;
            Tok::Sym(c)
        } else {
            return Err(Error::Parse {
                line,
                col,
                msg: format!("unexpected character `{c}`"),
            });
        };
        out.push(Token {
            tok,
            line: start_line,
            col: start_col,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

pub(crate) struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

impl Cursor {
    pub fn new(src: &str) -> Result<Cursor> {
        Ok(Cursor {
            toks: tokenize(src)?,
            pos: 0,
        })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        let t = &self.toks[self.pos];
        Err(Error::Parse {
            line: t.line,
            col: t.col,
            msg: msg.into(),
        })
    }

    pub fn is_sym(&self, c: char) -> bool {
        *self.peek() == Tok::Sym(c)
    }

    pub fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Lower(s) if s == w)
    }

    pub fn expect_sym(&mut self, c: char) -> Result<()> {
        if self.is_sym(c) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected `{c}`, found {}", describe(self.peek())))
        }
    }

    pub fn expect_word(&mut self, w: &str) -> Result<()> {
        if self.is_word(w) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected `{w}`, found {}", describe(self.peek())))
        }
    }

    pub fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }
}

pub(crate) fn describe(t: &Tok) -> String {
    match t {
        Tok::Lower(s) | Tok::Upper(s) => format!("`{s}`"),
        Tok::Num(n) => format!("`{n}`"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::Eof => "end of input".to_string(),
    }
}
