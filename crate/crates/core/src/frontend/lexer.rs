use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{FrontendError, FrontendErrorKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    /// `\forall`, `\result`, ...
    Backslash(String),
    Int(u64),
    AnnotOpen,
    AnnotClose,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Dot,
    Assign,
    EqEq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Bang,
    AndAnd,
    OrOr,
    Implies,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => alloc::format!("identifier `{s}`"),
            Tok::Backslash(s) => alloc::format!("`\\{s}`"),
            Tok::Int(n) => alloc::format!("integer `{n}`"),
            Tok::AnnotOpen => "annotation start".to_string(),
            Tok::AnnotClose => "annotation end".to_string(),
            Tok::Eof => "end of input".to_string(),
            other => alloc::format!("`{}`", punct(other)),
        }
    }
}

fn punct(t: &Tok) -> &'static str {
    match t {
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::LBrace => "{",
        Tok::RBrace => "}",
        Tok::LBracket => "[",
        Tok::RBracket => "]",
        Tok::Semi => ";",
        Tok::Comma => ",",
        Tok::Dot => ".",
        Tok::Assign => "=",
        Tok::EqEq => "==",
        Tok::Ne => "!=",
        Tok::Lt => "<",
        Tok::Le => "<=",
        Tok::Gt => ">",
        Tok::Ge => ">=",
        Tok::Plus => "+",
        Tok::Minus => "-",
        Tok::Star => "*",
        Tok::Bang => "!",
        Tok::AndAnd => "&&",
        Tok::OrOr => "||",
        Tok::Implies => "==>",
        _ => "?",
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: u32,
    pub col: u32,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
    in_annot: Option<AnnotKind>,
    out: Vec<Token>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum AnnotKind {
    Block,
    Line,
}

pub(crate) fn lex(text: &str) -> Result<Vec<Token>, FrontendError> {
    let mut lx = Lexer { src: text.as_bytes(), pos: 0, line: 1, col: 1, in_annot: None, out: Vec::new() };
    lx.run()?;
    Ok(lx.out)
}

impl Lexer<'_> {
    fn peek(&self, off: usize) -> u8 {
        self.src.get(self.pos + off).copied().unwrap_or(0)
    }

    fn bump(&mut self) -> u8 {
        let c = self.peek(0);
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn err(&self, msg: &str) -> FrontendError {
        FrontendError::new(FrontendErrorKind::Syntax(msg.to_string()), self.line, self.col)
    }

    fn push(&mut self, tok: Tok, line: u32, col: u32) {
        self.out.push(Token { tok, line, col });
    }

    fn run(&mut self) -> Result<(), FrontendError> {
        loop {
            let (line, col) = (self.line, self.col);
            let c = self.peek(0);
            if c == 0 {
                if self.in_annot == Some(AnnotKind::Block) {
                    return Err(self.err("unterminated annotation"));
                }
                if self.in_annot.take().is_some() {
                    self.push(Tok::AnnotClose, line, col);
                }
                self.push(Tok::Eof, line, col);
                return Ok(());
            }
            if c == b'\n' && self.in_annot == Some(AnnotKind::Line) {
                self.in_annot = None;
                self.push(Tok::AnnotClose, line, col);
                self.bump();
                continue;
            }
            if c.is_ascii_whitespace() || (c == b'@' && self.in_annot.is_some()) {
                self.bump();
                continue;
            }
            if self.in_annot == Some(AnnotKind::Block) && c == b'*' && self.peek(1) == b'/' {
                self.bump();
                self.bump();
                self.in_annot = None;
                self.push(Tok::AnnotClose, line, col);
                continue;
            }
            if c == b'/' && self.peek(1) == b'/' {
                if self.peek(2) == b'@' && self.in_annot.is_none() {
                    self.bump();
                    self.bump();
                    self.bump();
                    self.in_annot = Some(AnnotKind::Line);
                    self.push(Tok::AnnotOpen, line, col);
                } else {
                    while self.peek(0) != b'\n' && self.peek(0) != 0 {
                        self.bump();
                    }
                }
                continue;
            }
            if c == b'/' && self.peek(1) == b'*' {
                if self.peek(2) == b'@' && self.in_annot.is_none() {
                    self.bump();
                    self.bump();
                    self.bump();
                    self.in_annot = Some(AnnotKind::Block);
                    self.push(Tok::AnnotOpen, line, col);
                } else {
                    self.bump();
                    self.bump();
                    loop {
                        match self.peek(0) {
                            0 => return Err(self.err("unterminated comment")),
                            b'*' if self.peek(1) == b'/' => {
                                self.bump();
                                self.bump();
                                break;
                            }
                            _ => {
                                self.bump();
                            }
                        }
                    }
                }
                continue;
            }
            if c.is_ascii_digit() {
                let mut n: u64 = 0;
                while self.peek(0).is_ascii_digit() {
                    let d = (self.bump() - b'0') as u64;
                    n = n.saturating_mul(10).saturating_add(d);
                }
                if self.peek(0).is_ascii_alphabetic() || self.peek(0) == b'_' {
                    return Err(self.err("malformed number"));
                }
                self.push(Tok::Int(n), line, col);
                continue;
            }
            if c.is_ascii_alphabetic() || c == b'_' || c == b'\\' {
                let backslash = c == b'\\';
                if backslash {
                    self.bump();
                }
                let start = self.pos;
                while self.peek(0).is_ascii_alphanumeric() || self.peek(0) == b'_' {
                    self.bump();
                }
                let word = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default().to_string();
                if backslash {
                    if word.is_empty() {
                        return Err(self.err("expected a name after `\\`"));
                    }
                    self.push(Tok::Backslash(word), line, col);
                } else {
                    self.push(Tok::Ident(word), line, col);
                }
                continue;
            }
            let two = [c, self.peek(1)];
            let (tok, len) = match &two {
                b"==" if self.peek(2) == b'>' => (Tok::Implies, 3),
                b"==" => (Tok::EqEq, 2),
                b"!=" => (Tok::Ne, 2),
                b"<=" => (Tok::Le, 2),
                b">=" => (Tok::Ge, 2),
                b"&&" => (Tok::AndAnd, 2),
                b"||" => (Tok::OrOr, 2),
                _ => {
                    let t = match c {
                        b'(' => Tok::LParen,
                        b')' => Tok::RParen,
                        b'{' => Tok::LBrace,
                        b'}' => Tok::RBrace,
                        b'[' => Tok::LBracket,
                        b']' => Tok::RBracket,
                        b';' => Tok::Semi,
                        b',' => Tok::Comma,
                        b'.' => Tok::Dot,
                        b'=' => Tok::Assign,
                        b'<' => Tok::Lt,
                        b'>' => Tok::Gt,
                        b'+' => Tok::Plus,
                        b'-' => Tok::Minus,
                        b'*' => Tok::Star,
                        b'!' => Tok::Bang,
                        _ => {
                            let ch = core::str::from_utf8(&self.src[self.pos..])
                                .ok()
                                .and_then(|s| s.chars().next())
                                .unwrap_or('?');
                            return Err(self.err(&alloc::format!("unexpected character `{ch}`")));
                        }
                    };
                    (t, 1)
                }
            };
            for _ in 0..len {
                self.bump();
            }
            self.push(tok, line, col);
        }
    }
}
