use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::*;
use super::lexer::{lex, Tok, Token};
use super::{FrontendError, FrontendErrorKind, ParseOptions};
use crate::solver::Rel;

/// Untyped expression; typed conversion happens once the context is known.
#[derive(Clone, Debug)]
struct PExpr {
    kind: PKind,
    line: u32,
    col: u32,
}

#[derive(Clone, Debug)]
enum PKind {
    Int(u64),
    Bool(bool),
    Name(String),
    Index(String, Box<PExpr>),
    Length(String),
    Neg(Box<PExpr>),
    Not(Box<PExpr>),
    Arith(ArithOp, Box<PExpr>, Box<PExpr>),
    Cmp(Rel, Box<PExpr>, Box<PExpr>),
    And(Box<PExpr>, Box<PExpr>),
    Or(Box<PExpr>, Box<PExpr>),
    Implies(Box<PExpr>, Box<PExpr>),
    ForAll(String, Box<PExpr>, Box<PExpr>),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    literal_limit: u64,
    params: Vec<Decl>,
    locals: Vec<Decl>,
}

pub(crate) fn parse(text: &str, opts: &ParseOptions) -> Result<SourceProgram, FrontendError> {
    let toks = lex(text)?;
    let limit = opts.domain.lo.unsigned_abs().max(opts.domain.hi.unsigned_abs());
    let mut p = Parser { toks, pos: 0, literal_limit: limit, params: Vec::new(), locals: Vec::new() };
    p.program()
}

fn err<T>(kind: FrontendErrorKind, line: u32, col: u32) -> Result<T, FrontendError> {
    Err(FrontendError::new(kind, line, col))
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (u32, u32) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, msg: String) -> Result<T, FrontendError> {
        let (l, c) = self.here();
        err(FrontendErrorKind::Syntax(msg), l, c)
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, FrontendError> {
        self.syntax(alloc::format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<Token, FrontendError> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            self.unexpected(wanted)
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn expect_word(&mut self, w: &str) -> Result<Token, FrontendError> {
        if self.is_word(w) {
            Ok(self.bump())
        } else {
            self.unexpected(&alloc::format!("`{w}`"))
        }
    }

    fn ident(&mut self) -> Result<(String, u32, u32), FrontendError> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) => {
                let t = self.bump();
                Ok((s, t.line, t.col))
            }
            _ => self.unexpected("an identifier"),
        }
    }

    fn program(&mut self) -> Result<SourceProgram, FrontendError> {
        let mut pre = Vec::new();
        let mut post = Vec::new();
        self.annotations(&mut pre, &mut post)?;
        let mut class_name = None;
        if self.is_word("class") {
            self.bump();
            class_name = Some(self.ident()?.0);
            self.expect(Tok::LBrace, "`{`")?;
            self.annotations(&mut pre, &mut post)?;
        }
        let returns_value = if self.is_word("int") {
            true
        } else if self.is_word("void") {
            false
        } else {
            return self.unexpected("`int` or `void`");
        };
        self.bump();
        let (method, _, _) = self.ident()?;
        self.expect(Tok::LParen, "`(`")?;
        if *self.peek() != Tok::RParen {
            loop {
                let (ty, name, line, col) = self.typed_name()?;
                self.declare(true, name, ty, line, col)?;
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        let body = self.block(0)?;
        if class_name.is_some() {
            self.expect(Tok::RBrace, "`}`")?;
        }
        if *self.peek() != Tok::Eof {
            return self.unexpected("end of input");
        }
        let (l, c) = self.here();
        let postcondition = conjoin(post).ok_or(FrontendError::new(FrontendErrorKind::MissingPostcondition, l, c))?;
        Ok(SourceProgram {
            name: class_name.unwrap_or(method),
            params: core::mem::take(&mut self.params),
            locals: core::mem::take(&mut self.locals),
            body,
            precondition: conjoin(pre),
            postcondition,
            returns_value,
        })
    }

    fn annotations(&mut self, pre: &mut Vec<BoolExpr>, post: &mut Vec<BoolExpr>) -> Result<(), FrontendError> {
        while *self.peek() == Tok::AnnotOpen {
            self.bump();
            while *self.peek() != Tok::AnnotClose {
                let target = if self.is_word("requires") {
                    &mut *pre
                } else if self.is_word("ensures") {
                    &mut *post
                } else {
                    return self.unexpected("`requires` or `ensures`");
                };
                self.bump();
                let e = self.expr()?;
                target.push(self.to_bool(e)?);
                self.expect(Tok::Semi, "`;`")?;
            }
            self.bump();
        }
        Ok(())
    }

    /// `int x`, `int[] x` or `int[4] x`.
    fn typed_name(&mut self) -> Result<(Type, String, u32, u32), FrontendError> {
        let kw = self.expect_word("int")?;
        let ty = if *self.peek() == Tok::LBracket {
            self.bump();
            let len = match self.peek().clone() {
                Tok::Int(n) => {
                    self.bump();
                    Some(n as usize)
                }
                _ => None,
            };
            self.expect(Tok::RBracket, "`]`")?;
            Type::Array(len)
        } else {
            Type::Int
        };
        let (name, _, _) = self.ident()?;
        Ok((ty, name, kw.line, kw.col))
    }

    fn declare(&mut self, param: bool, name: String, ty: Type, line: u32, col: u32) -> Result<(), FrontendError> {
        if name == "length" || self.params.iter().chain(&self.locals).any(|d| d.name == name) {
            return err(FrontendErrorKind::DuplicateDeclaration(name), line, col);
        }
        let d = Decl { name, ty, line };
        if param {
            self.params.push(d);
        } else {
            self.locals.push(d);
        }
        Ok(())
    }

    fn block(&mut self, depth: usize) -> Result<Vec<Stmt>, FrontendError> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut out = Vec::new();
        while *self.peek() != Tok::RBrace {
            if *self.peek() == Tok::Eof {
                return self.unexpected("`}`");
            }
            self.stmt(depth, &mut out)?;
        }
        self.bump();
        Ok(out)
    }

    fn body(&mut self, depth: usize) -> Result<Vec<Stmt>, FrontendError> {
        if *self.peek() == Tok::LBrace {
            self.block(depth)
        } else {
            let mut out = Vec::new();
            self.stmt(depth, &mut out)?;
            Ok(out)
        }
    }

    fn stmt(&mut self, depth: usize, out: &mut Vec<Stmt>) -> Result<(), FrontendError> {
        let (line, col) = self.here();
        match self.peek().clone() {
            Tok::Semi => {
                self.bump();
            }
            Tok::Ident(w) if w == "int" => {
                if depth > 0 {
                    return err(FrontendErrorKind::NestedDeclaration, line, col);
                }
                let (ty, name, line, col) = self.typed_name()?;
                self.declare(false, name.clone(), ty, line, col)?;
                if *self.peek() == Tok::Assign {
                    self.bump();
                    let e = self.expr()?;
                    let value = self.to_int(e)?;
                    out.push(Stmt {
                        line,
                        kind: StmtKind::Assign { target: LValue::Var(name), value, declares: true },
                    });
                }
                self.expect(Tok::Semi, "`;`")?;
            }
            Tok::Ident(w) if w == "if" => {
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let e = self.expr()?;
                let cond = self.to_bool(e)?;
                self.expect(Tok::RParen, "`)`")?;
                let then_branch = self.body(depth + 1)?;
                let else_branch = if self.is_word("else") {
                    self.bump();
                    self.body(depth + 1)?
                } else {
                    Vec::new()
                };
                out.push(Stmt { line, kind: StmtKind::If { cond, then_branch, else_branch } });
            }
            Tok::Ident(w) if w == "while" => {
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let e = self.expr()?;
                let cond = self.to_bool(e)?;
                self.expect(Tok::RParen, "`)`")?;
                let body = self.body(depth + 1)?;
                out.push(Stmt { line, kind: StmtKind::While { cond, body } });
            }
            Tok::Ident(w) if w == "return" => {
                self.bump();
                let e = self.expr()?;
                let value = self.to_int(e)?;
                self.expect(Tok::Semi, "`;`")?;
                out.push(Stmt { line, kind: StmtKind::Return(value) });
            }
            Tok::Ident(w) if !is_keyword(&w) => {
                let (name, _, _) = self.ident()?;
                let target = if *self.peek() == Tok::LBracket {
                    self.bump();
                    let e = self.expr()?;
                    let idx = self.to_int(e)?;
                    self.expect(Tok::RBracket, "`]`")?;
                    LValue::Cell(name, idx)
                } else {
                    LValue::Var(name)
                };
                self.expect(Tok::Assign, "`=`")?;
                let e = self.expr()?;
                let value = self.to_int(e)?;
                self.expect(Tok::Semi, "`;`")?;
                out.push(Stmt { line, kind: StmtKind::Assign { target, value, declares: false } });
            }
            _ => return self.unexpected("a statement"),
        }
        Ok(())
    }

    fn mk(&self, kind: PKind, line: u32, col: u32) -> PExpr {
        PExpr { kind, line, col }
    }

    fn expr(&mut self) -> Result<PExpr, FrontendError> {
        let lhs = self.or_expr()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.expr()?;
            let (l, c) = (lhs.line, lhs.col);
            return Ok(self.mk(PKind::Implies(Box::new(lhs), Box::new(rhs)), l, c));
        }
        Ok(lhs)
    }

    fn or_expr(&mut self) -> Result<PExpr, FrontendError> {
        let mut lhs = self.and_expr()?;
        while *self.peek() == Tok::OrOr {
            self.bump();
            let rhs = self.and_expr()?;
            let (l, c) = (lhs.line, lhs.col);
            lhs = self.mk(PKind::Or(Box::new(lhs), Box::new(rhs)), l, c);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<PExpr, FrontendError> {
        let mut lhs = self.not_expr()?;
        while *self.peek() == Tok::AndAnd {
            self.bump();
            let rhs = self.not_expr()?;
            let (l, c) = (lhs.line, lhs.col);
            lhs = self.mk(PKind::And(Box::new(lhs), Box::new(rhs)), l, c);
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> Result<PExpr, FrontendError> {
        if *self.peek() == Tok::Bang {
            let t = self.bump();
            let e = self.not_expr()?;
            return Ok(self.mk(PKind::Not(Box::new(e)), t.line, t.col));
        }
        self.cmp_expr()
    }

    fn cmp_expr(&mut self) -> Result<PExpr, FrontendError> {
        let lhs = self.add_expr()?;
        let rel = match self.peek() {
            Tok::EqEq => Rel::Eq,
            Tok::Ne => Rel::Ne,
            Tok::Lt => Rel::Lt,
            Tok::Le => Rel::Le,
            Tok::Gt => Rel::Gt,
            Tok::Ge => Rel::Ge,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.add_expr()?;
        if matches!(self.peek(), Tok::EqEq | Tok::Ne | Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge) {
            return self.syntax("comparisons cannot be chained".to_string());
        }
        let (l, c) = (lhs.line, lhs.col);
        Ok(self.mk(PKind::Cmp(rel, Box::new(lhs), Box::new(rhs)), l, c))
    }

    fn add_expr(&mut self) -> Result<PExpr, FrontendError> {
        let mut lhs = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.mul_expr()?;
            let (l, c) = (lhs.line, lhs.col);
            lhs = self.mk(PKind::Arith(op, Box::new(lhs), Box::new(rhs)), l, c);
        }
    }

    fn mul_expr(&mut self) -> Result<PExpr, FrontendError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let rhs = self.unary()?;
            let (l, c) = (lhs.line, lhs.col);
            lhs = self.mk(PKind::Arith(ArithOp::Mul, Box::new(lhs), Box::new(rhs)), l, c);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<PExpr, FrontendError> {
        if *self.peek() == Tok::Minus {
            let t = self.bump();
            let e = self.unary()?;
            return Ok(self.mk(PKind::Neg(Box::new(e)), t.line, t.col));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<PExpr, FrontendError> {
        let (line, col) = self.here();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                if n > self.literal_limit {
                    return err(FrontendErrorKind::LiteralOutOfRange(n), line, col);
                }
                Ok(self.mk(PKind::Int(n), line, col))
            }
            Tok::Ident(w) if w == "true" || w == "false" => {
                self.bump();
                Ok(self.mk(PKind::Bool(w == "true"), line, col))
            }
            Tok::Backslash(w) if w == "result" => {
                self.bump();
                Ok(self.mk(PKind::Name(RESULT.to_string()), line, col))
            }
            Tok::Ident(w) if !is_keyword(&w) => {
                self.bump();
                match self.peek() {
                    Tok::LBracket => {
                        self.bump();
                        let idx = self.expr()?;
                        self.expect(Tok::RBracket, "`]`")?;
                        Ok(self.mk(PKind::Index(w, Box::new(idx)), line, col))
                    }
                    Tok::Dot => {
                        self.bump();
                        self.expect_word("length")?;
                        Ok(self.mk(PKind::Length(w), line, col))
                    }
                    _ => Ok(self.mk(PKind::Name(w), line, col)),
                }
            }
            Tok::LParen => {
                self.bump();
                if matches!(self.peek(), Tok::Backslash(w) if w == "forall") {
                    return self.forall(line, col);
                }
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            _ => self.unexpected("an expression"),
        }
    }

    /// `(\forall int k; range; body)` after the opening parenthesis.
    fn forall(&mut self, line: u32, col: u32) -> Result<PExpr, FrontendError> {
        self.bump();
        self.expect_word("int")?;
        let (index, _, _) = self.ident()?;
        self.expect(Tok::Semi, "`;`")?;
        let range = self.expr()?;
        self.expect(Tok::Semi, "`;`")?;
        let body = self.expr()?;
        self.expect(Tok::RParen, "`)`")?;
        Ok(self.mk(PKind::ForAll(index, Box::new(range), Box::new(body)), line, col))
    }

    fn to_int(&self, e: PExpr) -> Result<IntExpr, FrontendError> {
        let mismatch = |what: &str| err(FrontendErrorKind::TypeMismatch(alloc::format!("expected an integer, found {what}")), e.line, e.col);
        Ok(match e.kind {
            PKind::Int(n) => IntExpr::Lit(n as i64),
            PKind::Name(n) => IntExpr::Var(n),
            PKind::Index(a, i) => IntExpr::Read(a, Box::new(self.to_int(*i)?)),
            PKind::Length(a) => IntExpr::Length(a),
            PKind::Neg(a) => match self.to_int(*a)? {
                IntExpr::Lit(n) => IntExpr::Lit(-n),
                other => IntExpr::Neg(Box::new(other)),
            },
            PKind::Arith(op, a, b) => IntExpr::Bin(op, Box::new(self.to_int(*a)?), Box::new(self.to_int(*b)?)),
            PKind::Bool(_) => return mismatch("a boolean literal"),
            PKind::Not(_) | PKind::And(..) | PKind::Or(..) | PKind::Implies(..) | PKind::Cmp(..) | PKind::ForAll(..) => {
                return mismatch("a condition")
            }
        })
    }

    fn to_bool(&self, e: PExpr) -> Result<BoolExpr, FrontendError> {
        let (line, col) = (e.line, e.col);
        Ok(match e.kind {
            PKind::Bool(b) => BoolExpr::Lit(b),
            PKind::Cmp(r, a, b) => BoolExpr::Cmp(r, self.to_int(*a)?, self.to_int(*b)?),
            PKind::Not(a) => BoolExpr::Not(Box::new(self.to_bool(*a)?)),
            PKind::And(a, b) => BoolExpr::And(Box::new(self.to_bool(*a)?), Box::new(self.to_bool(*b)?)),
            PKind::Or(a, b) => BoolExpr::Or(Box::new(self.to_bool(*a)?), Box::new(self.to_bool(*b)?)),
            PKind::Implies(a, b) => BoolExpr::Implies(Box::new(self.to_bool(*a)?), Box::new(self.to_bool(*b)?)),
            PKind::ForAll(index, range, body) => {
                let (lo, hi) = self.quantifier_range(&index, *range)?;
                BoolExpr::ForAll { index, lo, hi, body: Box::new(self.to_bool(*body)?) }
            }
            _ => {
                return err(
                    FrontendErrorKind::TypeMismatch("expected a condition, found an integer expression".to_string()),
                    line,
                    col,
                )
            }
        })
    }

    /// Reads `k >= lo && k < hi` (and its variants) as the half-open `[lo, hi)`.
    fn quantifier_range(&self, k: &str, range: PExpr) -> Result<(IntExpr, IntExpr), FrontendError> {
        let bad = || {
            err(
                FrontendErrorKind::Syntax("quantifier range must have the form `k >= lo && k < hi`".to_string()),
                range.line,
                range.col,
            )
        };
        let PKind::And(a, b) = &range.kind else { return bad() };
        let mut lo = None;
        let mut hi = None;
        for part in [a, b] {
            let PKind::Cmp(rel, l, r) = &part.kind else { return bad() };
            let is_k = |e: &PExpr| matches!(&e.kind, PKind::Name(n) if n == k);
            // Normalize to `k rel bound`.
            let (rel, bound) = if is_k(l) {
                (*rel, (**r).clone())
            } else if is_k(r) {
                let flipped = match rel {
                    Rel::Lt => Rel::Gt,
                    Rel::Le => Rel::Ge,
                    Rel::Gt => Rel::Lt,
                    Rel::Ge => Rel::Le,
                    other => *other,
                };
                (flipped, (**l).clone())
            } else {
                return bad();
            };
            let bound = self.to_int(bound)?;
            let plus_one = |e: IntExpr| IntExpr::Bin(ArithOp::Add, Box::new(e), Box::new(IntExpr::Lit(1)));
            match rel {
                Rel::Ge if lo.is_none() => lo = Some(bound),
                Rel::Gt if lo.is_none() => lo = Some(plus_one(bound)),
                Rel::Lt if hi.is_none() => hi = Some(bound),
                Rel::Le if hi.is_none() => hi = Some(plus_one(bound)),
                _ => return bad(),
            }
        }
        match (lo, hi) {
            (Some(lo), Some(hi)) => Ok((lo, hi)),
            _ => bad(),
        }
    }
}

fn is_keyword(w: &str) -> bool {
    matches!(w, "int" | "void" | "if" | "else" | "while" | "return" | "class" | "true" | "false")
}

fn conjoin(mut parts: Vec<BoolExpr>) -> Option<BoolExpr> {
    let first = if parts.is_empty() { return None } else { parts.remove(0) };
    Some(parts.into_iter().fold(first, |acc, p| BoolExpr::And(Box::new(acc), Box::new(p))))
}
