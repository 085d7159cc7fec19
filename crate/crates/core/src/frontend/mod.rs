//! Parsing and checking of `.mimp` programs.
//!
//! The surface syntax is a Java subset: one method, optionally wrapped in a
//! class, with `int` and `int[]` parameters and JML-style `requires` /
//! `ensures` annotations (`/*@ ... */` or `//@ ...`). See `docs/grammar.md`
//! at the repository root for the grammar.

pub mod ast;
mod check;
mod lexer;
mod parser;
mod pretty;

use alloc::collections::BTreeMap;
use alloc::string::String;
use core::fmt;

pub use ast::*;
pub use pretty::{bool_str, int_str, pretty_print};

use crate::solver::Domain;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrontendErrorKind {
    Syntax(String),
    DuplicateDeclaration(String),
    TypeMismatch(String),
    LiteralOutOfRange(u64),
    MissingPostcondition,
    NestedDeclaration,
    UndeclaredVariable(String),
    ArrayLengthUnknown(String),
    QuantifierInStatement,
    MisplacedReturn,
    LocalArray(String),
    SharedLine,
    UninitializedRead(String),
}

/// Error with its source position; `col` is 0 when only the line is known
/// and `line` is 0 for errors in specifications.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrontendError {
    pub kind: FrontendErrorKind,
    pub line: u32,
    pub col: u32,
}

impl FrontendError {
    pub fn new(kind: FrontendErrorKind, line: u32, col: u32) -> Self {
        FrontendError { kind, line, col }
    }

    /// Stable short identifier for tooling.
    pub fn code(&self) -> &'static str {
        match self.kind {
            FrontendErrorKind::Syntax(_) => "syntax",
            FrontendErrorKind::DuplicateDeclaration(_) => "duplicate-declaration",
            FrontendErrorKind::TypeMismatch(_) => "type-mismatch",
            FrontendErrorKind::LiteralOutOfRange(_) => "literal-out-of-range",
            FrontendErrorKind::MissingPostcondition => "missing-postcondition",
            FrontendErrorKind::NestedDeclaration => "nested-declaration",
            FrontendErrorKind::UndeclaredVariable(_) => "undeclared-variable",
            FrontendErrorKind::ArrayLengthUnknown(_) => "array-length-unknown",
            FrontendErrorKind::QuantifierInStatement => "quantifier-in-statement",
            FrontendErrorKind::MisplacedReturn => "misplaced-return",
            FrontendErrorKind::LocalArray(_) => "local-array",
            FrontendErrorKind::SharedLine => "shared-line",
            FrontendErrorKind::UninitializedRead(_) => "uninitialized-read",
        }
    }
}

impl fmt::Display for FrontendError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            0 => f.write_str("specification: ")?,
            l if self.col == 0 => write!(f, "line {l}: ")?,
            l => write!(f, "line {l}, column {}: ", self.col)?,
        }
        match &self.kind {
            FrontendErrorKind::Syntax(m) => f.write_str(m),
            FrontendErrorKind::DuplicateDeclaration(n) => write!(f, "`{n}` is declared twice"),
            FrontendErrorKind::TypeMismatch(m) => f.write_str(m),
            FrontendErrorKind::LiteralOutOfRange(n) => write!(f, "literal {n} is outside the integer domain"),
            FrontendErrorKind::MissingPostcondition => f.write_str("no `ensures` clause"),
            FrontendErrorKind::NestedDeclaration => f.write_str("declarations are only allowed at method level"),
            FrontendErrorKind::UndeclaredVariable(n) => write!(f, "`{n}` is not declared"),
            FrontendErrorKind::ArrayLengthUnknown(n) => {
                write!(f, "length of `{n}` unknown; use `int[N] {n}` or `requires {n}.length == N`")
            }
            FrontendErrorKind::QuantifierInStatement => f.write_str("quantifiers are only allowed in specifications"),
            FrontendErrorKind::MisplacedReturn => f.write_str("`return` must be the last statement of an `int` method"),
            FrontendErrorKind::LocalArray(n) => write!(f, "local array `{n}` is not supported"),
            FrontendErrorKind::SharedLine => f.write_str("two statements share this line"),
            FrontendErrorKind::UninitializedRead(n) => write!(f, "`{n}` may be read before it is assigned"),
        }
    }
}

impl core::error::Error for FrontendError {}

#[derive(Clone, Debug, Default)]
pub struct ParseOptions {
    /// Integer literals must fit this domain.
    pub domain: Domain,
}

/// A program that passed [`check_semantics`]: names resolve, array lengths
/// are constants and `.length` has been replaced by them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidatedProgram {
    program: SourceProgram,
    arrays: BTreeMap<String, usize>,
}

impl ValidatedProgram {
    pub fn program(&self) -> &SourceProgram {
        &self.program
    }

    pub fn array_len(&self, name: &str) -> Option<usize> {
        self.arrays.get(name).copied()
    }

    pub fn arrays(&self) -> &BTreeMap<String, usize> {
        &self.arrays
    }
}

pub fn parse_program(text: &str) -> Result<SourceProgram, FrontendError> {
    parse_program_with(text, &ParseOptions::default())
}

pub fn parse_program_with(text: &str, opts: &ParseOptions) -> Result<SourceProgram, FrontendError> {
    parser::parse(text, opts)
}

pub fn check_semantics(program: SourceProgram) -> Result<ValidatedProgram, FrontendError> {
    check::check(program)
}

/// Parses and checks in one step.
pub fn load(text: &str, opts: &ParseOptions) -> Result<ValidatedProgram, FrontendError> {
    check_semantics(parse_program_with(text, opts)?)
}
