use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::frontend::{Type, ValidatedProgram};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Array(Vec<i64>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Array(vs) => {
                f.write_str("[")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// Concrete values for every parameter of a program.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Counterexample {
    pub bindings: BTreeMap<String, Value>,
}

impl Counterexample {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: Value) -> Self {
        self.bindings.insert(String::from(name), value);
        self
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.bindings.get(name)
    }

    /// Checks that the bindings match the parameters exactly. A scalar bound
    /// to a one-cell array parameter is accepted as that cell.
    pub fn conform(&self, program: &ValidatedProgram) -> Result<Counterexample, InputError> {
        let p = program.program();
        let mut out = Counterexample::new();
        for d in &p.params {
            let v = self.bindings.get(&d.name).ok_or_else(|| InputError::Missing(d.name.clone()))?;
            let v = match (d.ty, v) {
                (Type::Int, Value::Int(_)) => v.clone(),
                (Type::Array(Some(n)), Value::Array(cells)) if cells.len() == n => v.clone(),
                (Type::Array(Some(1)), Value::Int(x)) => Value::Array(alloc::vec![*x]),
                _ => return Err(InputError::Shape(d.name.clone())),
            };
            out.bindings.insert(d.name.clone(), v);
        }
        if let Some(extra) = self.bindings.keys().find(|k| !out.bindings.contains_key(*k)) {
            return Err(InputError::Unknown(extra.clone()));
        }
        Ok(out)
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InputError {
    Missing(String),
    Unknown(String),
    /// Scalar given for an array or wrong array length.
    Shape(String),
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputError::Missing(n) => write!(f, "no value given for parameter `{n}`"),
            InputError::Unknown(n) => write!(f, "`{n}` is not a parameter"),
            InputError::Shape(n) => write!(f, "value for `{n}` does not match its declared type"),
        }
    }
}

impl core::error::Error for InputError {}
