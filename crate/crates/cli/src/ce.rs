//! Counterexample syntax: `name=v` bindings separated by commas, where a
//! bare value continues the array started by the previous binding.

use std::collections::BTreeMap;

use locfaults_core::input::{Counterexample, Value};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// JSON form of a value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonValue {
    Int(i64),
    Array(Vec<i64>),
}

impl From<&Value> for JsonValue {
    fn from(v: &Value) -> Self {
        match v {
            Value::Int(x) => JsonValue::Int(*x),
            Value::Array(xs) => JsonValue::Array(xs.clone()),
        }
    }
}

impl From<JsonValue> for Value {
    fn from(v: JsonValue) -> Self {
        match v {
            JsonValue::Int(x) => Value::Int(x),
            JsonValue::Array(xs) => Value::Array(xs),
        }
    }
}

pub fn to_json(ce: &Counterexample) -> BTreeMap<String, JsonValue> {
    ce.bindings.iter().map(|(k, v)| (k.clone(), v.into())).collect()
}

pub fn parse_inline(text: &str) -> Result<Counterexample, CliError> {
    let bad = |m: String| CliError::Counterexample(m);
    let mut items: Vec<(String, Vec<i64>)> = Vec::new();
    if text.trim().is_empty() {
        return Ok(Counterexample::new());
    }
    for part in text.split(',').map(str::trim) {
        let (name, value) = match part.split_once('=') {
            Some((n, v)) => (Some(n.trim()), v.trim()),
            None => (None, part),
        };
        let value: i64 = value.parse().map_err(|_| bad(format!("`{value}` is not an integer")))?;
        match name {
            Some("") => return Err(bad(format!("missing name in `{part}`"))),
            Some(n) => {
                if items.iter().any(|(m, _)| m == n) {
                    return Err(bad(format!("`{n}` is bound twice")));
                }
                items.push((n.to_string(), vec![value]));
            }
            None => match items.last_mut() {
                Some((_, vs)) => vs.push(value),
                None => return Err(bad(format!("`{part}` has no name"))),
            },
        }
    }
    let mut ce = Counterexample::new();
    for (name, vs) in items {
        let v = if vs.len() == 1 { Value::Int(vs[0]) } else { Value::Array(vs) };
        ce = ce.with(&name, v);
    }
    Ok(ce)
}

pub fn parse_json(text: &str) -> Result<Counterexample, CliError> {
    let map: BTreeMap<String, JsonValue> =
        serde_json::from_str(text).map_err(|e| CliError::Counterexample(e.to_string()))?;
    Ok(Counterexample { bindings: map.into_iter().map(|(k, v)| (k, v.into())).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inline() {
        let ce = parse_inline("i=0, j=-1").unwrap();
        assert_eq!(ce.get("j"), Some(&Value::Int(-1)));
        let ce = parse_inline("tab=3,2,1,0,n=4").unwrap();
        assert_eq!(ce.get("tab"), Some(&Value::Array(vec![3, 2, 1, 0])));
        assert_eq!(ce.get("n"), Some(&Value::Int(4)));
        assert_eq!(parse_inline(" ").unwrap(), Counterexample::new());
        assert_eq!(parse_inline("i=1,").unwrap_err().code(), "counterexample-syntax");
        assert!(parse_inline("3,i=1").is_err());
        assert!(parse_inline("i=1,i=2").is_err());
        assert!(parse_inline("i=x").is_err());
    }

    #[test]
    fn json() {
        let ce = parse_json(r#"{"tab": [3, 2], "i": 7}"#).unwrap();
        assert_eq!(ce, parse_inline("i=7,tab=3,2").unwrap());
        assert!(parse_json(r#"{"i": "x"}"#).is_err());
    }
}
