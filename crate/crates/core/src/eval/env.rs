use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::{EvalError, Semantics, Value};
use crate::numerics::{parse_rational, FloatE, FloatValue, RealE};

/// A program state: variable name to value, all values from one semantics.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Env {
    bindings: BTreeMap<String, Value>,
}

impl Env {
    pub fn empty() -> Env {
        Env::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (String, Value)>) -> Result<Env, EvalError> {
        let bindings: BTreeMap<String, Value> = pairs.into_iter().collect();
        let env = Env { bindings };
        env.check_homogeneous()?;
        Ok(env)
    }

    fn check_homogeneous(&self) -> Result<(), EvalError> {
        let mut kinds = self.bindings.values().map(|v| matches!(v, Value::Real(_)));
        if let Some(first) = kinds.next() {
            if kinds.any(|k| k != first) {
                return Err(EvalError::ModeMismatch);
            }
        }
        Ok(())
    }

    pub fn get(&self, x: &str) -> Option<&Value> {
        self.bindings.get(x)
    }

    /// `self[x ↦ v]`
    pub fn with(&self, x: &str, v: Value) -> Env {
        let mut bindings = self.bindings.clone();
        bindings.insert(x.to_string(), v);
        Env { bindings }
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.bindings.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn covers(&self, vars: &BTreeSet<String>) -> bool {
        vars.iter().all(|v| self.bindings.contains_key(v))
    }

    /// The bindings of variables outside `vars`.
    pub fn without(&self, vars: &[String]) -> Env {
        let bindings = self
            .bindings
            .iter()
            .filter(|(k, _)| !vars.contains(k))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        Env { bindings }
    }
}

impl fmt::Display for Env {
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

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnvParseError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: `{value}` is not representable in {format}")]
    NotRepresentable { line: usize, value: String, format: String },
    #[error("line {line}: `{var}` bound twice")]
    DuplicateBinding { line: usize, var: String },
}

pub(crate) fn parse_value(text: &str, sem: &Semantics, line: usize) -> Result<Value, EnvParseError> {
    let text = text.trim();
    if text == "err" {
        return Ok(sem.err());
    }
    let q = parse_rational(text)
        .map_err(|e| EnvParseError::Malformed { line, message: e.to_string() })?;
    match sem {
        Semantics::Real => Ok(Value::Real(RealE::Num(q))),
        Semantics::Float(fmt) => {
            if !fmt.is_representable(&q) || q > fmt.f_max() || q < fmt.f_min() {
                return Err(EnvParseError::NotRepresentable {
                    line,
                    value: text.to_string(),
                    format: fmt.to_string(),
                });
            }
            let x = num_traits::ToPrimitive::to_f64(&q).expect("representable values fit f64");
            Ok(Value::Float(FloatE::Num(FloatValue::from_f64(x).expect("finite"))))
        }
    }
}

fn parse_bindings(
    text: &str,
    sem: &Semantics,
    line: usize,
    out: &mut BTreeMap<String, Value>,
) -> Result<(), EnvParseError> {
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, value) = part.split_once('=').ok_or_else(|| EnvParseError::Malformed {
            line,
            message: format!("expected `name = value`, found `{part}`"),
        })?;
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(EnvParseError::Malformed { line, message: format!("bad variable name `{name}`") });
        }
        let v = parse_value(value, sem, line)?;
        if out.insert(name.to_string(), v).is_some() {
            return Err(EnvParseError::DuplicateBinding { line, var: name.to_string() });
        }
    }
    Ok(())
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// Parses an environment file: bindings `x = 3/2` or `x = err`, one per
/// line or comma-separated. Float values must be exactly representable.
pub fn parse_env(text: &str, sem: &Semantics) -> Result<Env, EnvParseError> {
    let mut bindings = BTreeMap::new();
    for (line, content) in content_lines(text) {
        parse_bindings(content, sem, line, &mut bindings)?;
    }
    Ok(Env { bindings })
}

/// Parses a universe of environments. Either every line is one
/// environment (`x = 0, y = err`), or every line is a variable range
/// (`x in {0, 1, 2}`) and the universe is their product.
pub fn parse_universe(text: &str, sem: &Semantics) -> Result<Vec<Env>, EnvParseError> {
    let lines: Vec<(usize, &str)> = content_lines(text).collect();
    let is_product = lines.iter().any(|(_, l)| l.contains(" in "));
    if !is_product {
        let mut out = Vec::new();
        for (line, content) in lines {
            let mut bindings = BTreeMap::new();
            parse_bindings(content, sem, line, &mut bindings)?;
            out.push(Env { bindings });
        }
        return Ok(out);
    }
    let mut envs = vec![Env::empty()];
    let mut seen = BTreeSet::new();
    for (line, content) in lines {
        let (name, set) = content.split_once(" in ").ok_or_else(|| EnvParseError::Malformed {
            line,
            message: "expected `name in {v1, v2, ...}`".into(),
        })?;
        let name = name.trim().to_string();
        if !seen.insert(name.clone()) {
            return Err(EnvParseError::DuplicateBinding { line, var: name });
        }
        let inner = set
            .trim()
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| EnvParseError::Malformed { line, message: "value set must be braced".into() })?;
        let values = inner
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| parse_value(s, sem, line))
            .collect::<Result<Vec<_>, _>>()?;
        envs = envs
            .iter()
            .flat_map(|e| values.iter().map(|v| e.with(&name, v.clone())))
            .collect();
    }
    Ok(envs)
}
