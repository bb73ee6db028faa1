//! Continuation specs given on the command line:
//! `indicator: <test>`, `expr: <expr>`, `const: <answer>` or `table: <file>`.
//!
//! A table file has one `<bindings> => <answer>` entry per line, for
//! example `x = 1, y = err => 3/2`, and an optional `default => <answer>`
//! line. Entries not listed answer with the default, or with bottom.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

use wpwb::answer::{Ans, AnsKind, Continuation, ExtNonNeg};
use wpwb::eval::{parse_env, Semantics};
use wpwb::numerics::parse_rational;
use wpwb::syntax::{parse_expr, parse_test};

pub fn parse_answer(text: &str, kind: AnsKind) -> Result<Ans> {
    let text = text.trim();
    match kind {
        AnsKind::Bool => match text {
            "1" | "true" => Ok(Ans::Bool(true)),
            "0" | "false" => Ok(Ans::Bool(false)),
            other => bail!("`{other}` is not a boolean answer (expected 0 or 1)"),
        },
        AnsKind::ExtNonNeg => parse_ext(text).map(Ans::Ext),
    }
}

pub fn parse_ext(text: &str) -> Result<ExtNonNeg> {
    match text.trim() {
        "+inf" | "inf" => Ok(ExtNonNeg::Infinity),
        other => {
            let q = parse_rational(other).map_err(|e| anyhow!("`{other}`: {e}"))?;
            ExtNonNeg::finite(q).ok_or_else(|| anyhow!("`{other}` is negative"))
        }
    }
}

pub fn parse_cont_spec(spec: &str, sem: Semantics, kind: AnsKind) -> Result<Continuation> {
    let (tag, body) = spec
        .split_once(':')
        .ok_or_else(|| anyhow!("continuation spec `{spec}` must look like `indicator: <test>`"))?;
    let body = body.trim();
    match tag.trim() {
        "indicator" => {
            let t = parse_test(body).map_err(|e| anyhow!("in continuation test: {e}"))?;
            Ok(Continuation::indicator(t, sem, kind))
        }
        "expr" => {
            if kind != AnsKind::ExtNonNeg {
                bail!("`expr:` continuations need the ext-nonneg answer domain");
            }
            let e = parse_expr(body).map_err(|e| anyhow!("in continuation expression: {e}"))?;
            Ok(Continuation::expr(e, sem))
        }
        "const" => Ok(Continuation::constant(parse_answer(body, kind)?)),
        "table" => {
            let text = std::fs::read_to_string(Path::new(body)).with_context(|| format!("reading table {body}"))?;
            parse_table(&text, sem, kind).with_context(|| format!("in table {body}"))
        }
        other => bail!("unknown continuation kind `{other}` (expected indicator, expr, const or table)"),
    }
}

pub fn parse_table(text: &str, sem: Semantics, kind: AnsKind) -> Result<Continuation> {
    let mut entries = BTreeMap::new();
    let mut default = Ans::bottom(kind);
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (lhs, rhs) = line.split_once("=>").ok_or_else(|| anyhow!("line {}: expected `<bindings> => <answer>`", i + 1))?;
        let answer = parse_answer(rhs, kind).with_context(|| format!("line {}", i + 1))?;
        if lhs.trim() == "default" {
            default = answer;
            continue;
        }
        let env = parse_env(lhs, &sem).map_err(|e| anyhow!("line {}: {e}", i + 1))?;
        if entries.insert(env, answer).is_some() {
            bail!("line {}: environment listed twice", i + 1);
        }
    }
    Ok(Continuation::table(entries, default)?)
}
