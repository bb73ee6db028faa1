//! Text format for an outcome space together with its capacity.
//!
//! ```text
//! site: 3                      # optional input label
//! outcomes: x=0.5 | x=1.0      # one `|`-separated assignment per outcome
//! prob: 1/2 1/2                # or
//! mass: {1}=0.3 {1,2}=0.7      # Möbius masses of a belief function, or
//! plausibility: {1}=0.3 ...    # the dual of those masses, or
//! table: {}=0 {1}=0.2 {2}=0.3 {1,2}=1
//! ```
//!
//! Outcomes are numbered from 1 in subset literals.

use std::collections::BTreeMap;

use super::{Capacity, CapacityError, OutcomeSpace, Subset};
use crate::eval::env::parse_value;
use crate::eval::Semantics;
use crate::numerics::{parse_rational, Rational};
use crate::syntax::Label;

#[derive(Clone, Debug)]
pub struct CapacityFile {
    pub site: Option<Label>,
    pub space: OutcomeSpace,
    pub capacity: Capacity,
}

fn bad(line: usize, message: impl Into<String>) -> CapacityError {
    CapacityError::File { line, message: message.into() }
}

fn parse_outcomes(text: &str, sem: &Semantics, line: usize) -> Result<OutcomeSpace, CapacityError> {
    let mut vars: Option<Vec<String>> = None;
    let mut outcomes = Vec::new();
    for part in text.split('|') {
        let mut names = Vec::new();
        let mut values = Vec::new();
        for binding in part.split(',').map(str::trim).filter(|b| !b.is_empty()) {
            let (name, value) =
                binding.split_once('=').ok_or_else(|| bad(line, format!("expected `x=v`, found `{binding}`")))?;
            names.push(name.trim().to_string());
            values.push(parse_value(value, sem, line).map_err(|e| bad(line, e.to_string()))?);
        }
        match &vars {
            None => vars = Some(names),
            Some(v) if *v == names => {}
            Some(_) => return Err(bad(line, "every outcome must bind the same variables in the same order")),
        }
        outcomes.push(values);
    }
    OutcomeSpace::new(vars.unwrap_or_default(), outcomes)
}

fn parse_subset(text: &str, n: usize, line: usize) -> Result<Subset, CapacityError> {
    let inner = text
        .trim()
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| bad(line, format!("expected a subset like {{1,2}}, found `{text}`")))?;
    let mut set = 0;
    for item in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let i: usize = item.parse().map_err(|_| bad(line, format!("bad outcome index `{item}`")))?;
        if i == 0 || i > n {
            return Err(bad(line, format!("outcome index {i} out of range 1..={n}")));
        }
        set |= 1 << (i - 1);
    }
    Ok(set)
}

fn parse_weighted_subsets(text: &str, n: usize, line: usize) -> Result<Vec<(Subset, Rational)>, CapacityError> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let close = rest.find('}').ok_or_else(|| bad(line, "unterminated subset"))?;
        let set = parse_subset(&rest[..=close], n, line)?;
        let after = rest[close + 1..].trim_start();
        let after = after.strip_prefix('=').ok_or_else(|| bad(line, "expected `=` after subset"))?;
        let end = after.find('{').unwrap_or(after.len());
        let q = parse_rational(after[..end].trim()).map_err(|e| bad(line, e.to_string()))?;
        out.push((set, q));
        rest = after[end..].trim();
    }
    Ok(out)
}

pub fn parse_capacity_file(text: &str, sem: &Semantics) -> Result<CapacityFile, CapacityError> {
    let mut site = None;
    let mut space: Option<OutcomeSpace> = None;
    let mut capacity = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once(':').ok_or_else(|| bad(line, "expected `key: value`"))?;
        let key = key.trim();
        if key == "site" {
            let v = value.trim().trim_start_matches('^');
            site = Some(v.parse().map_err(|_| bad(line, format!("bad label `{v}`")))?);
            continue;
        }
        if key == "outcomes" {
            space = Some(parse_outcomes(value, sem, line)?);
            continue;
        }
        let n = space.as_ref().ok_or_else(|| bad(line, "`outcomes:` must come first"))?.len();
        if capacity.is_some() {
            return Err(bad(line, "capacity given twice"));
        }
        capacity = Some(match key {
            "prob" => {
                let w = value
                    .split_whitespace()
                    .map(|t| parse_rational(t).map_err(|e| bad(line, e.to_string())))
                    .collect::<Result<Vec<_>, _>>()?;
                if w.len() != n {
                    return Err(CapacityError::ArityMismatch { expected: n, found: w.len() });
                }
                Capacity::probability(&w)?
            }
            "mass" => Capacity::belief(n, &parse_weighted_subsets(value, n, line)?)?,
            "plausibility" => Capacity::belief(n, &parse_weighted_subsets(value, n, line)?)?.dual(),
            "table" => {
                let mut entries = BTreeMap::new();
                for (set, q) in parse_weighted_subsets(value, n, line)? {
                    if entries.insert(set, q).is_some() {
                        return Err(bad(line, format!("subset {set:#b} listed twice")));
                    }
                }
                let table = (0..1u32 << n)
                    .map(|a| entries.remove(&a).ok_or_else(|| bad(line, format!("table misses subset {a:#b}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                Capacity::from_table(n, table)?
            }
            other => return Err(bad(line, format!("unknown key `{other}`"))),
        });
    }
    let space = space.ok_or_else(|| bad(0, "missing `outcomes:`"))?;
    let capacity = capacity.ok_or_else(|| bad(0, "missing capacity (prob, mass, plausibility or table)"))?;
    Ok(CapacityFile { site, space, capacity })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn reads_each_capacity_form() {
        let sem = Semantics::Real;
        let f = parse_capacity_file("outcomes: x=1 | x=2\nprob: 1/2 1/2", &sem).unwrap();
        assert_eq!(f.capacity.value(0b01), &q(1, 2));
        let f = parse_capacity_file("site: ^4\noutcomes: x=1 | x=2\nmass: {1}=0.3 {1,2}=0.7", &sem).unwrap();
        assert_eq!(f.site, Some(4));
        assert_eq!(f.capacity.value(0b01), &q(3, 10));
        assert_eq!(f.capacity.value(0b10), &q(0, 1));
        let f = parse_capacity_file("outcomes: x=1 | x=2\nplausibility: {1}=0.3 {1,2}=0.7", &sem).unwrap();
        assert_eq!(f.capacity.value(0b10), &q(7, 10));
        let f = parse_capacity_file("outcomes: x=1, y=0 | x=2, y=0\ntable: {}=0 {1}=0.2 {2}=0.3 {1,2}=1", &sem).unwrap();
        assert_eq!(f.space.vars(), ["x".to_string(), "y".to_string()]);
        assert!(f.capacity.flags().convex);
    }

    #[test]
    fn rejects_malformed_files() {
        let sem = Semantics::Real;
        assert!(parse_capacity_file("prob: 1", &sem).is_err());
        assert!(parse_capacity_file("outcomes: x=1 | x=2\ntable: {}=0 {1}=1", &sem).is_err());
        assert!(parse_capacity_file("outcomes: x=1 | y=2\nprob: 1 0", &sem).is_err());
        assert!(parse_capacity_file("outcomes: x=1 | x=2\nmass: {3}=1", &sem).is_err());
        assert!(parse_capacity_file("outcomes: x=1 | x=1\nprob: 1 0", &sem).is_err());
    }
}
