//! Operational may-semantics by exhaustive path enumeration.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::SemanticsError;
use crate::eval::{eval_expr, eval_test, Env, Semantics};
use crate::syntax::Instr;

pub const DEFAULT_FUEL: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecResult {
    /// Final environments of the runs that terminated within the fuel.
    pub finals: BTreeSet<Env>,
    /// Some run was cut off by the fuel bound.
    pub exhausted: bool,
}

/// Runs `instr` from `env`, following both outcomes of every test that
/// yields `{0,1}`. Each executed non-sequence instruction costs one unit
/// of the per-run fuel.
pub fn enumerate_exec(instr: &Instr, env: &Env, sem: &Semantics, fuel: usize) -> Result<ExecResult, SemanticsError> {
    let mut result = ExecResult { finals: BTreeSet::new(), exhausted: false };
    // each state: pending instructions (top is next), environment, fuel left
    let mut stack: Vec<(Vec<Arc<Instr>>, Env, usize)> = vec![(vec![Arc::new(instr.clone())], env.clone(), fuel)];
    while let Some((mut pending, env, fuel)) = stack.pop() {
        let Some(next) = pending.pop() else {
            result.finals.insert(env);
            continue;
        };
        if let Instr::Seq(a, b) = &*next {
            pending.push(b.clone());
            pending.push(a.clone());
            stack.push((pending, env, fuel));
            continue;
        }
        if fuel == 0 {
            result.exhausted = true;
            continue;
        }
        let fuel = fuel - 1;
        match &*next {
            Instr::Skip { .. } => stack.push((pending, env, fuel)),
            Instr::Assign { var, expr, .. } => {
                let v = eval_expr(sem, expr, &env)?;
                stack.push((pending, env.with(var, v), fuel));
            }
            Instr::If { test, then_branch, else_branch, .. } => {
                for outcome in eval_test(test, &env, sem)?.members() {
                    let mut p = pending.clone();
                    p.push(if outcome { then_branch.clone() } else { else_branch.clone() });
                    stack.push((p, env.clone(), fuel));
                }
            }
            Instr::While { test, body, .. } => {
                for outcome in eval_test(test, &env, sem)?.members() {
                    let mut p = pending.clone();
                    if outcome {
                        p.push(next.clone());
                        p.push(body.clone());
                    }
                    stack.push((p, env.clone(), fuel));
                }
            }
            Instr::Input { label, .. } => return Err(SemanticsError::InputNotEnumerable(*label)),
            Instr::Seq(..) => unreachable!(),
        }
    }
    Ok(result)
}
