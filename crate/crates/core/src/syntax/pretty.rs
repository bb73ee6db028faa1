use std::fmt;

use num_traits::Signed;

use super::ast::{Expr, Instr, Program, Test};
use crate::numerics::format_fraction;

const ATOM: u8 = 3;

fn expr_precedence(e: &Expr) -> u8 {
    match e {
        Expr::Bin(op, ..) => op.precedence(),
        _ => ATOM,
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, parenthesize: bool) -> fmt::Result {
    if parenthesize {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Lit(q) if q.is_negative() => write!(f, "(-{})", format_fraction(&-q)),
            Expr::Lit(q) => f.write_str(&format_fraction(q)),
            Expr::Var(x) => f.write_str(x),
            Expr::Neg(e) => write!(f, "-({e})"),
            Expr::Bin(op, lhs, rhs) => {
                let p = op.precedence();
                write_operand(f, lhs, expr_precedence(lhs) < p)?;
                write!(f, " {} ", op.symbol())?;
                write_operand(f, rhs, expr_precedence(rhs) <= p)
            }
        }
    }
}

impl fmt::Display for Test {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Test::Cmp(op, lhs, rhs) => write!(f, "{lhs} {} {rhs}", op.symbol()),
            Test::Not(t) => write!(f, "!({t})"),
        }
    }
}

impl fmt::Display for Instr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instr::Seq(..) => {
                for (i, part) in self.flatten().into_iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    write!(f, "{part}")?;
                }
                Ok(())
            }
            Instr::Skip { label } => write!(f, "^{label} skip"),
            Instr::Assign { label, var, expr } => write!(f, "^{label} {var} = {expr}"),
            Instr::If { label, test, then_branch, else_branch } => {
                write!(f, "^{label} if {test} {{ {then_branch} }} else {{ {else_branch} }}")
            }
            Instr::While { label, test, body } => write!(f, "^{label} while {test} {{ {body} }}"),
            Instr::Input { label, targets } => {
                write!(f, "^{label} ({}) = input()", targets.join(", "))
            }
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let declared: Vec<&str> = self.declared_vars.iter().map(String::as_str).collect();
        if !declared.is_empty() {
            writeln!(f, "var {};", declared.join(", "))?;
        }
        write!(f, "{}", self.root)
    }
}

pub fn pretty_print(node: &dyn fmt::Display) -> String {
    node.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Rational;
    use crate::syntax::ast::BinOp;

    #[test]
    fn examples() {
        let assign = Instr::Assign {
            label: 1,
            var: "x".into(),
            expr: Expr::Lit(Rational::new(3.into(), 2.into())),
        };
        assert_eq!(pretty_print(&assign), "^1 x = 3/2");
        assert_eq!(pretty_print(&Expr::neg(Expr::var("x"))), "-(x)");
        let seq = Instr::seq(Instr::Skip { label: 1 }, Instr::Skip { label: 2 });
        assert_eq!(pretty_print(&seq), "^1 skip; ^2 skip");
    }

    #[test]
    fn parenthesizes_by_precedence() {
        let e = Expr::bin(
            BinOp::Sub,
            Expr::var("a"),
            Expr::bin(BinOp::Sub, Expr::var("b"), Expr::var("c")),
        );
        assert_eq!(e.to_string(), "a - (b - c)");
        let e = Expr::mul(Expr::add(Expr::var("a"), Expr::int(1)), Expr::var("b"));
        assert_eq!(e.to_string(), "(a + 1) * b");
        let e = Expr::div(Expr::int(1), Expr::int(0));
        assert_eq!(e.to_string(), "1 / 0");
        assert_eq!(Expr::int(-3).to_string(), "(-3)");
    }
}
