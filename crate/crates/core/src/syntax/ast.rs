use std::collections::BTreeSet;
use std::sync::Arc;

use crate::numerics::Rational;

pub type Label = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Lit(Rational),
    Var(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn lit(q: Rational) -> Expr {
        Expr::Lit(q)
    }

    pub fn int(n: i64) -> Expr {
        Expr::Lit(Rational::from_integer(n.into()))
    }

    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn neg(e: Expr) -> Expr {
        Expr::Neg(Box::new(e))
    }

    pub fn bin(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Bin(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn add(lhs: Expr, rhs: Expr) -> Expr {
        Expr::bin(BinOp::Add, lhs, rhs)
    }

    pub fn sub(lhs: Expr, rhs: Expr) -> Expr {
        Expr::bin(BinOp::Sub, lhs, rhs)
    }

    pub fn mul(lhs: Expr, rhs: Expr) -> Expr {
        Expr::bin(BinOp::Mul, lhs, rhs)
    }

    pub fn div(lhs: Expr, rhs: Expr) -> Expr {
        Expr::bin(BinOp::Div, lhs, rhs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Le,
    Lt,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Le => "<=",
            CmpOp::Lt => "<",
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Test {
    Cmp(CmpOp, Expr, Expr),
    Not(Box<Test>),
}

#[allow(clippy::should_implement_trait)]
impl Test {
    pub fn cmp(op: CmpOp, lhs: Expr, rhs: Expr) -> Test {
        Test::Cmp(op, lhs, rhs)
    }

    pub fn not(t: Test) -> Test {
        Test::Not(Box::new(t))
    }
}

/// A labeled instruction. Children are shared so that continuations can
/// hold on to sub-programs cheaply.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Instr {
    Skip { label: Label },
    Assign { label: Label, var: String, expr: Expr },
    If { label: Label, test: Test, then_branch: Arc<Instr>, else_branch: Arc<Instr> },
    While { label: Label, test: Test, body: Arc<Instr> },
    Seq(Arc<Instr>, Arc<Instr>),
    Input { label: Label, targets: Vec<String> },
}

impl Instr {
    pub fn label(&self) -> Option<Label> {
        match self {
            Instr::Skip { label }
            | Instr::Assign { label, .. }
            | Instr::If { label, .. }
            | Instr::While { label, .. }
            | Instr::Input { label, .. } => Some(*label),
            Instr::Seq(..) => None,
        }
    }

    pub fn seq(first: Instr, second: Instr) -> Instr {
        Instr::Seq(Arc::new(first), Arc::new(second))
    }

    /// Right-nests a non-empty list of instructions.
    pub fn seq_all(mut items: Vec<Instr>) -> Instr {
        let last = items.pop().expect("at least one instruction");
        items.into_iter().rev().fold(last, |acc, i| Instr::seq(i, acc))
    }

    /// Re-associates every sequence to the right, the shape the parser
    /// produces.
    pub fn normalize(&self) -> Instr {
        let mut flat = Vec::new();
        self.flatten_into(&mut flat);
        let normalized: Vec<Instr> = flat
            .into_iter()
            .map(|i| match i {
                Instr::If { label, test, then_branch, else_branch } => Instr::If {
                    label: *label,
                    test: test.clone(),
                    then_branch: Arc::new(then_branch.normalize()),
                    else_branch: Arc::new(else_branch.normalize()),
                },
                Instr::While { label, test, body } => Instr::While {
                    label: *label,
                    test: test.clone(),
                    body: Arc::new(body.normalize()),
                },
                other => other.clone(),
            })
            .collect();
        Instr::seq_all(normalized)
    }

    /// The non-sequence instructions of a sequence, left to right.
    pub fn flatten(&self) -> Vec<&Instr> {
        let mut out = Vec::new();
        self.flatten_into(&mut out);
        out
    }

    fn flatten_into<'a>(&'a self, out: &mut Vec<&'a Instr>) {
        match self {
            Instr::Seq(a, b) => {
                a.flatten_into(out);
                b.flatten_into(out);
            }
            other => out.push(other),
        }
    }

    /// Labels in preorder.
    pub fn labels(&self) -> Vec<Label> {
        let mut out = Vec::new();
        self.visit(&mut |i| {
            if let Some(l) = i.label() {
                out.push(l);
            }
        });
        out
    }

    pub fn visit(&self, f: &mut dyn FnMut(&Instr)) {
        f(self);
        match self {
            Instr::Seq(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Instr::If { then_branch, else_branch, .. } => {
                then_branch.visit(f);
                else_branch.visit(f);
            }
            Instr::While { body, .. } => body.visit(f),
            _ => {}
        }
    }

    pub fn contains_input(&self) -> bool {
        let mut found = false;
        self.visit(&mut |i| found |= matches!(i, Instr::Input { .. }));
        found
    }

    pub fn contains_loop(&self) -> bool {
        let mut found = false;
        self.visit(&mut |i| found |= matches!(i, Instr::While { .. }));
        found
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub root: Arc<Instr>,
    pub exit_label: Label,
    pub declared_vars: BTreeSet<String>,
}

impl Program {
    /// Wraps an instruction, declaring exactly its free variables.
    pub fn from_instr(root: Instr) -> Program {
        let declared_vars = root.free_vars();
        let exit_label = root.labels().into_iter().max().unwrap_or(0) + 1;
        Program { root: Arc::new(root), exit_label, declared_vars }
    }
}

/// Variables occurring syntactically in a node.
pub trait FreeVars {
    fn collect_vars(&self, out: &mut BTreeSet<String>);

    fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }
}

impl FreeVars for Expr {
    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Lit(_) => {}
            Expr::Var(x) => {
                out.insert(x.clone());
            }
            Expr::Neg(e) => e.collect_vars(out),
            Expr::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}

impl FreeVars for Test {
    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Test::Cmp(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Test::Not(t) => t.collect_vars(out),
        }
    }
}

impl FreeVars for Instr {
    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Instr::Skip { .. } => {}
            Instr::Assign { var, expr, .. } => {
                out.insert(var.clone());
                expr.collect_vars(out);
            }
            Instr::If { test, then_branch, else_branch, .. } => {
                test.collect_vars(out);
                then_branch.collect_vars(out);
                else_branch.collect_vars(out);
            }
            Instr::While { test, body, .. } => {
                test.collect_vars(out);
                body.collect_vars(out);
            }
            Instr::Seq(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Instr::Input { targets, .. } => out.extend(targets.iter().cloned()),
        }
    }
}
