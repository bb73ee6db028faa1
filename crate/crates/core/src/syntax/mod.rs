//! Abstract syntax, parser and printer for the toy imperative language.

mod ast;
mod parser;
mod pretty;

pub use ast::{BinOp, CmpOp, Expr, FreeVars, Instr, Label, Program, Test};
pub use parser::{parse_expr, parse_program, parse_test, ParseError};
pub use pretty::pretty_print;
