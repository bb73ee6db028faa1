use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use super::ast::{BinOp, CmpOp, Expr, FreeVars, Instr, Label, Program, Test};
use crate::numerics::{parse_rational, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("{line}:{col}: duplicate label ^{label}")]
    DuplicateLabel { label: Label, line: usize, col: usize },
    #[error("{line}:{col}: variable `{name}` is not declared")]
    UndeclaredVariable { name: String, line: usize, col: usize },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Kw(&'static str),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
    /// Byte offsets in the source.
    start: usize,
    end: usize,
}

const KEYWORDS: [&str; 7] = ["skip", "if", "then", "else", "while", "input", "var"];
const SYMBOLS: [&str; 20] = [
    "==", "!=", "<=", ">=", "<", ">", "!", "=", "^", ";", ",", "(", ")", "{", "}", "+", "-", "*",
    "/", "#",
];

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let (mut i, mut line, mut line_start) = (0usize, 1usize, 0usize);
    while i < bytes.len() {
        let c = bytes[i];
        let col = i - line_start + 1;
        if c == b'\n' {
            i += 1;
            line += 1;
            line_start = i;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        if c.is_ascii_digit() {
            i = scan_digits(bytes, i);
            if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
                i = scan_digits(bytes, i + 1);
            }
            // `3/2` with no spaces is a single literal, unless the
            // denominator is zero, in which case it is a division.
            if i + 1 < bytes.len() && bytes[i] == b'/' && bytes[i + 1].is_ascii_digit() {
                let den_end = scan_digits(bytes, i + 1);
                let den = &src[i + 1..den_end];
                let followed_by_dot = den_end < bytes.len() && bytes[den_end] == b'.';
                if den.bytes().any(|b| b != b'0') && !followed_by_dot {
                    i = den_end;
                }
            }
            let text = &src[start..i];
            let q = parse_literal(text).map_err(|message| ParseError::Syntax { line, col, message })?;
            out.push(Token { tok: Tok::Num(q), line, col, start, end: i });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &src[start..i];
            let tok = match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => Tok::Kw(k),
                None => Tok::Ident(word.to_string()),
            };
            out.push(Token { tok, line, col, start, end: i });
            continue;
        }
        let rest = &src[i..];
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                i += s.len();
                out.push(Token { tok: Tok::Sym(s), line, col, start, end: i });
            }
            None => {
                let ch = rest.chars().next().unwrap_or('?');
                return Err(ParseError::Syntax { line, col, message: format!("unexpected character `{ch}`") });
            }
        }
    }
    let col = i - line_start + 1;
    out.push(Token { tok: Tok::Eof, line, col, start: i, end: i });
    Ok(out)
}

fn scan_digits(bytes: &[u8], mut i: usize) -> usize {
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    i
}

fn parse_literal(text: &str) -> Result<Rational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

/// A parsed instruction whose label may still be missing.
enum RawInstr {
    Skip,
    Assign(String, Expr),
    If(Test, Box<RawNode>, Box<RawNode>),
    While(Test, Box<RawNode>),
    Seq(Box<RawNode>, Box<RawNode>),
    Input(Vec<String>),
}

struct RawNode {
    label: Option<Label>,
    line: usize,
    col: usize,
    kind: RawInstr,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;
/// A declared variable with its line and column.
type Declared = (String, usize, usize);

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, offset: usize) -> &Token {
        let i = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[i]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        let t = self.peek();
        Err(ParseError::Syntax { line: t.line, col: t.col, message: message.into() })
    }

    fn describe(tok: &Tok) -> String {
        match tok {
            Tok::Num(q) => format!("number `{q}`"),
            Tok::Ident(x) => format!("identifier `{x}`"),
            Tok::Kw(k) => format!("`{k}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(&self.peek().tok, Tok::Kw(x) if *x == k)
    }

    fn expect_sym(&mut self, s: &str) -> PResult<Token> {
        if self.is_sym(s) {
            Ok(self.bump())
        } else {
            let found = Self::describe(&self.peek().tok);
            self.error(format!("expected `{s}`, found {found}"))
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<Token> {
        if self.is_kw(k) {
            Ok(self.bump())
        } else {
            let found = Self::describe(&self.peek().tok);
            self.error(format!("expected `{k}`, found {found}"))
        }
    }

    fn ident(&mut self) -> PResult<(String, usize, usize)> {
        match self.peek().tok.clone() {
            Tok::Ident(x) => {
                let t = self.bump();
                Ok((x, t.line, t.col))
            }
            other => self.error(format!("expected identifier, found {}", Self::describe(&other))),
        }
    }

    // program := ("var" ident ("," ident)* ";")? seq EOF
    fn program(&mut self) -> PResult<(Option<Vec<Declared>>, RawNode)> {
        let mut declared = None;
        if self.is_kw("var") {
            self.bump();
            let mut names = vec![self.ident()?];
            while self.is_sym(",") {
                self.bump();
                names.push(self.ident()?);
            }
            self.expect_sym(";")?;
            declared = Some(names);
        }
        let root = self.seq()?;
        if !matches!(self.peek().tok, Tok::Eof) {
            let found = Self::describe(&self.peek().tok);
            return self.error(format!("expected `;` or end of input, found {found}"));
        }
        Ok((declared, root))
    }

    fn seq(&mut self) -> PResult<RawNode> {
        let first = self.instr()?;
        if self.is_sym(";") {
            self.bump();
            let rest = self.seq()?;
            let (line, col) = (first.line, first.col);
            return Ok(RawNode {
                label: None,
                line,
                col,
                kind: RawInstr::Seq(Box::new(first), Box::new(rest)),
            });
        }
        Ok(first)
    }

    fn block(&mut self) -> PResult<RawNode> {
        self.expect_sym("{")?;
        let body = self.seq()?;
        self.expect_sym("}")?;
        Ok(body)
    }

    fn instr(&mut self) -> PResult<RawNode> {
        let (line, col) = (self.peek().line, self.peek().col);
        let mut label = None;
        if self.is_sym("^") {
            self.bump();
            match self.peek().tok.clone() {
                Tok::Num(q) if q.is_integer() && q >= Rational::from_integer(0.into()) => {
                    self.bump();
                    let n: Label = q
                        .to_integer()
                        .try_into()
                        .map_err(|_| ParseError::Syntax { line, col, message: "label too large".into() })?;
                    label = Some(n);
                }
                _ => return self.error("expected a non-negative integer label after `^`"),
            }
        }
        let kind = match self.peek().tok.clone() {
            Tok::Kw("skip") => {
                self.bump();
                RawInstr::Skip
            }
            Tok::Kw("if") => {
                self.bump();
                let test = self.test()?;
                if self.is_kw("then") {
                    self.bump();
                }
                let then_branch = self.block()?;
                if !self.is_kw("else") {
                    return self.error("expected `else`: every `if` needs an else-branch");
                }
                self.bump();
                let else_branch = self.block()?;
                RawInstr::If(test, Box::new(then_branch), Box::new(else_branch))
            }
            Tok::Kw("while") => {
                self.bump();
                let test = self.test()?;
                let body = self.block()?;
                RawInstr::While(test, Box::new(body))
            }
            Tok::Sym("(") => {
                self.bump();
                let mut targets = vec![self.ident()?];
                while self.is_sym(",") {
                    self.bump();
                    targets.push(self.ident()?);
                }
                self.expect_sym(")")?;
                self.expect_sym("=")?;
                self.expect_kw("input")?;
                self.expect_sym("(")?;
                self.expect_sym(")")?;
                let mut seen = HashSet::new();
                for (name, l, c) in &targets {
                    if !seen.insert(name.clone()) {
                        return Err(ParseError::Syntax {
                            line: *l,
                            col: *c,
                            message: format!("`{name}` appears twice in an input target list"),
                        });
                    }
                }
                RawInstr::Input(targets.into_iter().map(|t| t.0).collect())
            }
            Tok::Ident(_) => {
                let (var, _, _) = self.ident()?;
                self.expect_sym("=")?;
                let e = self.expr()?;
                RawInstr::Assign(var, e)
            }
            other => {
                return self.error(format!("expected an instruction, found {}", Self::describe(&other)))
            }
        };
        Ok(RawNode { label, line, col, kind })
    }

    // test := "!" test_atom | test_atom
    fn test(&mut self) -> PResult<Test> {
        if self.is_sym("!") {
            self.bump();
            return Ok(Test::not(self.test()?));
        }
        if self.is_sym("(") {
            let save = self.pos;
            self.bump();
            if let Ok(t) = self.test() {
                if self.is_sym(")") {
                    self.bump();
                    return Ok(t);
                }
            }
            self.pos = save;
        }
        let lhs = self.expr()?;
        let op = match self.peek().tok.clone() {
            Tok::Sym(s @ ("<=" | "<" | "==" | "!=" | ">=" | ">")) => {
                self.bump();
                s
            }
            other => {
                return self.error(format!("expected a comparison operator, found {}", Self::describe(&other)))
            }
        };
        let rhs = self.expr()?;
        Ok(match op {
            "<=" => Test::cmp(CmpOp::Le, lhs, rhs),
            "<" => Test::cmp(CmpOp::Lt, lhs, rhs),
            "==" => Test::cmp(CmpOp::Eq, lhs, rhs),
            "!=" => Test::cmp(CmpOp::Ne, lhs, rhs),
            // a >= b is sugar for !(a < b), a > b for !(a <= b)
            ">=" => Test::not(Test::cmp(CmpOp::Lt, lhs, rhs)),
            _ => Test::not(Test::cmp(CmpOp::Le, lhs, rhs)),
        })
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.is_sym("+") {
                BinOp::Add
            } else if self.is_sym("-") {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.is_sym("*") {
                BinOp::Mul
            } else if self.is_sym("/") {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.is_sym("-") {
            self.bump();
            return Ok(Expr::neg(self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Expr> {
        match self.peek().tok.clone() {
            Tok::Num(q) => {
                self.bump();
                Ok(Expr::Lit(q))
            }
            Tok::Ident(x) => {
                self.bump();
                Ok(Expr::Var(x))
            }
            Tok::Sym("(") => {
                // `(-3/2)` with the sign touching the number is a negative literal.
                let minus = self.peek_at(1);
                let num = self.peek_at(2);
                if matches!(minus.tok, Tok::Sym("-"))
                    && minus.end == num.start
                    && matches!(self.peek_at(3).tok, Tok::Sym(")"))
                {
                    if let Tok::Num(q) = num.tok.clone() {
                        self.pos += 4;
                        return Ok(Expr::Lit(-q));
                    }
                }
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            other => self.error(format!("expected an expression, found {}", Self::describe(&other))),
        }
    }
}

/// Assigns labels to unlabeled nodes in preorder, skipping labels that
/// appear explicitly anywhere in the program.
fn assign_labels(root: RawNode) -> PResult<Instr> {
    let mut explicit: HashMap<Label, (usize, usize)> = HashMap::new();
    collect_explicit(&root, &mut explicit)?;
    let mut next: Label = 1;
    let mut fresh = || {
        while explicit.contains_key(&next) {
            next += 1;
        }
        let l = next;
        next += 1;
        l
    };
    Ok(build(root, &mut fresh))
}

fn collect_explicit(node: &RawNode, seen: &mut HashMap<Label, (usize, usize)>) -> PResult<()> {
    if let Some(l) = node.label {
        if seen.insert(l, (node.line, node.col)).is_some() {
            return Err(ParseError::DuplicateLabel { label: l, line: node.line, col: node.col });
        }
    }
    match &node.kind {
        RawInstr::If(_, a, b) | RawInstr::Seq(a, b) => {
            collect_explicit(a, seen)?;
            collect_explicit(b, seen)
        }
        RawInstr::While(_, body) => collect_explicit(body, seen),
        _ => Ok(()),
    }
}

fn build(node: RawNode, fresh: &mut impl FnMut() -> Label) -> Instr {
    if let RawInstr::Seq(a, b) = node.kind {
        let a = build(*a, fresh);
        let b = build(*b, fresh);
        return Instr::seq(a, b);
    }
    let label = node.label.unwrap_or_else(&mut *fresh);
    match node.kind {
        RawInstr::Skip => Instr::Skip { label },
        RawInstr::Assign(var, expr) => Instr::Assign { label, var, expr },
        RawInstr::If(test, a, b) => {
            let then_branch = Arc::new(build(*a, fresh));
            let else_branch = Arc::new(build(*b, fresh));
            Instr::If { label, test, then_branch, else_branch }
        }
        RawInstr::While(test, body) => Instr::While { label, test, body: Arc::new(build(*body, fresh)) },
        RawInstr::Input(targets) => Instr::Input { label, targets },
        RawInstr::Seq(..) => unreachable!(),
    }
}

/// Parses program text. Unlabeled instructions get fresh labels in
/// preorder; with a `var` header every used variable must be declared.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let (declared, raw) = p.program()?;
    let root = assign_labels(raw)?;
    let used = root.free_vars();
    let declared_vars = match declared {
        None => used,
        Some(names) => {
            let set: BTreeSet<String> = names.iter().map(|n| n.0.clone()).collect();
            if let Some(missing) = used.iter().find(|v| !set.contains(*v)) {
                let (line, col) = locate_ident(text, missing);
                return Err(ParseError::UndeclaredVariable { name: missing.clone(), line, col });
            }
            set
        }
    };
    let exit_label = root.labels().into_iter().max().unwrap_or(0) + 1;
    Ok(Program { root: Arc::new(root), exit_label, declared_vars })
}

/// Parses a standalone expression.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

/// Parses a standalone test.
pub fn parse_test(text: &str) -> Result<Test, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let t = p.test()?;
    p.expect_eof()?;
    Ok(t)
}

impl Parser {
    fn expect_eof(&self) -> PResult<()> {
        match &self.peek().tok {
            Tok::Eof => Ok(()),
            other => self.error(format!("unexpected {}", Self::describe(other))),
        }
    }
}

fn locate_ident(text: &str, name: &str) -> (usize, usize) {
    if let Ok(toks) = lex(text) {
        let mut after_header = false;
        for t in toks {
            if matches!(t.tok, Tok::Sym(";")) {
                after_header = true;
            }
            if after_header && matches!(&t.tok, Tok::Ident(x) if x == name) {
                return (t.line, t.col);
            }
        }
    }
    (1, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn single_assignment() {
        let p = parse_program("^1 x = 3/2").unwrap();
        assert_eq!(*p.root, Instr::Assign { label: 1, var: "x".into(), expr: Expr::Lit(q(3, 2)) });
        assert_eq!(p.exit_label, 2);
    }

    #[test]
    fn while_loop() {
        let p = parse_program("^1 while x < 3 { ^2 x = x + 1 }").unwrap();
        let expected = Instr::While {
            label: 1,
            test: Test::cmp(CmpOp::Lt, Expr::var("x"), Expr::int(3)),
            body: Arc::new(Instr::Assign {
                label: 2,
                var: "x".into(),
                expr: Expr::add(Expr::var("x"), Expr::int(1)),
            }),
        };
        assert_eq!(*p.root, expected);
    }

    #[test]
    fn if_requires_else() {
        let err = parse_program("if x <= y { skip }").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }), "{err}");
    }

    #[test]
    fn duplicate_labels_rejected() {
        let err = parse_program("^1 skip; ^1 skip").unwrap_err();
        assert!(matches!(err, ParseError::DuplicateLabel { label: 1, line: 1, col: 10 }), "{err}");
    }

    #[test]
    fn undeclared_variable_rejected() {
        let err = parse_program("var x;\nx = y").unwrap_err();
        assert!(
            matches!(&err, ParseError::UndeclaredVariable { name, line: 2, .. } if name == "y"),
            "{err}"
        );
    }

    #[test]
    fn auto_labels_skip_explicit_ones() {
        let p = parse_program("skip; ^1 skip; if 0 < 1 { skip } else { ^3 skip }").unwrap();
        assert_eq!(p.root.labels(), vec![2, 1, 4, 5, 3]);
        assert_eq!(p.exit_label, 6);
    }

    #[test]
    fn division_by_literal_zero_is_a_division() {
        let e = parse_expr("1/0").unwrap();
        assert_eq!(e, Expr::div(Expr::int(1), Expr::int(0)));
        assert_eq!(parse_expr("6/4").unwrap(), Expr::Lit(q(3, 2)));
        assert_eq!(parse_expr("6 / 4").unwrap(), Expr::div(Expr::int(6), Expr::int(4)));
        assert_eq!(parse_expr("1.5").unwrap(), Expr::Lit(q(3, 2)));
    }

    #[test]
    fn negative_literals_and_negation() {
        assert_eq!(parse_expr("(-3/2)").unwrap(), Expr::Lit(q(-3, 2)));
        assert_eq!(parse_expr("(- 3)").unwrap(), Expr::neg(Expr::int(3)));
        assert_eq!(parse_expr("-(x)").unwrap(), Expr::neg(Expr::var("x")));
        assert_eq!(parse_expr("-x * 2").unwrap(), Expr::mul(Expr::neg(Expr::var("x")), Expr::int(2)));
    }

    #[test]
    fn tests_with_parentheses_and_sugar() {
        let t = parse_test("!(x < y)").unwrap();
        assert_eq!(t, Test::not(Test::cmp(CmpOp::Lt, Expr::var("x"), Expr::var("y"))));
        let t = parse_test("(x + 1) <= 2").unwrap();
        assert_eq!(t, Test::cmp(CmpOp::Le, Expr::add(Expr::var("x"), Expr::int(1)), Expr::int(2)));
        let t = parse_test("x >= y").unwrap();
        assert_eq!(t, Test::not(Test::cmp(CmpOp::Lt, Expr::var("x"), Expr::var("y"))));
        let t = parse_test("x > y").unwrap();
        assert_eq!(t, Test::not(Test::cmp(CmpOp::Le, Expr::var("x"), Expr::var("y"))));
    }

    #[test]
    fn input_instruction() {
        let p = parse_program("^4 (x, y) = input()").unwrap();
        assert_eq!(*p.root, Instr::Input { label: 4, targets: vec!["x".into(), "y".into()] });
        assert!(parse_program("(x, x) = input()").is_err());
        assert!(parse_program("() = input()").is_err());
    }

    #[test]
    fn comments_and_then_keyword() {
        let src = "# header\nvar x, y;\n^1 if x == 1 then { y = 1 } else { y = 2 } # trailing\n";
        let p = parse_program(src).unwrap();
        assert_eq!(p.declared_vars.len(), 2);
        assert!(matches!(*p.root, Instr::If { label: 1, .. }));
    }

    #[test]
    fn syntax_error_positions() {
        let err = parse_program("x = 1;\n  y = $").unwrap_err();
        assert_eq!(err, ParseError::Syntax { line: 2, col: 7, message: "unexpected character `$`".into() });
    }
}
