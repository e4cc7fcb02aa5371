//! Text syntax for function expressions (`pow(2, t)`, `exp((0+6.283185307179586i) * t)`)
//! and Weyl-algebra expressions (`d*X - 2*X*d`, `(1 - X/2)^2`, `Xinv`).
//!
//! Both grammars share one lexer and one precedence-climbing parser:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' ['-' | '+'] INT | '^' '(' ['-' | '+'] INT ')')*
//! atom   := NUM | NUM 'i' | IDENT | IDENT '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Constant subexpressions are folded while parsing, so `(0.3+0.1i)` is a
//! single literal and printing then reparsing gives back the same tree.

use std::f64::consts::{E, PI};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{AlgebraParams, WeylElement};
use crate::function::{AnalyticFunction, Expr};
use crate::numfmt::fmt_literal;
use crate::C64;

/// Largest accepted `|n|` in `^n`.
pub const MAX_EXPONENT: i64 = 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("exponent overflow at position {pos}: |n| must be at most {MAX_EXPONENT}")]
    ExponentOverflow { pos: usize },
}

fn syntax<T>(pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError::Syntax { pos, msg: msg.into() })
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Imag(f64),
    Ident(String),
    Int(String),
    Sym(char),
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if ch.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if ch.is_ascii_digit() || (ch == '.' && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit())) {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let mut integral = true;
            if i < chars.len() && chars[i] == '.' {
                integral = false;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    integral = false;
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v: f64 = match s.parse() {
                Ok(v) => v,
                Err(_) => return syntax(start, format!("bad number {s:?}")),
            };
            let imag = i < chars.len()
                && chars[i] == 'i'
                && !chars.get(i + 1).is_some_and(|c| c.is_alphanumeric() || *c == '_');
            if imag {
                i += 1;
                out.push((Tok::Imag(v), start));
            } else if integral {
                out.push((Tok::Int(s), start));
            } else {
                out.push((Tok::Num(v), start));
            }
        } else if ch.is_alphabetic() || ch == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), start));
        } else if "+-*/^(),".contains(ch) {
            i += 1;
            out.push((Tok::Sym(ch), start));
        } else {
            return syntax(start, format!("unexpected character {ch:?}"));
        }
    }
    out.push((Tok::End, chars.len()));
    Ok(out)
}

/// Node constructors for one concrete grammar.
trait Grammar {
    type Node;
    fn constant(&self, c: C64) -> Self::Node;
    fn ident(&self, name: &str, pos: usize) -> Result<Self::Node, ParseError>;
    fn call(&self, name: &str, args: Vec<Self::Node>, pos: usize) -> Result<Self::Node, ParseError>;
    fn add(&self, a: Self::Node, b: Self::Node) -> Self::Node;
    fn neg(&self, a: Self::Node) -> Self::Node;
    fn mul(&self, a: Self::Node, b: Self::Node) -> Self::Node;
    fn div(&self, a: Self::Node, b: Self::Node, pos: usize) -> Result<Self::Node, ParseError>;
    fn pow(&self, a: Self::Node, n: i64, pos: usize) -> Result<Self::Node, ParseError>;
}

struct Parser<'g, G: Grammar> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    g: &'g G,
}

impl<G: Grammar> Parser<'_, G> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            syntax(self.pos(), format!("expected '{c}'"))
        }
    }

    fn full(&mut self) -> Result<G::Node, ParseError> {
        let e = self.expr()?;
        if *self.peek() != Tok::End {
            return syntax(self.pos(), "unexpected trailing input");
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<G::Node, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                let rhs = self.term()?;
                acc = self.g.add(acc, rhs);
            } else if self.eat('-') {
                let rhs = self.term()?;
                acc = self.g.add(acc, self.g.neg(rhs));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<G::Node, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                let rhs = self.unary()?;
                acc = self.g.mul(acc, rhs);
            } else if *self.peek() == Tok::Sym('/') {
                let pos = self.bump().1;
                let rhs = self.unary()?;
                acc = self.g.div(acc, rhs, pos)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<G::Node, ParseError> {
        if self.eat('-') {
            let inner = self.unary()?;
            Ok(self.g.neg(inner))
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<G::Node, ParseError> {
        let mut base = self.atom()?;
        while *self.peek() == Tok::Sym('^') {
            let pos = self.bump().1;
            let paren = self.eat('(');
            let negative = if self.eat('-') {
                true
            } else {
                self.eat('+');
                false
            };
            let n = match self.bump() {
                (Tok::Int(s), p) => match s.parse::<i64>() {
                    Ok(n) if n <= MAX_EXPONENT => n,
                    _ => return Err(ParseError::ExponentOverflow { pos: p }),
                },
                (_, p) => return syntax(p, "exponent must be an integer literal"),
            };
            if paren {
                self.expect(')')?;
            }
            base = self.g.pow(base, if negative { -n } else { n }, pos)?;
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<G::Node, ParseError> {
        match self.bump() {
            (Tok::Int(s), p) => match s.parse::<f64>() {
                Ok(v) => Ok(self.g.constant(C64::new(v, 0.0))),
                Err(_) => syntax(p, format!("bad number {s:?}")),
            },
            (Tok::Num(v), _) => Ok(self.g.constant(C64::new(v, 0.0))),
            (Tok::Imag(v), _) => Ok(self.g.constant(C64::new(0.0, v))),
            (Tok::Ident(name), p) => {
                if self.eat('(') {
                    let mut args = vec![self.expr()?];
                    while self.eat(',') {
                        args.push(self.expr()?);
                    }
                    self.expect(')')?;
                    self.g.call(&name, args, p)
                } else {
                    self.g.ident(&name, p)
                }
            }
            (Tok::Sym('('), _) => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            (Tok::End, p) => syntax(p, "unexpected end of input"),
            (Tok::Sym(c), p) => syntax(p, format!("unexpected '{c}'")),
        }
    }
}

fn run<G: Grammar>(g: &G, text: &str) -> Result<G::Node, ParseError> {
    Parser {
        toks: lex(text)?,
        at: 0,
        g,
    }
    .full()
}

fn shared_constant(name: &str) -> Option<C64> {
    match name {
        "i" => Some(C64::new(0.0, 1.0)),
        "pi" => Some(C64::new(PI, 0.0)),
        "e" => Some(C64::new(E, 0.0)),
        _ => None,
    }
}

fn check_exponent(n: i64, pos: usize) -> Result<(), ParseError> {
    if n.abs() > MAX_EXPONENT {
        Err(ParseError::ExponentOverflow { pos })
    } else {
        Ok(())
    }
}

// Function expressions.

struct FnGrammar;

fn as_const(e: &Expr) -> Option<C64> {
    e.as_const()
}

impl Grammar for FnGrammar {
    type Node = Expr;

    fn constant(&self, c: C64) -> Expr {
        Expr::Const(c)
    }

    fn ident(&self, name: &str, pos: usize) -> Result<Expr, ParseError> {
        if name == "t" {
            return Ok(Expr::Var);
        }
        match shared_constant(name) {
            Some(c) => Ok(Expr::Const(c)),
            None => syntax(pos, format!("unknown identifier {name:?}")),
        }
    }

    fn call(&self, name: &str, mut args: Vec<Expr>, pos: usize) -> Result<Expr, ParseError> {
        let arity = match name {
            "exp" | "sin" | "cos" => 1,
            "pow" => 2,
            _ => return syntax(pos, format!("unknown function {name:?}")),
        };
        if args.len() != arity {
            return syntax(pos, format!("{name} takes {arity} argument(s), got {}", args.len()));
        }
        let last = Arc::new(args.pop().unwrap());
        Ok(match name {
            "exp" => Expr::Exp(last),
            "sin" => Expr::Sin(last),
            "cos" => Expr::Cos(last),
            _ => match as_const(&args[0]) {
                Some(b) if b != C64::new(0.0, 0.0) => Expr::ConstPow(b, last),
                _ => return syntax(pos, "pow base must be a nonzero constant"),
            },
        })
    }

    fn add(&self, a: Expr, b: Expr) -> Expr {
        match (as_const(&a), as_const(&b)) {
            (Some(x), Some(y)) => Expr::Const(x + y),
            _ => Expr::Add(Arc::new(a), Arc::new(b)),
        }
    }

    fn neg(&self, a: Expr) -> Expr {
        match as_const(&a) {
            Some(x) => Expr::Const(-x),
            None => Expr::Neg(Arc::new(a)),
        }
    }

    fn mul(&self, a: Expr, b: Expr) -> Expr {
        match (as_const(&a), as_const(&b)) {
            (Some(x), Some(y)) => Expr::Const(x * y),
            _ => Expr::Mul(Arc::new(a), Arc::new(b)),
        }
    }

    fn div(&self, a: Expr, b: Expr, _pos: usize) -> Result<Expr, ParseError> {
        Ok(match (as_const(&a), as_const(&b)) {
            (Some(x), Some(y)) if y != C64::new(0.0, 0.0) => Expr::Const(x / y),
            _ => Expr::Div(Arc::new(a), Arc::new(b)),
        })
    }

    fn pow(&self, a: Expr, n: i64, pos: usize) -> Result<Expr, ParseError> {
        check_exponent(n, pos)?;
        let n = n as i32;
        Ok(match as_const(&a) {
            Some(c) if n >= 0 || c != C64::new(0.0, 0.0) => Expr::Const(c.powi(n)),
            _ => Expr::Pow(Arc::new(a), n),
        })
    }
}

/// Parses a function expression in the variable `t`.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    run(&FnGrammar, text)
}

pub fn parse_function(text: &str) -> Result<AnalyticFunction, ParseError> {
    parse_expr(text).map(AnalyticFunction::from_expr)
}

// Weyl-algebra expressions.

/// Parse tree for an element of the localized algebra.
#[derive(Clone, Debug, PartialEq)]
pub enum WeylExpr {
    Scalar(C64),
    X,
    XInv,
    D,
    Add(Box<WeylExpr>, Box<WeylExpr>),
    Neg(Box<WeylExpr>),
    Mul(Box<WeylExpr>, Box<WeylExpr>),
    /// Division by a nonzero scalar.
    Div(Box<WeylExpr>, C64),
    Pow(Box<WeylExpr>, i64),
}

impl WeylExpr {
    fn as_scalar(&self) -> Option<C64> {
        match self {
            WeylExpr::Scalar(c) => Some(*c),
            _ => None,
        }
    }

    /// Normal form under the given commutation parameter.
    pub fn to_element(&self, params: &AlgebraParams) -> WeylElement {
        match self {
            WeylExpr::Scalar(c) => WeylElement::scalar(*c),
            WeylExpr::X => WeylElement::x(),
            WeylExpr::XInv => WeylElement::x_inv(),
            WeylExpr::D => WeylElement::d(),
            WeylExpr::Add(a, b) => a.to_element(params) + b.to_element(params),
            WeylExpr::Neg(a) => -a.to_element(params),
            WeylExpr::Mul(a, b) => params.multiply(&a.to_element(params), &b.to_element(params)),
            WeylExpr::Div(a, c) => a.to_element(params).scale(c.inv()),
            WeylExpr::Pow(a, n) => match (&**a, *n) {
                (WeylExpr::X, n) => WeylElement::x_pow(n),
                (WeylExpr::XInv, n) => WeylElement::x_pow(-n),
                (a, n) => params.power(&a.to_element(params), n as u32),
            },
        }
    }
}

impl fmt::Display for WeylExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeylExpr::Scalar(c) => write!(f, "{}", fmt_literal(*c)),
            WeylExpr::X => write!(f, "X"),
            WeylExpr::XInv => write!(f, "Xinv"),
            WeylExpr::D => write!(f, "d"),
            WeylExpr::Add(a, b) => write!(f, "({a} + {b})"),
            WeylExpr::Neg(a) => write!(f, "(-{a})"),
            WeylExpr::Mul(a, b) => write!(f, "({a} * {b})"),
            WeylExpr::Div(a, c) => write!(f, "({a} / {})", fmt_literal(*c)),
            WeylExpr::Pow(a, n) => write!(f, "({a}^{n})"),
        }
    }
}

struct WeylGrammar;

impl Grammar for WeylGrammar {
    type Node = WeylExpr;

    fn constant(&self, c: C64) -> WeylExpr {
        WeylExpr::Scalar(c)
    }

    fn ident(&self, name: &str, pos: usize) -> Result<WeylExpr, ParseError> {
        match name {
            "X" => Ok(WeylExpr::X),
            "Xinv" => Ok(WeylExpr::XInv),
            "d" => Ok(WeylExpr::D),
            _ => match shared_constant(name) {
                Some(c) => Ok(WeylExpr::Scalar(c)),
                None => syntax(pos, format!("unknown symbol {name:?}; expected X, Xinv or d")),
            },
        }
    }

    fn call(&self, name: &str, _args: Vec<WeylExpr>, pos: usize) -> Result<WeylExpr, ParseError> {
        syntax(pos, format!("function call {name:?} is not allowed in algebra expressions"))
    }

    fn add(&self, a: WeylExpr, b: WeylExpr) -> WeylExpr {
        match (a.as_scalar(), b.as_scalar()) {
            (Some(x), Some(y)) => WeylExpr::Scalar(x + y),
            _ => WeylExpr::Add(Box::new(a), Box::new(b)),
        }
    }

    fn neg(&self, a: WeylExpr) -> WeylExpr {
        match a.as_scalar() {
            Some(x) => WeylExpr::Scalar(-x),
            None => WeylExpr::Neg(Box::new(a)),
        }
    }

    fn mul(&self, a: WeylExpr, b: WeylExpr) -> WeylExpr {
        match (a.as_scalar(), b.as_scalar()) {
            (Some(x), Some(y)) => WeylExpr::Scalar(x * y),
            _ => WeylExpr::Mul(Box::new(a), Box::new(b)),
        }
    }

    fn div(&self, a: WeylExpr, b: WeylExpr, pos: usize) -> Result<WeylExpr, ParseError> {
        match b.as_scalar() {
            Some(y) if y == C64::new(0.0, 0.0) => syntax(pos, "division by zero"),
            Some(y) => Ok(match a.as_scalar() {
                Some(x) => WeylExpr::Scalar(x / y),
                None => WeylExpr::Div(Box::new(a), y),
            }),
            None => syntax(pos, "division is only allowed by a scalar"),
        }
    }

    fn pow(&self, a: WeylExpr, n: i64, pos: usize) -> Result<WeylExpr, ParseError> {
        check_exponent(n, pos)?;
        if let Some(c) = a.as_scalar() {
            if n < 0 && c == C64::new(0.0, 0.0) {
                return syntax(pos, "negative power of zero");
            }
            return Ok(WeylExpr::Scalar(c.powi(n as i32)));
        }
        if n < 0 && !matches!(a, WeylExpr::X | WeylExpr::XInv) {
            return syntax(pos, "negative exponents apply only to X and Xinv");
        }
        Ok(WeylExpr::Pow(Box::new(a), n))
    }
}

pub fn parse_weyl_expr(text: &str) -> Result<WeylExpr, ParseError> {
    run(&WeylGrammar, text)
}

/// Parses and normalizes an algebra expression.
pub fn parse_weyl(text: &str, params: &AlgebraParams) -> Result<WeylElement, ParseError> {
    parse_weyl_expr(text).map(|e| e.to_element(params))
}
