//! Expression trees for analytic functions over ℂ, with pointwise
//! evaluation and symbolic differentiation, plus [`Function`], the evaluable
//! handle that the operator semantics pass around.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::numfmt::fmt_literal;
use crate::C64;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum EvalError {
    #[error("pole at t = {0}")]
    Pole(C64),
    #[error("t = {0} is outside the domain C*")]
    Domain(C64),
    #[error("non-finite value at t = {0}")]
    Overflow(C64),
}

pub type EvalResult = Result<C64, EvalError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Domain {
    #[default]
    Plane,
    Punctured,
}

/// Expression node. Children are shared so derivatives stay cheap to build.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(C64),
    Var,
    Add(Arc<Expr>, Arc<Expr>),
    Neg(Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Pow(Arc<Expr>, i32),
    Exp(Arc<Expr>),
    Sin(Arc<Expr>),
    Cos(Arc<Expr>),
    /// `b^e = exp(e · Log b)` with the principal logarithm; `b ≠ 0`.
    ConstPow(C64, Arc<Expr>),
}

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

impl Expr {
    pub fn eval(&self, t: C64) -> EvalResult {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var => t,
            Expr::Add(a, b) => a.eval(t)? + b.eval(t)?,
            Expr::Neg(a) => -a.eval(t)?,
            Expr::Mul(a, b) => a.eval(t)? * b.eval(t)?,
            Expr::Div(a, b) => {
                let den = b.eval(t)?;
                if den == ZERO {
                    return Err(EvalError::Pole(t));
                }
                a.eval(t)? / den
            }
            Expr::Pow(a, n) => {
                let base = a.eval(t)?;
                if *n < 0 && base == ZERO {
                    return Err(EvalError::Pole(t));
                }
                base.powi(*n)
            }
            Expr::Exp(a) => a.eval(t)?.exp(),
            Expr::Sin(a) => a.eval(t)?.sin(),
            Expr::Cos(a) => a.eval(t)?.cos(),
            Expr::ConstPow(b, e) => (e.eval(t)? * b.ln()).exp(),
        })
    }

    /// Symbolic derivative in `t`, lightly simplified.
    pub fn derivative(&self) -> Arc<Expr> {
        match self {
            Expr::Const(_) => konst(ZERO),
            Expr::Var => konst(ONE),
            Expr::Add(a, b) => add(a.derivative(), b.derivative()),
            Expr::Neg(a) => neg(a.derivative()),
            Expr::Mul(a, b) => add(
                mul(a.derivative(), b.clone()),
                mul(a.clone(), b.derivative()),
            ),
            Expr::Div(a, b) => div(
                add(
                    mul(a.derivative(), b.clone()),
                    neg(mul(a.clone(), b.derivative())),
                ),
                pow(b.clone(), 2),
            ),
            Expr::Pow(a, n) => {
                if *n == 0 {
                    konst(ZERO)
                } else {
                    mul(
                        mul(konst(C64::new(*n as f64, 0.0)), pow(a.clone(), n - 1)),
                        a.derivative(),
                    )
                }
            }
            Expr::Exp(a) => mul(Arc::new(Expr::Exp(a.clone())), a.derivative()),
            Expr::Sin(a) => mul(Arc::new(Expr::Cos(a.clone())), a.derivative()),
            Expr::Cos(a) => neg(mul(Arc::new(Expr::Sin(a.clone())), a.derivative())),
            Expr::ConstPow(b, e) => mul(
                mul(Arc::new(Expr::ConstPow(*b, e.clone())), konst(b.ln())),
                e.derivative(),
            ),
        }
    }

    pub fn as_const(&self) -> Option<C64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var => 1,
            Expr::Add(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.node_count() + b.node_count()
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Exp(a) | Expr::Sin(a) | Expr::Cos(a) => {
                1 + a.node_count()
            }
            Expr::ConstPow(_, e) => 1 + e.node_count(),
        }
    }
}

// Simplifying constructors used by differentiation and the operator layer.

pub(crate) fn konst(c: C64) -> Arc<Expr> {
    Arc::new(Expr::Const(c))
}

pub(crate) fn add(a: Arc<Expr>, b: Arc<Expr>) -> Arc<Expr> {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => konst(x + y),
        (Some(x), _) if x == ZERO => b,
        (_, Some(y)) if y == ZERO => a,
        _ => Arc::new(Expr::Add(a, b)),
    }
}

pub(crate) fn neg(a: Arc<Expr>) -> Arc<Expr> {
    match &*a {
        Expr::Const(c) => konst(-c),
        Expr::Neg(inner) => inner.clone(),
        _ => Arc::new(Expr::Neg(a)),
    }
}

pub(crate) fn mul(a: Arc<Expr>, b: Arc<Expr>) -> Arc<Expr> {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => konst(x * y),
        (Some(x), _) | (_, Some(x)) if x == ZERO => konst(ZERO),
        (Some(x), _) if x == ONE => b,
        (_, Some(y)) if y == ONE => a,
        _ => Arc::new(Expr::Mul(a, b)),
    }
}

pub(crate) fn div(a: Arc<Expr>, b: Arc<Expr>) -> Arc<Expr> {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) if y != ZERO => konst(x / y),
        (Some(x), _) if x == ZERO => konst(ZERO),
        (_, Some(y)) if y == ONE => a,
        _ => Arc::new(Expr::Div(a, b)),
    }
}

pub(crate) fn pow(a: Arc<Expr>, n: i32) -> Arc<Expr> {
    match (n, a.as_const()) {
        (0, _) => konst(ONE),
        (1, _) => a,
        (_, Some(c)) if n > 0 || c != ZERO => konst(c.powi(n)),
        _ => Arc::new(Expr::Pow(a, n)),
    }
}

fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Const(c) => write!(f, "{}", fmt_literal(*c)),
        Expr::Var => write!(f, "t"),
        Expr::Add(a, b) => {
            write!(f, "(")?;
            write_expr(a, f)?;
            write!(f, " + ")?;
            write_expr(b, f)?;
            write!(f, ")")
        }
        Expr::Neg(a) => {
            write!(f, "(-")?;
            write_expr(a, f)?;
            write!(f, ")")
        }
        Expr::Mul(a, b) => {
            write!(f, "(")?;
            write_expr(a, f)?;
            write!(f, " * ")?;
            write_expr(b, f)?;
            write!(f, ")")
        }
        Expr::Div(a, b) => {
            write!(f, "(")?;
            write_expr(a, f)?;
            write!(f, " / ")?;
            write_expr(b, f)?;
            write!(f, ")")
        }
        Expr::Pow(a, n) => {
            write!(f, "(")?;
            write_expr(a, f)?;
            write!(f, "^{n})")
        }
        Expr::Exp(a) => {
            write!(f, "exp(")?;
            write_expr(a, f)?;
            write!(f, ")")
        }
        Expr::Sin(a) => {
            write!(f, "sin(")?;
            write_expr(a, f)?;
            write!(f, ")")
        }
        Expr::Cos(a) => {
            write!(f, "cos(")?;
            write_expr(a, f)?;
            write!(f, ")")
        }
        Expr::ConstPow(b, e) => {
            write!(f, "pow({}, ", fmt_literal(*b))?;
            write_expr(e, f)?;
            write!(f, ")")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, f)
    }
}

/// An expression tree together with its declared domain.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticFunction {
    expr: Arc<Expr>,
    domain: Domain,
}

impl AnalyticFunction {
    pub fn new(expr: Arc<Expr>, domain: Domain) -> Self {
        Self { expr, domain }
    }

    pub fn from_expr(expr: Expr) -> Self {
        Self::new(Arc::new(expr), Domain::Plane)
    }

    pub fn var() -> Self {
        Self::from_expr(Expr::Var)
    }

    pub fn constant(c: C64) -> Self {
        Self::from_expr(Expr::Const(c))
    }

    /// `b^t`.
    pub fn const_pow(b: C64) -> Self {
        Self::from_expr(Expr::ConstPow(b, Arc::new(Expr::Var)))
    }

    pub fn expr(&self) -> &Arc<Expr> {
        &self.expr
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn evaluate(&self, t: C64) -> EvalResult {
        if self.domain == Domain::Punctured && t == ZERO {
            return Err(EvalError::Domain(t));
        }
        let v = self.expr.eval(t)?;
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::Overflow(t))
        }
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.expr.derivative(), self.domain)
    }

    fn join(&self, other: &Self, expr: Arc<Expr>) -> Self {
        let domain = if self.domain == Domain::Punctured || other.domain == Domain::Punctured {
            Domain::Punctured
        } else {
            Domain::Plane
        };
        Self::new(expr, domain)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.join(other, add(self.expr.clone(), other.expr.clone()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.join(other, add(self.expr.clone(), neg(other.expr.clone())))
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.join(other, mul(self.expr.clone(), other.expr.clone()))
    }

    pub fn div(&self, other: &Self) -> Self {
        self.join(other, div(self.expr.clone(), other.expr.clone()))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::new(mul(konst(c), self.expr.clone()), self.domain)
    }

    pub fn powi(&self, n: i32) -> Self {
        Self::new(pow(self.expr.clone(), n), self.domain)
    }

    pub fn exp(&self) -> Self {
        Self::new(Arc::new(Expr::Exp(self.expr.clone())), self.domain)
    }

    pub fn sin(&self) -> Self {
        Self::new(Arc::new(Expr::Sin(self.expr.clone())), self.domain)
    }

    pub fn cos(&self) -> Self {
        Self::new(Arc::new(Expr::Cos(self.expr.clone())), self.domain)
    }
}

impl fmt::Display for AnalyticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(&self.expr, f)
    }
}

type Closure = dyn Fn(C64) -> EvalResult + Send + Sync;

/// Something that can be evaluated pointwise: either an expression tree
/// (which also supports symbolic differentiation) or an opaque closure.
#[derive(Clone)]
pub struct Function {
    repr: Repr,
}

#[derive(Clone)]
enum Repr {
    Expr(AnalyticFunction),
    Closure(Arc<Closure>),
}

impl Function {
    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(C64) -> EvalResult + Send + Sync + 'static,
    {
        Self {
            repr: Repr::Closure(Arc::new(f)),
        }
    }

    pub fn constant(c: C64) -> Self {
        AnalyticFunction::constant(c).into()
    }

    pub fn eval(&self, t: C64) -> EvalResult {
        match &self.repr {
            Repr::Expr(e) => e.evaluate(t),
            Repr::Closure(f) => f(t),
        }
    }

    pub fn as_analytic(&self) -> Option<&AnalyticFunction> {
        match &self.repr {
            Repr::Expr(e) => Some(e),
            Repr::Closure(_) => None,
        }
    }

    /// Pointwise `self / other`; symbolic when both sides are.
    pub fn divide(&self, other: &Function) -> Function {
        if let (Some(a), Some(b)) = (self.as_analytic(), other.as_analytic()) {
            return a.div(b).into();
        }
        let (a, b) = (self.clone(), other.clone());
        Function::from_fn(move |t| {
            let den = b.eval(t)?;
            if den == ZERO {
                return Err(EvalError::Pole(t));
            }
            Ok(a.eval(t)? / den)
        })
    }

    /// Pointwise sum of scaled functions; symbolic when every part is.
    pub fn linear_combination(parts: Vec<(C64, Function)>) -> Function {
        if parts.iter().all(|(_, f)| f.as_analytic().is_some()) {
            let mut acc = AnalyticFunction::constant(ZERO);
            for (c, f) in &parts {
                acc = acc.add(&f.as_analytic().unwrap().scale(*c));
            }
            return acc.into();
        }
        Function::from_fn(move |t| {
            let mut acc = ZERO;
            for (c, f) in &parts {
                acc += c * f.eval(t)?;
            }
            Ok(acc)
        })
    }
}

impl From<AnalyticFunction> for Function {
    fn from(e: AnalyticFunction) -> Self {
        Self {
            repr: Repr::Expr(e),
        }
    }
}

impl fmt::Debug for Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Expr(e) => write!(f, "Function({e})"),
            Repr::Closure(c) => write!(f, "Function(<closure@{:p}>)", Arc::as_ptr(c)),
        }
    }
}
