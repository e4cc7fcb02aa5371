//! The four module structures: how `X`, `X⁻¹` and `∂` act on functions.
//!
//! | kind               | `(Xf)(t)`      | `(∂f)(t)`                          |
//! |--------------------|----------------|------------------------------------|
//! | Classical          | `t f(t)`       | `f'(t)`                            |
//! | ForwardDifference  | `t f(t−1)`     | `f(t+1) − f(t)`                    |
//! | JacksonA           | `(t−1) f(qt)`  | `(f(t) − f(t/q)) / (t − t/q)`      |
//! | JacksonB           | `t f(qt)`      | `(f(t) − f(t/q)) / (t − t/q)`      |
//!
//! Each satisfies `∂X − λX∂ = 1` with `λ = 1` for the first two and
//! `λ = q` for the Jackson kinds. The generator `p` is the image of `1`
//! under the evaluation map `w ↦ w·p`.

use std::fmt;

use thiserror::Error;

use crate::algebra::{AlgebraParams, LaurentPoly, WeylElement};
use crate::function::{AnalyticFunction, EvalError, EvalResult, Function};
use crate::C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SemanticsError {
    #[error("Jackson models need q != 0 and |q| != 1, got {0}")]
    BadQ(C64),
    #[error("generator is not 1-periodic: |p(t+1) - p(t)| = {residual:e} at t = {at}")]
    NotPeriodic { at: C64, residual: f64 },
    #[error("generator could not be evaluated on the periodicity grid: {0}")]
    GeneratorEval(EvalError),
    #[error("classical derivative needs an expression tree, not a closure")]
    NotSymbolic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Classical,
    ForwardDifference,
    JacksonA,
    JacksonB,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Classical => "classical",
            ModelKind::ForwardDifference => "delta",
            ModelKind::JacksonA => "qa",
            ModelKind::JacksonB => "qb",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Tolerance for the generator periodicity check.
pub const PERIODICITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct ModelSemantics {
    kind: ModelKind,
    q: C64,
    generator: Function,
}

fn check_q(q: C64) -> Result<(), SemanticsError> {
    if q == C64::new(0.0, 0.0) || (q.norm() - 1.0).abs() < 1e-12 {
        return Err(SemanticsError::BadQ(q));
    }
    Ok(())
}

/// Grid used to verify `p(t+1) = p(t)`.
fn periodicity_grid() -> impl Iterator<Item = C64> {
    (0..13).flat_map(|i| {
        let re = -1.3 + 0.25 * i as f64;
        [-0.5, 0.0, 0.5].into_iter().map(move |im| C64::new(re, im))
    })
}

impl ModelSemantics {
    pub fn classical() -> Self {
        Self {
            kind: ModelKind::Classical,
            q: C64::new(1.0, 0.0),
            generator: Function::constant(C64::new(1.0, 0.0)),
        }
    }

    pub fn forward_difference() -> Self {
        Self {
            kind: ModelKind::ForwardDifference,
            ..Self::classical()
        }
    }

    pub fn jackson_a(q: C64) -> Result<Self, SemanticsError> {
        check_q(q)?;
        Ok(Self {
            kind: ModelKind::JacksonA,
            q,
            generator: Function::constant(C64::new(1.0, 0.0)),
        })
    }

    pub fn jackson_b(q: C64) -> Result<Self, SemanticsError> {
        check_q(q)?;
        Ok(Self {
            kind: ModelKind::JacksonB,
            q,
            generator: Function::constant(C64::new(1.0, 0.0)),
        })
    }

    pub fn new(kind: ModelKind, q: C64) -> Result<Self, SemanticsError> {
        match kind {
            ModelKind::Classical => Ok(Self::classical()),
            ModelKind::ForwardDifference => Ok(Self::forward_difference()),
            ModelKind::JacksonA => Self::jackson_a(q),
            ModelKind::JacksonB => Self::jackson_b(q),
        }
    }

    /// Replaces the generator `p`. For the forward-difference model `p`
    /// must be 1-periodic, which is checked on a sample grid.
    pub fn with_generator(mut self, p: Function) -> Result<Self, SemanticsError> {
        if self.kind == ModelKind::ForwardDifference {
            for t in periodicity_grid() {
                let a = p.eval(t).map_err(SemanticsError::GeneratorEval)?;
                let b = p.eval(t + 1.0).map_err(SemanticsError::GeneratorEval)?;
                let residual = (b - a).norm();
                if residual > PERIODICITY_TOL * a.norm().max(1.0) {
                    return Err(SemanticsError::NotPeriodic { at: t, residual });
                }
            }
        }
        self.generator = p;
        Ok(self)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn q(&self) -> C64 {
        self.q
    }

    pub fn generator(&self) -> &Function {
        &self.generator
    }

    /// The deformation parameter of the relation these operators satisfy.
    pub fn lambda(&self) -> C64 {
        match self.kind {
            ModelKind::Classical | ModelKind::ForwardDifference => C64::new(1.0, 0.0),
            ModelKind::JacksonA | ModelKind::JacksonB => self.q,
        }
    }

    pub fn algebra(&self) -> AlgebraParams {
        AlgebraParams::new(self.lambda()).expect("lambda is nonzero by construction")
    }

    pub fn act_x(&self, f: &Function) -> Function {
        let f = f.clone();
        let q = self.q;
        match self.kind {
            ModelKind::Classical => match f.as_analytic() {
                Some(e) => AnalyticFunction::var().mul(e).into(),
                None => Function::from_fn(move |t| Ok(t * f.eval(t)?)),
            },
            ModelKind::ForwardDifference => Function::from_fn(move |t| Ok(t * f.eval(t - 1.0)?)),
            ModelKind::JacksonA => Function::from_fn(move |t| Ok((t - 1.0) * f.eval(q * t)?)),
            ModelKind::JacksonB => Function::from_fn(move |t| Ok(t * f.eval(q * t)?)),
        }
    }

    /// Inverse of [`act_x`](Self::act_x), obtained by solving `Xg = f`.
    /// Introduces a pole at `t = −1` (forward difference), `t = q`
    /// (JacksonA) or `t = 0` (the others).
    pub fn act_x_inv(&self, f: &Function) -> Function {
        let f = f.clone();
        let q = self.q;
        let zero = C64::new(0.0, 0.0);
        match self.kind {
            ModelKind::Classical => match f.as_analytic() {
                Some(e) => e.div(&AnalyticFunction::var()).into(),
                None => Function::from_fn(move |t| {
                    if t == zero {
                        return Err(EvalError::Pole(t));
                    }
                    Ok(f.eval(t)? / t)
                }),
            },
            ModelKind::ForwardDifference => Function::from_fn(move |t| {
                let den = t + 1.0;
                if den == zero {
                    return Err(EvalError::Pole(t));
                }
                Ok(f.eval(t + 1.0)? / den)
            }),
            ModelKind::JacksonA => Function::from_fn(move |t| {
                let s = t / q;
                let den = s - 1.0;
                if den == zero {
                    return Err(EvalError::Pole(t));
                }
                Ok(f.eval(s)? / den)
            }),
            ModelKind::JacksonB => Function::from_fn(move |t| {
                if t == zero {
                    return Err(EvalError::Pole(t));
                }
                let s = t / q;
                Ok(f.eval(s)? / s)
            }),
        }
    }

    pub fn act_d(&self, f: &Function) -> Result<Function, SemanticsError> {
        let q = self.q;
        match self.kind {
            ModelKind::Classical => f
                .as_analytic()
                .map(|e| e.derivative().into())
                .ok_or(SemanticsError::NotSymbolic),
            ModelKind::ForwardDifference => {
                let f = f.clone();
                Ok(Function::from_fn(move |t| Ok(f.eval(t + 1.0)? - f.eval(t)?)))
            }
            ModelKind::JacksonA | ModelKind::JacksonB => {
                let f = f.clone();
                Ok(Function::from_fn(move |t| {
                    let s = t / q;
                    let den = t - s;
                    if den == C64::new(0.0, 0.0) {
                        return Err(EvalError::Pole(t));
                    }
                    Ok((f.eval(t)? - f.eval(s)?) / den)
                }))
            }
        }
    }

    /// `X^m ∂^n f`, with negative `m` meaning powers of `X⁻¹`.
    pub fn act_monomial(&self, m: i64, n: u32, f: &Function) -> Result<Function, SemanticsError> {
        let mut g = f.clone();
        for _ in 0..n {
            g = self.act_d(&g)?;
        }
        for _ in 0..m.unsigned_abs() {
            g = if m > 0 { self.act_x(&g) } else { self.act_x_inv(&g) };
        }
        Ok(g)
    }

    /// Applies a normal-ordered element term by term.
    pub fn interpret(&self, w: &WeylElement, f: &Function) -> Result<Function, SemanticsError> {
        let mut parts = Vec::with_capacity(w.len());
        for ((m, n), c) in w.terms() {
            parts.push((c, self.act_monomial(m, n, f)?));
        }
        Ok(Function::linear_combination(parts))
    }

    pub fn interpret_laurent(&self, p: &LaurentPoly, f: &Function) -> Result<Function, SemanticsError> {
        self.interpret(&p.to_element(), f)
    }

    /// Closed form of the basis function `φ_k = X^k · p` at `t`.
    pub fn basis_eval(&self, k: usize, t: C64) -> EvalResult {
        let q = self.q;
        let one = C64::new(1.0, 0.0);
        match self.kind {
            ModelKind::Classical => Ok(t.powi(k as i32) * self.generator.eval(t)?),
            ModelKind::ForwardDifference => {
                let ff: C64 = (0..k).map(|j| t - j as f64).product();
                Ok(ff * self.generator.eval(t - k as f64)?)
            }
            ModelKind::JacksonA => {
                let mut prod = one;
                let mut qj = one;
                for _ in 0..k {
                    prod *= qj * t - 1.0;
                    qj *= q;
                }
                Ok(prod * self.generator.eval(qj * t)?)
            }
            ModelKind::JacksonB => {
                let binom = (k * k.saturating_sub(1) / 2) as i32;
                let qk = q.powi(k as i32);
                Ok(q.powi(binom) * t.powi(k as i32) * self.generator.eval(qk * t)?)
            }
        }
    }

    pub fn basis(&self) -> BasisFamily<'_> {
        BasisFamily { semantics: self }
    }
}

/// The basis `k ↦ φ_k = X^k · p` of a model.
#[derive(Clone, Copy, Debug)]
pub struct BasisFamily<'a> {
    semantics: &'a ModelSemantics,
}

impl BasisFamily<'_> {
    pub fn eval(&self, k: usize, t: C64) -> EvalResult {
        self.semantics.basis_eval(k, t)
    }

    /// `φ_k` as an evaluable function.
    pub fn function(&self, k: usize) -> Function {
        let s = self.semantics.clone();
        Function::from_fn(move |t| s.basis_eval(k, t))
    }
}
