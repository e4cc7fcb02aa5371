//! Expansion coefficients in the basis `φ_k = X^k · p` of each model, by
//! two independent routes:
//!
//! * interpolation oracles (forward differences, triangular interpolation
//!   at `q^{-j}`, repeated differentiation at 0);
//! * the residue formula `a_k = c · Res(X^{-(k+1)} f)`, with `Res` realized
//!   as a weighted vertical-line integral (forward difference) or a circle
//!   integral (Jackson A, classical), and `c` calibrated from `X^{-1} p`.

use std::collections::HashMap;
use std::sync::Mutex;

use thiserror::Error;

use crate::function::{AnalyticFunction, EvalError, Function};
use crate::quadrature::{barnes_residue, circle_residue, Circle, ContourError, ContourSpec};
use crate::semantics::{ModelKind, ModelSemantics, SemanticsError};
use crate::C64;

/// Default cap on `K` for the forward-difference oracle.
pub const NEWTON_K_CAP: usize = 25;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoefficientError {
    #[error("K = {k} exceeds the cancellation cap {cap}; pass an explicit override")]
    CancellationCap { k: usize, cap: usize },
    #[error("{kind} model needs a {expected} contour")]
    WrongContour { kind: ModelKind, expected: &'static str },
    #[error("residue extraction is not provided for the {0} model")]
    Unsupported(ModelKind),
    #[error("{0}")]
    BadParameters(String),
    #[error("residue of X^-1 p is too small to calibrate: {0}")]
    CalibrationFailure(C64),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Contour(#[from] ContourError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Oracle,
    Residue,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Oracle => "oracle",
            Method::Residue => "residue",
        }
    }
}

/// Name of the basis `φ_k` for each model.
pub fn basis_name(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::Classical => "monomial t^k",
        ModelKind::ForwardDifference => "falling factorial t(t-1)...(t-k+1)",
        ModelKind::JacksonA => "q-Pochhammer (t-1)(qt-1)...(q^(k-1)t-1)",
        ModelKind::JacksonB => "q^C(k,2) t^k",
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSeries {
    pub values: Vec<C64>,
    pub errors: Vec<f64>,
    pub kind: ModelKind,
    pub method: Method,
    pub warnings: Vec<String>,
}

/// One row of a coefficient table.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientRecord {
    pub k: usize,
    pub re: f64,
    pub im: f64,
    pub error: f64,
    pub method: Method,
}

impl CoefficientSeries {
    pub fn truncation(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn basis(&self) -> &'static str {
        basis_name(self.kind)
    }

    pub fn records(&self) -> Vec<CoefficientRecord> {
        self.values
            .iter()
            .zip(&self.errors)
            .enumerate()
            .map(|(k, (v, e))| CoefficientRecord {
                k,
                re: v.re,
                im: v.im,
                error: *e,
                method: self.method,
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NewtonOptions {
    pub cap: usize,
    pub allow_beyond_cap: bool,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            cap: NEWTON_K_CAP,
            allow_beyond_cap: false,
        }
    }
}

impl NewtonOptions {
    pub fn uncapped() -> Self {
        Self {
            allow_beyond_cap: true,
            ..Self::default()
        }
    }
}

fn binomial_row(k: usize) -> Vec<f64> {
    let mut row = vec![1.0; k + 1];
    for j in 1..k {
        row[j] = row[j - 1] * (k - j + 1) as f64 / j as f64;
    }
    row
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * j as f64)
}

struct KahanSum {
    sum: C64,
    comp: C64,
}

impl KahanSum {
    fn new() -> Self {
        Self {
            sum: C64::new(0.0, 0.0),
            comp: C64::new(0.0, 0.0),
        }
    }

    fn add(&mut self, v: C64) {
        let y = v - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Newton-series coefficients `a_k = Δ^k f(0) / k!`.
pub fn newton_oracle(
    f: &Function,
    k_max: usize,
    opts: NewtonOptions,
) -> Result<CoefficientSeries, CoefficientError> {
    let mut warnings = Vec::new();
    if k_max > opts.cap {
        if !opts.allow_beyond_cap {
            return Err(CoefficientError::CancellationCap {
                k: k_max,
                cap: opts.cap,
            });
        }
        warnings.push(format!(
            "K = {k_max} exceeds {}: alternating binomial sums lose about k bits",
            opts.cap
        ));
    }
    let samples: Vec<C64> = (0..=k_max)
        .map(|j| f.eval(C64::new(j as f64, 0.0)))
        .collect::<Result<_, _>>()?;
    let mut values = Vec::with_capacity(k_max + 1);
    let mut errors = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let row = binomial_row(k);
        let mut acc = KahanSum::new();
        let mut mag = 0.0;
        for (j, b) in row.iter().enumerate() {
            let sign = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
            acc.add(samples[j] * (sign * b));
            mag += b * samples[j].norm();
        }
        let kf = factorial(k);
        values.push(acc.sum / kf);
        errors.push(f64::EPSILON * (k as f64 + 1.0) * mag / kf);
    }
    Ok(CoefficientSeries {
        values,
        errors,
        kind: ModelKind::ForwardDifference,
        method: Method::Oracle,
        warnings,
    })
}

/// q-Pochhammer coefficients for the JacksonA model with `p = 1`.
pub fn q_oracle(f: &Function, q: C64, k_max: usize) -> Result<CoefficientSeries, CoefficientError> {
    let s = ModelSemantics::jackson_a(q)?;
    q_oracle_in(&s, f, k_max)
}

/// Triangular interpolation at `t_j = q^{-j}`, where `φ_k(t_j) = 0` for
/// every `k > j`.
pub fn q_oracle_in(
    s: &ModelSemantics,
    f: &Function,
    k_max: usize,
) -> Result<CoefficientSeries, CoefficientError> {
    if s.kind() != ModelKind::JacksonA {
        return Err(CoefficientError::BadParameters(format!(
            "q-Pochhammer interpolation needs the qa model, got {}",
            s.kind()
        )));
    }
    let qinv = s.q().inv();
    let mut values: Vec<C64> = Vec::with_capacity(k_max + 1);
    let mut errors = Vec::with_capacity(k_max + 1);
    let mut node = C64::new(1.0, 0.0);
    for j in 0..=k_max {
        let fj = f.eval(node)?;
        let mut rest = fj;
        let mut mag = fj.norm();
        for (k, a) in values.iter().enumerate() {
            let term = a * s.basis_eval(k, node)?;
            rest -= term;
            mag += term.norm();
        }
        let diag = s.basis_eval(j, node)?;
        assert!(
            diag != C64::new(0.0, 0.0),
            "phi_j(q^-j) vanishes only when |q| = 1"
        );
        values.push(rest / diag);
        errors.push(f64::EPSILON * (j as f64 + 1.0) * mag / diag.norm());
        node *= qinv;
    }
    Ok(CoefficientSeries {
        values,
        errors,
        kind: ModelKind::JacksonA,
        method: Method::Oracle,
        warnings: Vec::new(),
    })
}

/// Maclaurin coefficients `f^{(k)}(0) / k!` by repeated symbolic
/// differentiation.
pub fn taylor_oracle(f: &AnalyticFunction, k_max: usize) -> Result<CoefficientSeries, CoefficientError> {
    let zero = C64::new(0.0, 0.0);
    let mut d = f.clone();
    let mut values = Vec::with_capacity(k_max + 1);
    let mut errors = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        if k > 0 {
            d = d.derivative();
        }
        let v = d.expr().eval(zero)? / factorial(k);
        errors.push(4.0 * f64::EPSILON * v.norm());
        values.push(v);
    }
    Ok(CoefficientSeries {
        values,
        errors,
        kind: ModelKind::Classical,
        method: Method::Oracle,
        warnings: Vec::new(),
    })
}

/// JacksonB coefficients, read off the Maclaurin coefficients:
/// `f = Σ a_k q^{C(k,2)} t^k`.
pub fn qb_oracle(f: &AnalyticFunction, q: C64, k_max: usize) -> Result<CoefficientSeries, CoefficientError> {
    ModelSemantics::jackson_b(q)?;
    let mut series = taylor_oracle(f, k_max)?;
    for (k, (v, e)) in series.values.iter_mut().zip(series.errors.iter_mut()).enumerate() {
        let scale = q.powi((k * k.saturating_sub(1) / 2) as i32);
        *v /= scale;
        *e /= scale.norm();
    }
    series.kind = ModelKind::JacksonB;
    Ok(series)
}

/// Oracle coefficients for any model. The classical and JacksonB routes need
/// an expression tree.
pub fn oracle(s: &ModelSemantics, f: &Function, k_max: usize, opts: NewtonOptions) -> Result<CoefficientSeries, CoefficientError> {
    match s.kind() {
        ModelKind::ForwardDifference => {
            let g = f.divide(s.generator());
            newton_oracle(&g, k_max, opts)
        }
        ModelKind::JacksonA => q_oracle_in(s, f, k_max),
        ModelKind::Classical | ModelKind::JacksonB => {
            let e = f
                .as_analytic()
                .ok_or(CoefficientError::Semantics(SemanticsError::NotSymbolic))?;
            if s.kind() == ModelKind::Classical {
                taylor_oracle(e, k_max)
            } else {
                qb_oracle(e, s.q(), k_max)
            }
        }
    }
}

/// The scalar `c` aligning the numeric residue with coefficient extraction.
#[derive(Clone, Debug, PartialEq)]
pub struct Calibration {
    pub c: C64,
    pub provenance: String,
}

/// Smallest residue of `X^{-1} p` accepted for calibration.
pub const CALIBRATION_FLOOR: f64 = 1e-14;

fn check_contour(s: &ModelSemantics, spec: &ContourSpec) -> Result<(), CoefficientError> {
    match (s.kind(), spec) {
        (ModelKind::JacksonB, _) => Err(CoefficientError::Unsupported(ModelKind::JacksonB)),
        (ModelKind::ForwardDifference, ContourSpec::VerticalLine(_)) => Ok(()),
        (ModelKind::ForwardDifference, _) => Err(CoefficientError::WrongContour {
            kind: s.kind(),
            expected: "vertical-line",
        }),
        (ModelKind::Classical, ContourSpec::Circle(_)) => Ok(()),
        (ModelKind::JacksonA, ContourSpec::Circle(c)) => {
            if s.q().norm() >= 1.0 {
                return Err(CoefficientError::BadParameters(
                    "qa residue extraction needs |q| < 1".into(),
                ));
            }
            if c.radius <= 1.0 {
                return Err(CoefficientError::BadParameters(format!(
                    "qa residue extraction needs r > 1, got {}",
                    c.radius
                )));
            }
            Ok(())
        }
        (kind, _) => Err(CoefficientError::WrongContour {
            kind,
            expected: "circle",
        }),
    }
}

/// Raw (uncalibrated) residue of `g` under the model's realization. For
/// the forward-difference model the integrand is `g / p` times the weight.
pub fn model_residue(s: &ModelSemantics, g: &Function, spec: &ContourSpec) -> Result<ResidueValue, CoefficientError> {
    check_contour(s, spec)?;
    match spec {
        ContourSpec::VerticalLine(line) => {
            let h = g.divide(s.generator());
            let r = barnes_residue(&h, line)?;
            Ok(ResidueValue {
                value: r.value,
                error: r.tail_bound,
                flagged: r.flagged,
                experimental: true,
            })
        }
        ContourSpec::Circle(circle) => {
            let full = circle_residue(g, circle)?;
            // Halving the node count estimates the trapezoid error.
            let error = if circle.nodes >= 4 && circle.nodes % 2 == 0 {
                let half = Circle::new(circle.radius, circle.nodes / 2)?;
                (full - circle_residue(g, &half)?).norm()
            } else {
                0.0
            };
            Ok(ResidueValue {
                value: full,
                error,
                flagged: false,
                experimental: false,
            })
        }
    }
}

/// `c = 1 / Res(X^{-1} p)`.
pub fn calibrate(s: &ModelSemantics, spec: &ContourSpec) -> Result<Calibration, CoefficientError> {
    check_contour(s, spec)?;
    let g = s.act_x_inv(s.generator());
    let r = model_residue(s, &g, spec)?;
    if !(r.value.norm() > CALIBRATION_FLOOR) {
        return Err(CoefficientError::CalibrationFailure(r.value));
    }
    Ok(Calibration {
        c: r.value.inv(),
        provenance: format!("Res(X^-1 p) under {} on {}", s.kind(), spec.describe()),
    })
}

/// Thread-safe memo of calibrations keyed by model and contour.
#[derive(Debug, Default)]
pub struct CalibrationCache {
    inner: Mutex<HashMap<String, Calibration>>,
}

impl CalibrationCache {
    pub fn new() -> Self {
        Self::default()
    }

    fn key(s: &ModelSemantics, spec: &ContourSpec) -> String {
        format!("{}|{:?}|{:?}|{:?}", s.kind(), s.q(), s.generator(), spec)
    }

    pub fn get_or_calibrate(&self, s: &ModelSemantics, spec: &ContourSpec) -> Result<Calibration, CoefficientError> {
        let key = Self::key(s, spec);
        if let Some(hit) = self.inner.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let cal = calibrate(s, spec)?;
        self.inner.lock().unwrap().insert(key, cal.clone());
        Ok(cal)
    }

    pub fn len(&self) -> usize {
        self.inner.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidueValue {
    pub value: C64,
    pub error: f64,
    pub flagged: bool,
    /// Set for the forward-difference realization, whose vanishing on
    /// `∂`-images does not hold numerically.
    pub experimental: bool,
}

/// `a_k ≈ c · Res(X^{-(k+1)} f)`.
pub fn residue_extract(
    s: &ModelSemantics,
    f: &Function,
    k: usize,
    spec: &ContourSpec,
    cal: &Calibration,
) -> Result<ResidueValue, CoefficientError> {
    let mut g = f.clone();
    for _ in 0..=k {
        g = s.act_x_inv(&g);
    }
    let r = model_residue(s, &g, spec)?;
    Ok(ResidueValue {
        value: cal.c * r.value,
        error: cal.c.norm() * r.error,
        ..r
    })
}

pub fn residue_series(
    s: &ModelSemantics,
    f: &Function,
    k_max: usize,
    spec: &ContourSpec,
    cal: &Calibration,
) -> Result<CoefficientSeries, CoefficientError> {
    let mut values = Vec::with_capacity(k_max + 1);
    let mut errors = Vec::with_capacity(k_max + 1);
    let mut warnings = Vec::new();
    for k in 0..=k_max {
        let r = residue_extract(s, f, k, spec, cal)?;
        if r.flagged {
            warnings.push(format!("k = {k}: line integral tail above tolerance"));
        }
        values.push(r.value);
        errors.push(r.error);
    }
    if s.kind() == ModelKind::ForwardDifference {
        warnings.push("forward-difference residue values are experimental".into());
    }
    Ok(CoefficientSeries {
        values,
        errors,
        kind: s.kind(),
        method: Method::Residue,
        warnings,
    })
}

/// Partial sums `Σ_{k≤K} a_k φ_k`.
#[derive(Clone, Debug)]
pub struct Synthesis {
    semantics: ModelSemantics,
    values: Vec<C64>,
}

pub fn synthesize(s: &ModelSemantics, values: &[C64]) -> Synthesis {
    Synthesis {
        semantics: s.clone(),
        values: values.to_vec(),
    }
}

impl Synthesis {
    /// The partial sum at `t` and the magnitude of its last term.
    pub fn eval_with_error(&self, t: C64) -> Result<(C64, f64), EvalError> {
        let mut acc = C64::new(0.0, 0.0);
        let mut last = 0.0;
        for (k, a) in self.values.iter().enumerate() {
            if *a == C64::new(0.0, 0.0) {
                last = 0.0;
                continue;
            }
            let term = a * self.semantics.basis_eval(k, t)?;
            acc += term;
            last = term.norm();
        }
        Ok((acc, last))
    }

    pub fn eval(&self, t: C64) -> Result<C64, EvalError> {
        self.eval_with_error(t).map(|(v, _)| v)
    }

    pub fn function(&self) -> Function {
        let me = self.clone();
        Function::from_fn(move |t| me.eval(t))
    }
}
