//! Numerical residue functionals: a weighted vertical-line (Barnes-type)
//! integral and the trapezoid rule on a circle.

use std::f64::consts::PI;

use thiserror::Error;

use crate::function::{EvalError, Function};
use crate::C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContourError {
    #[error("weight does not decay on Re t = {a}: sigma*cos(2*pi*a) = {value} <= 0")]
    NoDecay { a: f64, value: f64 },
    #[error("invalid vertical-line parameters: {0}")]
    BadLine(&'static str),
    #[error("circle radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("circle needs at least one node")]
    NoNodes,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Sign `σ` selecting the weight `e^{−σ cos(2πt)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WeightSign {
    Plus,
    Minus,
}

impl WeightSign {
    pub fn value(&self) -> f64 {
        match self {
            WeightSign::Plus => 1.0,
            WeightSign::Minus => -1.0,
        }
    }

    /// The sign for which the weight decays along `Re t = a`, if any.
    pub fn decaying_at(a: f64) -> Option<Self> {
        let c = (2.0 * PI * a).cos();
        if c > 0.0 {
            Some(WeightSign::Plus)
        } else if c < 0.0 {
            Some(WeightSign::Minus)
        } else {
            None
        }
    }
}

pub const DEFAULT_HALF_HEIGHT: f64 = 1.5;
pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_CIRCLE_NODES: usize = 512;
/// Smallest `σcos(2πa)` treated as decaying.
pub const MIN_DECAY_RATE: f64 = 1e-9;
/// Tail bound above which a line integral is flagged.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerticalLine {
    pub abscissa: f64,
    pub half_height: f64,
    pub step: f64,
    pub sign: WeightSign,
}

impl VerticalLine {
    pub fn new(abscissa: f64, sign: WeightSign) -> Result<Self, ContourError> {
        Self {
            abscissa,
            half_height: DEFAULT_HALF_HEIGHT,
            step: DEFAULT_STEP,
            sign,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self, ContourError> {
        if !(self.half_height.is_finite() && self.half_height > 0.0) {
            return Err(ContourError::BadLine("half-height must be positive"));
        }
        if !(self.step.is_finite() && self.step > 0.0 && self.step <= self.half_height) {
            return Err(ContourError::BadLine("step must be in (0, half-height]"));
        }
        if !self.abscissa.is_finite() {
            return Err(ContourError::BadLine("abscissa must be finite"));
        }
        let value = self.decay_rate();
        // cos(2πa) at a quarter-integer is only zero up to rounding.
        if value <= MIN_DECAY_RATE {
            return Err(ContourError::NoDecay {
                a: self.abscissa,
                value,
            });
        }
        Ok(self)
    }

    /// `σ cos(2πa)`; the weight modulus is `e^{−σcos(2πa)cosh(2πy)}`.
    pub fn decay_rate(&self) -> f64 {
        self.sign.value() * (2.0 * PI * self.abscissa).cos()
    }

    pub fn shifted(&self, abscissa: f64) -> Result<Self, ContourError> {
        Self { abscissa, ..*self }.validated()
    }

    pub fn weight(&self, t: C64) -> C64 {
        (-self.sign.value() * (t * (2.0 * PI)).cos()).exp()
    }

    /// `∫|w(a+iy)| dy` over the truncated line, by the same trapezoid rule.
    pub fn weight_mass(&self) -> f64 {
        let kappa = self.decay_rate();
        let (n, h) = self.grid();
        (0..=n)
            .map(|j| {
                let y = -self.half_height + h * j as f64;
                let w = (-kappa * (2.0 * PI * y).cosh()).exp();
                if j == 0 || j == n {
                    0.5 * w * h
                } else {
                    w * h
                }
            })
            .sum()
    }

    fn grid(&self) -> (usize, f64) {
        let n = ((2.0 * self.half_height / self.step).round() as usize).max(2);
        (n, 2.0 * self.half_height / n as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Circle {
    pub radius: f64,
    pub nodes: usize,
}

impl Circle {
    pub fn new(radius: f64, nodes: usize) -> Result<Self, ContourError> {
        Self { radius, nodes }.validated()
    }

    pub fn validated(self) -> Result<Self, ContourError> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(ContourError::BadRadius(self.radius));
        }
        if self.nodes == 0 {
            return Err(ContourError::NoNodes);
        }
        Ok(self)
    }

    pub fn points(&self) -> impl Iterator<Item = C64> + '_ {
        (0..self.nodes)
            .map(move |j| C64::from_polar(self.radius, 2.0 * PI * j as f64 / self.nodes as f64))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ContourSpec {
    VerticalLine(VerticalLine),
    Circle(Circle),
}

impl ContourSpec {
    pub fn describe(&self) -> String {
        match self {
            ContourSpec::VerticalLine(l) => format!(
                "line Re t = {}, |Im t| <= {}, h = {}, sigma = {:+}",
                l.abscissa,
                l.half_height,
                l.step,
                l.sign.value()
            ),
            ContourSpec::Circle(c) => format!("circle |t| = {}, N = {}", c.radius, c.nodes),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineIntegral {
    pub value: C64,
    /// Estimated mass beyond `±Y`.
    pub tail_bound: f64,
    /// Set when the tail bound exceeds the tolerance.
    pub flagged: bool,
}

/// `i ∫_{−Y}^{Y} g(a+iy) e^{−σcos(2π(a+iy))} dy` by the trapezoid rule,
/// i.e. the symmetric truncation of `∫_{a−i∞}^{a+i∞} g(t) w(t) dt`.
pub fn barnes_residue(g: &Function, line: &VerticalLine) -> Result<LineIntegral, ContourError> {
    let line = line.validated()?;
    let (n, h) = line.grid();
    let mut sum = C64::new(0.0, 0.0);
    let mut comp = C64::new(0.0, 0.0);
    let mut ends = 0.0;
    for j in 0..=n {
        let y = -line.half_height + h * j as f64;
        let t = C64::new(line.abscissa, y);
        let v = g.eval(t)? * line.weight(t);
        let term = if j == 0 || j == n {
            ends += v.norm();
            v * 0.5
        } else {
            v
        };
        // Kahan summation.
        let yk = term - comp;
        let tk = sum + yk;
        comp = (tk - sum) - yk;
        sum = tk;
    }
    let value = C64::new(0.0, 1.0) * sum * h;
    // Beyond Y the weight falls off at least like e^{−κ cosh(2πy)}, whose
    // integral past Y is bounded by its value over κ·2π·sinh(2πY).
    let kappa = line.decay_rate();
    let tail_bound = ends / (kappa * 2.0 * PI * (2.0 * PI * line.half_height).sinh());
    Ok(LineIntegral {
        value,
        tail_bound,
        flagged: !(tail_bound <= DEFAULT_TAIL_TOL),
    })
}

/// `(1/2πi) ∮_{|t|=r} g(t) dt` by the `N`-node trapezoid rule.
pub fn circle_residue(g: &Function, circle: &Circle) -> Result<C64, ContourError> {
    let circle = circle.validated()?;
    let mut acc = C64::new(0.0, 0.0);
    for z in circle.points() {
        acc += g.eval(z)? * z;
    }
    Ok(acc / circle.nodes as f64)
}
