//! Charlier polynomials `C_n(x; a)`: the image of `(1 − X/a)^n` on the
//! constant function 1 under the forward-difference action, the explicit
//! falling-factorial sum, and two readings of the Rodrigues formula.

use thiserror::Error;

use crate::algebra::{AlgebraParams, WeylElement};
use crate::C64;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum CharlierError {
    #[error("Charlier parameter a must be nonzero")]
    ZeroParameter,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CharlierResult {
    pub n: u32,
    pub a: C64,
    /// Coefficients on `1, x, x(x−1), …`.
    pub falling: Vec<C64>,
    /// Coefficients on `1, x, x², …`.
    pub monomial: Vec<C64>,
    pub method: &'static str,
}

impl CharlierResult {
    /// Evaluates via the falling-factorial coefficients.
    pub fn eval(&self, x: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        let mut ff = C64::new(1.0, 0.0);
        for (k, c) in self.falling.iter().enumerate() {
            acc += c * ff;
            ff *= x - k as f64;
        }
        acc
    }

    pub fn eval_monomial(&self, x: C64) -> C64 {
        self.monomial
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, c| acc * x + c)
    }
}

fn check_a(a: C64) -> Result<(), CharlierError> {
    if a.norm() == 0.0 || !a.is_finite() {
        Err(CharlierError::ZeroParameter)
    } else {
        Ok(())
    }
}

/// Expands `(1 − X/a)^n` in the Weyl algebra. Since only `X` occurs the
/// result is a polynomial in `X`, and the `X^k` coefficient is the
/// `x(x−1)⋯(x−k+1)` coefficient under the forward-difference action.
pub fn charlier_symbolic(n: u32, a: C64) -> Result<CharlierResult, CharlierError> {
    check_a(a)?;
    let weyl = AlgebraParams::weyl();
    let base = WeylElement::one() - WeylElement::x().scale(a.inv());
    let reduced = weyl.power(&base, n).reduce_mod_ideal();
    let falling: Vec<C64> = (0..=n as i64).map(|k| reduced.coeff(k)).collect();
    let monomial = falling_to_monomial(&falling);
    Ok(CharlierResult {
        n,
        a,
        falling,
        monomial,
        method: "symbolic",
    })
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// `Σ_{k=0}^{n} C(n,k) (−a)^{−k} x(x−1)⋯(x−k+1)`.
pub fn charlier_sum(n: u32, a: C64, x: C64) -> Result<C64, CharlierError> {
    check_a(a)?;
    let r = -a.inv();
    let mut acc = C64::new(0.0, 0.0);
    let mut ff = C64::new(1.0, 0.0);
    let mut rk = C64::new(1.0, 0.0);
    for k in 0..=n {
        acc += ff * rk * binomial(n, k);
        ff *= x - k as f64;
        rk *= r;
    }
    Ok(acc)
}

/// `a^y / y!` with `1/y! = 0` for negative integers.
fn weight(a: C64, y: i64) -> C64 {
    if y < 0 {
        return C64::new(0.0, 0.0);
    }
    (1..=y).fold(C64::new(1.0, 0.0), |acc, j| acc * a / j as f64)
}

/// `(x!/a^x) ∇^n (a^x/x!)` with `∇f(x) = f(x) − f(x−1)`, computed as a
/// literal backward-difference table on `x−n, …, x`.
pub fn charlier_rodrigues_oracle(n: u32, a: C64, x: u64) -> Result<C64, CharlierError> {
    check_a(a)?;
    let x = x as i64;
    let n = n as i64;
    // row[j] holds the current difference at x − n + j.
    let mut row: Vec<C64> = (0..=n).map(|j| weight(a, x - n + j)).collect();
    for s in 1..=n as usize {
        for j in (s..row.len()).rev() {
            row[j] = row[j] - row[j - 1];
        }
    }
    Ok(row[n as usize] / weight(a, x))
}

/// The conjugated reading: `T^n 1` with `T g(x) = g(x) − (x/a) g(x−1)`.
/// Works for any complex `x`.
pub fn charlier_operator_power(n: u32, a: C64, x: C64) -> Result<C64, CharlierError> {
    check_a(a)?;
    let n = n as usize;
    // vals[j] = (T^s 1)(x − j) for j = 0..=n−s.
    let mut vals = vec![C64::new(1.0, 0.0); n + 1];
    for s in 1..=n {
        for j in 0..=n - s {
            let y = x - j as f64;
            vals[j] = vals[j] - y / a * vals[j + 1];
        }
    }
    Ok(vals[0])
}

/// Monomial coefficients of `Σ c_k x(x−1)⋯(x−k+1)`.
pub fn falling_to_monomial(coeffs: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); coeffs.len().max(1)];
    // poly holds the monomial expansion of x(x−1)⋯(x−k+1).
    let mut poly = vec![C64::new(1.0, 0.0)];
    for (k, c) in coeffs.iter().enumerate() {
        for (i, p) in poly.iter().enumerate() {
            out[i] += c * p;
        }
        let mut next = vec![C64::new(0.0, 0.0); poly.len() + 1];
        for (i, p) in poly.iter().enumerate() {
            next[i + 1] += p;
            next[i] -= p * k as f64;
        }
        poly = next;
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct Orthogonality {
    pub m: u32,
    pub n: u32,
    pub sum: C64,
    /// `δ_{mn} n! a^{−n} e^a`.
    pub expected: C64,
    pub x_max: u64,
    pub tail_bound: f64,
}

/// Truncated pairing `Σ_{x=0}^{X} C_m(x) C_n(x) a^x/x!`, with `X` chosen so
/// that the bound `(1+x/|a|)^{m+n} |a|^x/x!` on the dropped terms sums to
/// less than `tail_tol`.
pub fn charlier_orthogonality(m: u32, n: u32, a: C64, tail_tol: f64) -> Result<Orthogonality, CharlierError> {
    check_a(a)?;
    let cm = charlier_symbolic(m, a)?;
    let cn = charlier_symbolic(n, a)?;
    let abs_a = a.norm();
    let bound = |x: f64| -> f64 {
        let lg = (m + n) as f64 * (1.0 + x / abs_a).ln() + x * abs_a.ln() - ln_factorial(x as u64);
        lg.exp()
    };
    let mut sum = C64::new(0.0, 0.0);
    let mut x: u64 = 0;
    let tail_bound = loop {
        let xc = C64::new(x as f64, 0.0);
        sum += cm.eval(xc) * cn.eval(xc) * weight(a, x as i64);
        let next = bound((x + 1) as f64);
        let ratio = bound((x + 2) as f64) / next;
        // Past the point where bounds halve each step, the tail is at most
        // twice its first term.
        if ratio <= 0.5 && 2.0 * next < tail_tol {
            break 2.0 * next;
        }
        x += 1;
    };
    let expected = if m == n {
        let nf: f64 = (1..=n).map(|j| j as f64).product();
        a.exp() * nf / a.powu(n)
    } else {
        C64::new(0.0, 0.0)
    };
    Ok(Orthogonality {
        m,
        n,
        sum,
        expected,
        x_max: x,
        tail_bound,
    })
}

fn ln_factorial(x: u64) -> f64 {
    (1..=x).map(|j| (j as f64).ln()).sum()
}
