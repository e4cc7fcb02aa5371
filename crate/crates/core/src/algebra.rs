//! Normal-ordered arithmetic in the λ-deformed Weyl algebra.
//!
//! Elements are finite sums `Σ c_{m,n} X^m ∂^n` with `m ∈ ℤ` and `n ≥ 0`,
//! kept in normal order (every `X` power to the left of every `∂` power).
//! The single defining relation is `∂X − λX∂ = 1`; `λ = 1` gives the Weyl
//! algebra and `λ = q` the q-Weyl algebra. Localizing at `X` extends the
//! rewrite rule to negative powers:
//!
//! ```text
//! ∂ X^m = λ^m X^m ∂ + [m]_λ X^{m-1}
//! ```
//!
//! where `[m]_λ` is the λ-integer. Reduction modulo the left ideal
//! generated by `∂` leaves a Laurent polynomial in `X`, on which `∂` acts by
//! `X^m ↦ [m]_λ X^{m-1}`; the coefficient of `X^{-1}` is the symbolic residue.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

use crate::numfmt::fmt_complex_coeff;
use crate::C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("lambda must be nonzero")]
    ZeroLambda,
}

/// The deformation parameter of the algebra.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlgebraParams {
    lambda: C64,
}

impl AlgebraParams {
    pub fn new(lambda: C64) -> Result<Self, AlgebraError> {
        if lambda == C64::new(0.0, 0.0) {
            return Err(AlgebraError::ZeroLambda);
        }
        Ok(Self { lambda })
    }

    /// The Weyl algebra, `∂X − X∂ = 1`.
    pub fn weyl() -> Self {
        Self {
            lambda: C64::new(1.0, 0.0),
        }
    }

    /// The q-Weyl algebra, `∂X − qX∂ = 1`.
    pub fn q_weyl(q: C64) -> Result<Self, AlgebraError> {
        Self::new(q)
    }

    pub fn lambda(&self) -> C64 {
        self.lambda
    }

    pub fn is_undeformed(&self) -> bool {
        self.lambda == C64::new(1.0, 0.0)
    }

    /// `λ^m` for any integer `m`.
    pub fn lambda_pow(&self, m: i64) -> C64 {
        if self.is_undeformed() {
            return C64::new(1.0, 0.0);
        }
        pow_i64(self.lambda, m)
    }

    /// The λ-integer `[m]_λ = (λ^m − 1)/(λ − 1)`, equal to `m` at `λ = 1`.
    ///
    /// Evaluated as the geometric sum `1 + λ + … + λ^{m-1}` for `m > 0` and
    /// `−(λ^{-1} + … + λ^{m})` for `m < 0`, which avoids the division.
    pub fn bracket(&self, m: i64) -> C64 {
        if self.is_undeformed() {
            return C64::new(m as f64, 0.0);
        }
        match m.cmp(&0) {
            std::cmp::Ordering::Equal => C64::new(0.0, 0.0),
            std::cmp::Ordering::Greater => {
                let mut acc = C64::new(0.0, 0.0);
                let mut p = C64::new(1.0, 0.0);
                for _ in 0..m {
                    acc += p;
                    p *= self.lambda;
                }
                acc
            }
            std::cmp::Ordering::Less => {
                let inv = self.lambda.inv();
                let mut acc = C64::new(0.0, 0.0);
                let mut p = inv;
                for _ in 0..(-m) {
                    acc -= p;
                    p *= inv;
                }
                acc
            }
        }
    }

    /// Normal form of the product `a · b`.
    pub fn multiply(&self, a: &WeylElement, b: &WeylElement) -> WeylElement {
        let mut memo = HashMap::new();
        let mut out: BTreeMap<(i64, u32), C64> = BTreeMap::new();
        for (&(m1, n1), &c1) in &a.terms {
            for (&(m2, n2), &c2) in &b.terms {
                let c = c1 * c2;
                for &((i, j), e) in self.d_pow_x_pow(n1, m2, &mut memo).iter() {
                    *out.entry((m1 + i, j + n2))
                        .or_insert(C64::new(0.0, 0.0)) += c * e;
                }
            }
        }
        WeylElement::from_map(out)
    }

    /// `a^n`, with `a^0 = 1`.
    pub fn power(&self, a: &WeylElement, n: u32) -> WeylElement {
        let mut acc = WeylElement::one();
        for _ in 0..n {
            acc = self.multiply(&acc, a);
        }
        acc
    }

    /// Normal form of `∂^n X^m`, memoized on `(n, m)`.
    ///
    /// Recursion: `∂^n X^m = λ^m (∂^{n-1} X^m) ∂ + [m]_λ ∂^{n-1} X^{m-1}`.
    fn d_pow_x_pow(
        &self,
        n: u32,
        m: i64,
        memo: &mut HashMap<(u32, i64), Vec<((i64, u32), C64)>>,
    ) -> Vec<((i64, u32), C64)> {
        if n == 0 {
            return vec![((m, 0), C64::new(1.0, 0.0))];
        }
        if let Some(hit) = memo.get(&(n, m)) {
            return hit.clone();
        }
        let mut acc: BTreeMap<(i64, u32), C64> = BTreeMap::new();
        let lm = self.lambda_pow(m);
        for ((i, j), e) in self.d_pow_x_pow(n - 1, m, memo) {
            *acc.entry((i, j + 1)).or_insert(C64::new(0.0, 0.0)) += lm * e;
        }
        let br = self.bracket(m);
        if br != C64::new(0.0, 0.0) {
            for ((i, j), e) in self.d_pow_x_pow(n - 1, m - 1, memo) {
                *acc.entry((i, j)).or_insert(C64::new(0.0, 0.0)) += br * e;
            }
        }
        let v: Vec<_> = acc
            .into_iter()
            .filter(|(_, c)| *c != C64::new(0.0, 0.0))
            .collect();
        memo.insert((n, m), v.clone());
        v
    }

    /// Action of `∂` on classes modulo the left ideal generated by `∂`:
    /// `X^m ↦ [m]_λ X^{m-1}`.
    pub fn reduced_d_action(&self, p: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::from_map(
            p.coeffs
                .iter()
                .map(|(&m, &c)| (m - 1, c * self.bracket(m)))
                .collect(),
        )
    }
}

pub(crate) fn pow_i64(z: C64, m: i64) -> C64 {
    let mut base = if m < 0 { z.inv() } else { z };
    let mut e = m.unsigned_abs();
    let mut acc = C64::new(1.0, 0.0);
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// A normal-ordered element `Σ c_{m,n} X^m ∂^n`.
///
/// Keys are `(m, n)`; no stored coefficient is exactly zero, so two
/// elements are equal iff their term maps are equal.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WeylElement {
    terms: BTreeMap<(i64, u32), C64>,
}

impl WeylElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::scalar(C64::new(1.0, 0.0))
    }

    pub fn scalar(c: C64) -> Self {
        Self::monomial(c, 0, 0)
    }

    /// `c · X^m ∂^n`.
    pub fn monomial(c: C64, m: i64, n: u32) -> Self {
        let mut terms = BTreeMap::new();
        if c != C64::new(0.0, 0.0) {
            terms.insert((m, n), c);
        }
        Self { terms }
    }

    pub fn x() -> Self {
        Self::monomial(C64::new(1.0, 0.0), 1, 0)
    }

    pub fn x_inv() -> Self {
        Self::monomial(C64::new(1.0, 0.0), -1, 0)
    }

    pub fn x_pow(m: i64) -> Self {
        Self::monomial(C64::new(1.0, 0.0), m, 0)
    }

    pub fn d() -> Self {
        Self::monomial(C64::new(1.0, 0.0), 0, 1)
    }

    pub fn from_terms<I: IntoIterator<Item = ((i64, u32), C64)>>(it: I) -> Self {
        let mut map = BTreeMap::new();
        for (k, c) in it {
            *map.entry(k).or_insert(C64::new(0.0, 0.0)) += c;
        }
        Self::from_map(map)
    }

    fn from_map(mut terms: BTreeMap<(i64, u32), C64>) -> Self {
        terms.retain(|_, c| *c != C64::new(0.0, 0.0));
        Self { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i64, u32), C64)> + '_ {
        self.terms.iter().map(|(&k, &c)| (k, c))
    }

    pub fn coeff(&self, m: i64, n: u32) -> C64 {
        self.terms
            .get(&(m, n))
            .copied()
            .unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// If the element is a scalar multiple of `1`, that scalar.
    pub fn as_scalar(&self) -> Option<C64> {
        match self.terms.len() {
            0 => Some(C64::new(0.0, 0.0)),
            1 => self.terms.get(&(0, 0)).copied(),
            _ => None,
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_map(self.terms.iter().map(|(&k, &c)| (k, c * s)).collect())
    }

    /// Largest `∂` exponent, or `None` for zero.
    pub fn d_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, n)| n).max()
    }

    /// The quotient map onto classes modulo the left ideal generated by `∂`:
    /// every term with a positive `∂` power is dropped.
    pub fn reduce_mod_ideal(&self) -> LaurentPoly {
        LaurentPoly::from_map(
            self.terms
                .iter()
                .filter(|(&(_, n), _)| n == 0)
                .map(|(&(m, _), &c)| (m, c))
                .collect(),
        )
    }

    /// Max coefficient distance, for approximate comparisons.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other)
            .terms
            .values()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl Add for &WeylElement {
    type Output = WeylElement;

    fn add(self, rhs: &WeylElement) -> WeylElement {
        let mut map = self.terms.clone();
        for (&k, &c) in &rhs.terms {
            *map.entry(k).or_insert(C64::new(0.0, 0.0)) += c;
        }
        WeylElement::from_map(map)
    }
}

impl Add for WeylElement {
    type Output = WeylElement;

    fn add(self, rhs: WeylElement) -> WeylElement {
        &self + &rhs
    }
}

impl Neg for &WeylElement {
    type Output = WeylElement;

    fn neg(self) -> WeylElement {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Neg for WeylElement {
    type Output = WeylElement;

    fn neg(self) -> WeylElement {
        -&self
    }
}

impl Sub for &WeylElement {
    type Output = WeylElement;

    fn sub(self, rhs: &WeylElement) -> WeylElement {
        self + &(-rhs)
    }
}

impl Sub for WeylElement {
    type Output = WeylElement;

    fn sub(self, rhs: WeylElement) -> WeylElement {
        &self - &rhs
    }
}

fn x_factor(m: i64) -> Option<String> {
    match m {
        0 => None,
        1 => Some("X".into()),
        -1 => Some("Xinv".into()),
        m if m > 0 => Some(format!("X^{m}")),
        m => Some(format!("Xinv^{}", -m)),
    }
}

fn d_factor(n: u32) -> Option<String> {
    match n {
        0 => None,
        1 => Some("d".into()),
        n => Some(format!("d^{n}")),
    }
}

/// Writes `Σ c·body` with sign-aware joins; `body` is `None` for the unit.
fn write_sum<'a, I>(f: &mut fmt::Formatter<'_>, terms: I) -> fmt::Result
where
    I: Iterator<Item = (C64, Option<String>)>,
{
    let mut first = true;
    for (c, body) in terms {
        let (negative, text) = fmt_complex_coeff(c);
        let piece = match (text.as_str(), body) {
            ("1", Some(b)) => b,
            (t, Some(b)) => format!("{t}*{b}"),
            (t, None) => t.to_string(),
        };
        if first {
            if negative {
                write!(f, "-")?;
            }
            write!(f, "{piece}")?;
            first = false;
        } else {
            write!(f, " {} {piece}", if negative { "-" } else { "+" })?;
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for WeylElement {
    /// Terms ordered by descending `∂` power, then ascending `X` power,
    /// e.g. `X*d + 1` or `1 - X + 0.25*X^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut keys: Vec<_> = self.terms.iter().collect();
        keys.sort_by(|a, b| b.0 .1.cmp(&a.0 .1).then(a.0 .0.cmp(&b.0 .0)));
        write_sum(
            f,
            keys.into_iter().map(|(&(m, n), &c)| {
                let parts: Vec<String> = [x_factor(m), d_factor(n)].into_iter().flatten().collect();
                (c, if parts.is_empty() { None } else { Some(parts.join("*")) })
            }),
        )
    }
}

/// A class `Σ c_m X^m` modulo the left ideal generated by `∂`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, C64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, C64)>>(it: I) -> Self {
        let mut map = BTreeMap::new();
        for (m, c) in it {
            *map.entry(m).or_insert(C64::new(0.0, 0.0)) += c;
        }
        Self::from_map(map)
    }

    fn from_map(mut coeffs: BTreeMap<i64, C64>) -> Self {
        coeffs.retain(|_, c| *c != C64::new(0.0, 0.0));
        Self { coeffs }
    }

    pub fn coeff(&self, m: i64) -> C64 {
        self.coeffs.get(&m).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.coeffs.iter().map(|(&m, &c)| (m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The coefficient of `X^{-1}`, which spans the cokernel of `∂`.
    pub fn symbolic_residue(&self) -> C64 {
        self.coeff(-1)
    }

    /// Lifts the class back to the `∂`-free element `Σ c_m X^m`.
    pub fn to_element(&self) -> WeylElement {
        WeylElement::from_terms(self.coeffs.iter().map(|(&m, &c)| ((m, 0), c)))
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sum(f, self.coeffs.iter().map(|(&m, &c)| (c, x_factor(m))))
    }
}

impl From<Complex64> for WeylElement {
    fn from(c: Complex64) -> Self {
        Self::scalar(c)
    }
}
