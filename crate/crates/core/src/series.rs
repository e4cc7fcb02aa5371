//! Truncated formal series and finite-sample membership diagnostics for the
//! coefficient spaces attached to each operator model.
//!
//! Membership in these spaces is defined by limits, so nothing here decides
//! it; [`family_diagnostics`] samples the defining functional and reports a
//! trend.

use thiserror::Error;

use crate::C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("need at least three coefficients (K >= 2), got K = {0}")]
    TooShort(usize),
    #[error("coefficient a_{0} is not finite")]
    NonFinite(usize),
    #[error("q-large family requires |q| > 1")]
    BadQ,
}

/// Which coefficient space the series is meant to belong to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SeriesFamily {
    /// Newton series: `ln|Σ_{k≥n} (−1)^k k! a_k| / ln n → −∞`.
    Difference,
    /// `limsup |a_n|^{1/n} < 1`.
    QSmall,
    /// `limsup |a_n|^{2/(n(n−1))} < |q|^{-1}`, for `|q| > 1`.
    QLarge { q: C64 },
    /// `lim |a_n|^{1/n} = 0`.
    Classical,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FormalSeriesF {
    coeffs: Vec<C64>,
    family: SeriesFamily,
}

impl FormalSeriesF {
    pub fn new(coeffs: Vec<C64>, family: SeriesFamily) -> Result<Self, SeriesError> {
        if let Some(i) = coeffs.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(SeriesError::NonFinite(i));
        }
        if let SeriesFamily::QLarge { q } = family {
            if q.norm() <= 1.0 {
                return Err(SeriesError::BadQ);
            }
        }
        Ok(Self { coeffs, family })
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn family(&self) -> SeriesFamily {
        self.family
    }

    /// The truncation index `K`.
    pub fn truncation(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trend {
    Decreasing,
    Increasing,
    Flat,
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Consistency {
    Consistent,
    Inconsistent,
    Indeterminate,
    /// Every coefficient past `a_1` is zero.
    TailVanishes,
}

impl Consistency {
    pub fn as_str(&self) -> &'static str {
        match self {
            Consistency::Consistent => "consistent",
            Consistency::Inconsistent => "inconsistent",
            Consistency::Indeterminate => "indeterminate",
            Consistency::TailVanishes => "tail vanishes (trivially in family)",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyDiagnostics {
    /// `(n, value)` samples of the defining functional. `-inf` marks an
    /// exactly vanishing tail sum in the difference family.
    pub samples: Vec<(usize, f64)>,
    /// Trend of the finite samples.
    pub trend: Trend,
    /// The bound the limit is compared against, when the family has one.
    pub threshold: Option<f64>,
    pub consistency: Consistency,
    pub note: String,
}

/// Trend of a sequence, ignoring non-finite entries.
pub fn trend_of(values: &[f64]) -> Trend {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if finite.len() < 2 {
        return Trend::Flat;
    }
    let scale = finite.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let tol = 1e-9 * scale;
    let diffs: Vec<f64> = finite.windows(2).map(|w| w[1] - w[0]).collect();
    if diffs.iter().all(|d| d.abs() <= tol) {
        Trend::Flat
    } else if diffs.iter().all(|&d| d < 0.0) {
        Trend::Decreasing
    } else if diffs.iter().all(|&d| d > 0.0) {
        Trend::Increasing
    } else {
        Trend::Mixed
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * j as f64)
}

/// Samples the functional that defines the declared family.
///
/// Difference family: `g(n) = ln|Σ_{k=n}^{K} (−1)^k k! a_k| / ln n` for
/// `n = 2..K`. Root-test families: `|a_n|^{1/n}` (or `|a_n|^{2/(n(n−1))}`
/// for the `|q| > 1` family).
pub fn family_diagnostics(s: &FormalSeriesF) -> Result<FamilyDiagnostics, SeriesError> {
    let k_max = s.truncation();
    if s.coeffs.len() < 3 {
        return Err(SeriesError::TooShort(k_max));
    }
    let a = &s.coeffs;
    let tail_zero = a[2..].iter().all(|c| *c == C64::new(0.0, 0.0));

    let (samples, threshold): (Vec<(usize, f64)>, Option<f64>) = match s.family {
        SeriesFamily::Difference => {
            let mut out = Vec::new();
            for n in 2..=k_max {
                let tail: C64 = (n..=k_max)
                    .map(|k| {
                        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                        a[k] * (sign * factorial(k))
                    })
                    .sum();
                let v = if tail.norm() == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    tail.norm().ln() / (n as f64).ln()
                };
                out.push((n, v));
            }
            (out, None)
        }
        SeriesFamily::QSmall | SeriesFamily::Classical => {
            let out = (1..=k_max)
                .map(|n| (n, a[n].norm().powf(1.0 / n as f64)))
                .collect();
            let th = matches!(s.family, SeriesFamily::QSmall).then_some(1.0);
            (out, th)
        }
        SeriesFamily::QLarge { q } => {
            let out = (2..=k_max)
                .map(|n| {
                    let e = 2.0 / (n as f64 * (n as f64 - 1.0));
                    (n, a[n].norm().powf(e))
                })
                .collect();
            (out, Some(1.0 / q.norm()))
        }
    };

    let values: Vec<f64> = samples.iter().map(|&(_, v)| v).collect();
    let trend = trend_of(&values);
    let last = values.last().copied().unwrap_or(0.0);

    let (consistency, note) = if tail_zero {
        (Consistency::TailVanishes, "tail vanishes (trivially in family)".to_string())
    } else {
        match s.family {
            SeriesFamily::Difference => {
                let vanishing = values.iter().filter(|v| v.is_infinite()).count();
                let c = match trend {
                    Trend::Decreasing => Consistency::Consistent,
                    Trend::Increasing => Consistency::Inconsistent,
                    _ => Consistency::Indeterminate,
                };
                (
                    c,
                    format!(
                        "{vanishing} of {} tail sums vanish exactly; finite samples trend {:?}",
                        values.len(),
                        trend
                    ),
                )
            }
            SeriesFamily::QSmall | SeriesFamily::QLarge { .. } => {
                let th = threshold.unwrap_or(1.0);
                let c = if last < th {
                    Consistency::Consistent
                } else if trend == Trend::Decreasing {
                    Consistency::Indeterminate
                } else {
                    Consistency::Inconsistent
                };
                (c, format!("last root sample {last:.6} vs bound {th:.6}"))
            }
            SeriesFamily::Classical => {
                let c = match trend {
                    Trend::Decreasing => Consistency::Consistent,
                    Trend::Flat | Trend::Increasing => Consistency::Inconsistent,
                    Trend::Mixed => Consistency::Indeterminate,
                };
                let note = if c == Consistency::Inconsistent {
                    format!("root samples do not decay (last {last:.6}); inconsistent with lim = 0")
                } else {
                    format!("root samples trend {trend:?}, last {last:.6}")
                };
                (c, note)
            }
        }
    };

    Ok(FamilyDiagnostics {
        samples,
        trend,
        threshold,
        consistency,
        note,
    })
}
