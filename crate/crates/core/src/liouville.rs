//! Growth estimators and hypothesis/conclusion checks for the three
//! Liouville-type statements (forward difference, Jackson q-difference,
//! classical).
//!
//! Every check runs on finite samples, so a report never claims a proof:
//! hypotheses are `pass`/`fail`/`indeterminate`, and the verdict is one of
//! `consistent`, `hypothesis-violated` or `discrepancy-recorded`.

use std::f64::consts::{LN_2, PI};

use thiserror::Error;

use crate::coefficients::{
    calibrate, newton_oracle, q_oracle_in, residue_series, taylor_oracle, Calibration,
    CoefficientError, CoefficientSeries, NewtonOptions,
};
use crate::function::{AnalyticFunction, EvalError, Function};
use crate::quadrature::{barnes_residue, Circle, ContourError, ContourSpec, VerticalLine, WeightSign};
use crate::semantics::{ModelSemantics, SemanticsError};
use crate::series::{trend_of, Trend};
use crate::C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LiouvilleError {
    #[error("{0}")]
    BadParameters(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Coefficient(#[from] CoefficientError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Contour(#[from] ContourError),
}

/// `M(r, f) = max_{|z|=r} |f(z)|` sampled at `nodes` equally spaced angles
/// starting at `θ = 0`.
pub fn max_modulus(f: &Function, r: f64, nodes: usize) -> Result<f64, EvalError> {
    let mut m: f64 = 0.0;
    for j in 0..nodes.max(1) {
        let z = C64::from_polar(r, 2.0 * PI * j as f64 / nodes.max(1) as f64);
        let v = f.eval(z)?.norm();
        if !v.is_finite() {
            return Err(EvalError::Overflow(z));
        }
        m = m.max(v);
    }
    Ok(m)
}

fn ln_plus(x: f64) -> f64 {
    if x > 1.0 {
        x.ln()
    } else {
        0.0
    }
}

/// Least-squares slope of `ys` against `xs`.
fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthEstimate {
    pub radii: Vec<f64>,
    pub max_modulus: Vec<f64>,
    /// Fitted exponential type, clamped at 0.
    pub type_estimate: f64,
    /// `(r, 2 ln⁺M(r) / (ln r)²)` samples, for the q-growth diagnostic.
    pub q_functional: Vec<(f64, f64)>,
    pub q_threshold: Option<f64>,
    pub q_trend: Option<Trend>,
    /// Whether the sampled `M(r, f)` is nondecreasing.
    pub monotone: bool,
    pub confidence: String,
}

impl GrowthEstimate {
    fn from_samples(radii: Vec<f64>, max_modulus: Vec<f64>, confidence: String) -> Self {
        let monotone = max_modulus
            .windows(2)
            .all(|w| w[1] >= w[0] * (1.0 - 1e-12));
        let half = radii.len() / 2;
        let type_estimate = if radii.len() >= 2 {
            let ys: Vec<f64> = max_modulus[half..].iter().map(|&m| ln_plus(m)).collect();
            ls_slope(&radii[half..], &ys).max(0.0)
        } else {
            0.0
        };
        Self {
            radii,
            max_modulus,
            type_estimate,
            q_functional: Vec::new(),
            q_threshold: None,
            q_trend: None,
            monotone,
            confidence,
        }
    }
}

/// Samples `M(r, f)` at `r = 1, 2, 4, …, r_max` and fits the exponential
/// type as the slope of `ln⁺M(r)` against `r` over the upper half of the
/// radii. Radii where evaluation overflows are dropped.
pub fn exp_type_estimate(f: &Function, r_max: f64, angular_nodes: usize) -> Result<GrowthEstimate, LiouvilleError> {
    if !(r_max >= 1.0) {
        return Err(LiouvilleError::BadParameters(format!("r_max must be >= 1, got {r_max}")));
    }
    let mut radii = Vec::new();
    let mut mods = Vec::new();
    let mut confidence = String::from("sampled radii 2^j");
    let mut r = 1.0;
    while r <= r_max * (1.0 + 1e-12) {
        match max_modulus(f, r, angular_nodes) {
            Ok(m) => {
                radii.push(r);
                mods.push(m);
            }
            Err(EvalError::Overflow(_)) => {
                confidence = format!("overflow at r = {r}; radius range truncated");
                break;
            }
            Err(e) => return Err(e.into()),
        }
        r *= 2.0;
    }
    Ok(GrowthEstimate::from_samples(radii, mods, confidence))
}

/// Samples `G(r) = 2 ln⁺M(r,f) / (ln r)²` and compares its trend with
/// `1 / ln|q^{-1}|`.
pub fn q_growth_diagnostic(f: &Function, q: C64, radii: &[f64], angular_nodes: usize) -> Result<GrowthEstimate, LiouvilleError> {
    if !(q.norm() > 0.0 && q.norm() < 1.0) {
        return Err(LiouvilleError::BadParameters("q-growth needs 0 < |q| < 1".into()));
    }
    if radii.iter().any(|&r| !(r > 1.0)) {
        return Err(LiouvilleError::BadParameters("q-growth radii must exceed 1".into()));
    }
    let mods: Vec<f64> = radii
        .iter()
        .map(|&r| max_modulus(f, r, angular_nodes))
        .collect::<Result<_, _>>()?;
    let mut est = GrowthEstimate::from_samples(radii.to_vec(), mods, "sampled q-growth functional".into());
    est.q_functional = radii
        .iter()
        .zip(&est.max_modulus)
        .map(|(&r, &m)| (r, 2.0 * ln_plus(m) / (r.ln() * r.ln())))
        .collect();
    let g: Vec<f64> = est.q_functional.iter().map(|&(_, g)| g).collect();
    est.q_trend = Some(trend_of(&g));
    est.q_threshold = Some(1.0 / q.inv().norm().ln());
    Ok(est)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Indeterminate,
}

impl CheckStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisCheck {
    pub name: String,
    pub status: CheckStatus,
    /// Signed distance to the threshold; positive means room to spare.
    pub margin: f64,
    pub samples: Vec<(f64, f64)>,
    pub detail: String,
}

/// Judges a sampled `m_n` that should tend to 0: pass if strictly
/// decreasing with final value below `tol`; fail if the final value is at
/// least `tol` and the last step shrinks by less than 10%; otherwise
/// indeterminate.
fn little_o_status(m: &[f64], tol: f64) -> (CheckStatus, f64) {
    let Some(&last) = m.last() else {
        return (CheckStatus::Indeterminate, 0.0);
    };
    let decreasing = m.windows(2).all(|w| w[1] < w[0]);
    let stalled = m.len() >= 2 && last >= 0.9 * m[m.len() - 2];
    let status = if !last.is_finite() {
        CheckStatus::Fail
    } else if decreasing && last < tol {
        CheckStatus::Pass
    } else if last >= tol && stalled {
        CheckStatus::Fail
    } else {
        CheckStatus::Indeterminate
    };
    (status, tol - last)
}

/// `(f/p)(x_n + iy) = o(x_n)` uniformly over the y-grid, via
/// `m_n = max_y |h(x_n + iy)| / x_n` with `h = f/p`.
pub fn vertical_growth_check(h: &Function, x_list: &[f64], y_grid: &[f64], tol: f64) -> Result<HypothesisCheck, LiouvilleError> {
    if x_list.is_empty() || y_grid.is_empty() || x_list.iter().any(|&x| !(x > 0.0)) {
        return Err(LiouvilleError::BadParameters("x_n must be positive and both grids non-empty".into()));
    }
    let mut samples = Vec::with_capacity(x_list.len());
    for &x in x_list {
        let mut m: f64 = 0.0;
        for &y in y_grid {
            m = m.max(h.eval(C64::new(x, y))?.norm());
        }
        samples.push((x, m / x));
    }
    let ms: Vec<f64> = samples.iter().map(|&(_, m)| m).collect();
    let (status, margin) = little_o_status(&ms, tol);
    Ok(HypothesisCheck {
        name: "f/p(x_n+iy) = o(x_n) uniformly on the y-grid".into(),
        status,
        margin,
        samples,
        detail: format!(
            "max over {} y-samples in [{}, {}]",
            y_grid.len(),
            y_grid.first().unwrap(),
            y_grid.last().unwrap()
        ),
    })
}

/// `|f(t)| = o(|t|)` via `M(r, f) / r` on the given radii.
pub fn modulus_growth_check(f: &Function, radii: &[f64], angular_nodes: usize, tol: f64) -> Result<HypothesisCheck, LiouvilleError> {
    let mut samples = Vec::with_capacity(radii.len());
    for &r in radii {
        let m = match max_modulus(f, r, angular_nodes) {
            Ok(m) => m,
            Err(EvalError::Overflow(_)) => f64::INFINITY,
            Err(e) => return Err(e.into()),
        };
        samples.push((r, m / r));
    }
    let ms: Vec<f64> = samples.iter().map(|&(_, m)| m).collect();
    let (status, margin) = little_o_status(&ms, tol);
    Ok(HypothesisCheck {
        name: "|f(t)| = o(|t|)".into(),
        status,
        margin,
        samples,
        detail: format!("M(r,f)/r at {} radii", radii.len()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theorem {
    Delta,
    Q,
    Classical,
}

impl Theorem {
    pub fn as_str(&self) -> &'static str {
        match self {
            Theorem::Delta => "delta",
            Theorem::Q => "q",
            Theorem::Classical => "classical",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    HypothesisViolated,
    DiscrepancyRecorded,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Consistent => "consistent",
            Verdict::HypothesisViolated => "hypothesis-violated",
            Verdict::DiscrepancyRecorded => "discrepancy-recorded",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientRow {
    pub k: usize,
    pub oracle: C64,
    pub oracle_error: f64,
    pub residue: Option<C64>,
    pub residue_error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConclusionCheck {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// One instance of the line-integral bound
/// `|Res(X^{-(k+1)} h)| ≤ max_{Re t = x_n}|h| / (x_n − k)^{k+1} · ∫|w|`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCheck {
    pub k: usize,
    pub x_n: f64,
    pub measured: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LiouvilleReport {
    pub theorem: Theorem,
    pub hypotheses: Vec<HypothesisCheck>,
    pub coefficients: Vec<CoefficientRow>,
    /// True iff every oracle coefficient with `k ≥ 1` is within tolerance.
    pub coefficients_vanish: bool,
    pub residue_experimental: bool,
    pub calibration: Option<Calibration>,
    pub conclusion: ConclusionCheck,
    pub bound_checks: Vec<BoundCheck>,
    pub growth: Option<GrowthEstimate>,
    pub notes: Vec<String>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LiouvilleParams {
    pub k_max: usize,
    pub coeff_tol: f64,
    pub residual_tol: f64,
    pub growth_margin: f64,
    pub x_list: Vec<f64>,
    pub y_grid: Vec<f64>,
    pub radii: Vec<f64>,
    pub r_max: f64,
    pub angular_nodes: usize,
    pub line: VerticalLine,
    pub circle: Circle,
}

impl Default for LiouvilleParams {
    fn default() -> Self {
        Self {
            k_max: 10,
            coeff_tol: 1e-8,
            residual_tol: 1e-8,
            growth_margin: 0.1,
            x_list: (0..5).map(|n| 4.0 * 2f64.powi(n)).collect(),
            y_grid: (0..61).map(|i| -3.0 + 0.1 * i as f64).collect(),
            radii: (1..=6).map(|j| 2f64.powi(j)).collect(),
            r_max: 64.0,
            angular_nodes: 256,
            line: VerticalLine::new(0.1, WeightSign::Plus).expect("valid default line"),
            circle: Circle::new(2.0, 512).expect("valid default circle"),
        }
    }
}

fn assemble_verdict(hypotheses: &[HypothesisCheck], coefficients_vanish: bool, conclusion: &ConclusionCheck) -> Verdict {
    if hypotheses.iter().any(|h| h.status == CheckStatus::Fail) {
        Verdict::HypothesisViolated
    } else if hypotheses.iter().all(|h| h.status == CheckStatus::Pass) && coefficients_vanish && conclusion.holds {
        Verdict::Consistent
    } else {
        Verdict::DiscrepancyRecorded
    }
}

fn coefficient_rows(oracle: &CoefficientSeries, residue: Option<&CoefficientSeries>) -> Vec<CoefficientRow> {
    (0..oracle.values.len())
        .map(|k| CoefficientRow {
            k,
            oracle: oracle.values[k],
            oracle_error: oracle.errors[k],
            residue: residue.map(|r| r.values[k]),
            residue_error: residue.map(|r| r.errors[k]),
        })
        .collect()
}

fn vanish(series: &CoefficientSeries, tol: f64) -> bool {
    series.values.iter().skip(1).all(|a| a.norm() <= tol)
}

/// Sample points for the constancy residual: rings of radii 0.5..4.
fn ring_grid() -> Vec<C64> {
    [0.5, 1.0, 2.0, 4.0]
        .into_iter()
        .flat_map(|r| (0..16).map(move |j| C64::from_polar(r, 2.0 * PI * (j as f64 + 0.25) / 16.0)))
        .collect()
}

fn constancy_residual(f: &Function, tol: f64) -> Result<ConclusionCheck, LiouvilleError> {
    let f0 = f.eval(C64::new(1.0, 0.0))?;
    let mut residual: f64 = 0.0;
    for t in ring_grid() {
        residual = residual.max((f.eval(t)? - f0).norm());
    }
    Ok(ConclusionCheck {
        name: "max |f(t) - f(1)| on rings r in {0.5, 1, 2, 4}".into(),
        residual,
        tolerance: tol,
        holds: residual <= tol,
    })
}

fn periodicity_residual(f: &Function, tol: f64) -> Result<ConclusionCheck, LiouvilleError> {
    let mut residual: f64 = 0.0;
    for i in 0..9 {
        for j in 0..5 {
            let t = C64::new(0.25 * i as f64, -1.0 + 0.5 * j as f64);
            residual = residual.max((f.eval(t + 1.0)? - f.eval(t)?).norm());
        }
    }
    Ok(ConclusionCheck {
        name: "max |f(t+1) - f(t)| on [0,2]x[-1,1]".into(),
        residual,
        tolerance: tol,
        holds: residual <= tol,
    })
}

/// Measures the line-integral bound for `h` at `Re t = x_n − k − 1`.
pub fn delta_bound_check(h: &Function, k: usize, x_n: f64, template: &VerticalLine) -> Result<Option<BoundCheck>, LiouvilleError> {
    let abscissa = x_n - k as f64 - 1.0;
    if abscissa <= 0.0 {
        return Ok(None);
    }
    let Some(sign) = WeightSign::decaying_at(abscissa) else {
        return Ok(None);
    };
    let line = VerticalLine {
        abscissa,
        sign,
        ..*template
    }
    .validated()?;
    let fd = ModelSemantics::forward_difference();
    let mut g = h.clone();
    for _ in 0..=k {
        g = fd.act_x_inv(&g);
    }
    let measured = barnes_residue(&g, &line)?.value.norm();
    let n = (2.0 * line.half_height / 0.01).round() as usize;
    let mut peak: f64 = 0.0;
    for j in 0..=n {
        let y = -line.half_height + 2.0 * line.half_height * j as f64 / n as f64;
        peak = peak.max(h.eval(C64::new(x_n, y))?.norm());
    }
    let bound = peak / (x_n - k as f64).powi(k as i32 + 1) * line.weight_mass();
    Ok(Some(BoundCheck {
        k,
        x_n,
        measured,
        bound,
        holds: measured <= bound * (1.0 + 1e-9),
    }))
}

/// Checks for the forward-difference statement: `f/p` of exponential type
/// at most `ln 2` and `o(x_n)` along vertical lines should force `f` to be
/// 1-periodic. `p` must be 1-periodic.
pub fn delta_liouville_verdict(f: &Function, p: &Function, params: &LiouvilleParams) -> Result<LiouvilleReport, LiouvilleError> {
    let semantics = ModelSemantics::forward_difference().with_generator(p.clone())?;
    let h = f.divide(p);

    let growth = exp_type_estimate(&h, params.r_max, params.angular_nodes)?;
    let limit = LN_2 + params.growth_margin;
    let type_check = HypothesisCheck {
        name: "f/p has exponential type <= ln 2".into(),
        status: if growth.type_estimate <= limit {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        margin: limit - growth.type_estimate,
        samples: growth.radii.iter().copied().zip(growth.max_modulus.iter().copied()).collect(),
        detail: format!("fitted type {:.6} ({})", growth.type_estimate, growth.confidence),
    };
    let vertical = vertical_growth_check(&h, &params.x_list, &params.y_grid, params.growth_margin)?;

    let oracle = newton_oracle(&h, params.k_max, NewtonOptions::default())?;
    let spec = ContourSpec::VerticalLine(params.line);
    let mut notes = vec![
        "uniformity in y is checked on a finite grid only".to_string(),
        "residue values on the vertical line are experimental: the line functional does not vanish on every difference".to_string(),
    ];
    let (calibration, residue) = match calibrate(&semantics, &spec) {
        Ok(cal) => {
            let r = residue_series(&semantics, f, params.k_max, &spec, &cal)?;
            notes.extend(r.warnings.iter().filter(|w| w.contains("tail")).cloned());
            (Some(cal), Some(r))
        }
        Err(e) => {
            notes.push(format!("calibration failed: {e}"));
            (None, None)
        }
    };

    let mut bound_checks = Vec::new();
    for k in 1..=params.k_max.min(3) {
        for &x in &params.x_list {
            if let Some(b) = delta_bound_check(&h, k, x, &params.line)? {
                bound_checks.push(b);
            }
        }
    }

    let conclusion = periodicity_residual(f, params.residual_tol)?;
    let coefficients_vanish = vanish(&oracle, params.coeff_tol);
    let hypotheses = vec![type_check, vertical];
    let verdict = assemble_verdict(&hypotheses, coefficients_vanish, &conclusion);
    if verdict == Verdict::DiscrepancyRecorded {
        notes.push("hypotheses pass on samples but the Newton coefficients or periodicity residual do not vanish".into());
    }
    Ok(LiouvilleReport {
        theorem: Theorem::Delta,
        hypotheses,
        coefficients: coefficient_rows(&oracle, residue.as_ref()),
        coefficients_vanish,
        residue_experimental: true,
        calibration,
        conclusion,
        bound_checks,
        growth: Some(growth),
        notes,
        verdict,
    })
}

/// Checks for the Jackson statement: `|f(t)| = o(|t|)` should force `f`
/// to be constant. Needs `0 < |q| < 1`.
pub fn q_liouville_verdict(f: &Function, q: C64, params: &LiouvilleParams) -> Result<LiouvilleReport, LiouvilleError> {
    if !(q.norm() > 0.0 && q.norm() < 1.0) {
        return Err(LiouvilleError::BadParameters(format!("need 0 < |q| < 1, got {q}")));
    }
    let semantics = ModelSemantics::jackson_a(q)?;
    let little_o = modulus_growth_check(f, &params.radii, params.angular_nodes, params.growth_margin)?;
    let qg = q_growth_diagnostic(f, q, &params.radii, params.angular_nodes)?;
    let threshold = qg.q_threshold.unwrap_or(f64::INFINITY);
    let last = qg.q_functional.last().map(|&(_, g)| g).unwrap_or(0.0);
    let q_trend = qg.q_trend.unwrap_or(Trend::Mixed);
    let q_status = if last < threshold && q_trend != Trend::Increasing {
        CheckStatus::Pass
    } else if last >= threshold && matches!(q_trend, Trend::Increasing | Trend::Flat) {
        CheckStatus::Fail
    } else {
        CheckStatus::Indeterminate
    };
    let q_check = HypothesisCheck {
        name: "q-exponential growth of order < ln|1/q|".into(),
        status: q_status,
        margin: threshold - last,
        samples: qg.q_functional.clone(),
        detail: format!("G(r) trend {q_trend:?}, threshold {threshold:.6}"),
    };

    let oracle = q_oracle_in(&semantics, f, params.k_max)?;
    let spec = ContourSpec::Circle(params.circle);
    let cal = calibrate(&semantics, &spec)?;
    let residue = residue_series(&semantics, f, params.k_max, &spec, &cal)?;

    let conclusion = constancy_residual(f, params.residual_tol)?;
    let coefficients_vanish = vanish(&oracle, params.coeff_tol);
    let hypotheses = vec![little_o, q_check];
    let verdict = assemble_verdict(&hypotheses, coefficients_vanish, &conclusion);
    Ok(LiouvilleReport {
        theorem: Theorem::Q,
        hypotheses,
        coefficients: coefficient_rows(&oracle, Some(&residue)),
        coefficients_vanish,
        residue_experimental: false,
        calibration: Some(cal),
        conclusion,
        bound_checks: Vec::new(),
        growth: Some(qg),
        notes: vec!["o(|t|) is sampled on finite radii only".into()],
        verdict,
    })
}

/// Checks for the classical statement: an entire `f` with
/// `|f(t)| = o(|t|)` should be constant.
pub fn classical_liouville_verdict(f: &AnalyticFunction, params: &LiouvilleParams) -> Result<LiouvilleReport, LiouvilleError> {
    let semantics = ModelSemantics::classical();
    let func: Function = f.clone().into();
    let little_o = modulus_growth_check(&func, &params.radii, params.angular_nodes, params.growth_margin)?;
    let oracle = taylor_oracle(f, params.k_max)?;
    let spec = ContourSpec::Circle(params.circle);
    let cal = calibrate(&semantics, &spec)?;
    let residue = residue_series(&semantics, &func, params.k_max, &spec, &cal)?;
    let conclusion = constancy_residual(&func, params.residual_tol)?;
    let coefficients_vanish = vanish(&oracle, params.coeff_tol);
    let hypotheses = vec![little_o];
    let verdict = assemble_verdict(&hypotheses, coefficients_vanish, &conclusion);
    Ok(LiouvilleReport {
        theorem: Theorem::Classical,
        hypotheses,
        coefficients: coefficient_rows(&oracle, Some(&residue)),
        coefficients_vanish,
        residue_experimental: false,
        calibration: Some(cal),
        conclusion,
        bound_checks: Vec::new(),
        growth: None,
        notes: vec!["o(|t|) is sampled on finite radii only".into()],
        verdict,
    })
}
