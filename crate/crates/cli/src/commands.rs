use anyhow::{anyhow, bail, Result};
use serde_json::{json, Value};
use weylres_core::charlier::{
    charlier_operator_power, charlier_rodrigues_oracle, charlier_sum, charlier_symbolic,
};
use weylres_core::coefficients::{
    basis_name, calibrate, model_residue, oracle, residue_series, CoefficientSeries,
};
use weylres_core::liouville::{
    classical_liouville_verdict, delta_liouville_verdict, q_liouville_verdict, LiouvilleReport, Verdict,
};
use weylres_core::series::{family_diagnostics, FormalSeriesF, SeriesFamily};
use weylres_core::{parse_weyl, Function, ModelKind, C64};

use crate::config::{parse_complex, MethodArg, ModelArg, RunConfig};
use crate::report::{complex, float, Report};

pub struct Outcome {
    pub report: Report,
    pub hypothesis_violated: bool,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Self {
            report,
            hypothesis_violated: false,
        }
    }
}

fn terms_json(w: &weylres_core::WeylElement) -> Value {
    Value::Array(
        w.terms()
            .map(|((m, n), c)| json!({ "x_power": m, "d_power": n, "coeff": complex(c) }))
            .collect(),
    )
}

pub fn normalize(cfg: &RunConfig, expr: &str) -> Result<Outcome> {
    let params = cfg.algebra()?;
    let w = parse_weyl(expr, &params)?;
    let mut r = Report::new("normalize", cfg.echo());
    r.results.push(json!({
        "input": expr,
        "lambda": complex(params.lambda()),
        "normal_form": w.to_string(),
        "terms": terms_json(&w),
    }));
    Ok(r.into())
}

pub fn reduce(cfg: &RunConfig, expr: &str) -> Result<Outcome> {
    let params = cfg.algebra()?;
    let w = parse_weyl(expr, &params)?;
    let class = w.reduce_mod_ideal();
    let mut r = Report::new("reduce", cfg.echo());
    r.results.push(json!({
        "input": expr,
        "normal_form": w.to_string(),
        "class": class.to_string(),
        "symbolic_residue": complex(class.symbolic_residue()),
        "terms": Value::Array(class.terms().map(|(m, c)| json!({ "x_power": m, "coeff": complex(c) })).collect()),
    }));
    Ok(r.into())
}

fn parse_points(text: &str) -> Result<Vec<C64>> {
    text.split(',')
        .map(|s| parse_complex("at", s.trim()))
        .collect()
}

pub fn expand(cfg: &RunConfig, expr: &str) -> Result<Outcome> {
    let s = &cfg.semantics;
    let w = parse_weyl(expr, &s.algebra())?;
    let f: Function = match &cfg.opts.f {
        Some(_) => cfg.function("f")?.into(),
        None => cfg.generator(),
    };
    let image = s.interpret(&w, &f)?;
    let points = parse_points(cfg.opts.at.as_deref().ok_or_else(|| anyhow!("--at is required"))?)?;
    let mut r = Report::new("expand", cfg.echo());
    for t in points {
        let v = image.eval(t)?;
        r.results.push(json!({ "t": complex(t), "value": complex(v) }));
    }
    Ok(r.into())
}

fn family_for(cfg: &RunConfig) -> SeriesFamily {
    match cfg.semantics.kind() {
        ModelKind::Classical => SeriesFamily::Classical,
        ModelKind::ForwardDifference => SeriesFamily::Difference,
        ModelKind::JacksonA | ModelKind::JacksonB => {
            let q = cfg.semantics.q();
            if q.norm() > 1.0 {
                SeriesFamily::QLarge { q }
            } else {
                SeriesFamily::QSmall
            }
        }
    }
}

pub fn extract(cfg: &RunConfig) -> Result<Outcome> {
    let s = &cfg.semantics;
    let f: Function = cfg.function("f")?.into();
    let k_max = cfg.k_max(10);
    let mut r = Report::new("extract", cfg.echo());

    let oracle_series = if cfg.method != MethodArg::Residue {
        Some(oracle(s, &f, k_max, cfg.newton())?)
    } else {
        None
    };
    let residue = if cfg.method != MethodArg::Oracle {
        let spec = cfg.contour()?;
        let cal = calibrate(s, &spec)?;
        r.warnings.push(format!("calibration c = {} ({})", fmt_c(cal.c), cal.provenance));
        Some(residue_series(s, &f, k_max, &spec, &cal)?)
    } else {
        None
    };
    for series in [&oracle_series, &residue].into_iter().flatten() {
        r.warnings.extend(series.warnings.iter().cloned());
    }

    for k in 0..=k_max {
        let mut row = serde_json::Map::new();
        row.insert("k".into(), json!(k));
        row.insert("basis".into(), json!(basis_name(s.kind())));
        if let Some(o) = &oracle_series {
            row.insert("oracle".into(), complex(o.values[k]));
            row.insert("oracle_error".into(), float(o.errors[k]));
        }
        if let Some(rs) = &residue {
            row.insert("residue".into(), complex(rs.values[k]));
            row.insert("residue_error".into(), float(rs.errors[k]));
        }
        r.results.push(Value::Object(row));
    }

    let source: Option<&CoefficientSeries> = oracle_series.as_ref().or(residue.as_ref());
    if let Some(series) = source {
        if k_max >= 2 {
            let fs = FormalSeriesF::new(series.values.clone(), family_for(cfg))?;
            let d = family_diagnostics(&fs)?;
            r.results.push(json!({
                "family_trend": format!("{:?}", d.trend).to_lowercase(),
                "family_consistency": d.consistency.as_str(),
                "family_threshold": d.threshold.map(float),
                "family_note": d.note,
            }));
        }
    }
    Ok(r.into())
}

fn fmt_c(z: C64) -> String {
    let (re, im) = (
        weylres_core::numfmt::fmt_sig12(z.re),
        weylres_core::numfmt::fmt_sig12(z.im.abs()),
    );
    format!("{re}{}{im}i", if z.im < 0.0 { '-' } else { '+' })
}

pub fn residue(cfg: &RunConfig) -> Result<Outcome> {
    let s = &cfg.semantics;
    if s.kind() == ModelKind::JacksonB {
        bail!("no residue realization for the qb model");
    }
    let g: Function = cfg.function("g")?.into();
    let spec = cfg.contour()?;
    let raw = model_residue(s, &g, &spec)?;
    let mut r = Report::new("residue", cfg.echo());
    let mut row = json!({
        "residue": complex(raw.value),
        "error": float(raw.error),
        "flagged": raw.flagged,
        "experimental": raw.experimental,
    });
    match calibrate(s, &spec) {
        Ok(cal) => {
            row["calibration"] = complex(cal.c);
            row["calibrated"] = complex(cal.c * raw.value);
        }
        Err(e) => r.warnings.push(format!("calibration unavailable: {e}")),
    }
    if raw.flagged {
        r.warnings.push("line integral tail above tolerance".into());
    }
    if raw.experimental {
        r.warnings.push("vertical-line residues are experimental".into());
    }
    r.results.push(row);
    Ok(r.into())
}

fn liouville_rows(rep: &LiouvilleReport, r: &mut Report) {
    for h in &rep.hypotheses {
        r.results.push(json!({
            "section": "hypothesis",
            "name": h.name,
            "status": h.status.as_str(),
            "margin": float(h.margin),
            "detail": h.detail,
        }));
    }
    for c in &rep.coefficients {
        let mut row = json!({
            "section": "coefficient",
            "k": c.k,
            "oracle": complex(c.oracle),
            "oracle_error": float(c.oracle_error),
        });
        if let (Some(v), Some(e)) = (c.residue, c.residue_error) {
            row["residue"] = complex(v);
            row["residue_error"] = float(e);
        }
        r.results.push(row);
    }
    r.results.push(json!({
        "section": "conclusion",
        "name": rep.conclusion.name,
        "residual": float(rep.conclusion.residual),
        "tolerance": rep.conclusion.tolerance,
        "holds": rep.conclusion.holds,
        "coefficients_vanish": rep.coefficients_vanish,
    }));
    for b in &rep.bound_checks {
        r.results.push(json!({
            "section": "bound",
            "k": b.k,
            "x_n": b.x_n,
            "measured": float(b.measured),
            "bound": float(b.bound),
            "holds": b.holds,
        }));
    }
    if let Some(g) = &rep.growth {
        r.results.push(json!({
            "section": "growth",
            "type_estimate": g.type_estimate,
            "radii": g.radii,
            "max_modulus": g.max_modulus.iter().map(|&m| float(m)).collect::<Vec<_>>(),
            "q_functional": g.q_functional.iter().map(|&(_, v)| v).collect::<Vec<_>>(),
            "q_threshold": g.q_threshold.map(float),
            "monotone": g.monotone,
            "confidence": g.confidence,
        }));
    }
    if let Some(cal) = &rep.calibration {
        r.results.push(json!({
            "section": "calibration",
            "c": complex(cal.c),
            "provenance": cal.provenance,
            "experimental": rep.residue_experimental,
        }));
    }
    r.warnings.extend(rep.notes.iter().cloned());
}

pub fn liouville(cfg: &RunConfig) -> Result<Outcome> {
    let f = cfg.function("f")?;
    let rep = match cfg.model {
        ModelArg::Classical => classical_liouville_verdict(&f, &cfg.liouville_params(12)?)?,
        ModelArg::Qa => q_liouville_verdict(&f.into(), cfg.semantics.q(), &cfg.liouville_params(6)?)?,
        ModelArg::Delta => delta_liouville_verdict(&f.into(), &cfg.generator(), &cfg.liouville_params(10)?)?,
        ModelArg::Qb => bail!("the Liouville check is available for the classical, delta and qa models"),
    };
    let mut r = Report::new("liouville", cfg.echo());
    r.results.push(json!({ "section": "theorem", "name": rep.theorem.as_str() }));
    liouville_rows(&rep, &mut r);
    r.verdict = Some(rep.verdict.as_str().into());
    Ok(Outcome {
        report: r,
        hypothesis_violated: rep.verdict == Verdict::HypothesisViolated,
    })
}

pub fn charlier(cfg: &RunConfig) -> Result<Outcome> {
    let n = cfg.opts.n.ok_or_else(|| anyhow!("--n is required"))?;
    let a = parse_complex("a", cfg.opts.a.as_deref().ok_or_else(|| anyhow!("--a is required"))?)?;
    let x = parse_complex("x", cfg.opts.x.as_deref().ok_or_else(|| anyhow!("--x is required"))?)?;
    let sym = charlier_symbolic(n, a)?;
    let mut values = vec![
        ("symbolic", sym.eval(x)),
        ("sum", charlier_sum(n, a, x)?),
        ("operator-power", charlier_operator_power(n, a, x)?),
    ];
    let mut r = Report::new("charlier", json!({ "n": n, "a": complex(a), "x": complex(x) }));
    let integral = x.im == 0.0 && x.re >= 0.0 && x.re.fract() == 0.0 && x.re <= u32::MAX as f64;
    if integral {
        values.push(("rodrigues", charlier_rodrigues_oracle(n, a, x.re as u64)?));
    } else {
        r.warnings.push("Rodrigues oracle needs a nonnegative integer x; skipped".into());
    }
    let reference = values[0].1;
    let scale = values.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
    let spread = values.iter().map(|(_, v)| (v - reference).norm()).fold(0.0, f64::max);
    let rel = if scale > 0.0 { spread / scale } else { 0.0 };
    for (method, v) in &values {
        r.results.push(json!({ "method": method, "value": complex(*v) }));
    }
    r.results.push(json!({
        "agreement": rel <= 1e-9,
        "max_rel_diff": rel,
        "methods": values.len(),
    }));
    r.results.push(json!({
        "falling": sym.falling.iter().map(|&c| complex(c)).collect::<Vec<_>>(),
        "monomial": sym.monomial.iter().map(|&c| complex(c)).collect::<Vec<_>>(),
    }));
    Ok(r.into())
}
