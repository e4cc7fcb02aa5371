use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use weylres_core::coefficients::NEWTON_K_CAP;
use weylres_core::liouville::LiouvilleParams;
use weylres_core::quadrature::{DEFAULT_CIRCLE_NODES, DEFAULT_HALF_HEIGHT, DEFAULT_STEP};
use weylres_core::{
    parse_expr, parse_function, AlgebraParams, AnalyticFunction, Circle, ContourSpec, Function, ModelKind,
    ModelSemantics, NewtonOptions, VerticalLine, WeightSign, C64,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelArg {
    Classical,
    Delta,
    #[value(alias = "q")]
    #[serde(alias = "q")]
    Qa,
    Qb,
}

impl ModelArg {
    pub fn kind(self) -> ModelKind {
        match self {
            ModelArg::Classical => ModelKind::Classical,
            ModelArg::Delta => ModelKind::ForwardDifference,
            ModelArg::Qa => ModelKind::JacksonA,
            ModelArg::Qb => ModelKind::JacksonB,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Oracle,
    Residue,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Json,
    Text,
}

/// Options shared by every subcommand. Each one can also come from the
/// `--config` file; flags given on the command line take precedence.
#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[arg(long, global = true, value_enum)]
    pub model: Option<ModelArg>,
    /// Deformation parameter of the Jackson models (complex literal).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// Commutation parameter for normalize/reduce; defaults to the model's.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// Line abscissa, or the Charlier parameter for `charlier`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Half-height of the truncated vertical line
    #[arg(long = "Y", global = true)]
    #[serde(rename = "Y")]
    pub half_height: Option<f64>,
    /// Trapezoid step on the vertical line
    #[arg(long, global = true)]
    pub h: Option<f64>,
    /// Sign of the line weight, +1 or -1 (default: whichever decays)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub sigma: Option<String>,
    /// Circle radius
    #[arg(long, global = true)]
    pub r: Option<f64>,
    /// Circle quadrature nodes
    #[arg(long = "N", global = true)]
    #[serde(rename = "N")]
    pub nodes: Option<usize>,
    /// Highest coefficient index
    #[arg(long = "K", global = true)]
    #[serde(rename = "K")]
    pub k: Option<usize>,
    /// Function of t, e.g. "exp(t) + t^2" or "pow(2,t)"
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub f: Option<String>,
    /// Residue integrand
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub g: Option<String>,
    /// 1-periodic function for the difference Liouville check (default: 1)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub p: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
    /// Charlier degree.
    #[arg(long, global = true)]
    pub n: Option<u32>,
    /// Charlier evaluation point.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Comma-separated evaluation points for `expand`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub at: Option<String>,
    /// Tolerance on |a_k|, k >= 1, for a "consistent" verdict.
    #[arg(long, global = true)]
    pub coeff_tol: Option<f64>,
    /// Tolerance on the conclusion residual.
    #[arg(long, global = true)]
    pub residual_tol: Option<f64>,
    /// Allow Newton truncation beyond the cancellation cap.
    #[arg(long, global = true)]
    #[serde(default)]
    pub uncapped: bool,
}

impl Options {
    /// Fills every unset field from `base`.
    pub fn merged_over(self, base: Options) -> Options {
        Options {
            model: self.model.or(base.model),
            q: self.q.or(base.q),
            lambda: self.lambda.or(base.lambda),
            a: self.a.or(base.a),
            half_height: self.half_height.or(base.half_height),
            h: self.h.or(base.h),
            sigma: self.sigma.or(base.sigma),
            r: self.r.or(base.r),
            nodes: self.nodes.or(base.nodes),
            k: self.k.or(base.k),
            f: self.f.or(base.f),
            g: self.g.or(base.g),
            p: self.p.or(base.p),
            method: self.method.or(base.method),
            format: self.format.or(base.format),
            n: self.n.or(base.n),
            x: self.x.or(base.x),
            at: self.at.or(base.at),
            coeff_tol: self.coeff_tol.or(base.coeff_tol),
            residual_tol: self.residual_tol.or(base.residual_tol),
            uncapped: self.uncapped || base.uncapped,
        }
    }

    pub fn load_file(path: &Path) -> Result<Options> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Parses a scalar given as an expression without `t`, e.g. `0.5`,
/// `(0.3+0.1i)` or `1/3`.
pub fn parse_complex(name: &str, text: &str) -> Result<C64> {
    let e = parse_expr(text).map_err(|e| anyhow!("--{name}: {e}"))?;
    e.as_const()
        .ok_or_else(|| anyhow!("--{name}: expected a constant, got {text:?}"))
}

pub fn parse_real(name: &str, text: &str) -> Result<f64> {
    let z = parse_complex(name, text)?;
    if z.im != 0.0 {
        bail!("--{name}: expected a real number, got {text:?}");
    }
    Ok(z.re)
}

pub fn parse_fn(name: &str, text: &str) -> Result<AnalyticFunction> {
    parse_function(text).map_err(|e| anyhow!("--{name}: {e}"))
}

/// Validated settings. Every constraint on the model and contour is checked
/// when this is built.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub opts: Options,
    pub model: ModelArg,
    pub semantics: ModelSemantics,
    pub format: FormatArg,
    pub method: MethodArg,
}

const DEFAULT_Q: f64 = 0.5;

impl RunConfig {
    pub fn build(opts: Options) -> Result<Self> {
        let model = opts.model.unwrap_or(ModelArg::Classical);
        let q = match &opts.q {
            Some(text) => parse_complex("q", text)?,
            None => C64::new(DEFAULT_Q, 0.0),
        };
        if opts.q.is_some() && matches!(model, ModelArg::Classical | ModelArg::Delta) {
            bail!("--q only applies to the qa and qb models");
        }
        let mut semantics = ModelSemantics::new(model.kind(), q)?;
        if let Some(text) = &opts.p {
            if model != ModelArg::Delta {
                bail!("--p only applies to the delta model");
            }
            semantics = semantics.with_generator(parse_fn("p", text)?.into())?;
        }
        if let Some(k) = opts.k {
            if model == ModelArg::Delta && k > NEWTON_K_CAP && !opts.uncapped {
                bail!("--K {k} exceeds the Newton cancellation cap {NEWTON_K_CAP}; pass --uncapped to override");
            }
        }
        let cfg = RunConfig {
            format: opts.format.unwrap_or(FormatArg::Json),
            method: opts.method.unwrap_or(MethodArg::Oracle),
            opts,
            model,
            semantics,
        };
        if model != ModelArg::Qb {
            // Surface contour errors at load time.
            cfg.contour()?;
        }
        Ok(cfg)
    }

    pub fn k_max(&self, default: usize) -> usize {
        self.opts.k.unwrap_or(default)
    }

    pub fn newton(&self) -> NewtonOptions {
        if self.opts.uncapped {
            NewtonOptions::uncapped()
        } else {
            NewtonOptions::default()
        }
    }

    pub fn algebra(&self) -> Result<AlgebraParams> {
        match &self.opts.lambda {
            Some(text) => Ok(AlgebraParams::new(parse_complex("lambda", text)?)?),
            None => Ok(self.semantics.algebra()),
        }
    }

    fn sign(&self) -> Result<Option<WeightSign>> {
        match self.opts.sigma.as_deref() {
            None => Ok(None),
            Some("+1" | "1" | "+") => Ok(Some(WeightSign::Plus)),
            Some("-1" | "-") => Ok(Some(WeightSign::Minus)),
            Some(other) => bail!("--sigma must be +1 or -1, got {other:?}"),
        }
    }

    pub fn line(&self) -> Result<VerticalLine> {
        let abscissa = match &self.opts.a {
            Some(text) => parse_real("a", text)?,
            None => 0.1,
        };
        let sign = match self.sign()? {
            Some(s) => s,
            None => WeightSign::decaying_at(abscissa).unwrap_or(WeightSign::Plus),
        };
        Ok(VerticalLine {
            abscissa,
            half_height: self.opts.half_height.unwrap_or(DEFAULT_HALF_HEIGHT),
            step: self.opts.h.unwrap_or(DEFAULT_STEP),
            sign,
        }
        .validated()?)
    }

    pub fn circle(&self) -> Result<Circle> {
        let default_r = if self.model == ModelArg::Classical { 1.0 } else { 2.0 };
        Ok(Circle::new(
            self.opts.r.unwrap_or(default_r),
            self.opts.nodes.unwrap_or(DEFAULT_CIRCLE_NODES),
        )?)
    }

    /// The contour the model's residue map lives on.
    pub fn contour(&self) -> Result<ContourSpec> {
        match self.model {
            ModelArg::Delta => {
                if self.opts.r.is_some() || self.opts.nodes.is_some() {
                    bail!("--r/--N describe a circle; the delta model uses a vertical line (--a, --Y, --h, --sigma)");
                }
                Ok(ContourSpec::VerticalLine(self.line()?))
            }
            _ => {
                if self.opts.half_height.is_some() || self.opts.h.is_some() || self.opts.sigma.is_some() {
                    bail!("--Y/--h/--sigma describe a vertical line; this model uses a circle (--r, --N)");
                }
                Ok(ContourSpec::Circle(self.circle()?))
            }
        }
    }

    pub fn function(&self, name: &str) -> Result<AnalyticFunction> {
        let text = match name {
            "f" => &self.opts.f,
            "g" => &self.opts.g,
            _ => &self.opts.p,
        };
        match text {
            Some(t) => parse_fn(name, t),
            None => bail!("--{name} is required"),
        }
    }

    pub fn generator(&self) -> Function {
        self.semantics.generator().clone()
    }

    pub fn liouville_params(&self, default_k: usize) -> Result<LiouvilleParams> {
        let mut params = LiouvilleParams {
            k_max: self.k_max(default_k),
            ..Default::default()
        };
        if let Some(t) = self.opts.coeff_tol {
            params.coeff_tol = t;
        }
        if let Some(t) = self.opts.residual_tol {
            params.residual_tol = t;
        }
        match self.contour()? {
            ContourSpec::VerticalLine(l) => params.line = l,
            ContourSpec::Circle(c) => params.circle = c,
        }
        Ok(params)
    }

    /// The effective settings, echoed into reports.
    pub fn echo(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        m.insert("model".into(), serde_json::json!(self.semantics.kind().name()));
        if matches!(self.model, ModelArg::Qa | ModelArg::Qb) {
            m.insert("q".into(), crate::report::complex(self.semantics.q()));
        }
        if let Ok(spec) = self.contour() {
            m.insert("contour".into(), serde_json::json!(spec.describe()));
        }
        let o = &self.opts;
        for (key, v) in [("f", &o.f), ("g", &o.g), ("p", &o.p), ("lambda", &o.lambda)] {
            if let Some(v) = v {
                m.insert(key.into(), serde_json::json!(v));
            }
        }
        if let Some(k) = o.k {
            m.insert("K".into(), serde_json::json!(k));
        }
        m.insert("method".into(), serde_json::to_value(self.method).unwrap());
        serde_json::Value::Object(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> Options {
        Options::default()
    }

    #[test]
    fn flags_win_over_file() {
        let file = Options {
            k: Some(4),
            f: Some("t".into()),
            ..opts()
        };
        let flags = Options {
            k: Some(8),
            ..opts()
        };
        let m = flags.merged_over(file);
        assert_eq!(m.k, Some(8));
        assert_eq!(m.f.as_deref(), Some("t"));
    }

    #[test]
    fn load_time_validation() {
        let bad_q = Options {
            model: Some(ModelArg::Qa),
            q: Some("1".into()),
            ..opts()
        };
        assert!(RunConfig::build(bad_q).is_err());
        let mixed = Options {
            model: Some(ModelArg::Delta),
            r: Some(2.0),
            ..opts()
        };
        assert!(RunConfig::build(mixed).is_err());
        let no_decay = Options {
            model: Some(ModelArg::Delta),
            a: Some("0.5".into()),
            sigma: Some("+1".into()),
            ..opts()
        };
        assert!(RunConfig::build(no_decay).is_err());
        let big_k = Options {
            model: Some(ModelArg::Delta),
            k: Some(30),
            ..opts()
        };
        assert!(RunConfig::build(big_k).is_err());
        let not_periodic = Options {
            model: Some(ModelArg::Delta),
            p: Some("t".into()),
            ..opts()
        };
        assert!(RunConfig::build(not_periodic).is_err());
    }

    #[test]
    fn scalars() {
        assert_eq!(parse_complex("q", "(0.3+0.1i)").unwrap(), C64::new(0.3, 0.1));
        assert_eq!(parse_real("a", "-0.2").unwrap(), -0.2);
        assert!(parse_real("a", "t").is_err());
        assert!(parse_real("a", "2i").is_err());
    }
}
