//! Run configurations and the command runner behind the `tailineq` binary.
//!
//! A configuration is flat `key = value` text. Blank lines and everything
//! after `#` are ignored; keys are dotted paths:
//!
//! ```text
//! command = profile          # profile | duality | lyapunov | constants | weak | verify
//! measure.family = cauchy    # cauchy | subexp | exponential | vq
//! measure.alpha = 2
//! measure.n = 3
//! grid.t.min = 1e-4
//! grid.t.max = 0.5
//! grid.t.points = 100
//! grid.t.spacing = log       # log | linear
//! mc.seed = 7
//! output.dir = out
//! ```
//!
//! Every table carries a `provenance` column naming how its numbers were
//! obtained: `paper-formula`, `quadrature`, `MC` or `fitted`. The profile
//! table's `lower_bound` is the product lower bound for `μⁿ` with
//! `n = measure.n`, left empty when `μ` fails the hazard-rate check.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::duality::{profile_from_beta, RateFunction};
use crate::error::{Error, Result};
use crate::isoperimetry::{iso_i_even, iso_j, ProfileFunction};
use crate::lyapunov::{
    apply_generator, asymptotic_range, cauchy_certificate, derive_weight, subexp_certificate, verify_drift,
    CertificateSummary, DriftReport, LyapunovCertificate, WeightKind,
};
use crate::measures::{Measure1D, QuadratureSpec, RadialMeasure};
use crate::numeric::{linspace, logspace};
use crate::spherical::{
    bobkov_constant, cauchy_bobkov_closed_form, cauchy_bounds, subexp_bounds, testfn_limit, RadialTransport,
    TestFnFamily,
};
use crate::verify::{emitted_suite, CheckResult, McConfig, Outcome};
use crate::weak::{product_iso_lower, product_iso_upper, product_weak_cheeger, ProductBoundSpec};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "TAILINEQ_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Profile,
    Duality,
    Lyapunov,
    Constants,
    Weak,
    Verify,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum MeasureSpec {
    Cauchy { alpha: f64 },
    Subexp { p: f64 },
    Exponential,
    Vq { q: f64 },
}

impl MeasureSpec {
    pub fn measure(&self) -> Result<Measure1D> {
        match *self {
            MeasureSpec::Cauchy { alpha } => Measure1D::cauchy(alpha),
            MeasureSpec::Subexp { p } => Measure1D::subexp(p),
            MeasureSpec::Exponential => Ok(Measure1D::exponential()),
            MeasureSpec::Vq { q } => Measure1D::vq(q),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub log: bool,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        if self.log {
            logspace(self.min, self.max, self.points)
        } else {
            linspace(self.min, self.max, self.points)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub measure: MeasureSpec,
    pub dimension: usize,
    pub t_grid: GridSpec,
    pub s_grid: GridSpec,
    pub x_grid: GridSpec,
    pub quadrature: QuadratureSpec,
    pub mc: McConfig,
    pub output_dir: Option<PathBuf>,
    pub prefix: String,
    /// Suite entries whose id starts with this string (`all` for every one).
    pub verify_select: String,
    /// Multiplier applied to every verified constant.
    pub verify_scale: f64,
    pub dimensions: Vec<usize>,
}

fn config_error(line: usize, field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

struct Fields {
    map: BTreeMap<String, (usize, String)>,
}

impl Fields {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.map.remove(key)
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Result<(usize, T)> {
        match self.take(key) {
            None => Ok((0, default)),
            Some((line, raw)) => raw
                .parse::<T>()
                .map(|v| (line, v))
                .map_err(|_| config_error(line, key, format!("cannot parse `{raw}`"))),
        }
    }

    fn required_f64(&mut self, key: &str) -> Result<(usize, f64)> {
        match self.take(key) {
            None => Err(config_error(0, key, "missing")),
            Some((line, raw)) => raw
                .parse::<f64>()
                .map(|v| (line, v))
                .map_err(|_| config_error(line, key, format!("cannot parse `{raw}`"))),
        }
    }

    fn grid(&mut self, name: &str, default: GridSpec, legal: (f64, f64)) -> Result<GridSpec> {
        let key = |k: &str| format!("grid.{name}.{k}");
        let (l1, min) = self.parse(&key("min"), default.min)?;
        let (l2, max) = self.parse(&key("max"), default.max)?;
        let (l3, points) = self.parse(&key("points"), default.points)?;
        let (l4, spacing) = self.parse(&key("spacing"), if default.log { "log" } else { "linear" }.to_string())?;
        let log = match spacing.as_str() {
            "log" => true,
            "linear" => false,
            other => return Err(config_error(l4, &key("spacing"), format!("unknown spacing `{other}`"))),
        };
        if points == 0 {
            return Err(config_error(l3, &key("points"), "grid is empty"));
        }
        if !(min <= max) || (points > 1 && min == max) {
            return Err(config_error(l2.max(l1), &key("max"), "grid must satisfy min < max"));
        }
        if !(min >= legal.0 && max <= legal.1) || (log && min <= 0.0) {
            return Err(config_error(
                l1.max(l2),
                &key("min"),
                format!(
                    "grid must lie inside [{}, {}] (and be positive when log-spaced)",
                    legal.0, legal.1
                ),
            ));
        }
        Ok(GridSpec { min, max, points, log })
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| config_error(line, body, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(config_error(line, "", "empty key"));
            }
            if map.insert(key.to_string(), (line, value.to_string())).is_some() {
                return Err(config_error(line, key, "duplicate key"));
            }
        }
        let mut f = Fields { map };

        let (cl, command) = f.take("command").ok_or_else(|| config_error(0, "command", "missing"))?;
        let command = match command.as_str() {
            "profile" => Command::Profile,
            "duality" => Command::Duality,
            "lyapunov" => Command::Lyapunov,
            "constants" => Command::Constants,
            "weak" => Command::Weak,
            "verify" => Command::Verify,
            other => return Err(config_error(cl, "command", format!("unknown command `{other}`"))),
        };

        let (fl, family) = f.parse("measure.family", "cauchy".to_string())?;
        let measure = match family.as_str() {
            "cauchy" => {
                let (l, alpha) = f.parse("measure.alpha", 2.0f64)?;
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return Err(config_error(l, "measure.alpha", "alpha must be positive"));
                }
                MeasureSpec::Cauchy { alpha }
            }
            "subexp" => {
                let (l, p) = f.required_f64("measure.p")?;
                if !(p > 0.0 && p <= 1.0) {
                    return Err(config_error(l, "measure.p", "p must lie in (0, 1]"));
                }
                MeasureSpec::Subexp { p }
            }
            "exponential" => MeasureSpec::Exponential,
            "vq" => {
                let (l, q) = f.required_f64("measure.q")?;
                if !(q > 1.0 && q.is_finite()) {
                    return Err(config_error(l, "measure.q", "q must exceed 1"));
                }
                MeasureSpec::Vq { q }
            }
            other => return Err(config_error(fl, "measure.family", format!("unknown family `{other}`"))),
        };
        let (nl, dimension) = f.parse("measure.n", 1usize)?;
        if dimension == 0 {
            return Err(config_error(nl, "measure.n", "n must be at least 1"));
        }

        let t_grid = f.grid(
            "t",
            GridSpec {
                min: 1e-4,
                max: 0.5,
                points: 100,
                log: true,
            },
            (0.0, 1.0),
        )?;
        if t_grid.min <= 0.0 || t_grid.max >= 1.0 {
            return Err(config_error(0, "grid.t.min", "t must lie strictly inside (0, 1)"));
        }
        let s_grid = f.grid(
            "s",
            GridSpec {
                min: 1e-4,
                max: 0.4,
                points: 50,
                log: true,
            },
            (0.0, 0.5),
        )?;
        if s_grid.min <= 0.0 || s_grid.max >= 0.5 {
            return Err(config_error(0, "grid.s.min", "s must lie strictly inside (0, 1/2)"));
        }
        let x_grid = f.grid(
            "x",
            GridSpec {
                min: 0.0,
                max: 100.0,
                points: 2001,
                log: false,
            },
            (0.0, f64::INFINITY),
        )?;

        let defaults = QuadratureSpec::default();
        let quadrature = QuadratureSpec {
            abs_tol: f.parse("quadrature.abs_tol", defaults.abs_tol)?.1,
            rel_tol: f.parse("quadrature.rel_tol", defaults.rel_tol)?.1,
            tail_eps: f.parse("quadrature.tail_eps", defaults.tail_eps)?.1,
            max_depth: f.parse("quadrature.max_depth", defaults.max_depth)?.1,
        };
        quadrature
            .validate()
            .map_err(|e| config_error(0, "quadrature", e.to_string()))?;

        let mcd = McConfig::default();
        let mc = McConfig {
            seed: f.parse("mc.seed", mcd.seed)?.1,
            samples: f.parse("mc.samples", mcd.samples)?.1,
            blocks: f.parse("mc.blocks", mcd.blocks)?.1,
        };
        if mc.samples < 2 || mc.blocks == 0 {
            return Err(config_error(0, "mc.samples", "need at least 2 samples and 1 block"));
        }

        let output_dir = f.take("output.dir").map(|(_, v)| PathBuf::from(v));
        let prefix = f.take("output.prefix").map(|(_, v)| v).unwrap_or_default();
        let verify_select = f
            .take("verify.inequality")
            .map(|(_, v)| v)
            .unwrap_or_else(|| "all".into());
        let (vl, verify_scale) = f.parse("verify.scale", 1.0f64)?;
        if !(verify_scale > 0.0 && verify_scale.is_finite()) {
            return Err(config_error(vl, "verify.scale", "scale must be positive"));
        }
        let dimensions = match f.take("dimensions") {
            None => vec![1, 3, 10],
            Some((line, raw)) => {
                let dims = raw
                    .split(',')
                    .map(|d| d.trim().parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| config_error(line, "dimensions", format!("cannot parse `{raw}`")))?;
                if dims.is_empty() || dims.contains(&0) {
                    return Err(config_error(line, "dimensions", "dimensions must be positive"));
                }
                dims
            }
        };

        if let Some((key, (line, _))) = f.map.into_iter().next() {
            return Err(config_error(line, &key, "unknown key"));
        }
        Ok(Self {
            command,
            measure,
            dimension,
            t_grid,
            s_grid,
            x_grid,
            quadrature,
            mc,
            output_dir,
            prefix,
            verify_select,
            verify_scale,
            dimensions,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// `explicit`, else `output.dir`, else the environment default, else
    /// the working directory.
    pub fn output_dir(&self, explicit: Option<&Path>) -> PathBuf {
        explicit
            .map(Path::to_path_buf)
            .or_else(|| self.output_dir.clone())
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub outcome: Outcome,
    pub files: Vec<PathBuf>,
}

/// Maps a run result to the process exit status: `0` pass, `1` fail, `2`
/// inconclusive, `3` configuration or input-domain error, `1` for any other
/// numerical failure.
pub fn exit_code(result: &Result<RunReport>) -> i32 {
    match result {
        Ok(r) => r.outcome.exit_code(),
        Err(
            Error::Config { .. }
            | Error::InvalidParameter(_)
            | Error::HypothesisViolation(_)
            | Error::RegularityViolation { .. },
        ) => 3,
        Err(_) => 1,
    }
}

fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

struct Table {
    text: String,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            text: format!("{}\n", header.join(",")),
        }
    }

    fn row(&mut self, cells: &[String]) {
        let _ = writeln!(self.text, "{}", cells.join(","));
    }
}

struct Writer {
    dir: PathBuf,
    prefix: String,
    files: Vec<PathBuf>,
}

impl Writer {
    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        let path = self.dir.join(format!("{}{name}", self.prefix));
        std::fs::write(&path, contents)?;
        self.files.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }
}

/// Executes the configured command and writes its artifacts to `out_dir`.
pub fn run(config: &RunConfig, out_dir: &Path) -> Result<RunReport> {
    let mut w = Writer {
        dir: out_dir.to_path_buf(),
        prefix: config.prefix.clone(),
        files: Vec::new(),
    };
    let outcome = match config.command {
        Command::Profile => run_profile(config, &mut w)?,
        Command::Duality => run_duality(config, &mut w)?,
        Command::Lyapunov => run_lyapunov(config, &mut w)?,
        Command::Constants => run_constants(config, &mut w)?,
        Command::Weak => run_weak(config, &mut w)?,
        Command::Verify => run_verify(config, &mut w)?,
    };
    Ok(RunReport {
        outcome,
        files: w.files,
    })
}

fn measure_with_quadrature(config: &RunConfig) -> Result<Measure1D> {
    config.measure.measure()?.with_quadrature(config.quadrature)
}

fn run_profile(config: &RunConfig, w: &mut Writer) -> Result<Outcome> {
    let m = measure_with_quadrature(config)?;
    let provenance = if m.has_closed_form() {
        "paper-formula"
    } else {
        "quadrature"
    };
    // Lower bound on the profile of the n-fold product; absent without DHR.
    let product = ProductBoundSpec::new(&m, config.dimension).ok();
    let mut t = Table::new(&["t", "J", "I", "lower_bound", "provenance"]);
    for x in config.t_grid.values() {
        let lower = match &product {
            Some(spec) => num(product_iso_lower(spec, x)?),
            None => String::new(),
        };
        t.row(&[
            num(x),
            num(iso_j(&m, x)?),
            num(iso_i_even(&m, x)?),
            lower,
            provenance.into(),
        ]);
    }
    w.write("profile.csv", &t.text)?;
    Ok(Outcome::Pass)
}

fn run_duality(config: &RunConfig, w: &mut Writer) -> Result<Outcome> {
    let m = measure_with_quadrature(config)?;
    let beta = RateFunction::from_profile(&ProfileFunction::i(&m));
    let mut rates = Table::new(&["s", "beta", "provenance"]);
    for s in config.s_grid.values() {
        rates.row(&[num(s), num(beta.value(s)?), "quadrature".into()]);
    }
    w.write("beta.csv", &rates.text)?;
    let mut back = Table::new(&["t", "I", "I_from_beta", "provenance"]);
    let ts: Vec<f64> = config.t_grid.values().into_iter().filter(|&t| t <= 0.5).collect();
    let rows = ts
        .par_iter()
        .map(|&t| Ok([t, iso_i_even(&m, t)?, profile_from_beta(&beta, t)?]))
        .collect::<Result<Vec<_>>>()?;
    for [t, i, from_beta] in rows {
        back.row(&[num(t), num(i), num(from_beta), "quadrature".into()]);
    }
    w.write("profile_from_beta.csv", &back.text)?;
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct WeightSummary {
    kind: WeightKind,
    formula: &'static str,
    prefactor: f64,
    kappa_u: f64,
    growth_exponent: f64,
    provenance: &'static str,
}

#[derive(Serialize)]
struct LyapunovArtifact {
    certificate: CertificateSummary,
    drift: DriftReport,
    weights: Vec<WeightSummary>,
}

fn certificate(config: &RunConfig) -> Result<LyapunovCertificate> {
    match config.measure {
        MeasureSpec::Cauchy { alpha } => cauchy_certificate(config.dimension, alpha),
        MeasureSpec::Subexp { p } if p < 1.0 => subexp_certificate(config.dimension, p),
        _ => Err(Error::Config {
            line: 0,
            field: "measure.family".into(),
            message: "lyapunov certificates exist for cauchy and subexp with p < 1".into(),
        }),
    }
}

fn run_lyapunov(config: &RunConfig, w: &mut Writer) -> Result<Outcome> {
    let cert = certificate(config)?;
    let grid = config.x_grid.values();
    let drift = verify_drift(&cert, &grid)?;
    let (lo, hi) = asymptotic_range(&cert);
    let weights = WeightKind::ALL
        .iter()
        .map(|&kind| {
            let wf = derive_weight(&cert, kind, None)?;
            Ok(WeightSummary {
                kind,
                formula: wf.formula,
                prefactor: wf.prefactor,
                kappa_u: wf.kappa_u,
                growth_exponent: wf.growth_exponent(lo, hi),
                provenance: "quadrature",
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&["x", "LW", "phi_W", "b_indicator", "drift", "provenance"]);
    for &x in &grid {
        let r = if x == 0.0 && config.dimension >= 2 { 1e-9 } else { x };
        let lw = apply_generator(&cert.diffusion, &cert.w, r)?;
        let phi = cert.phi.value(cert.w.value(r));
        let b = if x.abs() <= cert.radius { cert.b } else { 0.0 };
        t.row(&[
            num(x),
            num(lw),
            num(phi),
            num(b),
            num(lw + phi - b),
            "paper-formula".into(),
        ]);
    }
    w.json(
        "certificate.json",
        &LyapunovArtifact {
            certificate: cert.summary(),
            drift: drift.clone(),
            weights,
        },
    )?;
    w.write("drift.csv", &t.text)?;
    Ok(if drift.pass { Outcome::Pass } else { Outcome::Fail })
}

fn run_constants(config: &RunConfig, w: &mut Writer) -> Result<Outcome> {
    let mut t = Table::new(&["family", "parameter", "n", "quantity", "value", "provenance"]);
    for &n in &config.dimensions {
        let rows: Vec<(&str, f64, &str)> = match config.measure {
            MeasureSpec::Cauchy { alpha } => {
                let (lower, upper) = cauchy_bounds(n, alpha)?;
                let rho = RadialTransport::cauchy().pull_back(&RadialMeasure::cauchy(n, alpha)?);
                let bobkov = bobkov_constant(rho, n, &config.quadrature)?;
                vec![
                    ("lower", lower, "paper-formula"),
                    ("upper", upper, "paper-formula"),
                    (
                        "bobkov_closed_form",
                        cauchy_bobkov_closed_form(n, alpha)?,
                        "paper-formula",
                    ),
                    ("bobkov_quadrature", bobkov.constant, "quadrature"),
                    (
                        "testfn_limit",
                        testfn_limit(TestFnFamily::Cauchy, n, alpha, 1e-3)?,
                        "quadrature",
                    ),
                ]
            }
            MeasureSpec::Subexp { p } if p < 1.0 => {
                let (lower, upper) = subexp_bounds(n, p)?;
                let rho = RadialTransport::subexp(p)?.pull_back(&RadialMeasure::subexp(n, p)?);
                let bobkov = bobkov_constant(rho, n, &config.quadrature)?;
                vec![
                    ("lower", lower, "paper-formula"),
                    ("upper", upper, "paper-formula"),
                    ("bobkov_quadrature", bobkov.constant, "quadrature"),
                    (
                        "testfn_limit",
                        testfn_limit(TestFnFamily::Subexp, n, p, 1e-3)?,
                        "quadrature",
                    ),
                ]
            }
            _ => {
                return Err(Error::Config {
                    line: 0,
                    field: "measure.family".into(),
                    message: "spherical constants exist for cauchy and subexp with p < 1".into(),
                })
            }
        };
        let (family, parameter) = match config.measure {
            MeasureSpec::Cauchy { alpha } => ("cauchy", alpha),
            MeasureSpec::Subexp { p } => ("subexp", p),
            _ => unreachable!("rejected above"),
        };
        for (quantity, value, provenance) in rows {
            t.row(&[
                family.into(),
                num(parameter),
                n.to_string(),
                quantity.into(),
                num(value),
                provenance.into(),
            ]);
        }
    }
    w.write("constants.csv", &t.text)?;
    Ok(Outcome::Pass)
}

fn run_weak(config: &RunConfig, w: &mut Writer) -> Result<Outcome> {
    let m = measure_with_quadrature(config)?;
    let provenance = if m.has_closed_form() {
        "paper-formula"
    } else {
        "quadrature"
    };
    let mut rates = Table::new(&["n", "s", "gradient", "oscillation", "vacuous", "provenance"]);
    let mut bounds = Table::new(&["n", "t", "lower", "upper", "provenance"]);
    for &n in &config.dimensions {
        let spec = ProductBoundSpec::new(&m, n)?;
        for s in config.s_grid.values() {
            let r = product_weak_cheeger(&spec, s)?;
            rates.row(&[
                n.to_string(),
                num(s),
                num(r.gradient),
                num(r.oscillation),
                r.vacuous.to_string(),
                provenance.into(),
            ]);
        }
        for t in config.t_grid.values() {
            bounds.row(&[
                n.to_string(),
                num(t),
                num(product_iso_lower(&spec, t)?),
                num(product_iso_upper(&spec, t)?),
                provenance.into(),
            ]);
        }
    }
    w.write("weak_rates.csv", &rates.text)?;
    w.write("weak_bounds.csv", &bounds.text)?;
    Ok(Outcome::Pass)
}

fn run_verify(config: &RunConfig, w: &mut Writer) -> Result<Outcome> {
    let entries: Vec<_> = emitted_suite(&config.mc)?
        .into_iter()
        .filter(|e| config.verify_select == "all" || e.inequality.id.starts_with(&config.verify_select))
        .collect();
    if entries.is_empty() {
        return Err(Error::Config {
            line: 0,
            field: "verify.inequality".into(),
            message: format!("no inequality id starts with `{}`", config.verify_select),
        });
    }
    let results = entries
        .iter()
        .map(|e| {
            if config.verify_scale == 1.0 {
                e.check()
            } else {
                e.scaled(config.verify_scale).check()
            }
        })
        .collect::<Result<Vec<CheckResult>>>()?;
    let outcome = results.iter().fold(Outcome::Pass, |acc, r| acc.merge(r.outcome));
    w.json("verify.json", &results)?;
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_dotted_keys_and_comments() {
        let c = RunConfig::parse(
            "# a profile run\ncommand = profile\nmeasure.family = cauchy # inline\nmeasure.alpha = 0.5\n\ngrid.t.points = 7\nmc.seed = 42\n",
        )
        .unwrap();
        assert_eq!(c.command, Command::Profile);
        assert_eq!(c.measure, MeasureSpec::Cauchy { alpha: 0.5 });
        assert_eq!(c.t_grid.values().len(), 7);
        assert_eq!(c.mc.seed, 42);
    }

    #[test]
    fn errors_name_line_and_field() {
        let e = RunConfig::parse("command = profile\nmeasure.alpha = -1\n").unwrap_err();
        assert_eq!(
            e,
            Error::Config {
                line: 2,
                field: "measure.alpha".into(),
                message: "alpha must be positive".into()
            }
        );
        let e = RunConfig::parse("command = profile\ngrid.t.points = 0\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 2, .. }));
        let e = RunConfig::parse("command = profile\nbogus = 1\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 2, ref field, .. } if field == "bogus"));
        let e = RunConfig::parse("command = profile\ncommand = weak\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 2, .. }));
        assert!(RunConfig::parse("measure.alpha = 1\n").is_err());
        assert!(RunConfig::parse("command = weak\nmeasure.family = subexp\nmeasure.p = 1.5\n").is_err());
        assert!(RunConfig::parse("command = weak\nmeasure.family = vq\nmeasure.q = 1\n").is_err());
        assert!(RunConfig::parse("command = weak\ngrid.s.max = 0.7\n").is_err());
        assert!(RunConfig::parse("command = weak\nmeasure.n = 0\n").is_err());
    }

    #[test]
    fn numbers_keep_seventeen_digits() {
        let s = num(0.1);
        assert_eq!(s, "1.0000000000000001e-1");
        assert_eq!(s.parse::<f64>().unwrap(), 0.1);
        let third = 1.0 / 3.0;
        assert_eq!(num(third).parse::<f64>().unwrap(), third);
    }

    #[test]
    fn exit_codes() {
        let config_err: Result<RunReport> = Err(Error::Config {
            line: 1,
            field: "x".into(),
            message: "bad".into(),
        });
        assert_eq!(exit_code(&config_err), 3);
        let ok = Ok(RunReport {
            outcome: Outcome::Inconclusive,
            files: vec![],
        });
        assert_eq!(exit_code(&ok), 2);
    }
}
