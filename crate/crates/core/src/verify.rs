//! Empirical checks of functional inequalities on explicit test functions.
//!
//! On the line both sides are computed by adaptive quadrature, split at the
//! kinks of each test function. On ℝⁿ both sides are Monte Carlo averages
//! over a sample drawn in independent blocks, each seeded from the master
//! seed and its block index, so results do not depend on scheduling. A
//! Monte Carlo verdict is `pass` only when the right-hand side exceeds the
//! left by three standard errors and `fail` only when the left exceeds the
//! right by as much; anything in between is `inconclusive`.
//!
//! Weighted energies under heavy-tailed laws often have infinite variance,
//! which makes the paired standard error useless. A witness therefore also
//! passes when a lower confidence bound for the energy with samples capped
//! at their 99.9% quantile (capping can only lower the mean) beats an upper
//! confidence bound for the left-hand side, whose integrand is bounded.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::lyapunov::{
    cauchy_certificate, derive_weight, finite_range, subexp_certificate, LyapunovCertificate, WeightFunction,
    WeightKind,
};
use crate::measures::{Family, Measure1D, Potential, QuadratureSpec};
use crate::numeric::{golden_min, logspace};
use crate::spherical::{cauchy_bounds, subexp_bounds};
use crate::weak::{
    product_weak_cheeger, product_weak_poincare, weak_rate_from_converse, ProductBoundSpec, WeakKind,
    WeightTailQuantile,
};
use crate::weighted::muckenhoupt_b;
use crate::weighted::Weight;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Relative accuracy assumed for quadrature-based verdicts.
pub const QUADRATURE_TOLERANCE: f64 = 1e-6;
/// Width, in standard errors, of the Monte Carlo decision margin.
pub const MC_SIGMAS: f64 = 3.0;
/// Quantile at which the energy sample is capped for the heavy-tail
/// pass test.
pub const TRUNCATION_LEVEL: f64 = 0.999;

/// A real function of one variable with its derivative, range and kinks.
#[derive(Clone)]
pub struct Profile {
    label: String,
    g: RealFn,
    dg: RealFn,
    inf: f64,
    sup: f64,
    breaks: Vec<f64>,
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Profile")
            .field("label", &self.label)
            .field("inf", &self.inf)
            .field("sup", &self.sup)
            .finish()
    }
}

impl Profile {
    pub fn new(
        label: impl Into<String>,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dg: impl Fn(f64) -> f64 + Send + Sync + 'static,
        range: (f64, f64),
        breaks: Vec<f64>,
    ) -> Result<Self> {
        if !(range.0.is_finite() && range.1.is_finite() && range.0 <= range.1) {
            return Err(invalid(format!("profile range must be finite, got {range:?}")));
        }
        let mut breaks = breaks;
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        Ok(Self {
            label: label.into(),
            g: Arc::new(g),
            dg: Arc::new(dg),
            inf: range.0,
            sup: range.1,
            breaks,
        })
    }

    /// `min(max((x − t)/h, 0), 1)`, a smoothed indicator of `{x > t}`.
    pub fn ramp(t: f64, h: f64) -> Result<Self> {
        if !(h > 0.0 && t.is_finite()) {
            return Err(invalid(format!("ramp needs finite t and h > 0, got t={t}, h={h}")));
        }
        Self::new(
            format!("ramp(t={t}, h={h})"),
            move |x| ((x - t) / h).clamp(0.0, 1.0),
            move |x| if x > t && x < t + h { 1.0 / h } else { 0.0 },
            (0.0, 1.0),
            vec![t, t + h],
        )
    }

    /// `tanh(x/a)`.
    pub fn tanh(a: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(invalid(format!("tanh scale must be positive, got {a}")));
        }
        Self::new(
            format!("tanh(x/{a})"),
            move |x| (x / a).tanh(),
            move |x| {
                let c = (x / a).cosh();
                1.0 / (a * c * c)
            },
            (-1.0, 1.0),
            Vec::new(),
        )
    }

    /// `sign(x) min(|x|, a)`.
    pub fn odd_hat(a: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(invalid(format!("hat width must be positive, got {a}")));
        }
        Self::new(
            format!("hat(a={a})"),
            move |x| x.clamp(-a, a),
            move |x| if x.abs() < a { 1.0 } else { 0.0 },
            (-a, a),
            vec![-a, a],
        )
    }

    /// `sign(x) (e^{θ(V(min(|x|, R)) − V(0))/2} − 1)` for the potential `V`
    /// of `m`, made linear on `[−c, c]` with `c = min(1, R)` so that the
    /// energy stays finite when `V'` blows up at the origin: the truncated
    /// exponential witnesses that nearly saturate the weighted inequalities.
    pub fn truncated_exponential(m: &Measure1D, theta: f64, radius: f64) -> Result<Self> {
        if !(theta > 0.0 && radius > 0.0) {
            return Err(invalid(format!(
                "truncated witness needs theta > 0 and R > 0, got theta={theta}, R={radius}"
            )));
        }
        let core = radius.min(1.0);
        let v0 = m.potential(0.0);
        let outer = {
            let m = m.clone();
            move |r: f64| (0.5 * theta * (m.potential(r) - v0)).exp() - 1.0
        };
        let at_core = outer(core);
        let top = outer(radius);
        let slope = at_core / core;
        let md = m.clone();
        Self::new(
            format!("trunc-exp(theta={theta}, R={radius})"),
            move |x| {
                let r = x.abs();
                if r < core {
                    slope * x
                } else {
                    x.signum() * outer(r.min(radius))
                }
            },
            move |x| {
                let r = x.abs();
                if r < core {
                    slope
                } else if r >= radius {
                    0.0
                } else {
                    let e = (0.5 * theta * (md.potential(r) - v0)).exp();
                    0.5 * theta * md.potential_derivative(r) * e
                }
            },
            (-top, top),
            vec![-radius, -core, core, radius],
        )
    }

    /// `1 − ramp(t, h)` on `[0, ∞)`, a bump around the origin for radial use.
    pub fn bump(t: f64, h: f64) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(invalid(format!("bump radius must be non-negative, got {t}")));
        }
        let ramp = Self::ramp(t, h)?;
        let (g, dg) = (ramp.g.clone(), ramp.dg.clone());
        Self::new(
            format!("bump(t={t}, h={h})"),
            move |x| 1.0 - g(x),
            move |x| -dg(x),
            (0.0, 1.0),
            ramp.breaks,
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.g)(x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        (self.dg)(x)
    }

    pub fn oscillation(&self) -> f64 {
        self.sup - self.inf
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessFamily {
    Coordinate,
    RadialBump,
    TruncatedExponentialWitness,
    RandomFeature,
}

#[derive(Debug, Clone)]
enum Projection {
    Coordinate(usize),
    Radius,
    Direction(Vec<f64>),
}

/// `f(x) = g(ℓ(x))` for a profile `g` and a projection `ℓ` that is a
/// coordinate, the Euclidean norm or a unit linear form, so that
/// `|∇f| = |g'(ℓ(x))|` away from the origin.
#[derive(Debug, Clone)]
pub struct TestFunction {
    family: WitnessFamily,
    dim: usize,
    projection: Projection,
    profile: Profile,
}

impl TestFunction {
    pub fn coordinate(dim: usize, index: usize, profile: Profile) -> Result<Self> {
        if index >= dim {
            return Err(invalid(format!("coordinate {index} out of range for dimension {dim}")));
        }
        let family = if profile.label.starts_with("trunc-exp") {
            WitnessFamily::TruncatedExponentialWitness
        } else {
            WitnessFamily::Coordinate
        };
        Ok(Self {
            family,
            dim,
            projection: Projection::Coordinate(index),
            profile,
        })
    }

    /// `g(|x|)`; the profile must attain an end of its range at 0 so that
    /// the range on `[0, ∞)` is the stated one.
    pub fn radial(dim: usize, profile: Profile) -> Result<Self> {
        check_dim(dim)?;
        let g0 = profile.value(0.0);
        if g0 != profile.inf && g0 != profile.sup {
            return Err(invalid("a radial profile must attain its infimum or supremum at 0"));
        }
        Ok(Self {
            family: WitnessFamily::RadialBump,
            dim,
            projection: Projection::Radius,
            profile,
        })
    }

    /// `g(⟨θ, x⟩)` with `θ` normalised to the unit sphere.
    pub fn feature(direction: Vec<f64>, profile: Profile) -> Result<Self> {
        check_dim(direction.len())?;
        let norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(invalid("feature direction must be a non-zero finite vector"));
        }
        Ok(Self {
            family: WitnessFamily::RandomFeature,
            dim: direction.len(),
            projection: Projection::Direction(direction.iter().map(|v| v / norm).collect()),
            profile,
        })
    }

    pub fn label(&self) -> String {
        match &self.projection {
            Projection::Coordinate(i) => format!("{}(x{})", self.profile.label, i + 1),
            Projection::Radius => format!("{}(|x|)", self.profile.label),
            Projection::Direction(_) => format!("{}(<theta,x>)", self.profile.label),
        }
    }

    pub fn family(&self) -> WitnessFamily {
        self.family
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    fn project(&self, x: &[f64]) -> f64 {
        match &self.projection {
            Projection::Coordinate(i) => x[*i],
            Projection::Radius => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Projection::Direction(d) => d.iter().zip(x).map(|(a, b)| a * b).sum(),
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.profile.value(self.project(x))
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let t = self.project(x);
        let d = self.profile.derivative(t);
        match &self.projection {
            Projection::Coordinate(i) => {
                let mut g = vec![0.0; self.dim];
                g[*i] = d;
                g
            }
            Projection::Radius => {
                if t == 0.0 {
                    vec![0.0; self.dim]
                } else {
                    x.iter().map(|v| d * v / t).collect()
                }
            }
            Projection::Direction(dir) => dir.iter().map(|v| d * v).collect(),
        }
    }

    pub fn gradient_norm(&self, x: &[f64]) -> f64 {
        let t = self.project(x);
        if matches!(self.projection, Projection::Radius) && t == 0.0 {
            return 0.0;
        }
        self.profile.derivative(t).abs()
    }

    /// Central differences with step `10⁻⁶ max(1, |x_i|)`.
    pub fn numerical_gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        (0..self.dim)
            .map(|i| {
                let h = 1e-6 * x[i].abs().max(1.0);
                y[i] = x[i] + h;
                let up = self.value(&y);
                y[i] = x[i] - h;
                let down = self.value(&y);
                y[i] = x[i];
                (up - down) / (2.0 * h)
            })
            .collect()
    }

    pub fn oscillation(&self) -> f64 {
        self.profile.oscillation()
    }

    /// Largest relative discrepancy, `|a − b| / max(1, |b|)` per component,
    /// between the closed-form and central-difference gradients at `points`
    /// Gaussian points of scale `scale`. Points within `10⁻³` of a kink of
    /// the profile are redrawn.
    pub fn gradient_self_check(&self, points: usize, scale: f64, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        let mut done = 0;
        while done < points {
            let x: Vec<f64> = (0..self.dim)
                .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
                .collect();
            let t = self.project(&x);
            if self
                .profile
                .breaks
                .iter()
                .any(|b| (t - b).abs() < 1e-3 * b.abs().max(1.0))
            {
                continue;
            }
            let exact = self.gradient(&x);
            let numeric = self.numerical_gradient(&x);
            for (a, b) in exact.iter().zip(&numeric) {
                worst = worst.max((a - b).abs() / b.abs().max(1.0));
            }
            done += 1;
        }
        worst
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    Ok(())
}

/// Fifty bounded profiles adapted to the scale of `m`: ramps at tail
/// quantiles, hyperbolic tangents, odd hats and truncated exponential
/// witnesses reaching tail masses down to `10⁻⁶`.
pub fn witness_profiles(m: &Measure1D) -> Result<Vec<Profile>> {
    profiles(m, 0.01, 1e-4, 1e-6)
}

/// The same families with ramps `50` times wider and tails cut at `10⁻³`
/// (ramps) and `10⁻⁴` (truncated witnesses), so that every witness varies
/// on a set holding enough Monte Carlo samples.
pub fn sampled_witness_profiles(m: &Measure1D) -> Result<Vec<Profile>> {
    profiles(m, 0.5, 1e-3, 1e-4)
}

fn profiles(m: &Measure1D, ramp_width: f64, ramp_tail: f64, trunc_tail: f64) -> Result<Vec<Profile>> {
    let mut out = Vec::with_capacity(50);
    for s in logspace(ramp_tail, 0.45, 12) {
        let t = m.tail_inverse(s)?;
        out.push(Profile::ramp(t, ramp_width * (1.0 + t))?);
    }
    for a in logspace(0.1, 100.0, 8) {
        out.push(Profile::tanh(a)?);
    }
    for a in logspace(0.1, 1e3, 10) {
        out.push(Profile::odd_hat(a)?);
    }
    for s in logspace(trunc_tail, 0.1, 10) {
        out.push(Profile::truncated_exponential(m, 1.0, m.tail_inverse(s)?)?);
    }
    for theta in [0.5, 0.9] {
        for s in logspace(10.0 * trunc_tail, 0.1, 5) {
            out.push(Profile::truncated_exponential(m, theta, m.tail_inverse(s)?)?);
        }
    }
    Ok(out)
}

/// The profiles of [`witness_profiles`] as functions on the line.
pub fn witnesses_1d(m: &Measure1D) -> Result<Vec<TestFunction>> {
    witness_profiles(m)?
        .into_iter()
        .map(|p| TestFunction::coordinate(1, 0, p))
        .collect()
}

/// The sampled witnesses of the base law applied to the first coordinate,
/// plus five radial bumps and five random ridge functions.
pub fn witnesses_nd(m: &Measure1D, dim: usize, seed: u64) -> Result<Vec<TestFunction>> {
    check_dim(dim)?;
    let mut out: Vec<TestFunction> = sampled_witness_profiles(m)?
        .into_iter()
        .map(|p| TestFunction::coordinate(dim, 0, p))
        .collect::<Result<_>>()?;
    for s in logspace(1e-3, 0.3, 5) {
        let t = m.tail_inverse(s)?;
        out.push(TestFunction::radial(dim, Profile::bump(t, 0.1 * (1.0 + t))?)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for a in logspace(0.3, 30.0, 5) {
        let dir: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        out.push(TestFunction::feature(dir, Profile::tanh(a)?)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InequalityKind {
    /// `Var(f) ≤ C ∫ ω |∇f|²`.
    Poincare,
    /// `∫ |f − m| ≤ C ∫ ω |∇f|`.
    Cheeger,
    /// `inf_c ∫ (f − c)² ω ≤ C ∫ |∇f|²`.
    ConversePoincare,
    /// `inf_c ∫ |f − c| ω ≤ C ∫ |∇f|`.
    ConverseCheeger,
    /// `Var(f) ≤ β(s) ∫ |∇f|² + s Osc(f)²`.
    WeakPoincare,
    /// `∫ |f − m| ≤ β(s) ∫ |∇f| + s Osc(f)`.
    WeakCheeger,
}

impl InequalityKind {
    fn is_quadratic(self) -> bool {
        matches!(self, Self::Poincare | Self::ConversePoincare | Self::WeakPoincare)
    }

    fn is_converse(self) -> bool {
        matches!(self, Self::ConversePoincare | Self::ConverseCheeger)
    }
}

/// One instance of the right-hand side: the energy constant and the
/// oscillation coefficient (zero for the non-weak kinds).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Term {
    pub constant: f64,
    pub oscillation: f64,
}

#[derive(Debug, Clone)]
pub struct Inequality {
    pub id: String,
    pub kind: InequalityKind,
    pub weight: Weight,
    pub terms: Vec<Term>,
}

impl Inequality {
    /// A non-weak inequality with a single constant.
    pub fn new(id: impl Into<String>, kind: InequalityKind, constant: f64, weight: Weight) -> Result<Self> {
        if matches!(kind, InequalityKind::WeakCheeger | InequalityKind::WeakPoincare) {
            return Err(invalid("weak inequalities are built with Inequality::weak"));
        }
        Self::checked(
            id.into(),
            kind,
            weight,
            vec![Term {
                constant,
                oscillation: 0.0,
            }],
        )
    }

    /// A weak inequality, one term per value of `s`.
    pub fn weak(id: impl Into<String>, kind: InequalityKind, terms: Vec<Term>) -> Result<Self> {
        if !matches!(kind, InequalityKind::WeakCheeger | InequalityKind::WeakPoincare) {
            return Err(invalid("Inequality::weak needs a weak kind"));
        }
        Self::checked(id.into(), kind, Weight::constant(1.0), terms)
    }

    fn checked(id: String, kind: InequalityKind, weight: Weight, terms: Vec<Term>) -> Result<Self> {
        if terms.is_empty() {
            return Err(invalid("an inequality needs at least one term"));
        }
        for t in &terms {
            if !(t.constant >= 0.0 && t.constant.is_finite() && t.oscillation >= 0.0) {
                return Err(invalid(format!("invalid term {t:?}")));
            }
        }
        Ok(Self {
            id,
            kind,
            weight,
            terms,
        })
    }

    /// The same inequality with every energy constant multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            id: format!("{} x{factor}", self.id),
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    constant: t.constant * factor,
                    oscillation: t.oscillation,
                })
                .collect(),
            ..self.clone()
        }
    }
}

/// Laws that can be sampled on ℝⁿ.
#[derive(Debug, Clone)]
pub enum Sampler {
    /// `μⁿ` for a law `μ` on the line.
    Product { base: Measure1D, n: usize },
    /// Density `∝ (1+|x|)^{−(n+α)}`.
    RadialCauchy { n: usize, alpha: f64 },
    /// Density `∝ e^{−|x|^p}`.
    RadialSubexp { n: usize, p: f64 },
}

impl Sampler {
    pub fn dimension(&self) -> usize {
        match self {
            Sampler::Product { n, .. } | Sampler::RadialCauchy { n, .. } | Sampler::RadialSubexp { n, .. } => *n,
        }
    }

    fn validate(&self) -> Result<()> {
        check_dim(self.dimension())?;
        match self {
            Sampler::RadialCauchy { alpha, .. } if !(*alpha > 0.0) => {
                Err(invalid(format!("Cauchy exponent must be positive, got {alpha}")))
            }
            Sampler::RadialSubexp { p, .. } if !(*p > 0.0 && *p <= 1.0) => {
                Err(invalid(format!("sub-exponential p must lie in (0, 1], got {p}")))
            }
            _ => Ok(()),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) -> Result<()> {
        match self {
            Sampler::Product { base, .. } => {
                for x in out.iter_mut() {
                    *x = sample_line(base, rng)?;
                }
            }
            Sampler::RadialCauchy { n, alpha } => {
                let u = Beta::new(*n as f64, *alpha)
                    .map_err(|e| invalid(e.to_string()))?
                    .sample(rng);
                place_on_sphere(rng, out, u / (1.0 - u));
            }
            Sampler::RadialSubexp { n, p } => {
                let t: f64 = Gamma::new(*n as f64 / p, 1.0)
                    .map_err(|e| invalid(e.to_string()))?
                    .sample(rng);
                place_on_sphere(rng, out, t.powf(1.0 / p));
            }
        }
        Ok(())
    }
}

fn sample_line(m: &Measure1D, rng: &mut ChaCha8Rng) -> Result<f64> {
    if let Family::SubExponential { p } = m.family() {
        let t: f64 = Gamma::new(1.0 / p, 1.0)
            .map_err(|e| invalid(e.to_string()))?
            .sample(rng);
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        return Ok(sign * t.powf(1.0 / p));
    }
    let u: f64 = rng.random_range(f64::EPSILON..1.0);
    m.sample(u)
}

fn place_on_sphere(rng: &mut ChaCha8Rng, out: &mut [f64], r: f64) {
    loop {
        let mut norm = 0.0;
        for x in out.iter_mut() {
            *x = rng.sample(StandardNormal);
            norm += *x * *x;
        }
        if norm > 0.0 {
            let scale = r / norm.sqrt();
            out.iter_mut().for_each(|x| *x *= scale);
            return;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct McConfig {
    pub seed: u64,
    pub samples: usize,
    pub blocks: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            samples: 1_000_000,
            blocks: 64,
        }
    }
}

/// A sample of `samples` points in ℝⁿ, stored row-major. Block `b` is
/// drawn from a ChaCha8 stream keyed by the master seed with stream id `b`.
#[derive(Debug, Clone)]
pub struct PointCloud {
    dim: usize,
    data: Vec<f64>,
}

impl PointCloud {
    pub fn draw(sampler: &Sampler, mc: &McConfig) -> Result<Self> {
        sampler.validate()?;
        if mc.samples < 2 || mc.blocks == 0 {
            return Err(invalid("Monte Carlo needs at least 2 samples and 1 block"));
        }
        let dim = sampler.dimension();
        let per_block = mc.samples.div_ceil(mc.blocks);
        let mut data = vec![0.0; mc.samples * dim];
        data.par_chunks_mut(per_block * dim)
            .enumerate()
            .try_for_each(|(b, chunk)| {
                let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
                rng.set_stream(b as u64);
                chunk
                    .chunks_mut(dim)
                    .try_for_each(|point| sampler.draw(&mut rng, point))
            })?;
        Ok(Self { dim, data })
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.dim)
    }

    fn par_points(&self) -> rayon::slice::Chunks<'_, f64> {
        self.data.par_chunks(self.dim)
    }
}

/// How both sides of an inequality are evaluated.
#[derive(Debug, Clone)]
pub enum Backend {
    Quadrature(Measure1D),
    MonteCarlo { sampler: Sampler, config: McConfig },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

impl Outcome {
    /// Fail dominates inconclusive, which dominates pass.
    pub fn merge(self, other: Outcome) -> Outcome {
        match (self, other) {
            (Outcome::Fail, _) | (_, Outcome::Fail) => Outcome::Fail,
            (Outcome::Inconclusive, _) | (_, Outcome::Inconclusive) => Outcome::Inconclusive,
            _ => Outcome::Pass,
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Inconclusive => 2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessResult {
    pub witness: String,
    pub family: WitnessFamily,
    pub term: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// Standard error of `rhs − lhs` (zero for quadrature).
    pub standard_error: f64,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub inequality: String,
    pub kind: InequalityKind,
    pub weight: String,
    #[serde(rename = "provenance")]
    pub method: &'static str,
    pub functions: usize,
    pub worst_ratio: f64,
    pub worst_witness: String,
    /// Relative tolerance of the verdict at the worst witness:
    /// `QUADRATURE_TOLERANCE`, or three standard errors over the
    /// right-hand side.
    pub tolerance: f64,
    pub outcome: Outcome,
    pub pass: bool,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub blocks: Option<usize>,
    pub witnesses: Vec<WitnessResult>,
}

impl CheckResult {
    pub fn failures(&self) -> usize {
        self.witnesses.iter().filter(|w| w.outcome == Outcome::Fail).count()
    }
}

/// Evaluates every term of `ineq` on every function. See the module
/// documentation for the verdict rule.
pub fn check_inequality(ineq: &Inequality, backend: &Backend, functions: &[TestFunction]) -> Result<CheckResult> {
    if functions.is_empty() {
        return Err(Error::DegenerateFamily("no test functions".into()));
    }
    let (method, rows, meta) = match backend {
        Backend::Quadrature(m) => {
            if let Some(f) = functions.iter().find(|f| f.dim != 1) {
                return Err(invalid(format!("{} is not a function on the line", f.label())));
            }
            let rows = functions
                .iter()
                .map(|f| quadrature_rows(ineq, m, f))
                .collect::<Result<Vec<_>>>()?;
            ("quadrature", rows, None)
        }
        Backend::MonteCarlo { sampler, config } => {
            let cloud = PointCloud::draw(sampler, config)?;
            if let Some(f) = functions.iter().find(|f| f.dim != cloud.dim) {
                return Err(invalid(format!(
                    "{} has dimension {}, the sampler {}",
                    f.label(),
                    f.dim,
                    cloud.dim
                )));
            }
            let rows = functions
                .iter()
                .map(|f| mc_rows(ineq, &cloud, f))
                .collect::<Result<Vec<_>>>()?;
            ("MC", rows, Some(*config))
        }
    };
    let witnesses: Vec<WitnessResult> = rows.into_iter().flatten().collect();
    let worst = witnesses
        .iter()
        .max_by(|a, b| a.ratio.total_cmp(&b.ratio))
        .expect("at least one witness");
    let outcome = witnesses.iter().fold(Outcome::Pass, |acc, w| acc.merge(w.outcome));
    let tolerance = if meta.is_some() {
        MC_SIGMAS * worst.standard_error / worst.rhs
    } else {
        QUADRATURE_TOLERANCE
    };
    Ok(CheckResult {
        inequality: ineq.id.clone(),
        kind: ineq.kind,
        weight: ineq.weight.label().to_string(),
        method,
        functions: functions.len(),
        worst_ratio: worst.ratio,
        worst_witness: worst.witness.clone(),
        tolerance,
        outcome,
        pass: outcome == Outcome::Pass,
        samples: meta.map(|m| m.samples),
        seed: meta.map(|m| m.seed),
        blocks: meta.map(|m| m.blocks),
        witnesses,
    })
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else if lhs > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// `∫ h dμ` over the line for a non-negative `h`, split at `breaks` and at
/// 0. Finite segments are cut further into pieces whose widths double away
/// from the origin, so that no piece is wide compared with its distance
/// from the bulk of the law.
fn integrate_line<H: Fn(f64) -> f64>(m: &Measure1D, breaks: &[f64], h: H) -> Result<f64> {
    let quad = m.quadrature();
    let mut pts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|b| b.is_finite())
        .chain(std::iter::once(0.0))
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let g = |x: f64| {
        let d = m.density(x);
        if d > 0.0 {
            h(x) * d
        } else {
            0.0
        }
    };
    let first = pts[0];
    let last = pts[pts.len() - 1];
    let mut total = quad.integrate_to_infinity(|y| g(-y), -first)?;
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= 0.0 {
            total += outward(quad, |y| g(-y), -b, -a)?;
        } else {
            total += outward(quad, g, a, b)?;
        }
    }
    total += quad.integrate_to_infinity(g, last)?;
    Ok(total)
}

fn outward<G: Fn(f64) -> f64>(quad: &crate::measures::QuadratureSpec, g: G, a: f64, b: f64) -> Result<f64> {
    let mut total = 0.0;
    let mut left = a;
    let mut width = a.abs().max(1.0);
    while left < b {
        let right = (left + width).min(b);
        total += quad.integrate_relative(&g, left, right)?;
        left = right;
        width *= 2.0;
    }
    Ok(total)
}

fn quadrature_rows(ineq: &Inequality, m: &Measure1D, f: &TestFunction) -> Result<Vec<WitnessResult>> {
    let p = &f.profile;
    let breaks = &p.breaks;
    let w = &ineq.weight;
    let q = ineq.kind.is_quadratic();
    let power = |v: f64| if q { v * v } else { v.abs() };
    let lhs_weight = |x: f64| if ineq.kind.is_converse() { w.value(x) } else { 1.0 };
    let rhs_weight = |x: f64| if ineq.kind.is_converse() { 1.0 } else { w.value(x) };

    let lhs = if q {
        let mass = integrate_line(m, breaks, lhs_weight)?;
        let positive = integrate_line(m, breaks, |x| p.value(x).max(0.0) * lhs_weight(x))?;
        let negative = integrate_line(m, breaks, |x| (-p.value(x)).max(0.0) * lhs_weight(x))?;
        let mean = (positive - negative) / mass;
        let mean = if mean.is_finite() { mean } else { 0.0 };
        integrate_line(m, breaks, |x| (p.value(x) - mean).powi(2) * lhs_weight(x))?
    } else {
        let spread = |c: f64| {
            let mut cut = breaks.clone();
            cut.extend(level_crossings(p, breaks, c));
            integrate_line(m, &cut, |x| (p.value(x) - c).abs() * lhs_weight(x))
        };
        let err = std::cell::RefCell::new(None);
        let (_, best) = golden_min(
            |c| {
                spread(c).unwrap_or_else(|e| {
                    err.borrow_mut().get_or_insert(e);
                    f64::NAN
                })
            },
            p.inf,
            p.sup,
            1e-8 * p.oscillation().max(1e-300),
        );
        if let Some(e) = err.into_inner() {
            return Err(e);
        }
        best.min(spread(p.inf)?).min(spread(p.sup)?)
    };
    let energy = integrate_line(m, breaks, |x| power(p.derivative(x)) * rhs_weight(x))?;
    let osc = power(p.oscillation());
    Ok(ineq
        .terms
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let rhs = t.constant * energy + t.oscillation * osc;
            let r = ratio(lhs, rhs);
            WitnessResult {
                witness: f.label(),
                family: f.family,
                term: i,
                lhs,
                rhs,
                ratio: r,
                standard_error: 0.0,
                outcome: if r <= 1.0 + QUADRATURE_TOLERANCE {
                    Outcome::Pass
                } else {
                    Outcome::Fail
                },
            }
        })
        .collect())
}

/// Points where a piecewise-monotone profile crosses level `c`, located by
/// bisection between consecutive kinks (and `±10⁶` at the ends).
fn level_crossings(p: &Profile, breaks: &[f64], c: f64) -> Vec<f64> {
    let mut pts = vec![-1e6];
    pts.extend(breaks.iter().copied().filter(|b| b.abs() < 1e6));
    pts.push(1e6);
    let mut out = Vec::new();
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (p.value(a) - c, p.value(b) - c);
        if fa == 0.0 {
            out.push(a);
        }
        if fa * fb < 0.0 {
            if let Ok(x) = crate::numeric::bisect(|x| p.value(x) - c, a, b, 1e-13 * b.abs().max(1.0)) {
                out.push(x);
            }
        }
    }
    out
}

fn weighted_median(values: &[f64], weights: &[f64]) -> f64 {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    for &i in &idx {
        acc += weights[i];
        if acc >= 0.5 * total {
            return values[i];
        }
    }
    values[idx[idx.len() - 1]]
}

fn mc_rows(ineq: &Inequality, cloud: &PointCloud, f: &TestFunction) -> Result<Vec<WitnessResult>> {
    let w = &ineq.weight;
    let evals: Vec<(f64, f64, f64)> = cloud
        .par_points()
        .map(|x| {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            (f.value(x), f.gradient_norm(x), w.value(r))
        })
        .collect();
    let n = evals.len() as f64;
    let values: Vec<f64> = evals.iter().map(|e| e.0).collect();
    let kind = ineq.kind;
    let q = kind.is_quadratic();
    let converse = kind.is_converse();
    let lhs_w = |e: &(f64, f64, f64)| if converse { e.2 } else { 1.0 };
    let rhs_w = |e: &(f64, f64, f64)| if converse { 1.0 } else { e.2 };

    let centre = if q {
        let mass: f64 = evals.iter().map(lhs_w).sum();
        evals.iter().map(|e| e.0 * lhs_w(e)).sum::<f64>() / mass
    } else if converse {
        let weights: Vec<f64> = evals.iter().map(lhs_w).collect();
        weighted_median(&values, &weights)
    } else {
        let mut sorted = values.clone();
        let mid = sorted.len() / 2;
        *sorted.select_nth_unstable_by(mid, f64::total_cmp).1
    };
    let lhs_i: Vec<f64> = evals
        .iter()
        .map(|e| {
            let d = e.0 - centre;
            (if q { d * d } else { d.abs() }) * lhs_w(e)
        })
        .collect();
    let energy_i: Vec<f64> = evals
        .iter()
        .map(|e| (if q { e.1 * e.1 } else { e.1 }) * rhs_w(e))
        .collect();
    let osc = if q { f.oscillation().powi(2) } else { f.oscillation() };
    let (lhs, lhs_se) = mean_and_se(&lhs_i);
    let energy = energy_i.iter().sum::<f64>() / n;
    let energy_cap = {
        let mut sorted = energy_i.clone();
        let k = ((1.0 - TRUNCATION_LEVEL) * n) as usize;
        *sorted
            .select_nth_unstable_by(k.min(energy_i.len() - 1), f64::total_cmp)
            .1
    };
    let (capped_energy, capped_se) = mean_and_se(&energy_i.iter().map(|e| e.min(energy_cap)).collect::<Vec<_>>());

    Ok(ineq
        .terms
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let rhs = t.constant * energy + t.oscillation * osc;
            let diffs: Vec<f64> = lhs_i
                .iter()
                .zip(&energy_i)
                .map(|(l, g)| t.constant * g + t.oscillation * osc - l)
                .collect();
            let (mean_d, se) = mean_and_se(&diffs);
            let rhs_low = t.constant * (capped_energy - MC_SIGMAS * capped_se) + t.oscillation * osc;
            let outcome = if mean_d - MC_SIGMAS * se > 0.0 || rhs_low > lhs + MC_SIGMAS * lhs_se {
                Outcome::Pass
            } else if mean_d + MC_SIGMAS * se < 0.0 {
                Outcome::Fail
            } else {
                Outcome::Inconclusive
            };
            WitnessResult {
                witness: f.label(),
                family: f.family,
                term: i,
                lhs,
                rhs,
                ratio: ratio(lhs, rhs),
                standard_error: se,
                outcome,
            }
        })
        .collect())
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "set", rename_all = "kebab-case")]
pub enum BoundarySet {
    /// `{x : x_coordinate ≤ threshold}`.
    Halfspace { coordinate: usize, threshold: f64 },
    /// `{x : |x| ≤ radius}`.
    Ball { radius: f64 },
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundaryEstimate {
    pub value: f64,
    pub standard_error: f64,
    pub h: f64,
    pub method: &'static str,
}

impl BoundaryEstimate {
    /// Verdict on `value ≥ lower` with the Monte Carlo margin.
    pub fn dominates(&self, lower: f64) -> Outcome {
        if self.value - MC_SIGMAS * self.standard_error >= lower {
            Outcome::Pass
        } else if self.value + MC_SIGMAS * self.standard_error < lower {
            Outcome::Fail
        } else {
            Outcome::Inconclusive
        }
    }
}

/// `(μⁿ(A_h) − μⁿ(A))/h` for `μⁿ = base^{⊗n}`, extrapolated from `h` and
/// `h/2` as `2 D(h/2) − D(h)`. Halfspaces use the marginal distribution
/// function; balls use a Monte Carlo sample of `|X|`.
pub fn boundary_measure(
    base: &Measure1D,
    n: usize,
    set: BoundarySet,
    h: f64,
    mc: &McConfig,
) -> Result<BoundaryEstimate> {
    check_dim(n)?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(invalid(format!("enlargement must be positive, got {h}")));
    }
    match set {
        BoundarySet::Halfspace { coordinate, threshold } => {
            if coordinate >= n {
                return Err(invalid(format!(
                    "coordinate {coordinate} out of range for dimension {n}"
                )));
            }
            let f0 = base.cdf(threshold)?;
            let d = |step: f64| -> Result<f64> { Ok((base.cdf(threshold + step)? - f0) / step) };
            Ok(BoundaryEstimate {
                value: 2.0 * d(0.5 * h)? - d(h)?,
                standard_error: 0.0,
                h,
                method: "quadrature",
            })
        }
        BoundarySet::Ball { radius } => {
            if !(radius >= 0.0) {
                return Err(invalid(format!("ball radius must be non-negative, got {radius}")));
            }
            let cloud = PointCloud::draw(&Sampler::Product { base: base.clone(), n }, mc)?;
            let ys: Vec<f64> = cloud
                .points()
                .map(|x| {
                    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                    let near = (r > radius && r <= radius + 0.5 * h) as u8 as f64;
                    let far = (r > radius && r <= radius + h) as u8 as f64;
                    (4.0 * near - far) / h
                })
                .collect();
            let len = ys.len() as f64;
            let mean = ys.iter().sum::<f64>() / len;
            let var = ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (len - 1.0);
            Ok(BoundaryEstimate {
                value: mean,
                standard_error: (var / len).sqrt(),
                h,
                method: "MC",
            })
        }
    }
}

/// An inequality together with the backend and witnesses it is checked on.
#[derive(Debug, Clone)]
pub struct SuiteEntry {
    pub inequality: Inequality,
    pub backend: Backend,
    pub functions: Vec<TestFunction>,
}

impl SuiteEntry {
    pub fn check(&self) -> Result<CheckResult> {
        check_inequality(&self.inequality, &self.backend, &self.functions)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            inequality: self.inequality.scaled(factor),
            ..self.clone()
        }
    }
}

/// The weight as a [`Weight`], continued beyond the range where `W` is
/// finite by its log-log slope over the last octave of that range.
pub fn extrapolated_weight(cert: &LyapunovCertificate, wf: &WeightFunction) -> Weight {
    let top = finite_range(cert);
    let end = wf.value(top);
    let slope = wf.growth_exponent(0.5 * top, top);
    let eval = wf.clone();
    Weight::new(wf.formula, move |r| {
        if r <= top {
            eval.value(r)
        } else {
            end * (r / top).powf(slope)
        }
    })
}

fn lyapunov_entries(cert: &LyapunovCertificate, m: &Measure1D, tag: &str) -> Result<Vec<SuiteEntry>> {
    let functions = witnesses_1d(m)?;
    let mut out = Vec::new();
    for kind in WeightKind::ALL {
        let wf = derive_weight(cert, kind, None)?;
        let ik = match kind {
            WeightKind::WeightedPoincare | WeightKind::CheegerPoincare => InequalityKind::Poincare,
            WeightKind::WeightedCheeger => InequalityKind::Cheeger,
            WeightKind::ConversePoincare => InequalityKind::ConversePoincare,
            WeightKind::ConverseCheeger => InequalityKind::ConverseCheeger,
        };
        let weight = extrapolated_weight(cert, &wf);
        let id = format!("{tag}/{}", serde_json::to_value(kind)?.as_str().unwrap_or("weight"));
        out.push(SuiteEntry {
            inequality: Inequality::new(id, ik, wf.prefactor, weight)?,
            backend: Backend::Quadrature(m.clone()),
            functions: functions.clone(),
        });
    }
    Ok(out)
}

/// Every (inequality, constant, weight) triple that the library emits for
/// its reference laws, ready to be checked:
///
/// * the five Lyapunov weights for Cauchy `α = 2` and sub-exponential
///   `p = 1/2` on the line (quadrature);
/// * the Muckenhoupt constant `4B` for Cauchy `α = 2` with weight `1 + x²`
///   (quadrature);
/// * the transported weighted Poincaré bounds for Cauchy `n = 3, α = 2`
///   and sub-exponential `n = 2, p = 1/2` (Monte Carlo);
/// * the product weak Cheeger and weak Poincaré rates for Cauchy `α = 2`,
///   `n = 3` (Monte Carlo);
/// * the weak Cheeger and weak Poincaré rates obtained from the converse
///   Cheeger inequality for Cauchy `α = 2` on the line (quadrature).
pub fn emitted_suite(mc: &McConfig) -> Result<Vec<SuiteEntry>> {
    let mut out = Vec::new();
    let cauchy = Measure1D::cauchy(2.0)?;
    let subexp = Measure1D::subexp(0.5)?;
    let cauchy_cert = cauchy_certificate(1, 2.0)?;
    out.extend(lyapunov_entries(&cauchy_cert, &cauchy, "lyapunov-cauchy-a2")?);
    out.extend(lyapunov_entries(
        &subexp_certificate(1, 0.5)?,
        &subexp,
        "lyapunov-subexp-p0.5",
    )?);

    let v = Potential::new(
        "3 log(1+x)",
        |x: f64| 3.0 * x.ln_1p(),
        |x: f64| 3.0 / (1.0 + x),
        |x: f64| -3.0 / ((1.0 + x) * (1.0 + x)),
    );
    let eta = Weight::new("x", |x: f64| x);
    let muck = muckenhoupt_b(&v, &eta, 0.0, 400, &QuadratureSpec::default())?;
    out.push(SuiteEntry {
        inequality: Inequality::new(
            "muckenhoupt-cauchy-a2",
            InequalityKind::Poincare,
            muck.variance_constant,
            Weight::new("1+x^2", |x: f64| 1.0 + x * x),
        )?,
        backend: Backend::Quadrature(cauchy.clone()),
        functions: witnesses_1d(&cauchy)?,
    });

    let (_, upper) = cauchy_bounds(3, 2.0)?;
    out.push(SuiteEntry {
        inequality: Inequality::new(
            "spherical-cauchy-n3-a2",
            InequalityKind::Poincare,
            upper,
            Weight::power(2.0),
        )?,
        backend: Backend::MonteCarlo {
            sampler: Sampler::RadialCauchy { n: 3, alpha: 2.0 },
            config: *mc,
        },
        functions: witnesses_nd(&cauchy, 3, mc.seed)?,
    });
    let (_, upper) = subexp_bounds(2, 0.5)?;
    out.push(SuiteEntry {
        inequality: Inequality::new(
            "spherical-subexp-n2-p0.5",
            InequalityKind::Poincare,
            upper,
            Weight::new("|x|", |x: f64| x.abs()),
        )?,
        backend: Backend::MonteCarlo {
            sampler: Sampler::RadialSubexp { n: 2, p: 0.5 },
            config: *mc,
        },
        functions: witnesses_nd(&subexp, 2, mc.seed)?,
    });

    let spec = ProductBoundSpec::new(&cauchy, 3)?;
    let product = Backend::MonteCarlo {
        sampler: Sampler::Product {
            base: cauchy.clone(),
            n: 3,
        },
        config: *mc,
    };
    let nd = witnesses_nd(&cauchy, 3, mc.seed)?;
    let cheeger_terms = [1e-3, 5e-3, 1e-2, 2e-2]
        .iter()
        .map(|&s| {
            let w = product_weak_cheeger(&spec, s)?;
            Ok(Term {
                constant: w.gradient,
                oscillation: w.oscillation,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.push(SuiteEntry {
        inequality: Inequality::weak(
            "product-weak-cheeger-cauchy-n3",
            InequalityKind::WeakCheeger,
            cheeger_terms,
        )?,
        backend: product.clone(),
        functions: nd.clone(),
    });
    let poincare_terms = [1e-3, 5e-3, 1e-2]
        .iter()
        .map(|&s| {
            let (constant, oscillation) = product_weak_poincare(&spec, s)?;
            Ok(Term { constant, oscillation })
        })
        .collect::<Result<Vec<_>>>()?;
    out.push(SuiteEntry {
        inequality: Inequality::weak(
            "product-weak-poincare-cauchy-n3",
            InequalityKind::WeakPoincare,
            poincare_terms,
        )?,
        backend: product,
        functions: nd,
    });

    let converse = derive_weight(&cauchy_cert, WeightKind::ConverseCheeger, None)?;
    let tails = WeightTailQuantile::new(&cauchy, &extrapolated_weight(&cauchy_cert, &converse))?;
    let beta = |s: f64| weak_rate_from_converse(WeakKind::Cheeger, converse.prefactor, &tails, s);
    let terms = [0.01, 0.05, 0.1, 0.2]
        .iter()
        .map(|&s| {
            Ok(Term {
                constant: beta(s)?,
                oscillation: s,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.push(SuiteEntry {
        inequality: Inequality::weak("converse-weak-cheeger-cauchy-a2", InequalityKind::WeakCheeger, terms)?,
        backend: Backend::Quadrature(cauchy.clone()),
        functions: witnesses_1d(&cauchy)?,
    });
    let terms = [0.01, 0.05, 0.1, 0.2]
        .iter()
        .map(|&s| {
            let b = beta(0.5 * s)?;
            Ok(Term {
                constant: 4.0 * b * b,
                oscillation: s,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.push(SuiteEntry {
        inequality: Inequality::weak("converse-weak-poincare-cauchy-a2", InequalityKind::WeakPoincare, terms)?,
        backend: Backend::Quadrature(cauchy.clone()),
        functions: witnesses_1d(&cauchy)?,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small_mc(seed: u64) -> McConfig {
        McConfig {
            seed,
            samples: 20_000,
            blocks: 8,
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let m = Measure1D::cauchy(2.0).unwrap();
        for f in witnesses_nd(&m, 3, 5).unwrap() {
            assert!(f.gradient_self_check(100, 3.0, 11) < 1e-5, "{}", f.label());
        }
    }

    #[test]
    fn families_have_fifty_members() {
        let m = Measure1D::subexp(0.5).unwrap();
        assert_eq!(witnesses_1d(&m).unwrap().len(), 50);
        let nd = witnesses_nd(&m, 2, 1).unwrap();
        assert_eq!(nd.len(), 60);
        assert!(nd
            .iter()
            .any(|f| f.family() == WitnessFamily::TruncatedExponentialWitness));
        assert!(nd.iter().any(|f| f.family() == WitnessFamily::RadialBump));
        assert!(nd.iter().any(|f| f.family() == WitnessFamily::RandomFeature));
    }

    #[test]
    fn exponential_cheeger_constant_is_sharp() {
        let m = Measure1D::exponential();
        let fs = witnesses_1d(&m).unwrap();
        let ineq = Inequality::new("cheeger", InequalityKind::Cheeger, 1.0, Weight::constant(1.0)).unwrap();
        let res = check_inequality(&ineq, &Backend::Quadrature(m.clone()), &fs).unwrap();
        assert!(res.pass, "{}", res.worst_ratio);
        assert!(res.worst_ratio > 0.95);
        let half = check_inequality(&ineq.scaled(0.5), &Backend::Quadrature(m), &fs).unwrap();
        assert_eq!(half.outcome, Outcome::Fail);
    }

    #[test]
    fn exponential_poincare_constant_four() {
        let m = Measure1D::exponential();
        let fs = witnesses_1d(&m).unwrap();
        let ineq = Inequality::new("poincare", InequalityKind::Poincare, 4.0, Weight::constant(1.0)).unwrap();
        let res = check_inequality(&ineq, &Backend::Quadrature(m.clone()), &fs).unwrap();
        assert!(res.pass);
        let f = TestFunction::coordinate(1, 0, Profile::odd_hat(3.0).unwrap()).unwrap();
        let single = check_inequality(&ineq, &Backend::Quadrature(m), &[f]).unwrap();
        let hat = |x: f64| x.clamp(-3.0, 3.0);
        let var = 2.0
            * crate::measures::QuadratureSpec::default()
                .integrate(|x| hat(x).powi(2) * 0.5 * (-x).exp(), 0.0, 60.0)
                .unwrap();
        let energy = 1.0 - (-3.0f64).exp();
        assert_relative_eq!(single.witnesses[0].lhs, var, max_relative = 1e-7);
        assert_relative_eq!(single.witnesses[0].rhs, 4.0 * energy, max_relative = 1e-7);
    }

    #[test]
    fn monte_carlo_agrees_with_quadrature() {
        let m = Measure1D::cauchy(2.0).unwrap();
        let f = TestFunction::coordinate(1, 0, Profile::tanh(1.0).unwrap()).unwrap();
        let ineq = Inequality::new("p", InequalityKind::Poincare, 3.0, Weight::power(2.0)).unwrap();
        let exact = check_inequality(&ineq, &Backend::Quadrature(m.clone()), std::slice::from_ref(&f)).unwrap();
        let mc = check_inequality(
            &ineq,
            &Backend::MonteCarlo {
                sampler: Sampler::Product { base: m, n: 1 },
                config: McConfig {
                    seed: 3,
                    samples: 200_000,
                    blocks: 16,
                },
            },
            &[f],
        )
        .unwrap();
        let (a, b) = (&exact.witnesses[0], &mc.witnesses[0]);
        assert!((a.lhs - b.lhs).abs() < 0.02 * a.lhs);
        assert!((a.rhs - b.rhs).abs() < 0.02 * a.rhs);
    }

    #[test]
    fn converse_kinds_use_the_best_centre() {
        let m = Measure1D::exponential();
        let f = TestFunction::coordinate(1, 0, Profile::ramp(1.0, 0.5).unwrap()).unwrap();
        let ineq = Inequality::new("cc", InequalityKind::ConverseCheeger, 1.0, Weight::constant(1.0)).unwrap();
        let plain = Inequality::new("c", InequalityKind::Cheeger, 1.0, Weight::constant(1.0)).unwrap();
        let a = check_inequality(&ineq, &Backend::Quadrature(m.clone()), std::slice::from_ref(&f)).unwrap();
        let b = check_inequality(&plain, &Backend::Quadrature(m), &[f]).unwrap();
        assert_relative_eq!(a.witnesses[0].lhs, b.witnesses[0].lhs, max_relative = 1e-7);
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let s = Sampler::Product {
            base: Measure1D::subexp(0.5).unwrap(),
            n: 3,
        };
        let a = PointCloud::draw(&s, &small_mc(9)).unwrap();
        let b = PointCloud::draw(&s, &small_mc(9)).unwrap();
        assert_eq!(a.data, b.data);
        let c = PointCloud::draw(&s, &small_mc(10)).unwrap();
        assert_ne!(a.data, c.data);
    }

    #[test]
    fn radial_samplers_have_the_right_moments() {
        let mc = McConfig {
            seed: 4,
            samples: 200_000,
            blocks: 8,
        };
        let cloud = PointCloud::draw(&Sampler::RadialSubexp { n: 2, p: 1.0 }, &mc).unwrap();
        let mean_r = cloud.points().map(|x| (x[0] * x[0] + x[1] * x[1]).sqrt()).sum::<f64>() / cloud.len() as f64;
        assert!((mean_r - 2.0).abs() < 0.02);
        let cloud = PointCloud::draw(&Sampler::RadialCauchy { n: 3, alpha: 2.0 }, &mc).unwrap();
        let below_one = cloud
            .points()
            .filter(|x| x.iter().map(|v| v * v).sum::<f64>() <= 1.0)
            .count() as f64
            / cloud.len() as f64;
        let exact = crate::measures::QuadratureSpec::default()
            .integrate(|u: f64| 30.0 * u * u * (1.0 - u), 0.0, 0.5)
            .unwrap()
            / 2.5;
        assert!((below_one - exact).abs() < 0.01, "{below_one} {exact}");
    }

    #[test]
    fn halfspace_boundary_is_marginal_density() {
        let m = Measure1D::cauchy(2.0).unwrap();
        let set = BoundarySet::Halfspace {
            coordinate: 0,
            threshold: 0.0,
        };
        let est = boundary_measure(&m, 3, set, 1e-4, &McConfig::default()).unwrap();
        assert!((est.value - 1.0).abs() < 1e-3);
        assert_eq!(est.dominates(0.01213), Outcome::Pass);
        let set = BoundarySet::Halfspace {
            coordinate: 1,
            threshold: 1.0,
        };
        let est = boundary_measure(&m, 3, set, 1e-4, &McConfig::default()).unwrap();
        assert!((est.value - m.density(1.0)).abs() < 1e-3);
    }

    #[test]
    fn empty_ball_has_no_boundary() {
        let m = Measure1D::cauchy(2.0).unwrap();
        let est = boundary_measure(&m, 3, BoundarySet::Ball { radius: 0.0 }, 1e-3, &small_mc(2)).unwrap();
        assert_eq!(est.value, 0.0);
        let ball = boundary_measure(
            &m,
            1,
            BoundarySet::Ball { radius: 1.0 },
            0.2,
            &McConfig {
                seed: 5,
                samples: 400_000,
                blocks: 8,
            },
        )
        .unwrap();
        assert!((ball.value - 2.0 * m.density(1.0)).abs() < 4.0 * ball.standard_error + 0.01);
    }

    #[test]
    fn outcome_merge_and_codes() {
        assert_eq!(Outcome::Pass.merge(Outcome::Inconclusive), Outcome::Inconclusive);
        assert_eq!(Outcome::Inconclusive.merge(Outcome::Fail), Outcome::Fail);
        assert_eq!(Outcome::Fail.exit_code(), 1);
        assert_eq!(Outcome::Inconclusive.exit_code(), 2);
    }
}
