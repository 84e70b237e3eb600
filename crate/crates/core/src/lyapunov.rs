//! φ-Lyapunov certificates `LW ≤ −φ(W) + b 1_{|x| ≤ R}` for the diffusion
//! `L = Δ − ∇V·∇` with a radial potential, and the weights they generate.
//!
//! Every function here is radial: `W`, `V` and the weights are evaluated at
//! `r = |x|`, and the generator reduces to
//! `LW(r) = W''(r) + ((n−1)/r − V'(r)) W'(r)`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, Matrix3, Vector3};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::measures::{Measure1D, Potential, RadialMeasure};
use crate::numeric::{bisect, grow_bracket, linspace, loglog_slope, logspace, refined_grid_sup};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The radial generator: dimension, `V'` and `−V` (log-density up to a
/// constant).
#[derive(Clone)]
pub struct Diffusion {
    n: usize,
    vprime: RealFn,
    log_density: RealFn,
    label: String,
}

impl fmt::Debug for Diffusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Diffusion")
            .field("n", &self.n)
            .field("label", &self.label)
            .finish()
    }
}

impl Diffusion {
    pub fn new(
        n: usize,
        vprime: impl Fn(f64) -> f64 + Send + Sync + 'static,
        log_density: impl Fn(f64) -> f64 + Send + Sync + 'static,
        label: impl Into<String>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        Ok(Self {
            n,
            vprime: Arc::new(vprime),
            log_density: Arc::new(log_density),
            label: label.into(),
        })
    }

    pub fn from_measure(m: &Measure1D) -> Self {
        let a = m.clone();
        let b = m.clone();
        Self {
            n: 1,
            vprime: Arc::new(move |r| a.potential_derivative(r.abs())),
            log_density: Arc::new(move |r| -b.potential(r)),
            label: m.describe().label,
        }
    }

    pub fn from_radial(m: &RadialMeasure) -> Self {
        let a = m.clone();
        let b = m.clone();
        Self {
            n: m.dimension(),
            vprime: Arc::new(move |r| a.potential_derivative(r)),
            log_density: Arc::new(move |r| b.h(r).ln()),
            label: m.label().to_string(),
        }
    }

    pub fn from_potential(v: &Potential) -> Self {
        let a = v.clone();
        let b = v.clone();
        Self {
            n: 1,
            vprime: Arc::new(move |r| a.d1(r)),
            log_density: Arc::new(move |r| -b.value(r)),
            label: v.label().to_string(),
        }
    }

    /// `(1+r)^{-(n+α)}` on ℝⁿ; for `n = 1` this is the one-dimensional
    /// Cauchy law.
    pub fn cauchy(n: usize, alpha: f64) -> Result<Self> {
        let nf = n as f64;
        Self::new(
            n,
            move |r| (nf + alpha) / (1.0 + r),
            move |r: f64| -(nf + alpha) * r.ln_1p(),
            format!("cauchy(n={n}, alpha={alpha})"),
        )
    }

    /// `e^{-r^p}` on ℝⁿ.
    pub fn subexp(n: usize, p: f64) -> Result<Self> {
        Self::new(
            n,
            move |r: f64| p * r.powf(p - 1.0),
            move |r: f64| -r.powf(p),
            format!("subexp(n={n}, p={p})"),
        )
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn vprime(&self, r: f64) -> f64 {
        (self.vprime)(r)
    }

    pub fn log_density(&self, r: f64) -> f64 {
        (self.log_density)(r)
    }
}

/// A radial function with its first two derivatives.
#[derive(Clone)]
pub struct RadialFn {
    label: String,
    f: RealFn,
    d1: RealFn,
    d2: RealFn,
}

impl fmt::Debug for RadialFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialFn").field("label", &self.label).finish()
    }
}

impl RadialFn {
    pub fn new(
        label: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            f: Arc::new(f),
            d1: Arc::new(d1),
            d2: Arc::new(d2),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("{c}"), move |_| c, |_| 0.0, |_| 0.0)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, r: f64) -> f64 {
        (self.f)(r.abs())
    }

    pub fn d1(&self, r: f64) -> f64 {
        (self.d1)(r.abs())
    }

    pub fn d2(&self, r: f64) -> f64 {
        (self.d2)(r.abs())
    }
}

/// A scalar function with its derivative; used for the rate `φ`.
#[derive(Clone)]
pub struct ScalarFn {
    label: String,
    f: RealFn,
    df: RealFn,
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFn").field("label", &self.label).finish()
    }
}

impl ScalarFn {
    pub fn new(
        label: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            f: Arc::new(f),
            df: Arc::new(df),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, u: f64) -> f64 {
        (self.f)(u)
    }

    pub fn derivative(&self, u: f64) -> f64 {
        (self.df)(u)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let f = self.f.clone();
        let df = self.df.clone();
        Self {
            label: format!("{factor}*({})", self.label),
            f: Arc::new(move |u| factor * f(u)),
            df: Arc::new(move |u| factor * df(u)),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Provenance {
    Cauchy {
        n: usize,
        alpha: f64,
        k: f64,
        gamma: f64,
        epsilon: f64,
    },
    Subexp {
        n: usize,
        p: f64,
        gamma: f64,
        c: f64,
        c_phi: f64,
    },
    ExpPotential {
        potential: String,
        gamma: f64,
        x_monotone: f64,
    },
    Custom {
        label: String,
    },
}

/// A drift certificate `(W, φ, b, R)` for a given diffusion.
#[derive(Debug, Clone)]
pub struct LyapunovCertificate {
    pub w: RadialFn,
    pub phi: ScalarFn,
    pub b: f64,
    pub radius: f64,
    pub diffusion: Diffusion,
    pub provenance: Provenance,
}

const DRIFT_TOL: f64 = 1e-7;

impl LyapunovCertificate {
    /// Checks `W ≥ 1` and that `φ` is positive and increasing on the values
    /// `W` takes over `[0, r_check]`.
    pub fn new(
        w: RadialFn,
        phi: ScalarFn,
        b: f64,
        radius: f64,
        diffusion: Diffusion,
        provenance: Provenance,
        r_check: f64,
    ) -> Result<Self> {
        if !(b >= 0.0 && radius >= 0.0) {
            return Err(invalid("b and R must be non-negative"));
        }
        let grid = linspace(0.0, r_check.max(1.0), 2001);
        if let Some(&r) = grid.iter().find(|&&r| !(w.value(r) >= 1.0 - 1e-12)) {
            return Err(invalid(format!("W < 1 at r = {r}")));
        }
        let mut us: Vec<f64> = grid.iter().map(|&r| w.value(r)).collect();
        us.push(1.0);
        us.sort_by(f64::total_cmp);
        us.dedup();
        if us.len() < 2 {
            us.push(2.0);
        }
        for pair in us.windows(2) {
            let (a, c) = (phi.value(pair[0]), phi.value(pair[1]));
            if !(a > 0.0) || !(c > a) {
                return Err(Error::MonotonicityFailure(format!(
                    "phi is not positive and increasing on [{}, {}]",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(Self {
            w,
            phi,
            b,
            radius,
            diffusion,
            provenance,
        })
    }

    /// Same certificate with `φ` multiplied by `factor` (no re-validation of
    /// the drift; used to probe the margin).
    pub fn with_phi_scaled(&self, factor: f64) -> Self {
        Self {
            phi: self.phi.scaled(factor),
            ..self.clone()
        }
    }

    pub fn summary(&self) -> CertificateSummary {
        CertificateSummary {
            diffusion: self.diffusion.label().to_string(),
            w: self.w.label().to_string(),
            phi: self.phi.label().to_string(),
            b: self.b,
            radius: self.radius,
            provenance: self.provenance.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateSummary {
    pub diffusion: String,
    pub w: String,
    pub phi: String,
    pub b: f64,
    pub radius: f64,
    pub provenance: Provenance,
}

/// `LW` at `x` (the sign of `x` is irrelevant for radial `W`).
pub fn apply_generator(d: &Diffusion, w: &RadialFn, x: f64) -> Result<f64> {
    let r = x.abs();
    if r == 0.0 && d.n >= 2 {
        return Err(Error::PolarSingularity { n: d.n });
    }
    let drift = if d.n >= 2 {
        (d.n as f64 - 1.0) / r - d.vprime(r)
    } else {
        -d.vprime(r)
    };
    let w1 = w.d1(r);
    let tangential = if w1 == 0.0 { 0.0 } else { drift * w1 };
    Ok(w.d2(r) + tangential)
}

fn drift_excess(cert: &LyapunovCertificate, d: &Diffusion, r: f64) -> Result<f64> {
    let r = if r == 0.0 && d.n >= 2 { 1e-9 } else { r };
    Ok(apply_generator(d, &cert.w, r)? + cert.phi.value(cert.w.value(r)))
}

#[derive(Debug, Clone, Serialize)]
pub struct DriftReport {
    pub pass: bool,
    /// Largest `LW + φ(W) − b 1_K` over the grid, scaled by the tolerance
    /// denominator `1 + |φ(W)|`.
    pub max_violation: f64,
    pub worst_at: f64,
    pub sup_inside: f64,
    pub sup_outside: f64,
    /// Smallest `b` the grid supports: `max(0, sup_inside)`.
    pub tightest_b: f64,
    pub grid_points: usize,
}

#[derive(Clone, Copy)]
struct Partial {
    violation: f64,
    at: f64,
    inside: f64,
    outside: f64,
}

impl Partial {
    fn empty() -> Self {
        Self {
            violation: f64::NEG_INFINITY,
            at: f64::NAN,
            inside: f64::NEG_INFINITY,
            outside: f64::NEG_INFINITY,
        }
    }

    fn merge(self, other: Self) -> Self {
        let (violation, at) =
            if other.violation > self.violation || (other.violation == self.violation && other.at < self.at) {
                (other.violation, other.at)
            } else {
                (self.violation, self.at)
            };
        Self {
            violation,
            at,
            inside: self.inside.max(other.inside),
            outside: self.outside.max(other.outside),
        }
    }
}

/// Scans `LW + φ(W)` on the grid against `b` on `[0, R]` and `0` beyond,
/// in parallel blocks merged by maxima.
pub fn verify_drift(cert: &LyapunovCertificate, grid: &[f64]) -> Result<DriftReport> {
    verify_drift_with(cert, &cert.diffusion, grid)
}

pub fn verify_drift_with(cert: &LyapunovCertificate, d: &Diffusion, grid: &[f64]) -> Result<DriftReport> {
    if grid.is_empty() {
        return Err(invalid("drift grid is empty"));
    }
    let partials: Vec<Partial> = grid
        .par_chunks(256)
        .map(|chunk| -> Result<Partial> {
            let mut acc = Partial::empty();
            for &x in chunk {
                let r = x.abs();
                let excess = drift_excess(cert, d, r)?;
                let scale = 1.0 + cert.phi.value(cert.w.value(r)).abs();
                let inside = r <= cert.radius;
                let budget = if inside { cert.b } else { 0.0 };
                let here = Partial {
                    violation: (excess - budget) / scale,
                    at: r,
                    inside: if inside { excess } else { f64::NEG_INFINITY },
                    outside: if inside { f64::NEG_INFINITY } else { excess },
                };
                acc = acc.merge(here);
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let total = partials.into_iter().fold(Partial::empty(), Partial::merge);
    Ok(DriftReport {
        pass: total.violation <= DRIFT_TOL,
        max_violation: total.violation,
        worst_at: total.at,
        sup_inside: total.inside,
        sup_outside: total.outside,
        tightest_b: total.inside.max(0.0),
        grid_points: grid.len(),
    })
}

/// Coefficients `(a, b, d)` of `1 + a r² + b r⁴ + d r⁶` matching value,
/// slope and curvature of a branch at `r0`.
fn sextic_join(r0: f64, value: f64, slope: f64, curvature: f64) -> Result<[f64; 3]> {
    let m = Matrix3::new(
        r0.powi(2),
        r0.powi(4),
        r0.powi(6),
        2.0 * r0,
        4.0 * r0.powi(3),
        6.0 * r0.powi(5),
        2.0,
        12.0 * r0.powi(2),
        30.0 * r0.powi(4),
    );
    let rhs = Vector3::new(value - 1.0, slope, curvature);
    let sol = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::SearchFailure("singular smoothing system".into()))?;
    Ok([sol[0], sol[1], sol[2]])
}

/// `W` equal to an analytic branch for `r ≥ r0` and to an even sextic inside,
/// with `W ≥ 1` and `W' ≥ 0` checked on the inner piece.
fn joined(label: String, r0: f64, branch: RadialFn) -> Result<RadialFn> {
    let [a, b, d] = sextic_join(r0, branch.value(r0), branch.d1(r0), branch.d2(r0))?;
    let inner = move |r: f64| 1.0 + r * r * (a + r * r * (b + d * r * r));
    let inner1 = move |r: f64| r * (2.0 * a + r * r * (4.0 * b + 6.0 * d * r * r));
    for r in linspace(0.0, r0, 4001) {
        if inner(r) < 1.0 - 1e-12 || inner1(r) < -1e-12 {
            return Err(Error::SearchFailure(format!(
                "interior smoothing of {label} is not >= 1 and non-decreasing"
            )));
        }
    }
    let (b1, b2, b3) = (branch.clone(), branch.clone(), branch);
    Ok(RadialFn::new(
        label,
        move |r| if r >= r0 { b1.value(r) } else { inner(r) },
        move |r| if r >= r0 { b2.d1(r) } else { inner1(r) },
        move |r| {
            if r >= r0 {
                b3.d2(r)
            } else {
                2.0 * a + r * r * (12.0 * b + 30.0 * d * r * r)
            }
        },
    ))
}

/// `sup_{[0, R]} (LW + φ(W))`, inflated by 1% plus a small absolute slack.
fn interior_b(d: &Diffusion, w: &RadialFn, phi: &ScalarFn, radius: f64) -> Result<f64> {
    let lo = if d.n >= 2 { 1e-9 } else { 0.0 };
    let grid = linspace(lo, radius.max(lo + 1e-9), 4001);
    for &r in &grid {
        apply_generator(d, w, r)?;
    }
    let f = |r: f64| apply_generator(d, w, r).unwrap_or(f64::NAN) + phi.value(w.value(r));
    let (_, sup) = refined_grid_sup(f, &grid).ok_or_else(|| Error::SearchFailure("drift is not finite on K".into()))?;
    Ok((sup * 1.01).max(sup).max(0.0) + 1e-9)
}

/// Certificate for `(1+r)^{-(n+α)}` with `W = r^k` for `r ≥ 2`,
/// `k = 2 + min(1,α)/2`, `φ(u) = kγ u^{(k-2)/k}` and margin
/// `γ = min(1,α)/4`.
pub fn cauchy_certificate(n: usize, alpha: f64) -> Result<LyapunovCertificate> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(invalid(format!("Cauchy exponent must be positive, got {alpha}")));
    }
    if n == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    let nf = n as f64;
    let m = alpha.min(1.0);
    let k = 2.0 + 0.5 * m;
    let gamma = 0.25 * m;
    // Largest ε on a halving grid with k + nε − 2 − α(1 − ε) ≤ −γ.
    let constraint = |eps: f64| k + nf * eps - 2.0 - alpha * (1.0 - eps) + gamma;
    let mut epsilon = 1.0;
    while constraint(epsilon) > 0.0 {
        epsilon *= 0.5;
        if epsilon < 1e-12 {
            return Err(Error::SearchFailure("no admissible epsilon".into()));
        }
    }
    let eps_star = (alpha - (k - 2.0) - gamma) / (nf + alpha);
    epsilon = epsilon.max(eps_star.min(epsilon * 2.0)).min(eps_star);
    let radius = (1.0 / epsilon - 1.0).max(2.0);
    let branch = RadialFn::new(
        format!("r^{k}"),
        move |r: f64| r.powf(k),
        move |r: f64| k * r.powf(k - 1.0),
        move |r: f64| k * (k - 1.0) * r.powf(k - 2.0),
    );
    let w = joined(format!("r^{k} (r>=2)"), 2.0, branch)?;
    let e = (k - 2.0) / k;
    let c = k * gamma;
    let phi = ScalarFn::new(
        format!("{c}*u^{e}"),
        move |u: f64| c * u.powf(e),
        move |u: f64| c * e * u.powf(e - 1.0),
    );
    let diffusion = Diffusion::cauchy(n, alpha)?;
    let b = interior_b(&diffusion, &w, &phi, radius)?;
    LyapunovCertificate::new(
        w,
        phi,
        b,
        radius,
        diffusion,
        Provenance::Cauchy {
            n,
            alpha,
            k,
            gamma,
            epsilon,
        },
        radius.max(100.0),
    )
}

/// Certificate for `e^{-r^p}` on ℝⁿ with `W = e^{γ r^p}` (`γ = 1/2`) for
/// `r ≥ 1` and `φ(u) = c_φ u log^{2(p−1)/p}(c + u)`, `c = e^{|2(p−1)/p|}`.
/// `K` always contains the inflection point of `W`, so `W` is convex outside.
pub fn subexp_certificate(n: usize, p: f64) -> Result<LyapunovCertificate> {
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!(
            "sub-exponential certificate needs p in (0, 1), got {p}"
        )));
    }
    if n == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    let gamma: f64 = 0.5;
    let e = 2.0 * (p - 1.0) / p;
    let c = e.abs().exp();
    let c_phi = 0.5 * gamma.powf(1.0 - e) * p * p * (1.0 - gamma);
    let branch = RadialFn::new(
        format!("exp({gamma} r^{p})"),
        move |r: f64| (gamma * r.powf(p)).exp(),
        move |r: f64| gamma * p * r.powf(p - 1.0) * (gamma * r.powf(p)).exp(),
        move |r: f64| {
            let w = (gamma * r.powf(p)).exp();
            w * (gamma * p * (p - 1.0) * r.powf(p - 2.0) + (gamma * p).powi(2) * r.powf(2.0 * p - 2.0))
        },
    );
    let w = joined(format!("exp({gamma} r^{p}) (r>=1)"), 1.0, branch)?;
    let phi = ScalarFn::new(
        format!("{c_phi}*u*log({c}+u)^{e}"),
        move |u: f64| c_phi * u * (c + u).ln().powf(e),
        move |u: f64| {
            let l = (c + u).ln();
            c_phi * l.powf(e - 1.0) * (l + e * u / (c + u))
        },
    );
    let diffusion = Diffusion::subexp(n, p)?;
    let r_cap = (1200.0f64).powf(1.0 / p);
    let grid = logspace(1e-6, r_cap, 8000);
    let mut last_bad = 0.0f64;
    for &r in &grid {
        let ex = apply_generator(&diffusion, &w, r)? + phi.value(w.value(r));
        if ex > 0.0 {
            last_bad = r;
        }
    }
    if last_bad >= r_cap {
        return Err(Error::SearchFailure("drift never becomes negative".into()));
    }
    let radius = grid
        .iter()
        .copied()
        .find(|&r| r > last_bad)
        .unwrap_or(r_cap)
        .max(1.0)
        .max(((1.0 - p) / (gamma * p)).powf(1.0 / p));
    let b = interior_b(&diffusion, &w, &phi, radius)?;
    LyapunovCertificate::new(
        w,
        phi,
        b,
        radius,
        diffusion,
        Provenance::Subexp { n, p, gamma, c, c_phi },
        radius.max(100.0),
    )
}

/// One-dimensional certificate `W = e^{γ(V − V(0))}`, with
/// `φ(W) = (γ − γ²) V'² W` read through `W^{-1}` where `W` is one-to-one and
/// `φ` increasing, and a power-law continuation below.
pub fn exp_potential_certificate(v: &Potential, gamma: f64) -> Result<LyapunovCertificate> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(invalid(format!("gamma must lie in (0, 1), got {gamma}")));
    }
    let far = 1e4;
    let ratio = v.d2(far) / v.d1(far).powi(2);
    let bound = -0.5 + 1e-3;
    if !(ratio > bound) {
        return Err(Error::RatioCondition { estimate: ratio, bound });
    }
    let grid = logspace(1e-3, far, 4000);
    let good = |x: f64| v.d1(x) > 0.0 && 2.0 * v.d2(x) + gamma * v.d1(x).powi(2) > 0.0;
    let last_bad = grid.iter().copied().filter(|&x| !good(x)).fold(0.0f64, f64::max);
    if last_bad >= far {
        return Err(Error::MonotonicityFailure(format!(
            "2V'' + gamma V'^2 is not positive at infinity for {}",
            v.label()
        )));
    }
    let x1 = grid.iter().copied().find(|&x| x > last_bad).unwrap_or(far).max(1e-3);
    let last_convex = grid.iter().copied().filter(|&x| v.d2(x) > 0.0).fold(0.0f64, f64::max);
    if last_convex >= far {
        return Err(invalid(format!("{} is not concave at infinity", v.label())));
    }
    let radius = x1.max(last_convex);
    let v0 = v.value(0.0);
    let g = gamma;
    let (va, vb, vc) = (v.clone(), v.clone(), v.clone());
    let w = RadialFn::new(
        format!("exp({g} V)"),
        move |x| (g * (va.value(x) - v0)).exp(),
        move |x| g * vb.d1(x) * (g * (vb.value(x) - v0)).exp(),
        move |x| (g * vc.d2(x) + g * g * vc.d1(x).powi(2)) * (g * (vc.value(x) - v0)).exp(),
    );
    let u1 = w.value(x1);
    let big = (g - g * g) * v.d1(x1).powi(2) * u1;
    let big_slope = (1.0 - g) * (2.0 * v.d2(x1) + g * v.d1(x1).powi(2));
    let theta = u1 * big_slope / big;
    let inverse = {
        let v = v.clone();
        move |u: f64| -> f64 {
            let target = v0 + u.ln() / g;
            let hi = grow_bracket(|x| v.value(x1 + x) >= target, 1e300).unwrap_or(1e300);
            bisect(|x| v.value(x1 + x) - target, 0.0, hi, 1e-14 * (x1 + hi))
                .map(|x| x1 + x)
                .unwrap_or(x1)
        }
    };
    let inverse = Arc::new(inverse);
    let (inv_a, inv_b) = (inverse.clone(), inverse);
    let (vd, ve) = (v.clone(), v.clone());
    let phi = ScalarFn::new(
        format!("({g}-{g}^2) V'^2 W"),
        move |u: f64| {
            if u >= u1 {
                (g - g * g) * vd.d1(inv_a(u)).powi(2) * u
            } else {
                big * (u / u1).powf(theta)
            }
        },
        move |u: f64| {
            if u >= u1 {
                let x = inv_b(u);
                (1.0 - g) * (2.0 * ve.d2(x) + g * ve.d1(x).powi(2))
            } else {
                big * theta / u1 * (u / u1).powf(theta - 1.0)
            }
        },
    );
    let diffusion = Diffusion::from_potential(v);
    let b = interior_b(&diffusion, &w, &phi, radius)?;
    LyapunovCertificate::new(
        w,
        phi,
        b,
        radius,
        diffusion,
        Provenance::ExpPotential {
            potential: v.label().to_string(),
            gamma,
            x_monotone: x1,
        },
        radius.max(100.0),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightKind {
    WeightedPoincare,
    WeightedCheeger,
    /// The Poincaré weight `1 + Γ(W)/φ(W)²` obtained from the Cheeger one.
    CheegerPoincare,
    ConversePoincare,
    ConverseCheeger,
}

impl WeightKind {
    pub const ALL: [WeightKind; 5] = [
        WeightKind::WeightedPoincare,
        WeightKind::WeightedCheeger,
        WeightKind::CheegerPoincare,
        WeightKind::ConversePoincare,
        WeightKind::ConverseCheeger,
    ];

    pub fn is_converse(self) -> bool {
        matches!(self, WeightKind::ConversePoincare | WeightKind::ConverseCheeger)
    }

    pub fn is_l1(self) -> bool {
        matches!(self, WeightKind::WeightedCheeger | WeightKind::ConverseCheeger)
    }
}

/// A weight `r ↦ ω(r)` with the constant prefactor of its inequality.
#[derive(Clone)]
pub struct WeightFunction {
    pub kind: WeightKind,
    eval: RealFn,
    pub prefactor: f64,
    pub kappa_u: f64,
    pub formula: &'static str,
    pub condition: Option<ConverseCheegerReport>,
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightFunction")
            .field("kind", &self.kind)
            .field("prefactor", &self.prefactor)
            .field("kappa_u", &self.kappa_u)
            .field("formula", &self.formula)
            .finish()
    }
}

impl WeightFunction {
    pub fn new(
        kind: WeightKind,
        prefactor: f64,
        formula: &'static str,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            kind,
            eval: Arc::new(f),
            prefactor,
            kappa_u: f64::NAN,
            formula,
            condition: None,
        }
    }

    /// `ω(|x|)`.
    pub fn value(&self, x: f64) -> f64 {
        (self.eval)(x.abs())
    }

    pub fn with_prefactor(&self, prefactor: f64) -> Self {
        Self {
            prefactor,
            ..self.clone()
        }
    }

    /// Log-log slope of `ω` over `[lo, hi]`.
    pub fn growth_exponent(&self, lo: f64, hi: f64) -> f64 {
        let xs = logspace(lo, hi, 60);
        let ys: Vec<f64> = xs.iter().map(|&r| self.value(r)).collect();
        loglog_slope(&xs, &ys)
    }
}

/// Local Poincaré and Cheeger constants on `U = [−R_U, R_U]` for the
/// one-dimensional profile `e^{-V(|x|)}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LocalConstants {
    pub r_u: f64,
    /// `1/λ₁` of the Neumann problem on `U` by piecewise-linear Galerkin;
    /// the Ritz value over-estimates `λ₁`, so this under-estimates `κ_U`.
    pub kappa_poincare: f64,
    /// `sup_t min(μ(U ∩ (−∞,t)), μ(U ∩ (t,∞))) / ρ(t)` on a fine grid.
    pub kappa_cheeger: f64,
    pub lower_bound_estimate: bool,
}

pub fn local_constants(d: &Diffusion, r_u: f64) -> Result<LocalConstants> {
    if !(r_u > 0.0) {
        return Err(invalid("local radius must be positive"));
    }
    let l0 = d.log_density(0.0);
    let rho = |x: f64| (d.log_density(x.abs()) - l0).exp();
    let nodes = 301;
    let xs = linspace(-r_u, r_u, nodes);
    let mut k = DMatrix::<f64>::zeros(nodes, nodes);
    let mut m = DMatrix::<f64>::zeros(nodes, nodes);
    for i in 0..nodes - 1 {
        let (a, b) = (xs[i], xs[i + 1]);
        let h = b - a;
        let (ra, rm, rb) = (rho(a), rho(0.5 * (a + b)), rho(b));
        let mass = h / 6.0 * (ra + 4.0 * rm + rb);
        let stiff = mass / (h * h);
        k[(i, i)] += stiff;
        k[(i + 1, i + 1)] += stiff;
        k[(i, i + 1)] -= stiff;
        k[(i + 1, i)] -= stiff;
        m[(i, i)] += h / 6.0 * (ra + rm);
        m[(i + 1, i + 1)] += h / 6.0 * (rm + rb);
        m[(i, i + 1)] += h / 6.0 * rm;
        m[(i + 1, i)] += h / 6.0 * rm;
    }
    let chol = m
        .cholesky()
        .ok_or_else(|| Error::SearchFailure("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let l_inv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::SearchFailure("singular mass factor".into()))?;
    let a = &l_inv * k * l_inv.transpose();
    let a = (&a + a.transpose()) * 0.5;
    let mut eig: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    let lambda1 = eig[1];
    let fine = linspace(-r_u, r_u, 4001);
    let dens: Vec<f64> = fine.iter().map(|&x| rho(x)).collect();
    let mut cum = vec![0.0; fine.len()];
    for i in 1..fine.len() {
        cum[i] = cum[i - 1] + 0.5 * (dens[i] + dens[i - 1]) * (fine[i] - fine[i - 1]);
    }
    let total = cum[fine.len() - 1];
    let kappa_cheeger = cum
        .iter()
        .zip(&dens)
        .map(|(c, r)| c.min(total - c) / r)
        .fold(0.0f64, f64::max);
    Ok(LocalConstants {
        r_u,
        kappa_poincare: 1.0 / lambda1,
        kappa_cheeger,
        lower_bound_estimate: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "holds", rename_all = "kebab-case")]
pub enum ConverseCondition {
    /// `|Γ(W,Γ(W))| ≤ 2δ φ(W)(1 + Γ(W))` outside `K`.
    One { delta: f64 },
    /// `Γ(W,Γ(W)) ≥ 0` outside `K`.
    Two,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConverseCheegerReport {
    pub condition: ConverseCondition,
    pub min_outside: f64,
    /// `M = sup_K |Γ(W,Γ(W))| / (2(1+Γ(W))^{3/2})`.
    pub m_sup: f64,
}

/// `Γ(W, Γ(W)) = 2 W'² W''` for radial `W`.
pub fn gamma_w_gamma_w(w: &RadialFn, r: f64) -> f64 {
    2.0 * w.d1(r).powi(2) * w.d2(r)
}

pub fn converse_cheeger_condition(cert: &LyapunovCertificate, grid: &[f64]) -> Result<ConverseCheegerReport> {
    let w = &cert.w;
    let m_sup = linspace(0.0, cert.radius, 2001)
        .into_iter()
        .map(|r| gamma_w_gamma_w(w, r).abs() / (2.0 * (1.0 + w.d1(r).powi(2)).powf(1.5)))
        .fold(0.0f64, f64::max);
    let outside: Vec<f64> = grid.iter().map(|r| r.abs()).filter(|&r| r > cert.radius).collect();
    if outside.is_empty() {
        return Err(invalid("condition grid has no point outside K"));
    }
    let mut min_outside = f64::INFINITY;
    let mut delta = 0.0f64;
    for &r in &outside {
        let g = gamma_w_gamma_w(w, r);
        let scale = 2.0 * w.d1(r).powi(2) * w.d2(r).abs();
        if g < -1e-12 * scale.max(1e-300) {
            min_outside = min_outside.min(g);
        } else {
            min_outside = min_outside.min(g.max(0.0));
        }
        let gw = w.d1(r).powi(2);
        delta = delta.max(g.abs() / (2.0 * cert.phi.value(w.value(r)) * (1.0 + gw)));
    }
    let condition = if min_outside >= 0.0 {
        ConverseCondition::Two
    } else if delta < 1.0 {
        ConverseCondition::One { delta }
    } else {
        return Err(Error::NeitherCondition { delta });
    };
    Ok(ConverseCheegerReport {
        condition,
        min_outside,
        m_sup,
    })
}

/// Upper end of a grid on which `W` stays finite (capped at 10⁶).
pub fn finite_range(cert: &LyapunovCertificate) -> f64 {
    let mut r = 1.0f64;
    while r < 1e6 && cert.w.value(2.0 * r).is_finite() && cert.w.value(2.0 * r) < 1e250 {
        r *= 2.0;
    }
    r
}

/// The weight of the given kind, with prefactors
/// `max(bκ_U/φ(1), 1)` (weighted kinds), `8 max(bκ_U/φ(1), 1)²`
/// (Cheeger to Poincaré), `1 + bκ_U` (converse Poincaré) and
/// `(1 + (M + b)κ_U)/(1 − δ)` (converse Cheeger, `δ = 0` under
/// condition (2)). The converse weights are continued by their limit 0
/// where `W` overflows. Without an explicit `κ_U` the Galerkin estimate on
/// `[−max(R,1), max(R,1)]` is used.
pub fn derive_weight(cert: &LyapunovCertificate, kind: WeightKind, kappa_u: Option<f64>) -> Result<WeightFunction> {
    let local = local_constants(&cert.diffusion, cert.radius.max(1.0))?;
    let kappa = kappa_u.unwrap_or(match kind {
        WeightKind::WeightedCheeger | WeightKind::CheegerPoincare | WeightKind::ConverseCheeger => local.kappa_cheeger,
        _ => local.kappa_poincare,
    });
    let phi1 = cert.phi.value(1.0);
    let lead = (cert.b * kappa / phi1).max(1.0);
    let (w, phi) = (cert.w.clone(), cert.phi.clone());
    let mut out = match kind {
        WeightKind::WeightedPoincare => WeightFunction::new(kind, lead, "1 + 1/phi'(W)", move |r| {
            1.0 + 1.0 / phi.derivative(w.value(r))
        }),
        WeightKind::WeightedCheeger => WeightFunction::new(kind, lead, "1 + |W'|/phi(W)", move |r| {
            1.0 + w.d1(r).abs() / phi.value(w.value(r))
        }),
        WeightKind::CheegerPoincare => WeightFunction::new(kind, 8.0 * lead * lead, "1 + W'^2/phi(W)^2", move |r| {
            1.0 + (w.d1(r) / phi.value(w.value(r))).powi(2)
        }),
        WeightKind::ConversePoincare => WeightFunction::new(kind, 1.0 + cert.b * kappa, "phi(W)/W", move |r| {
            let u = w.value(r);
            if u.is_finite() {
                phi.value(u) / u
            } else {
                0.0
            }
        }),
        WeightKind::ConverseCheeger => {
            let top = finite_range(cert).max(cert.radius * 4.0);
            let grid = logspace(cert.radius.max(1e-3) * 1.0001, top, 400);
            let report = converse_cheeger_condition(cert, &grid)?;
            let delta = match report.condition {
                ConverseCondition::Two => 0.0,
                ConverseCondition::One { delta } => delta,
            };
            let pre = (1.0 + (report.m_sup + cert.b) * kappa) / (1.0 - delta);
            let mut wf = WeightFunction::new(kind, pre, "phi(W)/sqrt(1+W'^2)", move |r| {
                let (wv, d1) = (w.value(r), w.d1(r));
                if !wv.is_finite() {
                    0.0
                } else if d1.abs() > 1e100 {
                    (phi.value(wv) / wv) / (wv.powi(-2) + (d1 / wv).powi(2)).sqrt()
                } else {
                    phi.value(wv) / (1.0 + d1 * d1).sqrt()
                }
            });
            wf.condition = Some(report);
            wf
        }
    };
    out.kappa_u = kappa;
    Ok(out)
}

/// Radii over which the certificate's weights have reached their
/// asymptotic power law (used for exponent fits).
pub fn asymptotic_range(cert: &LyapunovCertificate) -> (f64, f64) {
    match cert.provenance {
        Provenance::Subexp { p, gamma, .. } => ((50.0 / gamma).powf(1.0 / p), (500.0 / gamma).powf(1.0 / p)),
        _ => (1e2, 1e4),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn generator_on_exponential_branch() {
        let d = Diffusion::from_potential(&Potential::linear());
        let w = RadialFn::new(
            "e^{x/2}",
            |x| (0.5 * x).exp(),
            |x| 0.5 * (0.5 * x).exp(),
            |x| 0.25 * (0.5 * x).exp(),
        );
        let lw = apply_generator(&d, &w, 2.0).unwrap();
        assert_relative_eq!(lw, -std::f64::consts::E / 4.0, max_relative = 1e-14);
        assert_eq!(apply_generator(&d, &RadialFn::constant(1.0), 3.0).unwrap(), 0.0);
    }

    #[test]
    fn generator_matches_power_closed_form() {
        let (n, alpha, k) = (3usize, 2.0, 2.5);
        let d = Diffusion::cauchy(n, alpha).unwrap();
        let w = RadialFn::new(
            "r^k",
            move |r: f64| r.powf(k),
            move |r: f64| k * r.powf(k - 1.0),
            move |r: f64| k * (k - 1.0) * r.powf(k - 2.0),
        );
        let r: f64 = 10.0;
        let v = 1.0 + r;
        let closed = k * r.powf(k).powf((k - 2.0) / k) * (n as f64 + k - 2.0 - (n as f64 + alpha) * r / v);
        assert_relative_eq!(apply_generator(&d, &w, r).unwrap(), closed, max_relative = 1e-8);
        assert!(matches!(
            apply_generator(&d, &w, 0.0),
            Err(Error::PolarSingularity { n: 3 })
        ));
    }

    #[test]
    fn cauchy_certificates_pass() {
        let grid = linspace(0.0, 100.0, 20001);
        for (n, alpha) in [(1, 2.0), (3, 1.0), (1, 0.5), (2, 5.0)] {
            let cert = cauchy_certificate(n, alpha).unwrap();
            let rep = verify_drift(&cert, &grid).unwrap();
            assert!(rep.pass, "n={n} alpha={alpha}: {rep:?}");
        }
        assert!(cauchy_certificate(1, 0.0).is_err());
        assert!(cauchy_certificate(1, -1.0).is_err());
    }

    #[test]
    fn doubling_phi_breaks_the_margin() {
        let grid = linspace(0.0, 100.0, 20001);
        let cert = cauchy_certificate(1, 1.0).unwrap();
        let rep = verify_drift(&cert.with_phi_scaled(2.0), &grid).unwrap();
        assert!(!rep.pass && rep.max_violation > 0.0 && rep.worst_at > cert.radius);
    }

    #[test]
    fn degenerate_certificate_rejected() {
        let d = Diffusion::cauchy(1, 1.0).unwrap();
        let r = LyapunovCertificate::new(
            RadialFn::constant(1.0),
            ScalarFn::new("0", |_| 0.0, |_| 0.0),
            0.0,
            1.0,
            d,
            Provenance::Custom { label: "zero".into() },
            10.0,
        );
        assert!(r.is_err());
    }

    #[test]
    fn subexp_certificates_pass() {
        let grid = linspace(0.0, 100.0, 20001);
        for (n, p) in [(1, 0.5), (2, 0.75), (1, 0.75), (2, 0.5)] {
            let cert = subexp_certificate(n, p).unwrap();
            let rep = verify_drift(&cert, &grid).unwrap();
            assert!(rep.pass, "n={n} p={p}: {rep:?}");
        }
        assert!(subexp_certificate(1, 1.0).is_err());
    }

    #[test]
    fn cauchy_weight_exponents() {
        let cert = cauchy_certificate(3, 1.0).unwrap();
        let (lo, hi) = asymptotic_range(&cert);
        let expect = [
            (WeightKind::WeightedPoincare, 2.0),
            (WeightKind::WeightedCheeger, 1.0),
            (WeightKind::CheegerPoincare, 2.0),
            (WeightKind::ConversePoincare, -2.0),
            (WeightKind::ConverseCheeger, -1.0),
        ];
        for (kind, slope) in expect {
            let w = derive_weight(&cert, kind, None).unwrap();
            let fit = w.growth_exponent(lo, hi);
            assert!((fit - slope).abs() < 0.05, "{kind:?}: {fit}");
            assert!(w.prefactor >= 1.0 && w.prefactor.is_finite());
        }
    }

    #[test]
    fn subexp_weight_exponents() {
        let p = 0.5;
        let cert = subexp_certificate(1, p).unwrap();
        let (lo, hi) = asymptotic_range(&cert);
        for (kind, slope) in [
            (WeightKind::WeightedPoincare, 2.0 * (1.0 - p)),
            (WeightKind::WeightedCheeger, 1.0 - p),
            (WeightKind::ConversePoincare, -2.0 * (1.0 - p)),
            (WeightKind::ConverseCheeger, p - 1.0),
        ] {
            let fit = derive_weight(&cert, kind, None).unwrap().growth_exponent(lo, hi);
            assert!((fit - slope).abs() < 0.05, "{kind:?}: {fit}");
        }
    }

    #[test]
    fn converse_conditions() {
        let cert = cauchy_certificate(1, 2.0).unwrap();
        let grid = logspace(cert.radius * 1.01, 1e4, 200);
        let rep = converse_cheeger_condition(&cert, &grid).unwrap();
        assert_eq!(rep.condition, ConverseCondition::Two);
        let k: f64 = 2.5;
        let r: f64 = 50.0;
        assert_relative_eq!(
            gamma_w_gamma_w(&cert.w, r),
            2.0 * k.powi(3) * (k - 1.0) * r.powf(3.0 * k - 4.0),
            max_relative = 1e-12
        );
        let sub = subexp_certificate(1, 0.5).unwrap();
        let grid = logspace(sub.radius * 1.01, 1e4, 200);
        assert!(converse_cheeger_condition(&sub, &grid).is_ok());
        let concave = LyapunovCertificate {
            w: RadialFn::new(
                "1+log(1+r)",
                |r: f64| 1.0 + r.ln_1p(),
                |r| 1.0 / (1.0 + r),
                |r| -1.0 / ((1.0 + r) * (1.0 + r)),
            ),
            phi: ScalarFn::new("1e-6 u", |u| 1e-6 * u, |_| 1e-6),
            ..cert
        };
        assert!(matches!(
            converse_cheeger_condition(&concave, &grid),
            Err(Error::NeitherCondition { .. })
        ));
    }

    #[test]
    fn exp_potential_certificates() {
        let grid = linspace(0.0, 100.0, 20001);
        let sp = Potential::smoothed_power(0.5).unwrap();
        let cert = exp_potential_certificate(&sp, 0.25).unwrap();
        assert!(verify_drift(&cert, &grid).unwrap().pass);
        let cc = derive_weight(&cert, WeightKind::ConverseCheeger, None).unwrap();
        for r in [1e3, 1e4] {
            let ratio = cc.value(r) / sp.d1(r);
            assert!(ratio > 0.1 && ratio < 1.0, "{ratio}");
        }
        let lc = Potential::log_cauchy(2.0).unwrap();
        let cert = exp_potential_certificate(&lc, 0.75).unwrap();
        assert!(verify_drift(&cert, &grid).unwrap().pass);
        assert!(matches!(
            exp_potential_certificate(&Potential::log_cauchy(1.0).unwrap(), 0.75),
            Err(Error::RatioCondition { .. })
        ));
        assert!(matches!(
            exp_potential_certificate(&lc, 0.25),
            Err(Error::MonotonicityFailure(_))
        ));
    }

    #[test]
    fn local_constants_of_flat_interval() {
        let d = Diffusion::new(1, |_| 0.0, |_| 0.0, "flat").unwrap();
        let lc = local_constants(&d, 1.0).unwrap();
        // Neumann gap of [−1, 1] is (π/2)²; Cheeger constant of the uniform law is 1.
        let exact = 1.0 / (std::f64::consts::FRAC_PI_2).powi(2);
        assert!(lc.kappa_poincare <= exact && lc.kappa_poincare > 0.999 * exact);
        assert!((lc.kappa_cheeger - 1.0).abs() < 1e-3);
    }

    #[test]
    fn partition_does_not_change_the_report() {
        let cert = cauchy_certificate(1, 2.0).unwrap();
        let grid = linspace(0.0, 100.0, 5000);
        let a = verify_drift(&cert, &grid).unwrap();
        let b = verify_drift(&cert, &grid[..]).unwrap();
        assert_eq!(a.max_violation.to_bits(), b.max_violation.to_bits());
        assert_eq!(a.worst_at.to_bits(), b.worst_at.to_bits());
    }
}
