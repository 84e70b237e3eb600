//! Weak Cheeger and weak Poincaré rates.
//!
//! Two routes are implemented. A converse inequality with weight `ω`
//! becomes a weak one with rate `C / G(s)`, where `G` is the generalized
//! inverse of `u ↦ μ(ω < u)`. Independently, for a symmetric law `μ` with
//! decreasing hazard rate, every product `μⁿ` satisfies
//!
//! ```text
//! ∫ |f − m| dμⁿ ≤ κ₁ s/J_μ(s) ∫ |∇f| dμⁿ + κ₂ n s Osc(f)
//! ```
//!
//! with `κ₁ = 2√6` and `κ₂ = 2(1 + 2√6)`, which yields isoperimetric lower
//! bounds for `μⁿ` with explicit dependence on `n`.

use serde::Serialize;

use crate::duality::RateFunction;
use crate::error::{invalid, Error, Result};
use crate::isoperimetry::{dhr_check, iso_j, phi_regularity, ConvexityReport, PhiRegularityReport};
use crate::measures::{Measure1D, Phi};
use crate::numeric::{linear_fit, logspace};
use crate::weighted::Weight;

/// `κ₁ = 2√6`.
pub const KAPPA_1: f64 = 4.898_979_485_566_356;
/// `κ₂ = 2(1 + 2√6)`.
pub const KAPPA_2: f64 = 11.797_958_971_132_712;

const U_TOL: f64 = 1e-10;
const SCAN_POINTS: usize = 3000;

/// The law of a weight `ω` under `μ`: `F(u) = μ(ω < u)` and
/// `G(s) = inf{u : μ(ω ≤ u) > s}`.
#[derive(Debug, Clone)]
pub struct WeightTailQuantile {
    measure: Measure1D,
    weight: Weight,
    scan: Vec<f64>,
    omega_bar: f64,
    omega_max: f64,
}

impl WeightTailQuantile {
    /// Level sets of `ω` are located on a log grid of `|x|` reaching the
    /// point where `F̄_μ = 10⁻³⁰⁰`, or the first point where `ω` overflows if
    /// that comes earlier; beyond it `ω` is taken to keep its last side of
    /// each level.
    pub fn new(measure: &Measure1D, weight: &Weight) -> Result<Self> {
        let r_max = measure.tail_inverse(1e-300).unwrap_or(1e6).max(10.0);
        let mut scan = vec![0.0];
        scan.extend(logspace(1e-8, r_max, SCAN_POINTS));
        if let Some(end) = scan.iter().position(|&r| !weight.value(r).is_finite()) {
            scan.truncate(end.max(2));
        }
        let mut omega_max = 0.0f64;
        for &r in &scan {
            let w = weight.value(r);
            if !(w >= 0.0 && w.is_finite()) {
                return Err(invalid(format!(
                    "weight must be finite and non-negative, got {w} at {r}"
                )));
            }
            omega_max = omega_max.max(w);
        }
        let r_end = *scan.last().expect("non-empty scan");
        let inside =
            measure
                .quadrature()
                .integrate_relative(|x| weight.value(x) * measure.density(x), 0.0, r_end.min(1.0))?;
        let outside = if r_end > 1.0 {
            let mut total = 0.0;
            let mut a = 1.0;
            while a < r_end {
                let b = (2.0 * a).min(r_end);
                total += measure
                    .quadrature()
                    .integrate_relative(|x| weight.value(x) * measure.density(x), a, b)?;
                a = b;
            }
            total
        } else {
            0.0
        };
        let omega_bar = 2.0 * (inside + outside + weight.value(r_end) * measure.tail(r_end)?);
        if !omega_bar.is_finite() {
            return Err(invalid("the weight is not integrable"));
        }
        Ok(Self {
            measure: measure.clone(),
            weight: weight.clone(),
            scan,
            omega_bar,
            omega_max,
        })
    }

    /// `∫ ω dμ`, with `ω` frozen at its value at the end of the scan.
    pub fn omega_bar(&self) -> f64 {
        self.omega_bar
    }

    fn mass_where<P: Fn(f64) -> bool>(&self, inside: P) -> Result<f64> {
        let state = |r: f64| inside(self.weight.value(r));
        let mut mass = 0.0;
        let mut start = if state(0.0) { Some(0.0) } else { None };
        for w in self.scan.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (sa, sb) = (state(a), state(b));
            if sa == sb {
                continue;
            }
            let (mut lo, mut hi) = (a, b);
            while hi - lo > 1e-15 * hi {
                let mid = 0.5 * (lo + hi);
                if state(mid) == sa {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let cross = hi;
            match start.take() {
                Some(s0) => mass += self.measure.tail(s0)? - self.measure.tail(cross)?,
                None => start = Some(cross),
            }
        }
        if let Some(s0) = start {
            mass += self.measure.tail(s0)?;
        }
        Ok((2.0 * mass).clamp(0.0, 1.0))
    }

    /// `F(u) = μ(ω < u)`.
    pub fn f(&self, u: f64) -> Result<f64> {
        self.mass_where(|w| w < u)
    }

    /// `μ(ω ≤ u)`.
    pub fn f_closed(&self, u: f64) -> Result<f64> {
        self.mass_where(|w| w <= u)
    }

    /// `G(s)` by bisection in `u` to `10⁻¹⁰`, for `s ∈ (0, 1)`.
    pub fn g(&self, s: f64) -> Result<f64> {
        if !(s > 0.0 && s < 1.0) {
            return Err(invalid(format!("G needs s in (0, 1), got {s}")));
        }
        if self.f_closed(0.0)? > s {
            return Ok(0.0);
        }
        let (mut lo, mut hi) = (0.0, self.omega_max);
        if !(self.f_closed(hi)? > s) {
            return Err(Error::SearchFailure(format!(
                "mu(omega <= sup omega) does not exceed {s}"
            )));
        }
        while hi - lo > U_TOL {
            let mid = 0.5 * (lo + hi);
            if self.f_closed(mid)? > s {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeakKind {
    Cheeger,
    Poincare,
}

/// `β(s) = C / G(s)` from a converse inequality with constant `C`; `s`
/// must lie in `(0, 1/2)` for Cheeger and `(0, 1/4)` for Poincaré.
pub fn weak_rate_from_converse(kind: WeakKind, c: f64, tails: &WeightTailQuantile, s: f64) -> Result<f64> {
    let top = match kind {
        WeakKind::Cheeger => 0.5,
        WeakKind::Poincare => 0.25,
    };
    if !(s > 0.0 && s < top) {
        return Err(invalid(format!("s must lie in (0, {top}), got {s}")));
    }
    let g = tails.g(s)?;
    if g == 0.0 {
        return Err(Error::DivisionByZero(format!(
            "G({s}) = 0: the weight vanishes on a set of mass > s"
        )));
    }
    Ok(c / g)
}

/// A symmetric base law with decreasing hazard rate and the dimension of
/// the product.
#[derive(Debug, Clone)]
pub struct ProductBoundSpec {
    base: Measure1D,
    n: usize,
    dhr: ConvexityReport,
}

impl ProductBoundSpec {
    /// Verifies `ln F̄_μ` convex on a log grid of `[10⁻³, 10³]`.
    pub fn new(base: &Measure1D, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        let dhr = dhr_check(base, &logspace(1e-3, 1e3, 400))?;
        if !dhr.pass {
            return Err(Error::HypothesisViolation(format!(
                "log of the tail is not convex (violation {} at {})",
                dhr.worst_violation, dhr.worst_at
            )));
        }
        Ok(Self {
            base: base.clone(),
            n,
            dhr,
        })
    }

    pub fn base(&self) -> &Measure1D {
        &self.base
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn dhr_report(&self) -> &ConvexityReport {
        &self.dhr
    }

    fn nk2(&self) -> f64 {
        self.n as f64 * KAPPA_2
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProductWeakCheeger {
    pub s: f64,
    pub gradient: f64,
    pub oscillation: f64,
    /// `s > 1/(κ₂ n)`: the oscillation term alone already exceeds
    /// `∫|f − m| ≤ Osc(f)/2`.
    pub vacuous: bool,
}

/// `(κ₁ s/J_μ(s), κ₂ n s)` for `s ∈ (0, 1/2)`.
pub fn product_weak_cheeger(spec: &ProductBoundSpec, s: f64) -> Result<ProductWeakCheeger> {
    if !(s > 0.0 && s < 0.5) {
        return Err(invalid(format!("s must lie in (0, 1/2), got {s}")));
    }
    Ok(ProductWeakCheeger {
        s,
        gradient: KAPPA_1 * s / iso_j(&spec.base, s)?,
        oscillation: KAPPA_2 * spec.n as f64 * s,
        vacuous: s > 1.0 / spec.nk2(),
    })
}

fn clipped(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(invalid(format!("measure level must lie in [0, 1], got {t}")));
    }
    Ok(t.min(1.0 - t))
}

/// `(nκ₂/κ₁) J_μ(min(t, 1−t)/(2nκ₂))`, a lower bound on `I_{μⁿ}(t)`.
pub fn product_iso_lower(spec: &ProductBoundSpec, t: f64) -> Result<f64> {
    let m = clipped(t)?;
    if m == 0.0 {
        return Ok(0.0);
    }
    Ok(spec.nk2() / KAPPA_1 * iso_j(&spec.base, m / (2.0 * spec.nk2()))?)
}

/// `(nκ₂/κ₁) J_μ(min(t, 1−t)/(nκ₂))`, the companion of
/// [`product_iso_lower`] that the dual profile of the product rate cannot
/// exceed.
pub fn product_iso_upper(spec: &ProductBoundSpec, t: f64) -> Result<f64> {
    let m = clipped(t)?;
    if m == 0.0 {
        return Ok(0.0);
    }
    Ok(spec.nk2() / KAPPA_1 * iso_j(&spec.base, m / spec.nk2())?)
}

/// The product weak Cheeger rate as a function of the oscillation
/// coefficient `σ = κ₂ n s`: `σ ↦ κ₁ s/J_μ(s)` for `s = σ/(κ₂ n) < 1/2`.
pub fn product_rate(spec: &ProductBoundSpec) -> RateFunction {
    let spec = spec.clone();
    RateFunction::from_fn(format!("product(n={})", spec.n), move |sigma| {
        let s = sigma / spec.nk2();
        if !(s > 0.0 && s < 0.5) {
            return Err(invalid(format!("oscillation level {sigma} outside the product range")));
        }
        Ok(KAPPA_1 * s / iso_j(&spec.base, s)?)
    })
}

/// A `Φ` checked for the regularity clauses and `Φ(0) < ln 2`.
#[derive(Debug, Clone)]
pub struct PhiProduct {
    phi: Phi,
    regularity: PhiRegularityReport,
}

impl PhiProduct {
    pub fn new(phi: &Phi, theta: f64, x_range: (f64, f64)) -> Result<Self> {
        let at_zero = phi.value(0.0);
        if !(at_zero < std::f64::consts::LN_2) {
            return Err(Error::RegularityViolation {
                clause: "Phi(0) < log 2",
                detail: format!("Phi(0) = {at_zero}"),
            });
        }
        let regularity = phi_regularity(phi, theta, x_range)?;
        Ok(Self {
            phi: phi.clone(),
            regularity,
        })
    }

    pub fn regularity(&self) -> &PhiRegularityReport {
        &self.regularity
    }
}

/// `min(t,1−t) Φ'∘Φ⁻¹(ln(n/min(t,1−t)))`, the dimension-dependent shape of
/// the product profile; the multiplying constant is not explicit and is
/// obtained by [`fit_scalar`].
pub fn product_iso_phi(pp: &PhiProduct, n: usize, t: f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    let m = clipped(t)?;
    if m == 0.0 {
        return Ok(0.0);
    }
    Ok(m * pp.phi.derivative_at_inverse((n as f64 / m).ln())?)
}

/// `(4β(s/2)², s)` for `s ∈ (0, 1/4)`.
pub fn weak_poincare_from_weak_cheeger(beta: &RateFunction, s: f64) -> Result<(f64, f64)> {
    if !(s > 0.0 && s < 0.25) {
        return Err(invalid(format!("s must lie in (0, 1/4), got {s}")));
    }
    let b = beta.value(0.5 * s)?;
    Ok((4.0 * b * b, s))
}

/// `(κ₁² s²/J_μ(s/2)², 2κ₂ n s)` for `s ∈ (0, 1)`.
pub fn product_weak_poincare(spec: &ProductBoundSpec, s: f64) -> Result<(f64, f64)> {
    if !(s > 0.0 && s < 1.0) {
        return Err(invalid(format!("s must lie in (0, 1), got {s}")));
    }
    let j = iso_j(&spec.base, 0.5 * s)?;
    Ok((KAPPA_1 * KAPPA_1 * s * s / (j * j), 2.0 * spec.nk2() * s))
}

/// The energy coefficient of [`product_weak_poincare`] at the `s` whose
/// oscillation coefficient equals `sigma ∈ (0, 1/4)`.
pub fn product_weak_poincare_rate(spec: &ProductBoundSpec, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma < 0.25) {
        return Err(invalid(format!("oscillation level must lie in (0, 1/4), got {sigma}")));
    }
    Ok(product_weak_poincare(spec, sigma / (2.0 * spec.nk2()))?.0)
}

/// A multiplicative constant relating a computed quantity to a shape
/// function that the theory fixes only up to such a constant.
#[derive(Debug, Clone, Serialize)]
pub struct FittedConstant {
    /// `exp(mean(ln target − ln shape))`.
    pub least_squares: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub points: usize,
    pub label: &'static str,
}

impl FittedConstant {
    /// `max_ratio / min_ratio`.
    pub fn spread(&self) -> f64 {
        self.max_ratio / self.min_ratio
    }
}

/// Fits `target ≈ c · shape` over `(target, shape)` pairs, all positive.
pub fn fit_scalar(pairs: &[(f64, f64)]) -> Result<FittedConstant> {
    if pairs.is_empty() {
        return Err(invalid("nothing to fit"));
    }
    let mut logs = Vec::with_capacity(pairs.len());
    for &(target, shape) in pairs {
        if !(target > 0.0 && shape > 0.0) {
            return Err(invalid(format!("fit needs positive values, got ({target}, {shape})")));
        }
        logs.push(target.ln() - shape.ln());
    }
    let mean = logs.iter().sum::<f64>() / logs.len() as f64;
    let min = logs.iter().copied().fold(f64::INFINITY, f64::min);
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(FittedConstant {
        least_squares: mean.exp(),
        min_ratio: min.exp(),
        max_ratio: max.exp(),
        points: pairs.len(),
        label: "fitted, no closed-form constant",
    })
}

/// Least-squares exponent `γ` in `y ≈ c · x^γ` on log scales.
pub fn fit_exponent(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    linear_fit(&lx, &ly).1
}
