//! Weighted Poincaré inequalities for spherically symmetric laws on ℝⁿ by
//! radial transport.
//!
//! If `μ = T♯ν` with `T(x) = φ(|x|) x/|x|` and `ν` has a Poincaré constant
//! `C`, then `Var_μ(f) ≤ C ∫ ω(|x|)² |∇f|² dμ` with
//! `ω(r) = max(φ'∘φ⁻¹(r), r/φ⁻¹(r))`. When `ν` has a log-concave radial
//! law `ρ_ν`, Bobkov's bound gives
//! `C_ν = 12 (E r² − (E r)²) + E r² / n`.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};
use crate::measures::{Phi, QuadratureSpec, RadialMeasure};
use crate::numeric::{linspace, logspace, richardson_linear};

/// A radial map `T(x) = φ(|x|) x/|x|` with `φ` increasing and `φ(0) = 0`.
#[derive(Debug, Clone)]
pub struct RadialTransport {
    phi: Phi,
    convex: bool,
}

impl RadialTransport {
    /// Checks `φ(0) = 0`, strict increase on a grid of `[0, 50]` and, when
    /// `convex` is set, non-negative second differences.
    pub fn new(phi: Phi, convex: bool) -> Result<Self> {
        if phi.value(0.0).abs() > 1e-12 {
            return Err(invalid(format!("phi(0) = {} is not zero", phi.value(0.0))));
        }
        let grid = linspace(0.0, 50.0, 2001);
        let values: Vec<f64> = grid.iter().map(|&r| phi.value(r)).collect();
        if let Some(w) = values.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::MonotonicityFailure(format!(
                "phi is not increasing near r = {}",
                grid[w]
            )));
        }
        if convex {
            for (i, w) in values.windows(3).enumerate() {
                let second = w[2] - 2.0 * w[1] + w[0];
                if second < -1e-9 * (1.0 + w[1].abs()) {
                    return Err(Error::HypothesisViolation(format!(
                        "phi is flagged convex but bends down near r = {}",
                        grid[i + 1]
                    )));
                }
            }
        }
        Ok(Self { phi, convex })
    }

    pub fn identity() -> Self {
        Self {
            phi: Phi::linear(),
            convex: true,
        }
    }

    /// `φ(r) = e^r − 1`, the inverse of `ψ(r) = ln(1 + r)`.
    pub fn cauchy() -> Self {
        let phi = Phi::new("e^r-1", |r: f64| r.exp_m1())
            .with_derivative(|r: f64| r.exp())
            .with_inverse(|y: f64| y.max(0.0).ln_1p());
        Self { phi, convex: true }
    }

    /// `φ(r) = (p r)^{1/p}`, the inverse of `ψ(r) = r^p / p`.
    pub fn subexp(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(invalid(format!("p must lie in (0, 1), got {p}")));
        }
        let phi = Phi::new(format!("({p} r)^(1/{p})"), move |r: f64| (p * r).powf(1.0 / p))
            .with_derivative(move |r: f64| (p * r).powf(1.0 / p - 1.0))
            .with_inverse(move |y: f64| y.max(0.0).powf(p) / p);
        Ok(Self { phi, convex: true })
    }

    pub fn phi(&self) -> &Phi {
        &self.phi
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    /// Radial law of `ν = S♯μ` for `S = T⁻¹`: `ρ_ν(u) = ρ_μ(φ(u)) φ'(u)`.
    pub fn pull_back(&self, mu: &RadialMeasure) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
        let (mu, phi) = (mu.clone(), self.phi.clone());
        move |u: f64| {
            if u < 0.0 {
                return 0.0;
            }
            mu.radial_law(phi.value(u)) * phi.derivative(u)
        }
    }
}

/// `ω(r) = max(φ'∘φ⁻¹(r), r/φ⁻¹(r))`, with the value `φ'(0)` at `r = 0`.
/// For a transport flagged convex the first branch must dominate.
pub fn radial_weight(tr: &RadialTransport, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(invalid(format!("radius must be non-negative, got {r}")));
    }
    if r == 0.0 {
        return Ok(tr.phi.derivative(0.0));
    }
    let inv = tr.phi.inverse(r)?;
    let slope = tr.phi.derivative(inv);
    let chord = r / inv;
    if tr.convex && chord > slope * (1.0 + 1e-9) {
        return Err(Error::HypothesisViolation(format!(
            "convex transport but r/phi^-1(r) = {chord} exceeds phi'(phi^-1(r)) = {slope} at r = {r}"
        )));
    }
    Ok(slope.max(chord))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BobkovReport {
    pub mass: f64,
    pub mean: f64,
    pub second_moment: f64,
    pub constant: f64,
}

const LOG_CONCAVITY_TOL: f64 = 1e-9;

/// Second differences of `ln ρ` on a log grid of `[10⁻⁴, 50]`, scaled to
/// local spacing, must not exceed `10⁻⁹ (1 + |ln ρ|)`.
pub fn check_log_concave<F: Fn(f64) -> f64>(rho: F) -> Result<()> {
    let grid = logspace(1e-4, 50.0, 4000);
    let pts: Vec<(f64, f64)> = grid
        .iter()
        .map(|&r| (r, rho(r)))
        .filter(|(_, v)| *v > 0.0 && v.is_finite())
        .map(|(r, v)| (r, v.ln()))
        .collect();
    for w in pts.windows(3) {
        let s0 = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
        let s1 = (w[2].1 - w[1].1) / (w[2].0 - w[1].0);
        let second = (s1 - s0) * 0.5 * (w[2].0 - w[0].0);
        if second > LOG_CONCAVITY_TOL * (1.0 + w[1].1.abs()) {
            return Err(Error::LogConcavityViolation {
                at: w[1].0,
                value: second,
            });
        }
    }
    Ok(())
}

/// Bobkov's constant for a spherically symmetric law on ℝⁿ whose radial
/// density (normalised or not) is `rho`.
pub fn bobkov_constant<F: Fn(f64) -> f64>(rho: F, n: usize, quad: &QuadratureSpec) -> Result<BobkovReport> {
    if n == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    check_log_concave(&rho)?;
    let mass = quad.integrate_to_infinity(&rho, 0.0)?;
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(invalid("radial density has no finite positive mass"));
    }
    let mean = quad.integrate_to_infinity(|r| r * rho(r), 0.0)? / mass;
    let second_moment = quad.integrate_to_infinity(|r| r * r * rho(r), 0.0)? / mass;
    let constant = 12.0 * (second_moment - mean * mean) + second_moment / n as f64;
    Ok(BobkovReport {
        mass,
        mean,
        second_moment,
        constant,
    })
}

/// `ln H(α)` with `H(α) = ∫_0^1 u^{α−1}(1−u)^{n−1} du = (n−1)! / ∏_{k<n}(α+k)`.
pub fn ln_h(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    ln_gamma(nf) + ln_gamma(alpha) - ln_gamma(alpha + nf)
}

fn check_cauchy(n: usize, alpha: f64) -> Result<()> {
    if n == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(invalid(format!("alpha must be positive, got {alpha}")));
    }
    Ok(())
}

fn check_subexp(n: usize, p: f64) -> Result<()> {
    if n == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("p must lie in (0, 1), got {p}")));
    }
    Ok(())
}

/// `(Σ_k 1/(α+k), Σ_k 1/(α+k)²)` over `k = 0, …, n−1`; these are `−H'/H`
/// and `H''/H − (H'/H)²`.
pub fn cauchy_sums(n: usize, alpha: f64) -> (f64, f64) {
    (0..n).fold((0.0, 0.0), |(s1, s2), k| {
        let c = alpha + k as f64;
        (s1 + 1.0 / c, s2 + 1.0 / (c * c))
    })
}

/// `(Σ, 14 Σ)` with `Σ = Σ_{k<n} 1/(α+k)²`: two-sided bounds on the optimal
/// constant for the weight `(1+|x|)²` under `(1+|x|)^{−(n+α)}`.
pub fn cauchy_bounds(n: usize, alpha: f64) -> Result<(f64, f64)> {
    check_cauchy(n, alpha)?;
    let (_, s2) = cauchy_sums(n, alpha);
    Ok((s2, 14.0 * s2))
}

/// `13 Σ + (Σ_k 1/(α+k))² / n`, the closed form bounding Bobkov's constant
/// of the transported Cauchy law from above (equal to it when `n = 1`).
pub fn cauchy_bobkov_closed_form(n: usize, alpha: f64) -> Result<f64> {
    check_cauchy(n, alpha)?;
    let (s1, s2) = cauchy_sums(n, alpha);
    Ok(13.0 * s2 + s1 * s1 / n as f64)
}

/// `(n/p³, 12 n/p³ + (n+p)/p⁴)`: bounds on the optimal constant for the
/// weight `|x|^{2(1−p)}` under `e^{−|x|^p}`.
pub fn subexp_bounds(n: usize, p: f64) -> Result<(f64, f64)> {
    check_subexp(n, p)?;
    let nf = n as f64;
    let lower = nf / p.powi(3);
    Ok((lower, 12.0 * lower + (nf + p) / p.powi(4)))
}

/// `(E r, E r²) = (n/p², n(n+p)/p⁴)` for the transported sub-exponential law.
pub fn subexp_moments(n: usize, p: f64) -> Result<(f64, f64)> {
    check_subexp(n, p)?;
    let nf = n as f64;
    Ok((nf / (p * p), nf * (nf + p) / p.powi(4)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestFnFamily {
    Cauchy,
    Subexp,
}

/// Rayleigh quotient of `f_a = (1+|x|)^{−a}` (Cauchy) or `f_a = e^{−a|x|^p}`
/// (sub-exponential), a lower bound on the optimal constant for every
/// `a > 0`. `param` is `α` or `p`.
pub fn testfn_lower_bound(family: TestFnFamily, n: usize, param: f64, a: f64) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(invalid(format!("a must be positive, got {a}")));
    }
    match family {
        TestFnFamily::Cauchy => {
            check_cauchy(n, param)?;
            let log_ratio: f64 = (0..n)
                .map(|k| {
                    let c = param + k as f64 + a;
                    (-(a * a) / (c * c)).ln_1p()
                })
                .sum();
            Ok(-log_ratio.exp_m1() / (a * a))
        }
        TestFnFamily::Subexp => {
            check_subexp(n, param)?;
            let p = param;
            let base = ((1.0 + 2.0 * a) / (1.0 + a).powi(2)).ln() * n as f64 / p;
            Ok(-base.exp_m1() / (p * p * a * a))
        }
    }
}

/// Richardson extrapolation of [`testfn_lower_bound`] to `a → 0` from the
/// values at `10a` and `a`.
pub fn testfn_limit(family: TestFnFamily, n: usize, param: f64, a: f64) -> Result<f64> {
    let coarse = testfn_lower_bound(family, n, param, 10.0 * a)?;
    let fine = testfn_lower_bound(family, n, param, a)?;
    Ok(richardson_linear(coarse, fine, 10.0))
}
