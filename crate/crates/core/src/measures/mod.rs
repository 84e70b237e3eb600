//! Symmetric probability laws on the line and spherically symmetric laws on
//! ℝⁿ, together with the quadrature engine every other module integrates
//! through.
//!
//! All one-dimensional laws have a density `e^{-V(x)}/Z` that is even in
//! `x`; CDFs are built from the right tail `F̄(r) = μ(r, ∞)` so that small
//! probabilities keep full relative precision.

mod phi;
mod potential;
pub mod quadrature;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use statrs::function::gamma::{gamma_ur, ln_gamma};

pub use phi::Phi;
pub use potential::Potential;
pub use quadrature::QuadratureSpec;

use crate::error::{invalid, Error, Result};

/// Parametric family of a [`Measure1D`].
#[derive(Debug, Clone)]
pub enum Family {
    /// `α / (2 (1+|x|)^{1+α})`.
    Cauchy { alpha: f64 },
    /// `e^{-|x|^p} / Z` with `p ∈ (0, 1]`.
    SubExponential { p: f64 },
    /// `e^{-|x|} / 2`, the reference law of the product bounds.
    Exponential,
    /// `e^{-Φ(|x|)} / Z` for a user-supplied `Φ`.
    Phi(Phi),
    /// `((2+|x|) log^q(2+|x|))^{-1} / Z` with `q > 1`.
    Vq { q: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyDescription {
    pub family: &'static str,
    pub parameter: Option<f64>,
    pub label: String,
}

impl Family {
    pub fn describe(&self) -> FamilyDescription {
        match self {
            Family::Cauchy { alpha } => FamilyDescription {
                family: "cauchy",
                parameter: Some(*alpha),
                label: format!("cauchy(alpha={alpha})"),
            },
            Family::SubExponential { p } => FamilyDescription {
                family: "subexp",
                parameter: Some(*p),
                label: format!("subexp(p={p})"),
            },
            Family::Exponential => FamilyDescription {
                family: "exponential",
                parameter: None,
                label: "exponential".into(),
            },
            Family::Phi(phi) => FamilyDescription {
                family: "phi",
                parameter: None,
                label: format!("phi({})", phi.label()),
            },
            Family::Vq { q } => FamilyDescription {
                family: "vq",
                parameter: Some(*q),
                label: format!("vq(q={q})"),
            },
        }
    }
}

/// A symmetric law on the line.
#[derive(Debug, Clone)]
pub struct Measure1D {
    family: Family,
    ln_z: f64,
    closed_form: bool,
    quad: QuadratureSpec,
}

impl Measure1D {
    pub fn cauchy(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid(format!("Cauchy exponent must be positive, got {alpha}")));
        }
        Ok(Self::with_ln_z(Family::Cauchy { alpha }, (2.0 / alpha).ln()))
    }

    pub fn subexp(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(invalid(format!("sub-exponential p must lie in (0, 1], got {p}")));
        }
        let ln_z = std::f64::consts::LN_2 + ln_gamma(1.0 + 1.0 / p);
        Ok(Self::with_ln_z(Family::SubExponential { p }, ln_z))
    }

    pub fn exponential() -> Self {
        Self::with_ln_z(Family::Exponential, std::f64::consts::LN_2)
    }

    pub fn phi_measure(phi: Phi) -> Result<Self> {
        Self::phi_measure_with(phi, QuadratureSpec::default())
    }

    pub fn phi_measure_with(phi: Phi, quad: QuadratureSpec) -> Result<Self> {
        quad.validate()?;
        let half = quad.integrate_to_infinity(|x| (-phi.value(x)).exp(), 0.0)?;
        if !(half > 0.0 && half.is_finite()) {
            return Err(invalid(format!(
                "exp(-Phi) is not integrable for Phi = {}",
                phi.label()
            )));
        }
        let mut m = Self::with_ln_z(Family::Phi(phi), (2.0 * half).ln());
        m.quad = quad;
        Ok(m)
    }

    pub fn vq(q: f64) -> Result<Self> {
        if !(q > 1.0 && q.is_finite()) {
            return Err(invalid(format!("V_q exponent must exceed 1, got {q}")));
        }
        let quad = QuadratureSpec::default();
        // With u = ln(2+x) the half-line mass is ∫_{ln 2}^∞ u^{-q} du.
        let half = quad.integrate_to_infinity(|u| u.powf(-q), std::f64::consts::LN_2)?;
        Ok(Self::with_ln_z(Family::Vq { q }, (2.0 * half).ln()))
    }

    fn with_ln_z(family: Family, ln_z: f64) -> Self {
        Self {
            family,
            ln_z,
            closed_form: true,
            quad: QuadratureSpec::default(),
        }
    }

    /// Same law, but every tail probability goes through quadrature and
    /// every quantile through root finding.
    pub fn numeric(mut self) -> Self {
        self.closed_form = false;
        self
    }

    pub fn with_quadrature(mut self, quad: QuadratureSpec) -> Result<Self> {
        quad.validate()?;
        self.quad = quad;
        Ok(self)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quad
    }

    pub fn has_closed_form(&self) -> bool {
        self.closed_form
            && matches!(
                self.family,
                Family::Cauchy { .. } | Family::Exponential | Family::SubExponential { .. }
            )
    }

    pub fn normalizer(&self) -> f64 {
        self.ln_z.exp()
    }

    /// `V(x)` with density `e^{-V(x)} / Z`.
    pub fn potential(&self, x: f64) -> f64 {
        let r = x.abs();
        match &self.family {
            Family::Cauchy { alpha } => (1.0 + alpha) * r.ln_1p(),
            Family::SubExponential { p } => r.powf(*p),
            Family::Exponential => r,
            Family::Phi(phi) => phi.value(r),
            Family::Vq { q } => {
                let l = (2.0 + r).ln();
                l.ln() * q + (2.0 + r).ln()
            }
        }
    }

    /// `V'(x)` for `x > 0` (closed form where available).
    pub fn potential_derivative(&self, x: f64) -> f64 {
        let r = x.abs();
        let d = match &self.family {
            Family::Cauchy { alpha } => (1.0 + alpha) / (1.0 + r),
            Family::SubExponential { p } => p * r.powf(p - 1.0),
            Family::Exponential => 1.0,
            Family::Phi(phi) => phi.derivative(r),
            Family::Vq { q } => {
                let l = (2.0 + r).ln();
                (1.0 + q / l) / (2.0 + r)
            }
        };
        d * x.signum()
    }

    pub fn density(&self, x: f64) -> f64 {
        match &self.family {
            Family::Cauchy { alpha } => 0.5 * alpha * (1.0 + x.abs()).powf(-1.0 - alpha),
            Family::Exponential => 0.5 * (-x.abs()).exp(),
            _ => (-self.potential(x) - self.ln_z).exp(),
        }
    }

    /// `F̄(r) = μ(r, ∞)` for `r ≥ 0`.
    pub fn tail(&self, r: f64) -> Result<f64> {
        if r < 0.0 {
            return Ok(1.0 - self.tail(-r)?);
        }
        if r == 0.0 {
            return Ok(0.5);
        }
        if self.closed_form {
            match &self.family {
                Family::Cauchy { alpha } => return Ok(0.5 * (1.0 + r).powf(-alpha)),
                Family::Exponential => return Ok(0.5 * (-r).exp()),
                Family::SubExponential { p } => return Ok(0.5 * gamma_ur(1.0 / p, r.powf(*p))),
                _ => {}
            }
        }
        match &self.family {
            Family::Vq { q } => {
                let z = self.normalizer();
                let mass = self.quad.integrate_to_infinity(|u| u.powf(-q), (2.0 + r).ln())?;
                Ok(mass / z)
            }
            _ => self.quad.integrate_to_infinity(|x| self.density(x), r),
        }
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            self.tail(-x)
        } else {
            Ok(1.0 - self.tail(x)?)
        }
    }

    /// `F^{-1}(t)` for `t ∈ (0, 1)`.
    pub fn quantile(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t < 1.0) {
            return Err(invalid(format!("quantile level must lie in (0, 1), got {t}")));
        }
        if t == 0.5 {
            Ok(0.0)
        } else if t < 0.5 {
            Ok(-self.tail_inverse(t)?)
        } else {
            self.tail_inverse(1.0 - t)
        }
    }

    /// Inverse-CDF draw from a uniform variate.
    pub fn sample(&self, u: f64) -> Result<f64> {
        self.quantile(u)
    }

    /// The `r ≥ 0` with `F̄(r) = s`, for `s ∈ (0, 1/2]`.
    pub fn tail_inverse(&self, s: f64) -> Result<f64> {
        if !(s > 0.0 && s <= 0.5) {
            return Err(invalid(format!("tail level must lie in (0, 1/2], got {s}")));
        }
        if s == 0.5 {
            return Ok(0.0);
        }
        if self.closed_form {
            match &self.family {
                Family::Cauchy { alpha } => return Ok((2.0 * s).powf(-1.0 / alpha) - 1.0),
                Family::Exponential => return Ok(-(2.0 * s).ln()),
                _ => {}
            }
        }
        self.solve_tail(s)
    }

    /// Bracket `[0, 2^k]`, then Newton steps on `ln F̄(r) − ln s`, falling
    /// back to bisection whenever a step leaves the bracket.
    fn solve_tail(&self, s: f64) -> Result<f64> {
        let ln_s = s.ln();
        let mut lo = 0.0;
        let mut hi = 1.0;
        let mut tail_hi = self.tail(hi)?;
        while tail_hi > s {
            lo = hi;
            hi *= 2.0;
            if hi > 1e300 {
                return Err(Error::BracketFailure { lo, hi });
            }
            tail_hi = self.tail(hi)?;
        }
        let mut x = if tail_hi == s { hi } else { 0.5 * (lo + hi) };
        for _ in 0..200 {
            let tx = self.tail(x)?;
            if tx <= 0.0 {
                hi = x;
                x = 0.5 * (lo + hi);
                continue;
            }
            let g = tx.ln() - ln_s;
            if g.abs() <= 1e-14 {
                return Ok(x);
            }
            if g > 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            if hi - lo <= 1e-15 * hi {
                return Ok(0.5 * (lo + hi));
            }
            let dens = self.density(x);
            let newton = x + g * tx / dens;
            x = if newton > lo && newton < hi && newton.is_finite() {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        Ok(x)
    }

    pub fn describe(&self) -> FamilyDescription {
        self.family.describe()
    }
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A spherically symmetric law `h(|x|) dx` on ℝⁿ.
#[derive(Clone)]
pub struct RadialMeasure {
    n: usize,
    h: RealFn,
    potential_derivative: RealFn,
    label: String,
}

impl fmt::Debug for RadialMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialMeasure")
            .field("n", &self.n)
            .field("label", &self.label)
            .finish()
    }
}

/// Volume of the unit ball in ℝⁿ.
pub fn unit_ball_volume(n: usize) -> f64 {
    ln_unit_ball_volume(n).exp()
}

fn ln_unit_ball_volume(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    half * std::f64::consts::PI.ln() - ln_gamma(half + 1.0)
}

impl RadialMeasure {
    /// `h(r) = (1+r)^{-(n+α)} / Z`.
    pub fn cauchy(n: usize, alpha: f64) -> Result<Self> {
        check_dimension(n)?;
        if !(alpha > 0.0) {
            return Err(invalid(format!("Cauchy exponent must be positive, got {alpha}")));
        }
        let nf = n as f64;
        let ln_z = nf.ln() + ln_unit_ball_volume(n) + ln_gamma(nf) + ln_gamma(alpha) - ln_gamma(nf + alpha);
        Ok(Self {
            n,
            h: Arc::new(move |r: f64| (-(nf + alpha) * r.ln_1p() - ln_z).exp()),
            potential_derivative: Arc::new(move |r: f64| (nf + alpha) / (1.0 + r)),
            label: format!("cauchy(n={n}, alpha={alpha})"),
        })
    }

    /// `h(r) = e^{-r^p} / Z`.
    pub fn subexp(n: usize, p: f64) -> Result<Self> {
        check_dimension(n)?;
        if !(p > 0.0 && p <= 1.0) {
            return Err(invalid(format!("sub-exponential p must lie in (0, 1], got {p}")));
        }
        let nf = n as f64;
        let ln_z = nf.ln() + ln_unit_ball_volume(n) + ln_gamma(nf / p) - p.ln();
        Ok(Self {
            n,
            h: Arc::new(move |r: f64| (-r.powf(p) - ln_z).exp()),
            potential_derivative: Arc::new(move |r: f64| p * r.powf(p - 1.0)),
            label: format!("subexp(n={n}, p={p})"),
        })
    }

    /// Radial law from an unnormalised `h` and the derivative of `−ln h`;
    /// the normaliser is found by quadrature.
    pub fn from_unnormalized(
        n: usize,
        h: impl Fn(f64) -> f64 + Send + Sync + 'static,
        potential_derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
        label: impl Into<String>,
    ) -> Result<Self> {
        check_dimension(n)?;
        let nf = n as f64;
        let c = nf * unit_ball_volume(n);
        let mass = QuadratureSpec::default().integrate_to_infinity(|r| c * r.powi(n as i32 - 1) * h(r), 0.0)?;
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(invalid("radial density is not integrable"));
        }
        Ok(Self {
            n,
            h: Arc::new(move |r| h(r) / mass),
            potential_derivative: Arc::new(potential_derivative),
            label: label.into(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn h(&self, r: f64) -> f64 {
        (self.h)(r)
    }

    /// `V'(r)` where `h = e^{-V}/Z`.
    pub fn potential_derivative(&self, r: f64) -> f64 {
        (self.potential_derivative)(r)
    }

    /// `ρ(r) = n ω_n r^{n-1} h(r)`.
    pub fn radial_law(&self, r: f64) -> f64 {
        if r < 0.0 {
            return 0.0;
        }
        let v = self.h(r);
        if v == 0.0 {
            return 0.0;
        }
        let nf = self.n as f64;
        let ln_part = nf.ln() + ln_unit_ball_volume(self.n) + (nf - 1.0) * r.ln();
        if self.n == 1 {
            2.0 * v
        } else {
            ln_part.exp() * v
        }
    }
}

fn check_dimension(n: usize) -> Result<()> {
    if n == 0 {
        Err(invalid("dimension must be at least 1"))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn densities_at_origin() {
        assert_relative_eq!(Measure1D::cauchy(1.0).unwrap().density(0.0), 0.5);
        assert_relative_eq!(Measure1D::exponential().density(0.0), 0.5);
        let sub = Measure1D::subexp(1.0).unwrap();
        assert_relative_eq!(sub.density(2f64.ln()), 0.25, max_relative = 1e-14);
    }

    #[test]
    fn cauchy_cdf_and_quantile() {
        let m = Measure1D::cauchy(1.0).unwrap();
        assert_relative_eq!(m.cdf(1.0).unwrap(), 0.75);
        let m2 = Measure1D::cauchy(2.0).unwrap();
        assert_relative_eq!(m2.quantile(7.0 / 8.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(m2.sample(7.0 / 8.0).unwrap(), 1.0, max_relative = 1e-14);
        let numeric = m2.clone().numeric();
        assert_relative_eq!(numeric.quantile(7.0 / 8.0).unwrap(), 1.0, max_relative = 1e-9);
    }

    #[test]
    fn exponential_quantile() {
        let m = Measure1D::exponential();
        assert_relative_eq!(m.quantile(0.75).unwrap(), 2f64.ln(), max_relative = 1e-14);
        let numeric = m.numeric();
        assert_relative_eq!(numeric.quantile(0.75).unwrap(), 2f64.ln(), max_relative = 1e-10);
    }

    #[test]
    fn median_is_zero() {
        for m in [
            Measure1D::cauchy(0.5).unwrap(),
            Measure1D::subexp(0.3).unwrap(),
            Measure1D::vq(2.0).unwrap(),
        ] {
            assert_eq!(m.quantile(0.5).unwrap(), 0.0);
            assert_eq!(m.cdf(0.0).unwrap(), 0.5);
        }
    }

    #[test]
    fn subexp_cdf_matches_fine_simpson() {
        let m = Measure1D::subexp(0.5).unwrap();
        let z = m.normalizer();
        // ∫_0^4 e^{-√x}/Z by a fixed 10⁵-panel rule in the variable u = √x.
        let inner = quadrature::composite_simpson(&|u: f64| 2.0 * u * (-u).exp(), 0.0, 2.0, 100_000);
        let oracle = 0.5 + inner / z;
        assert!((m.cdf(4.0).unwrap() - oracle).abs() < 1e-8);
        let numeric = m.clone().numeric();
        assert!((numeric.cdf(4.0).unwrap() - oracle).abs() < 1e-8);
    }

    #[test]
    fn vq_mass_and_monotone_cdf() {
        let m = Measure1D::vq(1.5).unwrap();
        let q = QuadratureSpec::default();
        let body = q.integrate(|x| m.density(x), 0.0, 10.0).unwrap();
        assert!((body + m.tail(10.0).unwrap() - 0.5).abs() < 1e-8);
        let mut prev = 0.0;
        for i in 0..80 {
            let x = -20.0 + 0.5 * i as f64;
            let c = m.cdf(x).unwrap();
            assert!(c >= prev);
            prev = c;
        }
    }

    #[test]
    fn quantile_rejects_endpoints() {
        let m = Measure1D::exponential();
        assert!(m.quantile(0.0).is_err());
        assert!(m.quantile(1.0).is_err());
    }

    #[test]
    fn subexp_mean_abs_by_inverse_cdf_sampling() {
        use rand::{Rng, SeedableRng};
        let m = Measure1D::subexp(1.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let draws = 1_000_000;
        let mut acc = 0.0;
        for _ in 0..draws {
            let u: f64 = rng.random_range(f64::EPSILON..1.0);
            acc += m.sample(u).unwrap().abs();
        }
        let mean = acc / draws as f64;
        // Var|X| = 1 for the standard exponential.
        assert!((mean - 1.0).abs() < 3.0 / (draws as f64).sqrt(), "{mean}");
    }

    #[test]
    fn radial_laws_normalise() {
        let q = QuadratureSpec::default();
        for rm in [
            RadialMeasure::cauchy(3, 2.0).unwrap(),
            RadialMeasure::cauchy(1, 0.7).unwrap(),
            RadialMeasure::subexp(2, 0.5).unwrap(),
        ] {
            let mass = q.integrate_to_infinity(|r| rm.radial_law(r), 0.0).unwrap();
            assert!((mass - 1.0).abs() < 1e-8, "{}: {mass}", rm.label());
        }
    }

    #[test]
    fn radial_law_closed_form_point() {
        let alpha = 2.0;
        let rm = RadialMeasure::cauchy(3, alpha).unwrap();
        let w3 = unit_ball_volume(3);
        assert_relative_eq!(w3, 4.0 * std::f64::consts::PI / 3.0, max_relative = 1e-14);
        let z = rm.h(0.0).recip();
        let expected = 3.0 * w3 * 2f64.powf(-(3.0 + alpha)) / z;
        assert_relative_eq!(rm.radial_law(1.0), expected, max_relative = 1e-12);
        assert_eq!(rm.radial_law(1e6_f64.powi(60)), 0.0);
    }

    #[test]
    fn one_dimensional_radial_law_doubles_h() {
        let rm = RadialMeasure::subexp(1, 1.0).unwrap();
        assert_relative_eq!(rm.radial_law(0.0), 2.0 * rm.h(0.0));
    }
}
