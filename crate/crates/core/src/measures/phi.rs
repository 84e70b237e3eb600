use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::numeric::{bisect, derivative, grow_bracket};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// An increasing function `Φ: ℝ⁺ → ℝ` used as the potential `Φ(|x|)` of a
/// symmetric law, with optional closed-form derivative and inverse.
#[derive(Clone)]
pub struct Phi {
    label: String,
    f: RealFn,
    df: Option<RealFn>,
    inv: Option<RealFn>,
}

impl fmt::Debug for Phi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Phi").field("label", &self.label).finish()
    }
}

impl Phi {
    pub fn new(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            f: Arc::new(f),
            df: None,
            inv: None,
        }
    }

    pub fn with_derivative(mut self, df: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.df = Some(Arc::new(df));
        self
    }

    pub fn with_inverse(mut self, inv: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.inv = Some(Arc::new(inv));
        self
    }

    /// `Φ(x) = x^p`.
    pub fn power(p: f64) -> Result<Self> {
        if !(p > 0.0) {
            return Err(invalid(format!("power exponent must be positive, got {p}")));
        }
        Ok(Self::new(format!("x^{p}"), move |x: f64| x.powf(p))
            .with_derivative(move |x: f64| p * x.powf(p - 1.0))
            .with_inverse(move |y: f64| y.max(0.0).powf(1.0 / p)))
    }

    pub fn linear() -> Self {
        Self::new("x", |x| x)
            .with_derivative(|_| 1.0)
            .with_inverse(|y| y.max(0.0))
    }

    pub fn quadratic() -> Self {
        Self::new("x^2", |x| x * x)
            .with_derivative(|x| 2.0 * x)
            .with_inverse(|y: f64| y.max(0.0).sqrt())
    }

    /// `Φ(x) = x^p · log(γ + x)^a`.
    pub fn power_log(p: f64, a: f64, gamma: f64) -> Result<Self> {
        if !(p > 0.0) || !(gamma >= 1.0) {
            return Err(invalid(format!(
                "power-log needs p > 0 and gamma >= 1, got p={p}, gamma={gamma}"
            )));
        }
        Ok(Self::new(format!("x^{p}*log({gamma}+x)^{a}"), move |x: f64| {
            x.powf(p) * (gamma + x).ln().powf(a)
        })
        .with_derivative(move |x: f64| {
            let l = (gamma + x).ln();
            p * x.powf(p - 1.0) * l.powf(a) + x.powf(p) * a * l.powf(a - 1.0) / (gamma + x)
        }))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match &self.df {
            Some(df) => df(x),
            None => derivative(&*self.f, x, 0.0),
        }
    }

    /// `Φ^{-1}(y)` on `[0, ∞)`; values at or below `Φ(0)` map to 0.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if let Some(inv) = &self.inv {
            return Ok(inv(y));
        }
        if y <= self.value(0.0) {
            return Ok(0.0);
        }
        let hi = grow_bracket(|x| self.value(x) >= y, 1e300)?;
        bisect(|x| self.value(x) - y, 0.0, hi, 1e-15 * hi)
    }

    /// `Φ' ∘ Φ^{-1}(y)`.
    pub fn derivative_at_inverse(&self, y: f64) -> Result<f64> {
        Ok(self.derivative(self.inverse(y)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generic_inverse_matches_closed_form() {
        let closed = Phi::power(0.5).unwrap();
        let generic = Phi::new("sqrt", |x: f64| x.sqrt());
        for y in [0.3, 2.0, 17.0] {
            let a = closed.inverse(y).unwrap();
            let b = generic.inverse(y).unwrap();
            assert!((a - b).abs() < 1e-10 * a, "{a} {b}");
        }
        assert!((generic.derivative(4.0) - 0.25).abs() < 1e-8);
    }

    #[test]
    fn power_log_derivative() {
        let phi = Phi::power_log(0.5, 1.0, std::f64::consts::E).unwrap();
        let x = 7.0;
        let numeric = derivative(|x| phi.value(x), x, 0.0);
        assert!((phi.derivative(x) - numeric).abs() < 1e-7);
    }
}
