use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// An even potential `V` on the line, described on `x ≥ 0` by its value and
/// first two derivatives. The law is `e^{-V(x)} dx` up to normalisation.
#[derive(Clone)]
pub struct Potential {
    label: String,
    v: RealFn,
    d1: RealFn,
    d2: RealFn,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential").field("label", &self.label).finish()
    }
}

impl Potential {
    pub fn new(
        label: impl Into<String>,
        v: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            v: Arc::new(v),
            d1: Arc::new(d1),
            d2: Arc::new(d2),
        }
    }

    /// `V(x) = x`.
    pub fn linear() -> Self {
        Self::new("x", |x| x, |_| 1.0, |_| 0.0)
    }

    /// `V(x) = x^p` on `x > 0`.
    pub fn power(p: f64) -> Result<Self> {
        if !(p > 0.0) {
            return Err(invalid(format!("power must be positive, got {p}")));
        }
        Ok(Self::new(
            format!("x^{p}"),
            move |x: f64| x.powf(p),
            move |x: f64| p * x.powf(p - 1.0),
            move |x: f64| p * (p - 1.0) * x.powf(p - 2.0),
        ))
    }

    /// `V(x) = (1 + x²)^{p/2} − 1`, a smooth stand-in for `|x|^p`.
    pub fn smoothed_power(p: f64) -> Result<Self> {
        if !(p > 0.0) {
            return Err(invalid(format!("power must be positive, got {p}")));
        }
        let h = 0.5 * p;
        Ok(Self::new(
            format!("(1+x^2)^{h}-1"),
            move |x: f64| (1.0 + x * x).powf(h) - 1.0,
            move |x: f64| 2.0 * h * x * (1.0 + x * x).powf(h - 1.0),
            move |x: f64| {
                let s = 1.0 + x * x;
                2.0 * h * s.powf(h - 1.0) + 4.0 * h * (h - 1.0) * x * x * s.powf(h - 2.0)
            },
        ))
    }

    /// `V(x) = c log(1 + x²)`.
    pub fn log_cauchy(c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(invalid(format!("log coefficient must be positive, got {c}")));
        }
        Ok(Self::new(
            format!("{c}*log(1+x^2)"),
            move |x: f64| c * (x * x).ln_1p(),
            move |x: f64| 2.0 * c * x / (1.0 + x * x),
            move |x: f64| {
                let s = 1.0 + x * x;
                2.0 * c * (1.0 - x * x) / (s * s)
            },
        ))
    }

    /// `V(x) = ln(2+x) + q ln ln(2+x)`, the potential of the `V_q` law.
    pub fn vq(q: f64) -> Result<Self> {
        if !(q > 1.0) {
            return Err(invalid(format!("q must exceed 1, got {q}")));
        }
        Ok(Self::new(
            format!("vq(q={q})"),
            move |x: f64| {
                let l = (2.0 + x).ln();
                l + q * l.ln()
            },
            move |x: f64| {
                let l = (2.0 + x).ln();
                (1.0 + q / l) / (2.0 + x)
            },
            move |x: f64| {
                let s = 2.0 + x;
                let l = s.ln();
                -(1.0 + q / l) / (s * s) - q / (l * l * s * s)
            },
        ))
    }

    /// Same potential shifted by a constant.
    pub fn shifted(&self, c: f64) -> Self {
        let v = self.v.clone();
        Self {
            label: format!("{}+{c}", self.label),
            v: Arc::new(move |x| v(x) + c),
            d1: self.d1.clone(),
            d2: self.d2.clone(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.v)(x.abs())
    }

    /// `V'(|x|)`.
    pub fn d1(&self, x: f64) -> f64 {
        (self.d1)(x.abs())
    }

    /// `V''(|x|)`.
    pub fn d2(&self, x: f64) -> f64 {
        (self.d2)(x.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::derivative;

    #[test]
    fn derivatives_match_finite_differences() {
        for pot in [
            Potential::smoothed_power(0.5).unwrap(),
            Potential::log_cauchy(2.0).unwrap(),
            Potential::vq(1.5).unwrap(),
            Potential::power(0.5).unwrap(),
        ] {
            for x in [0.7, 3.0, 40.0] {
                let d1 = derivative(|y| pot.value(y), x, 0.0);
                let d2 = derivative(|y| pot.d1(y), x, 0.0);
                assert!((pot.d1(x) - d1).abs() < 1e-6 * (1.0 + d1.abs()), "{}", pot.label());
                assert!((pot.d2(x) - d2).abs() < 1e-6 * (1.0 + d2.abs()), "{}", pot.label());
            }
        }
    }
}
