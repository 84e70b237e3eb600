//! Adaptive Simpson quadrature with interval halving, plus a semi-infinite
//! rule that walks outwards over geometrically growing panels and closes the
//! sum with a geometric tail bound.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// A semi-infinite sum is closed once the estimated remaining mass is
    /// below `tail_eps` times the running total.
    pub tail_eps: f64,
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            tail_eps: 1e-12,
            max_depth: 50,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.tail_eps > 0.0) {
            return Err(invalid("quadrature tolerances must be strictly positive"));
        }
        if self.max_depth < 1 {
            return Err(invalid("quadrature depth must be at least 1"));
        }
        Ok(())
    }

    /// Same spec with every tolerance scaled by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            tail_eps: self.tail_eps * factor,
            max_depth: self.max_depth,
        }
    }

    /// `∫_a^b f`, to `max(abs_tol, rel_tol·|I|)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        if b < a {
            return self.integrate(f, b, a).map(|v| -v);
        }
        let crude = composite_simpson(&f, a, b, 16);
        let tol = self.abs_tol.max(self.rel_tol * crude.abs());
        self.adaptive(&f, a, b, tol)
    }

    /// `∫_a^b f` to a purely relative tolerance; used for tail masses that
    /// can be far below `abs_tol`.
    pub fn integrate_relative<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        let crude = composite_simpson(&f, a, b, 16);
        let tol = (self.rel_tol * crude.abs()).max(f64::MIN_POSITIVE);
        self.adaptive(&f, a, b, tol)
    }

    /// `∫_a^∞ f` for a non-negative, eventually decreasing integrand, to a
    /// relative tolerance. Panels are `[a, a + w]`, `[a + w, a + 3w]`, … with
    /// doubling widths; once panel masses decay geometrically the remainder
    /// is bounded by the geometric series and added to the result.
    pub fn integrate_to_infinity<F: Fn(f64) -> f64>(&self, f: F, a: f64) -> Result<f64> {
        let mut width = a.abs().max(1.0);
        let mut left = a;
        let mut total = 0.0;
        let mut prev_piece = f64::NAN;
        for _ in 0..1100 {
            let right = left + width;
            if !(right < 1e300) {
                if total == 0.0 {
                    return Ok(0.0);
                }
                break;
            }
            let piece = self.integrate_relative(&f, left, right)?;
            total += piece;
            if piece == 0.0 && total > 0.0 {
                return Ok(total);
            }
            let ratio = piece / prev_piece;
            if ratio.is_finite() && (0.0..1.0).contains(&ratio) {
                let remainder = piece * ratio / (1.0 - ratio);
                if remainder <= self.tail_eps * total {
                    return Ok(total + remainder);
                }
            }
            prev_piece = piece;
            left = right;
            width *= 2.0;
        }
        Err(Error::QuadratureNonConvergence { a, b: f64::INFINITY })
    }

    fn adaptive<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
        let fa = f(a);
        let fb = f(b);
        let m = 0.5 * (a + b);
        let fm = f(m);
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        simpson_step(f, a, b, fa, fm, fb, whole, tol, self.max_depth)
    }
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return Err(Error::QuadratureNonConvergence { a, b });
    }
    let unresolvable = b - a <= 1e-11 * a.abs().max(b.abs());
    if delta.abs() <= 15.0 * tol || unresolvable || m <= a || m >= b {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::QuadratureNonConvergence { a, b });
    }
    let l = simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}

/// Fixed composite Simpson rule with `panels` (even) sub-intervals.
pub fn composite_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels.max(2) & !1;
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * i as f64);
    }
    acc * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = QuadratureSpec::default();
        let v = q.integrate(|x| x * x * x - x, 0.0, 2.0).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_tail() {
        let q = QuadratureSpec::default();
        let v = q.integrate_to_infinity(|x| (-x).exp(), 3.0).unwrap();
        assert!((v / (-3f64).exp() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn polynomial_tail_keeps_mass() {
        // α = 1/2 Cauchy-type tail: ∫_0^∞ (α/2)(1+x)^{-3/2} = 1/2.
        let q = QuadratureSpec::default();
        let v = q.integrate_to_infinity(|x| 0.25 * (1.0 + x).powf(-1.5), 0.0).unwrap();
        assert!((v - 0.5).abs() < 1e-9, "{v}");
    }

    #[test]
    fn depth_exhaustion_is_reported() {
        let q = QuadratureSpec {
            max_depth: 2,
            abs_tol: 1e-14,
            rel_tol: 1e-14,
            ..Default::default()
        };
        let r = q.integrate(|x| (1.0 / (x + 1e-9)).sin(), 0.0, 1.0);
        assert!(matches!(r, Err(Error::QuadratureNonConvergence { .. })));
    }

    #[test]
    fn rejects_bad_spec() {
        let q = QuadratureSpec {
            abs_tol: 0.0,
            ..Default::default()
        };
        assert!(q.validate().is_err());
    }
}
