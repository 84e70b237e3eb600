//! Bobkov's correspondence between weak Cheeger rates and isoperimetric
//! functions:
//!
//! ```text
//! β(s) = sup_{s ≤ t ≤ 1/2} (t - s) / I(t)      I(t) = sup_{0 < s ≤ t} (t - s) / β(s)
//! ```
//!
//! Both suprema are taken on a 2048-point log grid and refined by
//! golden-section search around the grid maximiser.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::isoperimetry::ProfileFunction;
use crate::numeric::{golden_max, logspace};

const GRID_POINTS: usize = 2048;
const EDGE: f64 = 1e-12;

type RateFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// A non-increasing rate `s ↦ β(s)` on `(0, 1/2)`.
#[derive(Clone)]
pub struct RateFunction {
    eval: RateFn,
    non_increasing: bool,
    label: String,
}

impl fmt::Debug for RateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RateFunction")
            .field("label", &self.label)
            .field("non_increasing", &self.non_increasing)
            .finish()
    }
}

impl RateFunction {
    pub fn from_fn(label: impl Into<String>, f: impl Fn(f64) -> Result<f64> + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(f),
            non_increasing: true,
            label: label.into(),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_fn(format!("constant({c})"), move |_| Ok(c))
    }

    /// `β = beta_from_profile(I, ·)`, evaluated lazily.
    pub fn from_profile(profile: &ProfileFunction) -> Self {
        let profile = profile.clone();
        Self::from_fn("bobkov(I)", move |s| beta_from_profile(&profile, s))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_non_increasing(&self) -> bool {
        self.non_increasing
    }

    pub fn value(&self, s: f64) -> Result<f64> {
        (self.eval)(s)
    }
}

fn grid_sup<F: Fn(f64) -> Result<f64>>(f: F, lo: f64, hi: f64) -> Result<f64> {
    let grid = logspace(lo, hi, GRID_POINTS);
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, &x) in grid.iter().enumerate() {
        let v = f(x)?;
        if v > best.1 {
            best = (i, v);
        }
    }
    let (i, v) = best;
    let a = grid[i.saturating_sub(1)];
    let b = grid[(i + 1).min(grid.len() - 1)];
    if b > a {
        let (_, refined) = golden_max(|x| f(x).unwrap_or(f64::NEG_INFINITY), a, b, 1e-15 * b);
        if refined > v {
            return Ok(refined);
        }
    }
    Ok(v)
}

/// `β(s) = sup_{t ∈ [s, 1/2]} (t - s) / I(t)`.
pub fn beta_from_profile(profile: &ProfileFunction, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(invalid(format!("rate argument must be positive, got {s}")));
    }
    let hi = 0.5 - EDGE;
    if s >= hi {
        return Ok(0.0);
    }
    let lo = s.max(EDGE);
    grid_sup(
        |t| {
            let i = profile.value(t)?;
            if !(i > 0.0) {
                return Err(Error::DivisionByZero(format!("profile vanishes at t = {t}")));
            }
            Ok((t - s) / i)
        },
        lo,
        hi,
    )
}

/// `I(t) = sup_{s ∈ (0, t]} (t - s) / β(s)`.
pub fn profile_from_beta(beta: &RateFunction, t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 0.5) {
        return Err(invalid(format!("profile argument must lie in (0, 1/2], got {t}")));
    }
    let t = t.min(0.5 - EDGE);
    if t <= EDGE {
        return Ok(0.0);
    }
    grid_sup(
        |s| {
            if s >= t {
                return Ok(0.0);
            }
            let b = beta.value(s)?;
            if !(b > 0.0) {
                return Err(Error::DivisionByZero(format!("rate vanishes at s = {s}")));
            }
            Ok((t - s) / b)
        },
        EDGE,
        t,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isoperimetry::ProfileKind;

    fn exp_profile() -> ProfileFunction {
        ProfileFunction::from_fn(ProfileKind::J, true, |t| Ok(t.min(1.0 - t)))
    }

    #[test]
    fn exponential_rate() {
        let b = beta_from_profile(&exp_profile(), 0.1).unwrap();
        assert!((b - 0.8).abs() < 1e-9, "{b}");
        assert_eq!(beta_from_profile(&exp_profile(), 0.5).unwrap(), 0.0);
    }

    #[test]
    fn power_profile_matches_dense_grid() {
        let p = ProfileFunction::from_fn(ProfileKind::J, false, |t| Ok(2.0 * t.powf(1.5)));
        let s = 0.05;
        let n = 1_000_000;
        let oracle = (0..=n)
            .map(|i| s + (0.5 - s) * i as f64 / n as f64)
            .map(|t| (t - s) / (2.0 * t.powf(1.5)))
            .fold(0.0f64, f64::max);
        let b = beta_from_profile(&p, s).unwrap();
        assert!((b - oracle).abs() < 1e-6 && b >= oracle - 1e-12);
    }

    #[test]
    fn constant_rate_gives_linear_profile() {
        let i = profile_from_beta(&RateFunction::constant(2.0), 0.4).unwrap();
        assert!((i - 0.2).abs() < 1e-10);
    }

    #[test]
    fn round_trip_is_below_profile() {
        let beta = RateFunction::from_profile(&exp_profile());
        for t in [0.05, 0.2, 0.45] {
            let back = profile_from_beta(&beta, t).unwrap();
            assert!(back <= t.min(1.0 - t) * (1.0 + 1e-9), "{t}: {back}");
        }
    }

    #[test]
    fn vanishing_profile_is_rejected() {
        let p = ProfileFunction::from_fn(ProfileKind::J, true, |_| Ok(0.0));
        assert!(matches!(beta_from_profile(&p, 0.1), Err(Error::DivisionByZero(_))));
    }
}
