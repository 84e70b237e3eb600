//! Isoperimetric functions of symmetric laws on the line.
//!
//! `J_μ = F'_μ ∘ F_μ^{-1}` is the boundary measure of half-lines; for even
//! laws with positive density the true profile is
//! `I_μ(t) = min(J_μ(t), 2 J_μ(min(t, 1-t)/2))`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::measures::{Family, Measure1D, Phi};
use crate::numeric::derivative;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    J,
    I,
    LowerBound,
    LPhi,
}

type ProfileFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// A map `t ↦ value` on `(0, 1)`.
#[derive(Clone)]
pub struct ProfileFunction {
    kind: ProfileKind,
    symmetric: bool,
    eval: ProfileFn,
}

impl fmt::Debug for ProfileFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProfileFunction")
            .field("kind", &self.kind)
            .field("symmetric", &self.symmetric)
            .finish()
    }
}

impl ProfileFunction {
    pub fn from_fn(kind: ProfileKind, symmetric: bool, f: impl Fn(f64) -> Result<f64> + Send + Sync + 'static) -> Self {
        Self {
            kind,
            symmetric,
            eval: Arc::new(f),
        }
    }

    pub fn j(m: &Measure1D) -> Self {
        let m = m.clone();
        Self::from_fn(ProfileKind::J, true, move |t| iso_j(&m, t))
    }

    pub fn i(m: &Measure1D) -> Self {
        let m = m.clone();
        Self::from_fn(ProfileKind::I, true, move |t| iso_i_even(&m, t))
    }

    /// `L_Φ(t) = min(t,1-t) Φ'∘Φ^{-1}(log(1/min(t,1-t)))`, defined on all of
    /// `(0, 1)` only when `Φ(0) < log 2`.
    pub fn l_phi(phi: &Phi) -> Result<Self> {
        let at_zero = phi.value(0.0);
        if !(at_zero < std::f64::consts::LN_2) {
            return Err(invalid(format!("L_Phi needs Phi(0) < log 2, got Phi(0) = {at_zero}")));
        }
        let phi = phi.clone();
        Ok(Self::from_fn(ProfileKind::LPhi, true, move |t| {
            let m = t.min(1.0 - t);
            Ok(m * phi.derivative_at_inverse((1.0 / m).ln())?)
        }))
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t < 1.0) {
            return Err(invalid(format!("profile argument must lie in (0, 1), got {t}")));
        }
        (self.eval)(t)
    }
}

/// `J_μ(t)`.
pub fn iso_j(m: &Measure1D, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(invalid(format!("profile argument must lie in (0, 1), got {t}")));
    }
    let s = t.min(1.0 - t);
    if m.has_closed_form() {
        match m.family() {
            Family::Cauchy { alpha } => return Ok(alpha * 2f64.powf(1.0 / alpha) * s.powf(1.0 + 1.0 / alpha)),
            Family::Exponential => return Ok(s),
            _ => {}
        }
    }
    Ok(m.density(m.tail_inverse(s)?))
}

/// `I_μ(t) = min(J_μ(t), 2 J_μ(min(t,1-t)/2))`.
pub fn iso_i_even(m: &Measure1D, t: f64) -> Result<f64> {
    let j = iso_j(m, t)?;
    let half = iso_j(m, 0.5 * t.min(1.0 - t))?;
    Ok(j.min(2.0 * half))
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvexityReport {
    pub pass: bool,
    /// Most negative increment between consecutive slopes (0 if none).
    pub worst_violation: f64,
    pub worst_at: f64,
    pub tolerance: f64,
}

/// Checks that `log F̄_μ` is convex on the grid (decreasing hazard rate) by
/// requiring slopes between consecutive points to be non-decreasing.
pub fn dhr_check(m: &Measure1D, grid: &[f64]) -> Result<ConvexityReport> {
    if grid.len() < 3 {
        return Err(invalid("convexity check needs at least 3 grid points"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || grid[0] < 0.0 {
        return Err(invalid("grid must be strictly increasing and non-negative"));
    }
    let mut logs: Vec<f64> = grid.iter().map(|&x| m.tail(x).map(f64::ln)).collect::<Result<_>>()?;
    // Points past tail underflow carry no information.
    if let Some(end) = logs.iter().position(|v| !v.is_finite()) {
        logs.truncate(end);
    }
    if logs.len() < 3 {
        return Err(invalid("tail underflows before three grid points"));
    }
    let grid = &grid[..logs.len()];
    let scale = logs.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let tolerance = 1e-9 * scale;
    let slopes: Vec<f64> = grid
        .windows(2)
        .zip(logs.windows(2))
        .map(|(x, l)| (l[1] - l[0]) / (x[1] - x[0]))
        .collect();
    let mut worst = 0.0f64;
    let mut worst_at = grid[0];
    for (i, w) in slopes.windows(2).enumerate() {
        let d = w[1] - w[0];
        if d < worst {
            worst = d;
            worst_at = grid[i + 1];
        }
    }
    Ok(ConvexityReport {
        pass: worst >= -tolerance,
        worst_violation: worst,
        worst_at,
        tolerance,
    })
}

/// Checks that `J(t)/J_μ(t) = t/J_μ(t)` is non-increasing on a grid inside
/// `(0, 1/2]`.
pub fn slope_monotonicity_check(m: &Measure1D, grid: &[f64]) -> Result<ConvexityReport> {
    if grid.iter().any(|&t| !(t > 0.0 && t <= 0.5)) {
        return Err(invalid("slope grid must lie in (0, 1/2]"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("slope grid must be strictly increasing"));
    }
    let ratios: Vec<f64> = grid
        .iter()
        .map(|&t| iso_j(m, t).map(|j| t / j))
        .collect::<Result<_>>()?;
    let tolerance = 1e-8;
    let mut worst = 0.0f64;
    let mut worst_at = grid[0];
    for (i, w) in ratios.windows(2).enumerate() {
        // Relative decrease is fine; a relative increase is a violation.
        let d = -(w[1] - w[0]) / w[0].abs().max(f64::MIN_POSITIVE);
        if d < worst {
            worst = d;
            worst_at = grid[i + 1];
        }
    }
    Ok(ConvexityReport {
        pass: worst >= -tolerance,
        worst_violation: worst,
        worst_at,
        tolerance,
    })
}

/// The `Φ` with `density ∝ e^{-Φ(|x|)}`, for the families that carry one.
pub fn family_phi(m: &Measure1D) -> Result<Phi> {
    match m.family() {
        Family::Phi(phi) => Ok(phi.clone()),
        Family::SubExponential { p } => Phi::power(*p),
        Family::Exponential => Ok(Phi::linear()),
        _ => Err(invalid("measure is not of the form exp(-Phi(|x|))")),
    }
}

/// `J_μ(t) / (t Φ'∘Φ^{-1}(log 1/t))` for `t ∈ (0, 1/2)`.
pub fn phi_asymptotic_ratio(m: &Measure1D, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 0.5) {
        return Err(invalid(format!("ratio argument must lie in (0, 1/2), got {t}")));
    }
    let phi = family_phi(m)?;
    let shape = t * phi.derivative_at_inverse((1.0 / t).ln())?;
    Ok(iso_j(m, t)? / shape)
}

/// Extreme values of `J_μ / L_Φ` over the grid: the tightest `(k₁, k₂)`
/// with `k₁ L_Φ ≤ J_μ ≤ k₂ L_Φ` there.
pub fn phi_sandwich(m: &Measure1D, grid: &[f64]) -> Result<(f64, f64)> {
    let phi = family_phi(m)?;
    let l = ProfileFunction::l_phi(&phi)?;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for &t in grid {
        let r = iso_j(m, t)? / l.value(t)?;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok((lo, hi))
}

#[derive(Debug, Clone, Serialize)]
pub struct PhiRegularityReport {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub theta: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub grid_points: usize,
}

/// Tightest constants of the four regularity clauses on a log grid over
/// `x_range` (which must sit inside `(1, ∞)`):
/// (i) `c₁⁻¹ xΦ' ≤ Φ ≤ c₁ xΦ'`, (ii) `Φ ≥ x^{c₂}`, (iii) `Φ' ≥ x^{-c₃}`,
/// (iv) `Φ(c₄ x) ≤ Φ(x)/2`.
pub fn phi_regularity(phi: &Phi, theta: f64, x_range: (f64, f64)) -> Result<PhiRegularityReport> {
    let (x_min, x_max) = x_range;
    if !(x_min > 1.0 && x_max > x_min) {
        return Err(invalid("regularity range must satisfy 1 < x_min < x_max"));
    }
    if !(theta > 1.0) {
        return Err(invalid(format!("convexity exponent must exceed 1, got {theta}")));
    }
    let grid = crate::numeric::logspace(x_min, x_max, 400);
    let at_zero = phi.value(0.0);
    let (mut c1, mut c2, mut c3, mut c4) = (1.0f64, f64::INFINITY, 0.0f64, f64::INFINITY);
    for &x in &grid {
        let v = phi.value(x);
        let d = phi.derivative(x);
        if !(v > 0.0 && d > 0.0) {
            return Err(Error::RegularityViolation {
                clause: "i",
                detail: format!("Phi or Phi' not positive at x = {x}"),
            });
        }
        let ratio = v / (x * d);
        c1 = c1.max(ratio).max(1.0 / ratio);
        c2 = c2.min(v.ln() / x.ln());
        c3 = c3.max(-d.ln() / x.ln());
        let half = 0.5 * v;
        if half <= at_zero {
            return Err(Error::RegularityViolation {
                clause: "iv",
                detail: format!("Phi(x)/2 <= Phi(0) at x = {x}"),
            });
        }
        c4 = c4.min(phi.inverse(half)? / x);
    }
    if !(c2 > 0.0) {
        return Err(Error::RegularityViolation {
            clause: "ii",
            detail: format!("no positive power lies below Phi (best exponent {c2})"),
        });
    }
    let c2 = c2.min(1.0);
    if !(c4 > 0.0 && c4 < 1.0) {
        return Err(Error::RegularityViolation {
            clause: "iv",
            detail: format!("halving constant {c4} outside (0, 1)"),
        });
    }
    Ok(PhiRegularityReport {
        c1,
        c2,
        c3,
        c4,
        theta,
        x_min,
        x_max,
        grid_points: grid.len(),
    })
}

/// Central-difference check that `Φ^θ` is convex on the report's range.
pub fn phi_power_convex(phi: &Phi, theta: f64, x_range: (f64, f64)) -> bool {
    let g = |x: f64| phi.value(x).powf(theta);
    crate::numeric::logspace(x_range.0, x_range.1, 200)
        .windows(2)
        .all(|w| derivative(g, w[1], 0.0) >= derivative(g, w[0], 0.0) * (1.0 - 1e-9))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{linspace, logspace};
    use approx::assert_relative_eq;

    #[test]
    fn exponential_and_cauchy_profiles() {
        let e = Measure1D::exponential();
        assert_relative_eq!(iso_j(&e, 0.3).unwrap(), 0.3);
        let c = Measure1D::cauchy(2.0).unwrap();
        assert_relative_eq!(iso_j(&c, 0.1).unwrap(), 0.089_442_719_099_991_6, max_relative = 1e-12);
        let numeric = c.clone().numeric();
        assert_relative_eq!(
            iso_j(&numeric, 0.1).unwrap(),
            0.089_442_719_099_991_6,
            max_relative = 1e-8
        );
        assert_relative_eq!(iso_j(&c, 0.5).unwrap(), c.density(0.0));
    }

    #[test]
    fn even_profile_branches() {
        let c = Measure1D::cauchy(1.0).unwrap();
        assert_relative_eq!(iso_i_even(&c, 0.25).unwrap(), 0.0625, max_relative = 1e-12);
        assert_relative_eq!(iso_i_even(&Measure1D::exponential(), 0.5).unwrap(), 0.5);
    }

    #[test]
    fn even_profile_subexp_matches_two_branch_oracle() {
        let m = Measure1D::subexp(0.5).unwrap().numeric();
        let direct = |t: f64| m.density(m.tail_inverse(t).unwrap());
        let oracle = direct(0.1).min(2.0 * direct(0.05));
        assert!((iso_i_even(&m, 0.1).unwrap() - oracle).abs() < 1e-6);
    }

    #[test]
    fn dhr_and_slope_checks_agree() {
        let grid = linspace(0.0, 20.0, 201);
        let tgrid = logspace(1e-4, 0.5, 60);
        let gauss = Measure1D::phi_measure(Phi::quadratic()).unwrap();
        for (m, expect) in [
            (Measure1D::cauchy(3.0).unwrap(), true),
            (Measure1D::cauchy(2.0).unwrap(), true),
            (Measure1D::subexp(0.5).unwrap(), true),
            (Measure1D::exponential(), true),
            (gauss, false),
        ] {
            let a = dhr_check(&m, &grid[..if expect { 201 } else { 50 }]).unwrap();
            let b = slope_monotonicity_check(&m, &tgrid).unwrap();
            assert_eq!(a.pass, expect, "{:?}", m.describe());
            assert_eq!(b.pass, expect, "{:?}", m.describe());
        }
    }

    #[test]
    fn regularity_constants() {
        let r = phi_regularity(&Phi::power(0.5).unwrap(), 2.0, (2.0, 1e4)).unwrap();
        assert_relative_eq!(r.c1, 2.0, max_relative = 1e-12);
        let lin = phi_regularity(&Phi::linear(), 1.5, (2.0, 100.0)).unwrap();
        assert_relative_eq!(lin.c1, 1.0);
        assert_relative_eq!(lin.c4, 0.5, max_relative = 1e-12);
        let pl = Phi::power_log(0.5, 1.0, std::f64::consts::E).unwrap();
        let rep = phi_regularity(&pl, 2.0, (10.0, 1e4)).unwrap();
        assert!(rep.c1.is_finite() && rep.c3.is_finite() && rep.c2 > 0.0 && rep.c4 < 1.0);
        assert!(phi_power_convex(&pl, 2.0, (10.0, 1e4)));
    }

    #[test]
    fn regularity_names_failed_clause() {
        let flat = Phi::new("constant", |_| 0.5);
        match phi_regularity(&flat, 2.0, (2.0, 10.0)) {
            Err(Error::RegularityViolation { clause, .. }) => assert_eq!(clause, "i"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn l_phi_guard() {
        assert!(ProfileFunction::l_phi(&Phi::new("shifted", |x: f64| x.sqrt() + 1.0)).is_err());
        assert!(ProfileFunction::l_phi(&Phi::power(0.5).unwrap()).is_ok());
    }

    #[test]
    fn exponential_boundary_ratio() {
        let m = Measure1D::exponential();
        assert_relative_eq!(phi_asymptotic_ratio(&m, 0.01).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn sandwich_brackets_power_three_quarters() {
        let m = Measure1D::subexp(0.75).unwrap();
        let grid = logspace(1e-8, 0.49, 40);
        let (k1, k2) = phi_sandwich(&m, &grid).unwrap();
        let r = phi_asymptotic_ratio(&m, 1e-6).unwrap();
        assert!(k1 > 0.0 && k1 <= r && r <= k2);
    }
}
