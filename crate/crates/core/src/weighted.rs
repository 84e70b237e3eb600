//! Weighted Poincaré constants on the line: an upper bound through the
//! Muckenhoupt criterion for Hardy inequalities, and certified lower bounds
//! through explicit test functions.
//!
//! For an even potential `V` and a weight `1 + η²` the Muckenhoupt quantity
//!
//! ```text
//! B = sup_{y>0} ( ∫_y^∞ e^{-V} ) ( ∫_0^y e^{V} / (1 + η²) )
//! ```
//!
//! gives `Var_μ(g) ≤ 4B ∫ g'² (1 + η²) dμ`. Both integrals are taken after
//! multiplying through by `e^{∓V(y)}`, which leaves the product unchanged and
//! keeps every integrand of order one.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::measures::{Measure1D, Potential, QuadratureSpec};
use crate::numeric::{logspace, refined_grid_sup};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A non-negative even weight on the line.
#[derive(Clone)]
pub struct Weight {
    label: String,
    f: RealFn,
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Weight").field(&self.label).finish()
    }
}

impl Weight {
    pub fn new(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            f: Arc::new(f),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("{c}"), move |_| c)
    }

    /// `(1 + |x|)^k`.
    pub fn power(k: f64) -> Self {
        Self::new(format!("(1+|x|)^{k}"), move |x: f64| (1.0 + x.abs()).powf(k))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.f)(x.abs())
    }
}

/// Where a reported constant came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bound {
    pub value: f64,
    pub provenance: String,
}

/// Two-sided information about the optimal constant `C` in
/// `Var_μ(g) ≤ C ∫ g'² ω dμ`.
#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub inequality: String,
    pub weight: String,
    pub upper: Option<Bound>,
    pub lower: Option<Bound>,
    pub grid_points: usize,
}

impl InequalityReport {
    pub fn new(inequality: impl Into<String>, weight: impl Into<String>) -> Self {
        Self {
            inequality: inequality.into(),
            weight: weight.into(),
            upper: None,
            lower: None,
            grid_points: 0,
        }
    }

    pub fn with_upper(mut self, value: f64, provenance: impl Into<String>) -> Self {
        self.upper = Some(Bound {
            value,
            provenance: provenance.into(),
        });
        self
    }

    pub fn with_lower(mut self, value: f64, provenance: impl Into<String>) -> Self {
        self.lower = Some(Bound {
            value,
            provenance: provenance.into(),
        });
        self
    }

    /// `lower ≤ upper` whenever both are present.
    pub fn is_consistent(&self) -> bool {
        match (&self.upper, &self.lower) {
            (Some(u), Some(l)) => l.value <= u.value,
            _ => true,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MuckenhouptReport {
    pub b: f64,
    /// `4B`, the weighted Poincaré constant.
    pub variance_constant: f64,
    pub argmax: f64,
    /// `1 − sup |V''|/V'²` on `[x₀, 10⁴ max(x₀, 1)]`.
    pub epsilon: f64,
    pub grid_points: usize,
}

const Y_MIN: f64 = 1e-3;
const Y_MAX: f64 = 1e3;

/// `∫_0^y e^{V(x) − V(y)} / (1 + η(x)²) dx` over panels that shrink
/// geometrically towards `y`, where the integrand concentrates.
fn scaled_inner(quad: &QuadratureSpec, v: &Potential, eta: &Weight, y: f64) -> Result<f64> {
    let vy = v.value(y);
    let f = |x: f64| (v.value(x) - vy).exp() / (1.0 + eta.value(x).powi(2));
    let mut total = 0.0;
    let mut left = 0.0;
    for j in 1..=60 {
        let right = y * (1.0 - 0.5f64.powi(j));
        total += quad.integrate(f, left, right)?;
        left = right;
    }
    total += quad.integrate(f, left, y)?;
    Ok(total)
}

fn scaled_tail(quad: &QuadratureSpec, v: &Potential, y: f64) -> Result<f64> {
    let vy = v.value(y);
    quad.integrate_to_infinity(|x| (vy - v.value(x)).exp(), y)
}

/// Muckenhoupt's `B` for `e^{-V}` with weight `1 + η²`, the supremum taken on
/// a log grid of `grid_points` values of `y ∈ [10⁻³, 10³]` and refined around
/// the grid maximiser.
///
/// `V'` must not vanish and `|V''|/V'²` must stay below one on `[x₀, ∞)`;
/// both are checked on a log grid reaching `10⁴ max(x₀, 1)`.
pub fn muckenhoupt_b(
    v: &Potential,
    eta: &Weight,
    x0: f64,
    grid_points: usize,
    quad: &QuadratureSpec,
) -> Result<MuckenhouptReport> {
    if !(x0 >= 0.0 && x0.is_finite()) {
        return Err(invalid(format!("x0 must be a non-negative number, got {x0}")));
    }
    if grid_points < 3 {
        return Err(invalid("the y-grid needs at least three points"));
    }
    quad.validate()?;
    let mut worst = 0.0f64;
    for x in logspace(x0.max(1e-6), 1e4 * x0.max(1.0), 2000) {
        let d1 = v.d1(x);
        if d1 == 0.0 || !d1.is_finite() {
            return Err(Error::HypothesisViolation(format!("V' vanishes at x = {x}")));
        }
        worst = worst.max(v.d2(x).abs() / (d1 * d1));
    }
    if !(worst < 1.0) {
        return Err(Error::HypothesisViolation(format!(
            "|V''|/V'^2 reaches {worst} on [x0, inf) with x0 = {x0}"
        )));
    }

    let grid = logspace(Y_MIN, Y_MAX, grid_points);
    let failure = std::cell::RefCell::new(None);
    let product = |y: f64| {
        let value = scaled_tail(quad, v, y).and_then(|t| Ok(t * scaled_inner(quad, v, eta, y)?));
        value.unwrap_or_else(|e| {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        })
    };
    let (argmax, b) = refined_grid_sup(product, &grid)
        .ok_or_else(|| Error::SearchFailure("no finite Muckenhoupt product on the grid".into()))?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(MuckenhouptReport {
        b,
        variance_constant: 4.0 * b,
        argmax,
        epsilon: 1.0 - worst,
        grid_points,
    })
}

/// Odd test functions `g` whose Rayleigh quotients
/// `Var_μ(g) / ∫ g'² ω dμ` bound the optimal weighted constant from below.
#[derive(Debug, Clone)]
pub enum TestFamily {
    /// `sign(x) e^{V(|x|)/2}` on `1 ≤ |x| ≤ R`, linear through the origin
    /// on `[−1, 1]` and brought down linearly to zero over `[R, R + 1]`.
    /// `R` must exceed one.
    TruncatedHalfPotential { radii: Vec<f64> },
    /// `sign(x) min(|x|, a)`.
    OddHats { widths: Vec<f64> },
    /// `sign(x) e^{θ V(min(|x|, R))/2}` for each `θ`, linear on `[−1, 1]`.
    ExpPotential { thetas: Vec<f64>, radius: f64 },
}

impl TestFamily {
    fn members(&self) -> Vec<(String, f64, Member)> {
        match self {
            TestFamily::TruncatedHalfPotential { radii } => radii
                .iter()
                .map(|&r| ("truncated-half-potential".to_string(), r, Member::Truncated { r }))
                .collect(),
            TestFamily::OddHats { widths } => widths
                .iter()
                .map(|&a| ("odd-hat".to_string(), a, Member::Hat { a }))
                .collect(),
            TestFamily::ExpPotential { thetas, radius } => thetas
                .iter()
                .map(|&t| ("exp-potential".to_string(), t, Member::Exp { theta: t, r: *radius }))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Member {
    Truncated { r: f64 },
    Hat { a: f64 },
    Exp { theta: f64, r: f64 },
}

impl Member {
    /// `(g(x), g'(x))` for `x ≥ 0`.
    fn eval(&self, m: &Measure1D, x: f64) -> (f64, f64) {
        match *self {
            Member::Truncated { r } => {
                if x < 1.0 {
                    let top = (0.5 * m.potential(1.0)).exp();
                    (top * x, top)
                } else if x <= r {
                    let g = (0.5 * m.potential(x)).exp();
                    (g, 0.5 * m.potential_derivative(x) * g)
                } else if x <= r + 1.0 {
                    let top = (0.5 * m.potential(r)).exp();
                    (top * (r + 1.0 - x), -top)
                } else {
                    (0.0, 0.0)
                }
            }
            Member::Hat { a } => {
                if x <= a {
                    (x, 1.0)
                } else {
                    (a, 0.0)
                }
            }
            Member::Exp { theta, r } => {
                if x < 1.0 {
                    let top = (0.5 * theta * m.potential(1.0)).exp();
                    return (top * x, top);
                }
                let y = x.min(r);
                let g = (0.5 * theta * m.potential(y)).exp();
                let d = if x <= r {
                    0.5 * theta * m.potential_derivative(y) * g
                } else {
                    0.0
                };
                (g, d)
            }
        }
    }

    fn breaks(&self) -> Vec<f64> {
        match *self {
            Member::Truncated { r } => vec![1.0, r, r + 1.0],
            Member::Hat { a } => vec![a],
            Member::Exp { r, .. } => vec![1.0, r],
        }
    }

    fn support_end(&self) -> Option<f64> {
        match *self {
            Member::Truncated { r } => Some(r + 1.0),
            _ => None,
        }
    }
}

/// Rayleigh quotient of one member; `None` if its energy vanishes.
fn quotient(m: &Measure1D, w: &Weight, member: &Member) -> Result<Option<f64>> {
    let quad = m.quadrature();
    let var_density = |x: f64| member.eval(m, x).0.powi(2) * m.density(x);
    let energy_density = |x: f64| member.eval(m, x).1.powi(2) * w.value(x) * m.density(x);
    let mut points = vec![0.0];
    points.extend(member.breaks().into_iter().filter(|&b| b > 0.0));
    let mut var = 0.0;
    let mut energy = 0.0;
    for pair in points.windows(2) {
        var += quad.integrate(var_density, pair[0], pair[1])?;
        energy += quad.integrate(energy_density, pair[0], pair[1])?;
    }
    let last = *points.last().unwrap_or(&0.0);
    if member.support_end().is_none() {
        var += quad.integrate_to_infinity(var_density, last)?;
    }
    if !(energy > 0.0) {
        return Ok(None);
    }
    Ok(Some(var / energy))
}

/// `sup_g Var_μ(g) / ∫ g'² ω dμ` over the family: a certified lower bound
/// on the best constant in `Var_μ(g) ≤ C ∫ g'² ω dμ`, reported with the
/// member that achieves it. Odd members have mean zero under the even law,
/// so the variance is `∫ g² dμ`.
pub fn variational_lower_bound(m: &Measure1D, w: &Weight, family: &TestFamily) -> Result<Bound> {
    let mut best: Option<(f64, String)> = None;
    let mut any = false;
    for (name, param, member) in family.members() {
        any = true;
        let legal = match member {
            Member::Truncated { r } => r > 1.0,
            Member::Hat { a } => a > 0.0,
            Member::Exp { theta, r } => theta > 0.0 && r > 1.0,
        };
        if !legal {
            return Err(invalid(format!("illegal {name} parameter {param}")));
        }
        if let Some(q) = quotient(m, w, &member)? {
            if best.as_ref().is_none_or(|(b, _)| q > *b) {
                best = Some((q, format!("{name}({param})")));
            }
        }
    }
    if !any {
        return Err(Error::DegenerateFamily("the family has no members".into()));
    }
    let (value, provenance) = best.ok_or_else(|| Error::DegenerateFamily("every member has zero energy".into()))?;
    Ok(Bound { value, provenance })
}
