//! Small numerical kernels shared by the measure, duality and verification
//! modules: grids, bracketing root finders, golden-section maximisation and
//! least-squares fits on log scales.

use crate::error::{Error, Result};

/// `count` points from `lo` to `hi` inclusive, equally spaced.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (count - 1) as f64;
            let mut out: Vec<f64> = (0..count).map(|i| lo + step * i as f64).collect();
            out[count - 1] = hi;
            out
        }
    }
}

/// `count` points from `lo` to `hi` inclusive, equally spaced in `ln`.
/// Both ends must be positive.
pub fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    debug_assert!(lo > 0.0 && hi > 0.0);
    let mut out: Vec<f64> = linspace(lo.ln(), hi.ln(), count).into_iter().map(f64::exp).collect();
    if let Some(first) = out.first_mut() {
        *first = lo;
    }
    if let Some(last) = out.last_mut() {
        *last = hi;
    }
    out
}

/// Bisection for an increasing or decreasing `f` with a sign change on
/// `[lo, hi]`. Stops when the bracket is below `xtol` (absolute) or
/// `1e-15` relative to the bracket midpoint.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::BracketFailure { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= xtol.max(1e-15 * mid.abs()) {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Grows `[0, hi]` geometrically (factor 2, starting at `hi = 1`) until
/// `pred(hi)` holds; returns the first such `hi`.
pub fn grow_bracket<P: Fn(f64) -> bool>(pred: P, limit: f64) -> Result<f64> {
    let mut hi = 1.0;
    while hi <= limit {
        if pred(hi) {
            return Ok(hi);
        }
        hi *= 2.0;
    }
    Err(Error::BracketFailure { lo: 0.0, hi })
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximiser of a unimodal `f` on `[a, b]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= xtol.max(1e-15 * (a.abs() + b.abs())) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Golden-section search for a minimiser of a unimodal `f` on `[a, b]`.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, xtol: f64) -> (f64, f64) {
    let (x, v) = golden_max(|x| -f(x), a, b, xtol);
    (x, -v)
}

/// Supremum of `f` over a sorted grid, refined by golden-section search on
/// the two cells adjacent to the grid argmax. Non-finite values are skipped.
pub fn refined_grid_sup<F: Fn(f64) -> f64>(f: F, grid: &[f64]) -> Option<(f64, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &x) in grid.iter().enumerate() {
        let v = f(x);
        if !v.is_finite() {
            continue;
        }
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    let (i, v) = best?;
    let lo = grid[i.saturating_sub(1)];
    let hi = grid[(i + 1).min(grid.len() - 1)];
    let mut out = (grid[i], v);
    if hi > lo {
        let (x, fx) = golden_max(&f, lo, hi, 1e-14 * hi.abs().max(1e-300));
        if fx.is_finite() && fx > out.1 {
            out = (x, fx);
        }
    }
    Some(out)
}

/// Ordinary least squares `y = intercept + slope * x`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

/// Growth exponent of `y` against `x` from a least-squares fit in log-log
/// coordinates. All values must be positive.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    linear_fit(&lx, &ly).1
}

/// Central difference with step `max(1e-6, 1e-6 * |x|)`, falling back to a
/// one-sided difference when `x - h` would leave `[floor, ∞)`.
pub fn derivative<F: Fn(f64) -> f64>(f: F, x: f64, floor: f64) -> f64 {
    let h = (1e-6 * x.abs()).max(1e-6);
    if x - h < floor {
        (f(x + h) - f(x)) / h
    } else {
        (f(x + h) - f(x - h)) / (2.0 * h)
    }
}

/// Richardson extrapolation for an `O(h)` error with step ratio `ratio`:
/// `coarse` was computed at step `h`, `fine` at `h / ratio`.
pub fn richardson_linear(coarse: f64, fine: f64, ratio: f64) -> f64 {
    (ratio * fine - coarse) / (ratio - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_hit_their_endpoints() {
        let g = logspace(1e-4, 0.5, 37);
        assert_eq!(g[0], 1e-4);
        assert_eq!(*g.last().unwrap(), 0.5);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(linspace(0.0, 1.0, 5), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn bisect_finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        assert!(matches!(
            bisect(|x| x * x + 1.0, 0.0, 2.0, 1e-12),
            Err(Error::BracketFailure { .. })
        ));
    }

    #[test]
    fn golden_section_on_parabola() {
        let (x, v) = golden_max(|x| -(x - 0.3) * (x - 0.3) + 2.0, 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn loglog_slope_of_power() {
        let xs = logspace(1.0, 100.0, 20);
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(1.7)).collect();
        assert!((loglog_slope(&xs, &ys) - 1.7).abs() < 1e-12);
    }

    #[test]
    fn richardson_removes_linear_term() {
        let q = |a: f64| 2.0 + 5.0 * a;
        assert!((richardson_linear(q(1e-2), q(1e-3), 10.0) - 2.0).abs() < 1e-12);
    }
}
