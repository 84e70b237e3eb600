//! Drift certificates for Cauchy and sub-exponential laws and the weights
//! they induce.

use tailineq::lyapunov::{
    asymptotic_range, cauchy_certificate, derive_weight, subexp_certificate, verify_drift, WeightKind,
};
use tailineq::numeric::linspace;

fn main() -> tailineq::Result<()> {
    let grid = linspace(0.0, 100.0, 2001);
    for cert in [cauchy_certificate(3, 2.0)?, subexp_certificate(2, 0.5)?] {
        let report = verify_drift(&cert, &grid)?;
        let summary = cert.summary();
        println!("{} W = {}, phi = {}", summary.diffusion, summary.w, summary.phi);
        println!(
            "  b = {:.4}, R = {}, drift holds: {}",
            summary.b, summary.radius, report.pass
        );
        let (lo, hi) = asymptotic_range(&cert);
        for kind in WeightKind::ALL {
            let w = derive_weight(&cert, kind, None)?;
            println!(
                "  {:<20} {:<22} growth {:+.3}",
                format!("{kind:?}"),
                w.formula,
                w.growth_exponent(lo, hi)
            );
        }
    }
    Ok(())
}
