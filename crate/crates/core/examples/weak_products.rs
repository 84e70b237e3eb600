//! Dimension-dependent weak Cheeger and weak Poincaré rates for products of
//! a Cauchy law.

use tailineq::weak::{
    product_iso_lower, product_iso_upper, product_weak_cheeger, product_weak_poincare_rate, ProductBoundSpec,
};
use tailineq::Measure1D;

fn main() -> tailineq::Result<()> {
    let m = Measure1D::cauchy(2.0)?;
    for n in [1, 3, 10, 100] {
        let spec = ProductBoundSpec::new(&m, n)?;
        let r = product_weak_cheeger(&spec, 1e-3)?;
        println!(
            "n = {n:>3}: beta(1e-3) = {:.4e} + {:.4e} Osc, I(1/2) in [{:.5}, {:.5}], weak Poincare at 1e-3: {:.4e}",
            r.gradient,
            r.oscillation,
            product_iso_lower(&spec, 0.5)?,
            product_iso_upper(&spec, 0.5)?,
            product_weak_poincare_rate(&spec, 1e-3)?,
        );
    }
    Ok(())
}
