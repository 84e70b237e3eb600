//! Isoperimetric profiles of one-dimensional heavy-tailed laws.

use tailineq::isoperimetry::{dhr_check, iso_i_even, iso_j, phi_asymptotic_ratio};
use tailineq::numeric::logspace;
use tailineq::Measure1D;

fn main() -> tailineq::Result<()> {
    let cauchy = Measure1D::cauchy(2.0)?;
    println!("{:>10} {:>14} {:>14} {:>14}", "t", "J", "I", "formula");
    for t in logspace(1e-4, 0.5, 8) {
        let formula = 2.0 * 2f64.sqrt() * t.powf(1.5);
        println!(
            "{t:>10.3e} {:>14.6e} {:>14.6e} {formula:>14.6e}",
            iso_j(&cauchy, t)?,
            iso_i_even(&cauchy, t)?
        );
    }

    let grid: Vec<f64> = (0..=200).map(|k| 0.1 * k as f64).collect();
    println!("Cauchy hazard rate decreasing: {}", dhr_check(&cauchy, &grid)?.pass);

    // J(t) against t Φ'(Φ⁻¹(log 1/t)) for e^{-√|x|}
    let subexp = Measure1D::subexp(0.5)?;
    for t in [1e-4, 1e-6, 1e-8] {
        println!("ratio at t = {t:e}: {:.4}", phi_asymptotic_ratio(&subexp, t)?);
    }
    Ok(())
}
