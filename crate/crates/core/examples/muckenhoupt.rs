//! Weighted Poincaré constants on the line: Muckenhoupt's criterion against
//! variational lower bounds.

use tailineq::measures::Potential;
use tailineq::weighted::{muckenhoupt_b, variational_lower_bound, TestFamily, Weight};
use tailineq::{Measure1D, QuadratureSpec};

fn main() -> tailineq::Result<()> {
    let quad = QuadratureSpec::default();
    let report = muckenhoupt_b(&Potential::linear(), &Weight::constant(0.0), 0.0, 400, &quad)?;
    println!(
        "exponential law: B = {:.6}, 4B = {:.6}",
        report.b, report.variance_constant
    );

    let m = Measure1D::exponential();
    for family in [
        TestFamily::OddHats {
            widths: (1..=40).map(|k| 0.5 * k as f64).collect(),
        },
        TestFamily::ExpPotential {
            thetas: vec![0.5, 0.9, 0.99],
            radius: 60.0,
        },
    ] {
        let lower = variational_lower_bound(&m, &Weight::constant(1.0), &family)?;
        println!("C >= {:.6} from {}", lower.value, lower.provenance);
    }
    Ok(())
}
