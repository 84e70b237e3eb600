//! Poincaré constants of spherically symmetric heavy-tailed laws via
//! radial transport.

use tailineq::spherical::{
    bobkov_constant, cauchy_bobkov_closed_form, cauchy_bounds, subexp_bounds, testfn_limit, RadialTransport,
    TestFnFamily,
};
use tailineq::{QuadratureSpec, RadialMeasure};

fn main() -> tailineq::Result<()> {
    let quad = QuadratureSpec::default();
    println!(
        "{:>3} {:>12} {:>12} {:>12} {:>12}",
        "n", "lower", "test fns", "Bobkov", "upper"
    );
    for n in [1, 2, 3, 5, 10] {
        let (lo, hi) = cauchy_bounds(n, 2.0)?;
        let rho = RadialTransport::cauchy().pull_back(&RadialMeasure::cauchy(n, 2.0)?);
        let bobkov = bobkov_constant(rho, n, &quad)?.constant;
        let tf = testfn_limit(TestFnFamily::Cauchy, n, 2.0, 1e-3)?;
        println!("{n:>3} {lo:>12.8} {tf:>12.8} {bobkov:>12.8} {hi:>12.8}");
        assert!(bobkov <= cauchy_bobkov_closed_form(n, 2.0)? + 1e-9);
    }
    let (lo, hi) = subexp_bounds(2, 0.5)?;
    println!("sub-exponential n = 2, p = 1/2: [{lo}, {hi}]");
    Ok(())
}
