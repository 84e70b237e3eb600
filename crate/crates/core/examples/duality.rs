//! Weak Cheeger rates from a profile, and the profile recovered from the rate.

use tailineq::duality::{profile_from_beta, RateFunction};
use tailineq::isoperimetry::{iso_i_even, ProfileFunction};
use tailineq::Measure1D;

fn main() -> tailineq::Result<()> {
    let m = Measure1D::cauchy(1.0)?;
    let beta = RateFunction::from_profile(&ProfileFunction::i(&m));
    for s in [0.01, 0.05, 0.1, 0.2, 0.4] {
        println!("beta({s}) = {:.6}", beta.value(s)?);
    }
    for t in [0.01, 0.1, 0.3, 0.5] {
        let back = profile_from_beta(&beta, t)?;
        println!("t = {t}: I = {:.8}, from beta = {back:.8}", iso_i_even(&m, t)?);
    }
    Ok(())
}
