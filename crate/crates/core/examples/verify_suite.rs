//! Checks a few emitted inequalities against their witness families, then
//! halves the Muckenhoupt constant to show the check failing.

use tailineq::verify::{emitted_suite, McConfig};

fn main() -> tailineq::Result<()> {
    let mc = McConfig {
        samples: 100_000,
        ..McConfig::default()
    };
    for entry in emitted_suite(&mc)? {
        if !(entry.inequality.id.starts_with("lyapunov-cauchy") || entry.inequality.id.starts_with("muckenhoupt")) {
            continue;
        }
        let r = entry.check()?;
        println!(
            "{:<40} worst ratio {:.4} over {} functions: {:?}",
            r.inequality, r.worst_ratio, r.functions, r.outcome
        );
        if entry.inequality.id.starts_with("muckenhoupt") {
            let halved = entry.scaled(0.5).check()?;
            println!(
                "{:<40} worst ratio {:.4}: {:?}",
                "  halved", halved.worst_ratio, halved.outcome
            );
        }
    }
    Ok(())
}
