//! Runs a configuration in process, as the `tailineq` binary would.

use tailineq::cli::{exit_code, run, RunConfig};

const CONFIG: &str = "
command = profile
measure.family = subexp
measure.p = 0.5
measure.n = 4
grid.t.min = 1e-3
grid.t.max = 0.5
grid.t.points = 5
";

fn main() -> tailineq::Result<()> {
    let config = RunConfig::parse(CONFIG)?;
    let dir = std::env::temp_dir().join("tailineq-example");
    let result = run(&config, &dir);
    println!("exit status {}", exit_code(&result));
    for file in result?.files {
        println!("{}", std::fs::read_to_string(file)?);
    }
    Ok(())
}
