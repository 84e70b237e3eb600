use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use tailineq::cli::{exit_code, run, RunConfig};

/// Profiles, duality, Lyapunov certificates, constants, weak rates and
/// inequality verification for heavy-tailed measures.
#[derive(Parser)]
#[command(name = "tailineq", version)]
struct Args {
    /// Run configuration (`key = value` lines).
    config: PathBuf,
    /// Overrides `mc.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides `output.dir` and TAILINEQ_OUTPUT_DIR.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = RunConfig::from_file(&args.config).and_then(|mut config| {
        if let Some(seed) = args.seed {
            config.mc.seed = seed;
        }
        let dir = config.output_dir(args.out.as_deref());
        run(&config, &dir)
    });
    match &result {
        Ok(report) => {
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            println!("outcome: {:?}", report.outcome);
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(exit_code(&result) as u8)
}
