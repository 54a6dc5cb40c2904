use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pointdiv::bounds::{BoundsReport, DegreeProfile};
use pointdiv::harness::{fuzz_campaign, parse_spec, recheck, run_experiment_with, FuzzConfig, Report, RunOptions};
use pointdiv::poly::Mode;

#[derive(Parser)]
#[command(name = "pointdiv", version, about = "Point-count divisibility experiments over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline on a JSON spec and emit a report.
    Run {
        spec: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the spec's evaluation budget.
        #[arg(long)]
        budget: Option<u64>,
        /// Override the spec's nu_max.
        #[arg(long)]
        nu_max: Option<u32>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Seeded random divisibility and identity checks.
    Fuzz {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        instances: usize,
        /// Check against mu + 1; the run succeeds only if failures appear.
        #[arg(long)]
        mutate: bool,
        /// Homogeneous systems: projective complements and the cone identity.
        #[arg(long)]
        projective: bool,
        /// Directory for the reproducer spec of a failing instance.
        #[arg(long, default_value = ".")]
        repro_dir: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute every verdict of a report from its witnesses.
    Recheck { report: PathBuf },
    /// Print mu, lambda, mu_j and kappa for a degree profile.
    Bounds {
        #[arg(long)]
        n: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        degrees: Vec<u32>,
        #[arg(long)]
        json: bool,
    },
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), ExitCode> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| usage_error(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { spec, out, budget, nu_max, workers } => {
            let text = match std::fs::read(&spec) {
                Ok(t) => t,
                Err(e) => return usage_error(format!("{}: {e}", spec.display())),
            };
            let mut parsed = match parse_spec(&text) {
                Ok(s) => s,
                Err(e) => return usage_error(e),
            };
            if let Some(b) = budget {
                parsed.budget = b;
            }
            if let Some(n) = nu_max {
                parsed.nu_max = n;
            }
            if let Err(e) = parsed.build_system_as(Mode::Affine) {
                return usage_error(e);
            }
            let report = run_experiment_with(&parsed, &RunOptions { workers });
            if let Err(c) = emit(&report.to_json(), out.as_ref()) {
                return c;
            }
            eprintln!("overall: {:?}", report.overall);
            code(report.exit_code())
        }
        Command::Fuzz { seed, instances, mutate, projective, repro_dir, out } => {
            let mut cfg = FuzzConfig::new(seed, instances);
            cfg.mutate = mutate;
            cfg.mode = if projective { Mode::Projective } else { Mode::Affine };
            cfg.reproducer_dir = Some(repro_dir);
            cfg.workers = std::thread::available_parallelism().map_or(1, |n| n.get());
            let summary = fuzz_campaign(&cfg);
            if let Err(c) = emit(&summary.to_json(), out.as_ref()) {
                return c;
            }
            eprintln!(
                "instances: {}, divisibility failures: {}, identity failures: {}",
                summary.instances_run, summary.divisibility_failures, summary.identity_failures
            );
            if mutate && summary.divisibility_failures == 0 {
                eprintln!("mutation run found no failures: the checker is vacuous on this seed");
                return ExitCode::from(1);
            }
            code(summary.exit_code())
        }
        Command::Recheck { report } => {
            let text = match std::fs::read_to_string(&report) {
                Ok(t) => t,
                Err(e) => return usage_error(format!("{}: {e}", report.display())),
            };
            let parsed = match Report::from_json(&text) {
                Ok(r) => r,
                Err(e) => return usage_error(format!("{}: {e}", report.display())),
            };
            let summary = recheck(&parsed);
            println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
            code(summary.exit_code())
        }
        Command::Bounds { n, degrees, json } => {
            let profile = match DegreeProfile::new(n, degrees) {
                Ok(p) => p,
                Err(e) => return usage_error(e),
            };
            let b = BoundsReport::compute(&profile);
            if json {
                println!("{}", serde_json::to_string_pretty(&b).expect("bounds serialize"));
            } else {
                let mu_j: Vec<String> = b.mu_j.iter().map(u32::to_string).collect();
                println!("n = {}, degrees = {:?}", b.n, b.degrees);
                println!("mu = {}", b.mu);
                println!("lambda = {}", b.lambda);
                println!("mu_j (j = 0..{}) = [{}]", b.n, mu_j.join(", "));
                println!("kappa = {}", b.kappa);
            }
            ExitCode::SUCCESS
        }
    }
}
